/**
 * Copyright 2026 The sinebeta Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "sinebeta/parallel.hpp"

#include <cstdlib>
#include <string>

#include "sinebeta/errors.hpp"

namespace sinebeta {

std::size_t worker_count() {
  if (const char* env = std::getenv("SINEBETA_THREADS")) {
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || env[used] != '\0' || value < 1) {
      throw ParameterError("SINEBETA_THREADS must be a positive integer, got '" +
                           std::string(env) + "'");
    }
    return static_cast<std::size_t>(value);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace sinebeta
