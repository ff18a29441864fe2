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

#ifndef SINEBETA_ERRORS_HPP
#define SINEBETA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sinebeta {

/// A precondition on an argument was violated (bad n, beta, k, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation needed more than its configured budget
/// (component cap, dilation cap, periodization cap).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed, e.g. the Pruefer phase lost monotonicity.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sinebeta

#endif  // SINEBETA_ERRORS_HPP
