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

#ifndef SINEBETA_RNG_HPP
#define SINEBETA_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace sinebeta {

/// Random state for one Monte Carlo replica.
///
/// Every replica owns an independent substream keyed by the pair
/// (master seed, replica index), so results do not depend on how replicas
/// are scheduled across threads. Uniforms are built from the top 53 bits of
/// the engine output, which keeps the stream identical across standard
/// library implementations.
class RandomState {
 public:
  RandomState(std::uint64_t master_seed, std::uint64_t replica);

  /// Uniform on [0, 1).
  double uniform();

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t replica() const { return replica_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t replica_;
  std::mt19937_64 engine_;
};

/// Identifier written into result metadata.
inline constexpr std::string_view kRngScheme =
    "mt19937_64/seed_seq(splitmix64(seed),splitmix64(replica))/53bit-uniform";

}  // namespace sinebeta

#endif  // SINEBETA_RNG_HPP
