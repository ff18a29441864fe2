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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <set>
#include <vector>

#include "sinebeta/errors.hpp"
#include "sinebeta/parallel.hpp"
#include "sinebeta/rng.hpp"

using sinebeta::RandomState;

TEST_CASE("same key gives the same stream") {
  RandomState a(42, 7);
  RandomState b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("replicas and seeds give distinct streams") {
  std::set<double> firsts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::uint64_t r = 0; r < 20; ++r) firsts.insert(RandomState(seed, r).uniform());
  }
  CHECK(firsts.size() == 400);
}

TEST_CASE("uniforms lie in [0, 1) with mean one half") {
  RandomState rng(1, 0);
  double sum = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / count == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("replica map does not depend on the worker count") {
  auto draw = [](RandomState& rng, std::size_t r) { return rng.uniform() + static_cast<double>(r); };
  setenv("SINEBETA_THREADS", "1", 1);
  const std::vector<double> serial = sinebeta::map_replicas(257, 5, draw);
  setenv("SINEBETA_THREADS", "4", 1);
  const std::vector<double> threaded = sinebeta::map_replicas(257, 5, draw);
  CHECK(serial == threaded);
  CHECK(serial[3] == RandomState(5, 3).uniform() + 3.0);
  unsetenv("SINEBETA_THREADS");
}

TEST_CASE("invalid thread count is rejected") {
  setenv("SINEBETA_THREADS", "zero", 1);
  CHECK_THROWS_AS(sinebeta::worker_count(), sinebeta::ParameterError);
  setenv("SINEBETA_THREADS", "0", 1);
  CHECK_THROWS_AS(sinebeta::worker_count(), sinebeta::ParameterError);
  unsetenv("SINEBETA_THREADS");
}

TEST_CASE("exceptions in a replica propagate") {
  auto fail = [](RandomState&, std::size_t r) -> int {
    if (r == 10) throw sinebeta::ResourceError("boom");
    return 0;
  };
  CHECK_THROWS_AS(sinebeta::map_replicas(50, 1, fail), sinebeta::ResourceError);
}
