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

#include <cmath>
#include <vector>

#include "sinebeta/rigidity.hpp"

using namespace sinebeta;

TEST_CASE("count recovery at n = 4096, beta = 2") {
  const double R = 2.0;
  const std::vector<Interval> B = {{0.0, 1.0}};
  const TestSequenceSpec seq = make_fp_sequence(R, 4);
  const std::size_t replicas = 200;
  const RecoveryResult r = recovery_experiment(4096, BetaParam(2.0), R, B, seq, replicas, 424242);
  REQUIRE(r.summaries.size() == 5);

  std::size_t window_hits = 0;
  std::size_t set_hits = 0;
  for (const CountRecoveryRecord& rec : r.records) {
    CHECK(std::abs(rec.telescoping_residual) < 1e-10);
    if (rec.p != 4) continue;
    if (std::abs(rec.window_estimate - static_cast<double>(rec.window_count)) < 0.5) ++window_hits;
    if (recovers(rec.estimate, rec.true_count)) ++set_hits;
  }
  MESSAGE("window hits " << window_hits << ", set hits " << set_hits << ", slope " << r.log2_slope);
  CHECK(window_hits >= 180);
  CHECK(set_hits >= 180);
  for (std::size_t p = 1; p < r.summaries.size(); ++p) {
    CHECK(r.summaries[p].median_abs_error <= r.summaries[p - 1].median_abs_error);
  }
  CHECK(r.log2_slope >= -1.5);
  CHECK(r.log2_slope <= -0.5);
  // Second moment of the full statistic times 4^p; reported only.
  for (const RecoverySummary& s : r.summaries) {
    MESSAGE("p=" << s.p << " median " << s.median_abs_error << " exact " << s.exact_fraction << " L2*4^p "
                 << s.l2_constant);
    CHECK(std::isfinite(s.l2_constant));
  }
}
