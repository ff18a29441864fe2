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


// Acceptance run: one PASS/FAIL line per criterion. Pass criterion names
// (C1 ... C7) as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sinebeta/bandlimited.hpp"
#include "sinebeta/cbe.hpp"
#include "sinebeta/linstat.hpp"
#include "sinebeta/parallel.hpp"
#include "sinebeta/rigidity.hpp"
#include "sinebeta/trace_stats.hpp"

using namespace sinebeta;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += " [fail: " + what + "]";
    }
  }
};

std::string f6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double trace_sq(std::span<const double> theta, long k) {
  std::complex<double> s;
  for (double t : theta) s += std::polar(1.0, static_cast<double>(k) * t);
  return std::norm(s);
}

std::vector<ScaleMixture> four_mixtures() {
  return {ScaleMixture::base(), ScaleMixture({{0.5, 1.0}, {0.5, 8.0}}), dilate(ScaleMixture::base(), 3.0),
          ScaleMixture({{0.3, 1.5}, {0.3, 5.0}, {0.4, 40.0}})};
}

Check c1() {
  Check c;
  for (std::size_t n : {2, 3}) {
    std::set<long> ks = {1, static_cast<long>(n / 2)};
    for (double beta : {1.0, 2.0, 4.0}) {
      for (long k : ks) {
        QuadratureOptions opts;
        opts.rotation_invariant = true;
        const double oracle = cbe_quadrature_oracle(
            n, BetaParam(beta), [k](std::span<const double> t) { return trace_sq(t, k); }, opts);
        const MomentEstimate mc = mc_trace_second_moment(n, BetaParam(beta), k, 100000, 1001 + 10 * n + k);
        const double z = (mc.value - oracle) / mc.std_error;
        c.detail += " n=" + std::to_string(n) + ",b=" + f6(beta) + ",k=" + std::to_string(k) + ":z=" + f6(z);
        c.expect(std::abs(z) < 3.0, "MC vs oracle");
      }
    }
    for (long k = 1; k <= 4; ++k) {
      QuadratureOptions opts;
      opts.rotation_invariant = true;
      const double oracle = cbe_quadrature_oracle(
          n, BetaParam(2.0), [k](std::span<const double> t) { return trace_sq(t, k); }, opts);
      c.expect(std::abs(oracle - static_cast<double>(std::min<long>(k, n))) < 1e-6, "oracle min(k,n)");
    }
  }
  return c;
}

Check c2() {
  Check c;
  const std::vector<long> ks = {1, 2, 4, 8, 16, 32, 64, 128};
  for (double beta : {1.0, 2.0, 4.0}) {
    const auto est = mc_trace_second_moments(256, BetaParam(beta), ks, 2000, 2002);
    double lo = 1e300;
    double hi = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double ratio = est[i].value / static_cast<double>(ks[i]);
      if (ks[i] >= 8) {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      if (beta == 2.0) {
        c.expect(std::abs(est[i].value - static_cast<double>(ks[i])) < 3.0 * est[i].std_error,
                 "beta=2 k=" + std::to_string(ks[i]));
      }
    }
    c.detail += " b=" + f6(beta) + ":ratio[" + f6(lo) + "," + f6(hi) + "] max/min=" + f6(hi / lo);
    c.expect(hi / lo < 2.0, "max/min at beta=" + f6(beta));
  }
  return c;
}

Check c3() {
  Check c;
  const std::size_t n = 32;
  const std::vector<std::pair<long, long>> pairs = {{1, 2}, {1, 3}, {2, 3}};
  CircleFourierFunction a;
  a.coeffs = {{1, 0.8}, {-1, 0.8}, {2, {0.3, 0.4}}, {-2, {0.3, -0.4}}, {3, -0.5}, {-3, -0.5}};
  CircleFourierFunction b;
  b.coeffs = {{1, {0.0, 1.0}}, {-1, {0.0, -1.0}}, {4, 0.25}, {-4, 0.25}, {7, {0.6, -0.2}}, {-7, {0.6, 0.2}}};
  double worst = 0.0;
  for (double beta : {1.0, 2.0, 4.0}) {
    for (const auto& [k, k2] : pairs) {
      const ComplexMomentEstimate m = mc_trace_cross_moment(n, BetaParam(beta), k, k2, 20000, 3003 + 7 * k + k2);
      const double zr = m.real.value / m.real.std_error;
      const double zi = m.imag.value / m.imag.std_error;
      worst = std::max({worst, std::abs(zr), std::abs(zi)});
      c.expect(std::abs(zr) < 3.0 && std::abs(zi) < 3.0,
               "cross b=" + f6(beta) + " k=" + std::to_string(k) + "," + std::to_string(k2));
    }
    int idx = 0;
    for (const CircleFourierFunction* f : {&a, &b}) {
      const MomentEstimate d = mc_variance_decomposition(n, BetaParam(beta), *f, 20000, 3103 + idx++);
      const double z = d.value / d.std_error;
      worst = std::max(worst, std::abs(z));
      c.expect(std::abs(z) < 3.0, "decomposition b=" + f6(beta));
    }
  }
  c.detail = " max|z|=" + f6(worst) + c.detail;
  return c;
}

Check c4() {
  Check c;
  const auto mixes = four_mixtures();
  double worst = 0.0;
  for (std::size_t n : {64, 512}) {
    const auto diffs = map_replicas(100, 4004 + n, [&](RandomState& rng, std::size_t replica) {
      const double beta = replica % 3 == 0 ? 1.0 : (replica % 3 == 1 ? 2.0 : 4.0);
      const UnitSpectrum s = sample_cbe(n, BetaParam(beta), rng);
      const RenormalizedConfiguration config = renormalize(s);
      double d = 0.0;
      for (const ScaleMixture& mix : mixes) {
        const double line = line_linear_statistic(config, mix);
        const double circle = circle_linear_statistic(s, g_from_f(mix, n)).real();
        d = std::max(d, std::abs(line - circle));
      }
      return d;
    });
    const double m = *std::max_element(diffs.begin(), diffs.end());
    c.detail += " n=" + std::to_string(n) + ":max|diff|=" + f6(m);
    worst = std::max(worst, m);
  }
  c.expect(worst < 1e-6, "folding identity");
  return c;
}

Check c5() {
  Check c;
  const auto mixes = four_mixtures();
  {
    const auto est = mc_line_variances(512, BetaParam(2.0), mixes, 2000, 5005);
    c.detail += " b=2,n=512 z:";
    for (std::size_t i = 0; i < mixes.size(); ++i) {
      const double riemann = riemann_functional(mixes[i], 512).value;
      const double z = (est[i].value - riemann) / est[i].std_error;
      c.detail += " " + f6(z);
      c.expect(std::abs(z) < 3.0, "beta=2 Riemann match, mixture " + std::to_string(i));
    }
  }
  for (double beta : {1.0, 4.0}) {
    std::vector<double> ratios;
    for (const auto& [n, replicas] : std::vector<std::pair<std::size_t, std::size_t>>{{128, 1500}, {512, 1000},
                                                                                       {2048, 400}}) {
      const auto est = mc_line_variances(n, BetaParam(beta), mixes, replicas, 5105 + n);
      for (std::size_t i = 0; i < mixes.size(); ++i) {
        ratios.push_back(est[i].value / riemann_functional(mixes[i], n).value);
      }
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    c.detail += " b=" + f6(beta) + ":mean=" + f6(mean) + " range[" + f6(*lo) + "," + f6(*hi) + "]";
    c.expect(*lo >= 0.7 * mean && *hi <= 1.3 * mean, "ratio stability at beta=" + f6(beta));
  }
  const ScaleMixture base = ScaleMixture::base();
  const double gap = std::abs(riemann_functional(base, 4096).value / h_half_norm_squared(base) - 1.0);
  c.detail += " riemann gap(4096)=" + f6(gap);
  c.expect(gap < 0.01, "Riemann convergence");
  double last = 1e300;
  for (std::size_t n : {64, 256, 1024, 4096}) {
    const double g = std::abs(riemann_functional(base, n).value - h_half_norm_squared(base));
    c.expect(g <= last, "Riemann gap decreasing");
    last = g;
  }
  return c;
}

Check c6() {
  Check c;
  const double R = 2.0;
  const TestSequenceSpec seq = make_fp_sequence(R, 4);
  c.expect(seq.mixtures.size() == 5, "five mixtures");
  double worst_ratio = 0.0;
  ScaleMixture reduced = ScaleMixture::base();
  std::size_t steps_total = 0;
  for (int p = 0; p <= 4 && p < static_cast<int>(seq.mixtures.size()); ++p) {
    const double eps = std::ldexp(1.0, -p);
    const ScaleMixture& fp = seq.mixtures[p];
    const double norm = h_half_norm(fp);
    const double sup = certified_flatness(fp, R, 0.25 * eps);
    c.detail += " p=" + std::to_string(p) + ":norm=" + f6(norm) + ",sup=" + f6(sup);
    c.expect(norm <= eps, "norm p=" + std::to_string(p));
    c.expect(sup <= eps, "sup p=" + std::to_string(p));

    // Replay the reduction and recompute every step's norm directly.
    std::vector<ReductionStep> steps;
    const ScaleMixture next = reduce_norm(reduced, eps, {}, &steps);
    ScaleMixture replay = reduced;
    for (const ReductionStep& s : steps) {
      const double before = h_half_norm_squared(replay);
      replay = dilate_average(replay, s.L);
      const double after = h_half_norm_squared(replay);
      worst_ratio = std::max(worst_ratio, after / before);
      c.expect(after <= 0.51 * before, "contraction at p=" + std::to_string(p));
      c.expect(s.norm_sq_after <= 0.51 * s.norm_sq_before, "reported contraction");
      ++steps_total;
    }
    c.expect(std::abs(h_half_norm(replay) - h_half_norm(next)) <= 1e-12 * h_half_norm(next), "replay");
    c.expect(std::abs(h_half_norm(next) - norm) < 1e-8, "flattening keeps the norm");
    reduced = next;

    for (double lambda : {2.0, 7.5, 1000.0}) {
      c.expect(std::abs(h_half_norm(dilate(fp, lambda)) - norm) < 1e-8, "dilation invariance");
    }
  }
  c.detail += " steps=" + std::to_string(steps_total) + " worst contraction=" + f6(worst_ratio);
  return c;
}

Check c7() {
  Check c;
  const std::size_t n = 4096;
  const double R = 2.0;
  const std::vector<Interval> B = {{0.0, 1.0}};
  const TestSequenceSpec seq = make_fp_sequence(R, 4);
  const std::size_t replicas = 200;
  for (double beta : {1.0, 2.0, 4.0}) {
    const std::uint64_t seed = 7007 + static_cast<std::uint64_t>(beta);
    const RecoveryResult r = recovery_experiment(n, BetaParam(beta), R, B, seq, replicas, seed);
    double residual = 0.0;
    for (const auto& s : r.summaries) residual = std::max(residual, s.max_telescoping_residual);
    c.expect(residual < 1e-10, "telescoping at beta=" + f6(beta));
    std::string medians;
    for (std::size_t p = 0; p < r.summaries.size(); ++p) {
      medians += (p ? "," : "") + f6(r.summaries[p].median_abs_error);
      if (p > 0) {
        c.expect(r.summaries[p].median_abs_error <= r.summaries[p - 1].median_abs_error,
                 "median non-increasing at beta=" + f6(beta) + " p=" + std::to_string(p));
      }
    }
    const double exact = r.summaries.back().exact_fraction;
    c.expect(exact >= 0.9, "exact recovery at beta=" + f6(beta));

    // Bit-invariance on the first 20 configurations of the same run.
    const auto invariant = map_replicas(20, seed, [&](RandomState& rng, std::size_t) {
      const LineConfiguration line = LineConfiguration::periodic(renormalize(sample_cbe(n, BetaParam(beta), rng)));
      LineConfiguration moved = line;
      for (double& x : moved.central) {
        if (std::abs(x) < R) x = 0.999 * R * std::sin(11.0 * x + 0.3);
      }
      bool same = true;
      for (const ScaleMixture& mix : seq.mixtures) {
        same = same && estimate_window_count(OutsideConfiguration(line, R), mix) ==
                           estimate_window_count(OutsideConfiguration(moved, R), mix);
      }
      return same ? 1 : 0;
    });
    const int same = std::count(invariant.begin(), invariant.end(), 1);
    c.expect(same == 20, "bit-invariance at beta=" + f6(beta));
    c.detail += " b=" + f6(beta) + ":residual=" + f6(residual) + " medians=" + medians + " exact(p=4)=" + f6(exact) +
                " slope=" + f6(r.log2_slope) + " invariant=" + std::to_string(same) + "/20";
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"C1", c1}, {"C2", c2}, {"C3", c3}, {"C4", c4}, {"C5", c5}, {"C6", c6}, {"C7", c7}};
  std::set<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!selected.empty() && !selected.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail += std::string(" [exception: ") + e.what() + "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1fs)%s\n", name.c_str(), c.ok ? "PASS" : "FAIL", secs, c.detail.c_str());
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
