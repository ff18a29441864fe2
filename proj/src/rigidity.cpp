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


#include "sinebeta/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sinebeta/errors.hpp"
#include "sinebeta/linstat.hpp"
#include "sinebeta/parallel.hpp"

namespace sinebeta {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_set(const std::vector<Interval>& B, double R) {
  for (const Interval& I : B) {
    if (!(I.lo <= I.hi) || I.lo < -R || I.hi > R) {
      throw ParameterError("set intervals must be ordered and lie inside [-R, R]");
    }
  }
}

}  // namespace

TestSequenceSpec make_fp_sequence(double R, int p_max, const SequenceOptions& options) {
  if (!(R > 0.0)) throw ParameterError("make_fp_sequence requires R > 0");
  if (p_max < 0 || p_max > options.p_cap) {
    throw ParameterError("make_fp_sequence requires 0 <= p_max <= " + std::to_string(options.p_cap) +
                         ", got " + std::to_string(p_max));
  }
  TestSequenceSpec spec;
  spec.R = R;
  spec.p_max = p_max;
  ScaleMixture reduced = ScaleMixture::base();
  for (int p = 0; p <= p_max; ++p) {
    const double eps = std::ldexp(1.0, -p);
    ScaleMixture fp;
    FlattenReport report;
    try {
      reduced = reduce_norm(reduced, eps, options.reduction);
      fp = flatten(reduced, R, eps, &report);
    } catch (const ResourceError& e) {
      throw ResourceError("make_fp_sequence: p = " + std::to_string(p) + " failed (" + e.what() +
                          "); largest achievable p is " + std::to_string(p - 1));
    }
    const double norm = h_half_norm(fp);
    const double sup = certified_flatness(fp, R, 0.25 * eps);
    if (norm > eps || sup > eps) {
      throw ConsistencyError("make_fp_sequence: f_" + std::to_string(p) + " fails its certified bounds");
    }
    spec.mixtures.push_back(std::move(fp));
    spec.norms.push_back(norm);
    spec.certified_sups.push_back(sup);
    spec.lambdas.push_back(report.lambda);
  }
  return spec;
}

LineConfiguration LineConfiguration::periodic(const RenormalizedConfiguration& config) {
  return {config.points, config.points, config.period};
}

OutsideConfiguration::OutsideConfiguration(const LineConfiguration& config, double R)
    : R_(R), period_(config.period), generator_(config.generator) {
  if (!(R > 0.0)) throw ParameterError("window radius must be positive");
  if (!(R < 0.5 * config.period)) {
    throw ParameterError("window radius must satisfy R < n/2 so the window fits in one period");
  }
  for (double x : config.central) {
    if (std::abs(x) > R) outside_.push_back(x);
  }
}

const std::vector<Complex>& OutsideConfiguration::generator_sums(long kmax) const {
  if (static_cast<long>(sums_.size()) < kmax) {
    UnitSpectrum phases;
    phases.angles.reserve(generator_.size());
    for (double x : generator_) phases.angles.push_back(kTwoPi * x / period_);
    sums_ = trace_powers(phases, kmax);
  }
  return sums_;
}

double estimate_window_count(const OutsideConfiguration& outside, const ScaleMixture& mix) {
  if (mix.empty()) return 0.0;
  const double P = outside.period();
  const long kmax = std::min(static_cast<long>(std::floor(0.5 * P)),
                             static_cast<long>(std::ceil(0.5 * P / mix.min_scale())));
  const std::vector<Complex>& sums = outside.generator_sums(kmax);
  double folded = 0.0;
  for (long k = 1; k <= kmax; ++k) folded += eval_freq(mix, k / P) * sums[static_cast<std::size_t>(k - 1)].real();
  folded *= 2.0 / P;
  const TimeEvaluator f(mix);
  double generator_sum = 0.0;
  for (double x : outside.generator()) generator_sum += f(x);
  double outside_sum = 0.0;
  for (double x : outside.outside()) outside_sum += f(x);
  const double missing = 1.0 - static_cast<double>(outside.generator().size()) / P;
  const double mean_term = missing == 0.0 ? 0.0 : integral(mix) * missing;
  return mean_term + (generator_sum - folded) - outside_sum;
}

double estimate_window_count(const RenormalizedConfiguration& config, double R, const ScaleMixture& mix) {
  return estimate_window_count(OutsideConfiguration(LineConfiguration::periodic(config), R), mix);
}

std::size_t count_in(const std::vector<double>& points, const std::vector<Interval>& set) {
  std::size_t count = 0;
  for (double x : points) {
    if (std::any_of(set.begin(), set.end(), [x](const Interval& I) { return x >= I.lo && x <= I.hi; })) ++count;
  }
  return count;
}

std::size_t count_in_window(const std::vector<double>& points, double R) {
  return count_in(points, {{-R, R}});
}

double estimate_set_count(const LineConfiguration& config, const std::vector<Interval>& B, double R,
                          const ScaleMixture& mix) {
  check_set(B, R);
  std::size_t rest = 0;
  for (double x : config.central) {
    if (std::abs(x) <= R && count_in({x}, B) == 0) ++rest;
  }
  return estimate_window_count(OutsideConfiguration(config, R), mix) - static_cast<double>(rest);
}

double TelescopingTerms::residual() const {
  return full_statistic - inside_defect + outside_estimate - static_cast<double>(window_count);
}

TelescopingTerms telescoping_terms(const UnitSpectrum& spectrum, double R, const ScaleMixture& mix) {
  const RenormalizedConfiguration config = renormalize(spectrum);
  TelescopingTerms t;
  t.full_statistic = circle_linear_statistic(spectrum, g_from_f(mix, spectrum.size())).real();
  const TimeEvaluator f(mix);
  for (double x : config.points) {
    if (std::abs(x) <= R) {
      t.inside_defect += f(x) - 1.0;
      ++t.window_count;
    }
  }
  t.outside_estimate = estimate_window_count(config, R, mix);
  return t;
}

bool recovers(double estimate, std::size_t truth) {
  const double frac = estimate - std::floor(estimate);
  if (frac == 0.5) return false;
  return std::round(estimate) == static_cast<double>(truth);
}

RecoveryResult recovery_experiment(std::size_t n, BetaParam beta, double R, const std::vector<Interval>& B,
                                   const TestSequenceSpec& sequence, std::size_t replicas,
                                   std::uint64_t seed) {
  if (replicas < 1) throw ParameterError("recovery_experiment requires replicas >= 1");
  if (!(R < 0.5 * static_cast<double>(n))) throw ParameterError("window radius must satisfy R < n/2");
  check_set(B, R);
  const int p_count = static_cast<int>(sequence.mixtures.size());
  std::vector<CircleFourierFunction> folded;
  for (const ScaleMixture& mix : sequence.mixtures) folded.push_back(g_from_f(mix, n));

  const auto rows = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t replica) {
    const UnitSpectrum spectrum = sample_cbe(n, beta, rng);
    const RenormalizedConfiguration config = renormalize(spectrum);
    const LineConfiguration line = LineConfiguration::periodic(config);
    const OutsideConfiguration outside(line, R);
    const std::size_t window = count_in_window(config.points, R);
    std::size_t in_set = 0;
    for (double x : config.points) {
      if (std::abs(x) <= R && count_in({x}, B) > 0) ++in_set;
    }
    std::vector<CountRecoveryRecord> out;
    for (int p = 0; p < p_count; ++p) {
      const ScaleMixture& mix = sequence.mixtures[static_cast<std::size_t>(p)];
      CountRecoveryRecord rec;
      rec.p = p;
      rec.window_estimate = estimate_window_count(outside, mix);
      rec.window_count = window;
      rec.true_count = in_set;
      rec.estimate = rec.window_estimate - static_cast<double>(window - in_set);
      rec.window_n = n;
      rec.seed = seed;
      rec.replica = replica;
      const TimeEvaluator f(mix);
      double inside_defect = 0.0;
      for (double x : config.points) {
        if (std::abs(x) <= R) inside_defect += f(x) - 1.0;
      }
      rec.full_statistic = circle_linear_statistic(spectrum, folded[static_cast<std::size_t>(p)]).real();
      rec.telescoping_residual =
          rec.full_statistic - inside_defect + rec.window_estimate - static_cast<double>(window);
      out.push_back(rec);
    }
    return out;
  });

  RecoveryResult result;
  for (const auto& row : rows) result.records.insert(result.records.end(), row.begin(), row.end());
  std::vector<double> xs;
  std::vector<double> ys;
  for (int p = 0; p < p_count; ++p) {
    std::vector<double> errors;
    std::vector<double> squares;
    RecoverySummary s;
    s.p = p;
    std::size_t exact = 0;
    for (const auto& row : rows) {
      const CountRecoveryRecord& rec = row[static_cast<std::size_t>(p)];
      errors.push_back(std::abs(rec.estimate - static_cast<double>(rec.true_count)));
      squares.push_back(rec.full_statistic * rec.full_statistic);
      if (recovers(rec.estimate, rec.true_count)) ++exact;
      s.max_telescoping_residual = std::max(s.max_telescoping_residual, std::abs(rec.telescoping_residual));
    }
    std::sort(errors.begin(), errors.end());
    const std::size_t m = errors.size();
    s.median_abs_error = m % 2 == 1 ? errors[m / 2] : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
    s.exact_fraction = static_cast<double>(exact) / static_cast<double>(m);
    if (m >= 2) {
      s.l2_channel = summarize(squares, seed);
      s.l2_constant = s.l2_channel.value * std::ldexp(1.0, 2 * p);
    }
    if (p >= 1 && s.median_abs_error > 0.0) {
      xs.push_back(p);
      ys.push_back(std::log2(s.median_abs_error));
    }
    result.summaries.push_back(s);
  }
  if (xs.size() >= 2) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    result.log2_slope = sxy / sxx;
  }
  return result;
}

RecoveryResult recovery_experiment(std::size_t n, BetaParam beta, double R, const std::vector<Interval>& B,
                                   int p_max, std::size_t replicas, std::uint64_t seed) {
  return recovery_experiment(n, beta, R, B, make_fp_sequence(R, p_max), replicas, seed);
}

}  // namespace sinebeta
