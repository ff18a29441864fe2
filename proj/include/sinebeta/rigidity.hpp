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


#ifndef SINEBETA_RIGIDITY_HPP
#define SINEBETA_RIGIDITY_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sinebeta/bandlimited.hpp"
#include "sinebeta/cbe.hpp"
#include "sinebeta/trace_stats.hpp"

namespace sinebeta {

/// f_0..f_{p_max} with h_half_norm(f_p) <= 2^-p and certified
/// sup_{|t| <= R} |f_p(t) - 1| <= 2^-p.
struct TestSequenceSpec {
  double R = 0.0;
  int p_max = 0;
  std::vector<ScaleMixture> mixtures;
  std::vector<double> norms;
  std::vector<double> certified_sups;
  std::vector<double> lambdas;
};

struct SequenceOptions {
  int p_cap = 5;
  ReductionOptions reduction;
};

/// Throws ParameterError for R <= 0 or p_max outside [0, p_cap], and
/// ResourceError naming the largest achievable p when a step fails.
TestSequenceSpec make_fp_sequence(double R, int p_max, const SequenceOptions& options = {});

/// A configuration on the line: the window copy `central`, plus the images
/// x + m * period (m != 0) of every generator point.
struct LineConfiguration {
  std::vector<double> central;
  std::vector<double> generator;
  double period = 0.0;

  /// The periodic extension of a renormalized configuration.
  static LineConfiguration periodic(const RenormalizedConfiguration& config);
};

/// The part of a line configuration outside (-R, R).
class OutsideConfiguration {
 public:
  OutsideConfiguration(const LineConfiguration& config, double R);

  double R() const { return R_; }
  double period() const { return period_; }
  /// Window points with |x| > R.
  const std::vector<double>& outside() const { return outside_; }
  const std::vector<double>& generator() const { return generator_; }
  /// sum over generator points of exp(2 pi i k x / period), k = 1..kmax.
  /// Cached; not safe for concurrent calls.
  const std::vector<Complex>& generator_sums(long kmax) const;

 private:
  double R_;
  double period_;
  std::vector<double> outside_;
  std::vector<double> generator_;
  mutable std::vector<Complex> sums_;
};

/// int f - sum of f over the points outside (-R, R), with the image sums
/// evaluated exactly through Poisson summation:
/// sum_{m != 0} f(x + m P) = (1/P) f^(0) + F(x) - f(x),
/// F(x) = (2/P) sum_{k >= 1} f^(k/P) cos(2 pi k x / P).
double estimate_window_count(const OutsideConfiguration& outside, const ScaleMixture& mix);
double estimate_window_count(const RenormalizedConfiguration& config, double R, const ScaleMixture& mix);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Points of the window copy in the closed set.
std::size_t count_in(const std::vector<double>& points, const std::vector<Interval>& set);
std::size_t count_in_window(const std::vector<double>& points, double R);

/// estimate_window_count minus the exact count of points in [-R, R] \ B.
double estimate_set_count(const LineConfiguration& config, const std::vector<Interval>& B, double R,
                          const ScaleMixture& mix);

struct TelescopingTerms {
  /// sum over the whole configuration of f minus int f.
  double full_statistic = 0.0;
  /// sum over |x| <= R of (f(x) - 1).
  double inside_defect = 0.0;
  /// estimate_window_count.
  double outside_estimate = 0.0;
  std::size_t window_count = 0;

  double residual() const;
};

/// The three-term split N_[-R,R] = full - inside + outside for a periodic
/// configuration, with the full statistic taken through the circle route.
TelescopingTerms telescoping_terms(const UnitSpectrum& spectrum, double R, const ScaleMixture& mix);

struct CountRecoveryRecord {
  int p = 0;
  double estimate = 0.0;
  std::size_t true_count = 0;
  double window_estimate = 0.0;
  std::size_t window_count = 0;
  std::size_t window_n = 0;
  std::uint64_t seed = 0;
  std::size_t replica = 0;
  double full_statistic = 0.0;
  double telescoping_residual = 0.0;
};

struct RecoverySummary {
  int p = 0;
  double median_abs_error = 0.0;
  double exact_fraction = 0.0;
  double max_telescoping_residual = 0.0;
  /// Mean of full_statistic^2 with its standard error, and that mean * 4^p.
  MomentEstimate l2_channel;
  double l2_constant = 0.0;
};

struct RecoveryResult {
  std::vector<CountRecoveryRecord> records;
  std::vector<RecoverySummary> summaries;
  /// Least-squares slope of log2(median |error|) over p = 1..p_max.
  double log2_slope = 0.0;
};

/// True when rounding to the nearest integer recovers `truth`; exact
/// half-integers count as failures.
bool recovers(double estimate, std::size_t truth);

RecoveryResult recovery_experiment(std::size_t n, BetaParam beta, double R, const std::vector<Interval>& B,
                                   const TestSequenceSpec& sequence, std::size_t replicas,
                                   std::uint64_t seed);

/// Builds the sequence with make_fp_sequence(R, p_max) first.
RecoveryResult recovery_experiment(std::size_t n, BetaParam beta, double R, const std::vector<Interval>& B,
                                   int p_max, std::size_t replicas, std::uint64_t seed);

}  // namespace sinebeta

#endif  // SINEBETA_RIGIDITY_HPP
