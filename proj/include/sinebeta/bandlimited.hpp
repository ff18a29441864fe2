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


#ifndef SINEBETA_BANDLIMITED_HPP
#define SINEBETA_BANDLIMITED_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace sinebeta {

/// Base frequency profile b(x) = c exp(-1 / (1/4 - x^2)) on |x| < 1/2,
/// normalized so that its integral is 1.
class BumpSpec {
 public:
  static const BumpSpec& standard();

  double operator()(double x) const;
  double normalization() const { return c_; }
  /// b(0).
  double peak() const { return peak_; }
  /// Integral of v^k b(v) over [0, 1/2].
  double half_moment(int k) const;
  /// Upper bound on the L1 norm of the j-th derivative, 1 <= j <= kMaxDerivative.
  double derivative_l1(int j) const;

  static constexpr int kMaxDerivative = 24;

 private:
  BumpSpec();

  double c_;
  double peak_;
  std::vector<double> moments_;
  std::vector<double> derivative_l1_;
};

/// f_base(s) = 2 int_0^{1/2} b(x) cos(2 pi x s) dx by adaptive quadrature.
double base_transform(double s);

struct MixtureComponent {
  double weight = 0.0;
  double scale = 1.0;
};

/// f(t) = sum_i w_i f_base(t / L_i), with f^(x) = sum_i w_i L_i b(L_i x).
class ScaleMixture {
 public:
  ScaleMixture() = default;
  explicit ScaleMixture(std::vector<MixtureComponent> components);

  /// The base bump, {(1, 1)}.
  static ScaleMixture base();

  const std::vector<MixtureComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  const BumpSpec& bump() const { return BumpSpec::standard(); }

  double weight_sum() const;
  double min_scale() const;
  double max_scale() const;
  /// Components with equal scales combined, sorted by scale.
  std::vector<MixtureComponent> merged() const;

 private:
  std::vector<MixtureComponent> components_;
};

/// f(t) with one adaptive quadrature per distinct scale.
double eval_time(const ScaleMixture& mix, double t);
/// f^(x); zero for |x| >= 1/2.
double eval_freq(const ScaleMixture& mix, double x);
/// Integral of f over the line, f^(0).
double integral(const ScaleMixture& mix);

/// sqrt of the integral of |x| f^(x)^2.
double h_half_norm(const ScaleMixture& mix);
double h_half_norm_squared(const ScaleMixture& mix);
/// H^{1/2} inner product of f and f(. / L).
double dilation_overlap(const ScaleMixture& mix, double L);

/// f(t / lambda): every scale multiplied by lambda.
ScaleMixture dilate(const ScaleMixture& mix, double lambda);
/// (f(t) + f(t / L)) / 2.
ScaleMixture dilate_average(const ScaleMixture& mix, double L);

struct ReductionStep {
  double L = 0.0;
  double norm_sq_before = 0.0;
  double norm_sq_after = 0.0;
};

struct ReductionOptions {
  std::size_t component_cap = std::size_t{1} << 14;
  double contraction = 0.51;
};

/// Applies dilate_average until h_half_norm <= target. Each step takes the
/// first L in 2, 4, 8, ... whose squared norm is at most contraction times
/// the current one. Throws ResourceError when the component cap or the
/// floating-point range of the scales would be exceeded.
ScaleMixture reduce_norm(const ScaleMixture& mix, double target,
                         const ReductionOptions& options = {},
                         std::vector<ReductionStep>* steps = nullptr);

/// Fast evaluation of f in the time domain from a piecewise Chebyshev table
/// of f_base on [0, 200], with f_base taken as 0 beyond.
class TimeEvaluator {
 public:
  explicit TimeEvaluator(const ScaleMixture& mix);

  double operator()(double t) const;
  /// Bound on |f'| over the line.
  double lipschitz() const { return lipschitz_; }

  static double base(double s);
  /// Absolute error bound of base() against f_base.
  static constexpr double kTableError = 1e-14;
  static constexpr double kCutoff = 200.0;

 private:
  std::vector<double> weights_;
  std::vector<double> inverse_scales_;
  double lipschitz_ = 0.0;
};

/// Certified upper bound on sup_{|t| <= R} |f(t) - 1|: grid maximum plus
/// Lipschitz slack, with the grid fine enough that the slack is at most
/// `slack`.
double certified_flatness(const ScaleMixture& mix, double R, double slack);

struct FlattenReport {
  double lambda = 1.0;
  double certified_sup = 0.0;
};

/// Smallest lambda in 1, 2, 4, ..., 2^30 such that the certified
/// sup_{|t| <= R} |f(t / lambda) - 1| is at most eps; returns the dilation.
ScaleMixture flatten(const ScaleMixture& mix, double R, double eps,
                     FlattenReport* report = nullptr);

/// Bound on the integral of |f| over |t| >= T (both tails), T > 0.
double tail_integral_bound(const ScaleMixture& mix, double T);
/// Bound on |f(t)| valid for all |t| >= T, T > 0.
double tail_sup_bound(const ScaleMixture& mix, double T);

/// Bound on the sum of |f(x + m P)| over `count` points x in [-P/2, P/2)
/// and all images with |m| > M, where T = (M + 1/2) P.
double periodized_tail_bound(const ScaleMixture& mix, std::size_t count, double period, double T);

/// Plain-text record: normalization constant, component count, then one
/// "weight scale" line per component, 17 significant digits.
std::string serialize(const ScaleMixture& mix);
ScaleMixture parse_mixture(const std::string& text);

}  // namespace sinebeta

#endif  // SINEBETA_BANDLIMITED_HPP
