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


#ifndef SINEBETA_LINSTAT_HPP
#define SINEBETA_LINSTAT_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sinebeta/bandlimited.hpp"
#include "sinebeta/cbe.hpp"
#include "sinebeta/trace_stats.hpp"

namespace sinebeta {

/// f(z) = sum_k coeffs[k] z^k on the unit circle, finitely many modes.
struct CircleFourierFunction {
  std::map<long, Complex> coeffs;

  Complex coefficient(long k) const;
  /// Largest |k| with a nonzero coefficient; 0 when empty.
  long bandwidth() const;
  Complex operator()(double theta) const;
};

/// sum_k f^(k) Tr(M^k). Requires f^(0) = 0 and f^(k) = 0 for |k| > n/2.
Complex circle_linear_statistic(const UnitSpectrum& spectrum, const CircleFourierFunction& f);

/// Folded function g with g^(k) = f^(k/n) / n for k != 0, g^(0) = 0.
CircleFourierFunction g_from_f(const ScaleMixture& mix, std::size_t n);

struct LineStatisticReport {
  /// Images x + m n with |m| <= periods were summed.
  std::size_t periods = 0;
  /// Certified bound on the omitted images.
  double tail_bound = 0.0;
};

/// Sum of f over the n-periodic extension of the configuration minus the
/// integral of f, truncating the images once the certified tail is below
/// 1e-8. Throws ResourceError if that needs more than 1e6 periods.
double line_linear_statistic(const RenormalizedConfiguration& config, const ScaleMixture& mix,
                             LineStatisticReport* report = nullptr);

/// The same quantity through Poisson summation, (2/n) sum_{k>=1} f^(k/n)
/// Re Tr(M^k), exact up to rounding.
double line_linear_statistic_spectral(const UnitSpectrum& spectrum, const ScaleMixture& mix);

struct RiemannFunctional {
  std::size_t n = 0;
  double value = 0.0;
};

/// (1/n) sum_{0 < |k| <= n/2} |k/n| f^(k/n)^2.
RiemannFunctional riemann_functional(const ScaleMixture& mix, std::size_t n);

/// Monte Carlo E[(sum_{x in E_n} f(x) - int f)^2], one estimate per mixture,
/// sharing the spectra. Requires replicas >= 100.
std::vector<MomentEstimate> mc_line_variances(std::size_t n, BetaParam beta,
                                              std::span<const ScaleMixture> mixtures,
                                              std::size_t replicas, std::uint64_t seed);

MomentEstimate mc_line_variance(std::size_t n, BetaParam beta, const ScaleMixture& mix,
                                std::size_t replicas, std::uint64_t seed);

/// Monte Carlo E|sum_z f(z)|^2 for a circle function.
MomentEstimate mc_circle_variance(std::size_t n, BetaParam beta, const CircleFourierFunction& f,
                                  std::size_t replicas, std::uint64_t seed);

/// Per-sample difference |sum_z f(z)|^2 - sum_k |f^(k)|^2 |Tr M^k|^2, whose
/// mean is the sum of the cross terms E[Tr M^k conj(Tr M^{k'})], k != k'.
MomentEstimate mc_variance_decomposition(std::size_t n, BetaParam beta,
                                         const CircleFourierFunction& f,
                                         std::size_t replicas, std::uint64_t seed);

}  // namespace sinebeta

#endif  // SINEBETA_LINSTAT_HPP
