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


#ifndef SINEBETA_TRACE_STATS_HPP
#define SINEBETA_TRACE_STATS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sinebeta/cbe.hpp"

namespace sinebeta {

/// Square matrix stored by diagonals: entry (i, j) lives at
/// data[i * (2w + 1) + (j - i + w)] for |i - j| <= w.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t half_bandwidth);

  std::size_t dimension() const { return n_; }
  std::size_t half_bandwidth() const { return w_; }

  /// Zero outside the band.
  Complex entry(std::size_t i, std::size_t j) const;
  /// Requires |i - j| <= half_bandwidth().
  Complex& at(std::size_t i, std::size_t j);

  Complex trace() const;

  friend BandedMatrix operator*(const BandedMatrix& a, const BandedMatrix& b);

 private:
  std::size_t n_;
  std::size_t w_;
  std::vector<Complex> data_;
};

/// Five-diagonal CMV matrix C = L * M built from Verblunsky coefficients,
/// with L = Theta_0 + Theta_2 + ..., M = 1 + Theta_1 + Theta_3 + ... and
/// Theta_j = [[conj(alpha_j), rho_j], [rho_j, -alpha_j]]. The block of the
/// unimodular alpha_{n-1} is truncated to the 1x1 entry conj(alpha_{n-1}).
class BandedUnitary {
 public:
  explicit BandedUnitary(const VerblunskyCoefficients& coeffs);

  std::size_t dimension() const { return matrix_.dimension(); }
  Complex entry(std::size_t i, std::size_t j) const { return matrix_.entry(i, j); }
  const BandedMatrix& matrix() const { return matrix_; }

  /// max |(C^* C - I)_{ij}|; dense, so limited to n <= 64.
  double unitarity_defect() const;

 private:
  BandedMatrix matrix_;
};

/// Sum over the spectrum of exp(i k theta_j).
Complex trace_power(const UnitSpectrum& spectrum, long k);

/// trace_power(spectrum, k) for k = 1..kmax, in O(n kmax) by running powers.
std::vector<Complex> trace_powers(const UnitSpectrum& spectrum, long kmax);

/// Tr(C^k) by repeated banded multiplication; requires 1 <= k <= n.
Complex trace_power_matrix(const BandedUnitary& m, long k);

/// Tr(C C^*), which is n for a unitary matrix.
double trace_gram(const BandedUnitary& m);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  /// Set when k > n/2, outside the range where the linear bound is stated.
  bool above_half_n = false;
};

/// Sample mean and standard error (sample standard deviation / sqrt(count)).
MomentEstimate summarize(std::span<const double> samples, std::uint64_t seed);

/// Monte Carlo E|Tr M^k|^2 for every k in `ks`, sharing one spectrum per
/// replica. Requires replicas >= 100 and k >= 1.
std::vector<MomentEstimate> mc_trace_second_moments(std::size_t n, BetaParam beta,
                                                    std::span<const long> ks,
                                                    std::size_t replicas,
                                                    std::uint64_t seed);

MomentEstimate mc_trace_second_moment(std::size_t n, BetaParam beta, long k,
                                      std::size_t replicas, std::uint64_t seed);

struct ComplexMomentEstimate {
  MomentEstimate real;
  MomentEstimate imag;
};

/// Monte Carlo E[Tr M^k conj(Tr M^{k2})].
ComplexMomentEstimate mc_trace_cross_moment(std::size_t n, BetaParam beta, long k,
                                            long k2, std::size_t replicas,
                                            std::uint64_t seed);

/// Observable of the ordered eigenangles.
using AngleObservable = std::function<double(std::span<const double>)>;

struct QuadratureOptions {
  /// Gauss-Legendre nodes per gap dimension and trapezoid nodes for the
  /// common rotation; at least 400.
  std::size_t nodes = 400;
  /// Skip the rotation integral for observables invariant under a common
  /// shift of all angles.
  bool rotation_invariant = false;
};

/// Expectation of `observable` under the CbetaE density for n <= 3 by
/// tensor-grid quadrature, normalized on the same grid.
double cbe_quadrature_oracle(std::size_t n, BetaParam beta,
                             const AngleObservable& observable,
                             const QuadratureOptions& options = {});

}  // namespace sinebeta

#endif  // SINEBETA_TRACE_STATS_HPP
