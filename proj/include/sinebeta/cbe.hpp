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

#ifndef SINEBETA_CBE_HPP
#define SINEBETA_CBE_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sinebeta/rng.hpp"

namespace sinebeta {

using Complex = std::complex<double>;

/// Inverse temperature of the ensemble; always strictly positive.
class BetaParam {
 public:
  explicit BetaParam(double beta);
  double value() const { return beta_; }

 private:
  double beta_;
};

/// Recursion coefficients alpha_0..alpha_{n-1} of a CMV matrix.
/// |alpha_k| < 1 for k < n-1 and |alpha_{n-1}| = 1.
struct VerblunskyCoefficients {
  std::vector<Complex> alphas;

  std::size_t size() const { return alphas.size(); }
  /// Throws ParameterError when the modulus constraints are violated.
  void validate(double tolerance = 1e-12) const;
};

/// Eigenangles of a unitary matrix, sorted ascending in [0, 2*pi).
struct UnitSpectrum {
  std::vector<double> angles;

  std::size_t size() const { return angles.size(); }
};

/// Angles rescaled by n/(2*pi) and reduced to the window [-n/2, n/2).
/// The configuration on the line is the n-periodic extension of `points`.
struct RenormalizedConfiguration {
  std::vector<double> points;
  double period = 0.0;

  std::size_t size() const { return points.size(); }
};

struct PhaseSolverDiagnostics {
  std::size_t phase_evaluations = 0;
  // Roots whose bracket collapsed below 1e-13 onto a neighbouring root.
  std::size_t collapsed_brackets = 0;
  // Largest final bracket width over all roots.
  double max_bracket_width = 0.0;
  // Bernstein bound n * width on |Phi_n(theta)| / sup |Phi_n| over the
  // circle, maximized over the roots.
  double max_residual_bound = 0.0;
};

/// Draws from Theta_nu: for nu > 1, |z|^2 ~ Beta(1, (nu-1)/2) with uniform
/// argument; for nu = 1, a uniform point on the unit circle.
Complex sample_theta(double nu, RandomState& rng);

/// Parameter nu_k = beta (n - k - 1) + 1 of the k-th coefficient.
double verblunsky_nu(std::size_t n, BetaParam beta, std::size_t k);

VerblunskyCoefficients sample_verblunsky(std::size_t n, BetaParam beta,
                                         RandomState& rng);

/// Matched Pruefer phase of the paraorthogonal polynomial Phi_n on e^{i theta}.
///
/// The forward recursion b_{k+1} = (z b_k - conj(a_k)) / (1 - a_k z b_k),
/// b_0 = 1, runs over a_0..a_{m-1}; the backward recursion starts from the
/// terminal condition z b_{n-1} = conj(a_{n-1}) and inverts the steps
/// a_{n-2}..a_m. The phase difference between the two values of b_m is
/// continuous, strictly increasing, gains exactly 2 pi n over one turn, and
/// is a multiple of 2 pi exactly at the zeros of Phi_n.
///
/// Splitting at m = n/2 keeps the near-unimodular tail coefficients on the
/// backward side, where each of them is crossed only a few times per turn.
/// m = n - 1 gives the one-sided phase of z phi_{n-1} / phi*_{n-1} minus
/// -arg(a_{n-1}).
class PruferPhase {
 public:
  explicit PruferPhase(const VerblunskyCoefficients& coefficients);
  PruferPhase(const VerblunskyCoefficients& coefficients, std::size_t split);

  static constexpr std::size_t kLanes = 4;

  double operator()(double theta) const;
  /// Batched evaluation; out[i] = (*this)(thetas[i]).
  void evaluate(std::span<const double> thetas, std::span<double> out) const;
  std::size_t dimension() const { return n_; }
  std::size_t split() const { return split_; }

 private:
  template <std::size_t W>
  void evaluate_lanes(const double* theta, double* out) const;

  std::vector<Complex> alphas_;
  std::size_t n_;
  std::size_t split_;
  double target_;  // -arg(a_{n-1})
  // Ranges of consecutive steps whose summed arg bound stays below pi, so one
  // atan2 of the product of the step factors recovers the exact sum of args.
  std::vector<std::size_t> forward_groups_;
  std::vector<std::size_t> backward_groups_;
};

/// log |Phi_n(e^{i theta})| by the Szego recursion, renormalizing
/// (phi_k, phi*_k) jointly at every step and tracking the log scale.
double paraorthogonal_log_modulus(const VerblunskyCoefficients& coefficients,
                                  double theta);

/// The n zeros of Phi_n on the unit circle.
UnitSpectrum eigenangles(const VerblunskyCoefficients& coefficients,
                         PhaseSolverDiagnostics* diagnostics = nullptr);

UnitSpectrum sample_cbe(std::size_t n, BetaParam beta, RandomState& rng);

RenormalizedConfiguration renormalize(const UnitSpectrum& spectrum);

}  // namespace sinebeta

#endif  // SINEBETA_CBE_HPP
