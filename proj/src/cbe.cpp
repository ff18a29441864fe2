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

#include "sinebeta/cbe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sinebeta/errors.hpp"

namespace sinebeta {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCollapseWidth = 1e-13;
constexpr double kRootWidth = 1e-13;
// Sum of per-step arg bounds allowed inside one phase group.
constexpr double kGroupArgBudget = 3.0;

}  // namespace

BetaParam::BetaParam(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ParameterError("beta must satisfy beta > 0 (got " +
                         std::to_string(beta) + ")");
  }
}

void VerblunskyCoefficients::validate(double tolerance) const {
  if (alphas.empty()) {
    throw ParameterError("Verblunsky coefficients: need n >= 1");
  }
  for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
    if (!(std::abs(alphas[k]) < 1.0)) {
      throw ParameterError("Verblunsky coefficient " + std::to_string(k) +
                           " must lie strictly inside the unit disk");
    }
  }
  if (std::abs(std::abs(alphas.back()) - 1.0) > tolerance) {
    throw ParameterError("last Verblunsky coefficient must lie on the unit circle");
  }
}

Complex sample_theta(double nu, RandomState& rng) {
  if (!(nu >= 1.0)) {
    throw ParameterError("Theta_nu requires nu >= 1 (got " + std::to_string(nu) + ")");
  }
  if (nu == 1.0) {
    return std::polar(1.0, kTwoPi * rng.uniform());
  }
  // Beta(1, m) by inversion: r^2 = 1 - (1 - u)^{1/m}.
  const double m = 0.5 * (nu - 1.0);
  const double u = rng.uniform();
  const double r2 = -std::expm1(std::log1p(-u) / m);
  // Keep the modulus strictly inside the disk when 1 - r^2 is below rounding.
  const double r = std::min(std::sqrt(r2), std::nextafter(1.0, 0.0));
  return std::polar(r, kTwoPi * rng.uniform());
}

double verblunsky_nu(std::size_t n, BetaParam beta, std::size_t k) {
  if (k >= n) {
    throw ParameterError("coefficient index out of range");
  }
  return beta.value() * static_cast<double>(n - k - 1) + 1.0;
}

VerblunskyCoefficients sample_verblunsky(std::size_t n, BetaParam beta,
                                         RandomState& rng) {
  if (n < 1) {
    throw ParameterError("ensemble dimension must satisfy n >= 1");
  }
  VerblunskyCoefficients out;
  out.alphas.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.alphas.push_back(sample_theta(verblunsky_nu(n, beta, k), rng));
  }
  // nu = 1 gives |alpha| = 1 up to rounding; pin it exactly.
  out.alphas.back() /= std::abs(out.alphas.back());
  return out;
}

namespace {

// Splits [begin, end) into groups whose summed bound asin|a_k| stays below pi.
// `order` walks the range forwards (+1) or backwards (-1).
std::vector<std::size_t> arg_groups(const std::vector<Complex>& alphas,
                                    std::size_t count) {
  std::vector<std::size_t> ends;
  double budget = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double bound = std::asin(std::min(1.0, std::abs(alphas[i])));
    if (i > 0 && budget + bound > kGroupArgBudget) {
      ends.push_back(i);
      budget = 0.0;
    }
    budget += bound;
  }
  ends.push_back(count);
  return ends;
}

}  // namespace

PruferPhase::PruferPhase(const VerblunskyCoefficients& coefficients)
    : PruferPhase(coefficients, coefficients.size() / 2) {}

PruferPhase::PruferPhase(const VerblunskyCoefficients& coefficients,
                         std::size_t split) {
  coefficients.validate();
  n_ = coefficients.size();
  if (split > n_ - 1) {
    throw ParameterError("Pruefer phase split must satisfy m <= n - 1");
  }
  split_ = split;
  target_ = -std::arg(coefficients.alphas.back());
  // Forward steps a_0..a_{m-1}, then backward steps a_{n-2}, ..., a_m.
  alphas_.assign(coefficients.alphas.begin(), coefficients.alphas.begin() + split_);
  std::vector<Complex> backward(coefficients.alphas.rbegin() + 1,
                                coefficients.alphas.rend() - split_);
  forward_groups_ = arg_groups(alphas_, alphas_.size());
  backward_groups_ = arg_groups(backward, backward.size());
  alphas_.insert(alphas_.end(), backward.begin(), backward.end());
}

double PruferPhase::operator()(double theta) const {
  double out = 0.0;
  evaluate_lanes<1>(&theta, &out);
  return out;
}

void PruferPhase::evaluate(std::span<const double> thetas,
                           std::span<double> out) const {
  if (out.size() != thetas.size()) {
    throw ParameterError("PruferPhase::evaluate: size mismatch");
  }
  std::size_t i = 0;
  for (; i + kLanes <= thetas.size(); i += kLanes) {
    evaluate_lanes<kLanes>(thetas.data() + i, out.data() + i);
  }
  for (; i < thetas.size(); ++i) out[i] = (*this)(thetas[i]);
}

template <std::size_t W>
void PruferPhase::evaluate_lanes(const double* theta, double* out) const {
  // Hot loop. Complex arithmetic is spelled out to keep the recursion free of
  // divisions and of the NaN-recovery path of std::complex multiplication;
  // W independent angles are interleaved because a single recursion is
  // latency bound.
  double zr[W], zi[W];
  for (std::size_t l = 0; l < W; ++l) {
    zr[l] = std::cos(theta[l]);
    zi[l] = std::sin(theta[l]);
  }

  // Forward Szego recursion on the pair (phi, phi*):
  //   phi' = z phi - conj(a) phi*,  phi*' = phi* - a z phi.
  // With b = phi / phi* the step factor is phi*' / phi* = 1 - a z b = w, the
  // phase gains theta - 2 arg(w), and |arg(w)| <= asin|a|. Each group sums at
  // most pi of arg, so atan2 of phi*_end conj(phi*_start) is exact; the pair is
  // renormalized at group boundaries.
  double forward_args[W], fr[W], fi[W], sr[W], si[W];
  for (std::size_t l = 0; l < W; ++l) {
    forward_args[l] = 0.0;
    fr[l] = 1.0;
    fi[l] = 0.0;
    sr[l] = 1.0;
    si[l] = 0.0;
  }
  std::size_t k = 0;
  for (const std::size_t end : forward_groups_) {
    double s0r[W], s0i[W];
    for (std::size_t l = 0; l < W; ++l) {
      s0r[l] = sr[l];
      s0i[l] = si[l];
    }
    for (; k < end; ++k) {
      const double ar = alphas_[k].real();
      const double ai = alphas_[k].imag();
      for (std::size_t l = 0; l < W; ++l) {
        const double vr = zr[l] * fr[l] - zi[l] * fi[l];  // z phi
        const double vi = zr[l] * fi[l] + zi[l] * fr[l];
        const double nfr = vr - (ar * sr[l] + ai * si[l]);  // - conj(a) phi*
        const double nfi = vi - (ar * si[l] - ai * sr[l]);
        sr[l] -= ar * vr - ai * vi;  // - a z phi
        si[l] -= ar * vi + ai * vr;
        fr[l] = nfr;
        fi[l] = nfi;
      }
    }
    for (std::size_t l = 0; l < W; ++l) {
      forward_args[l] += std::atan2(si[l] * s0r[l] - sr[l] * s0i[l],
                                    sr[l] * s0r[l] + si[l] * s0i[l]);
      const double inv = 1.0 / std::hypot(sr[l], si[l]);
      fr[l] *= inv;
      fi[l] *= inv;
      sr[l] *= inv;
      si[l] *= inv;
    }
  }

  // Backward from z b_{n-1} = conj(a_{n-1}): with c = p / q standing for the
  // value of b one index up, z c_k = (c + conj(a)) / (1 + a c), i.e.
  //   p' = conj(z) (p + conj(a) q),  q' = q + a p.
  // The factor q' / q = 1 + a c has |arg| <= asin|a| and the phase loses
  // theta + 2 arg(1 + a c) per step.
  double backward_args[W], pr[W], pi[W], qr[W], qi[W];
  for (std::size_t l = 0; l < W; ++l) {
    backward_args[l] = 0.0;
    pr[l] = std::cos(target_ - theta[l]);
    pi[l] = std::sin(target_ - theta[l]);
    qr[l] = 1.0;
    qi[l] = 0.0;
  }
  const Complex* tail = alphas_.data() + split_;
  std::size_t j = 0;
  for (const std::size_t end : backward_groups_) {
    double q0r[W], q0i[W];
    for (std::size_t l = 0; l < W; ++l) {
      q0r[l] = qr[l];
      q0i[l] = qi[l];
    }
    for (; j < end; ++j) {
      const double ar = tail[j].real();
      const double ai = tail[j].imag();
      for (std::size_t l = 0; l < W; ++l) {
        const double ur = pr[l] + (ar * qr[l] + ai * qi[l]);  // p + conj(a) q
        const double ui = pi[l] + (ar * qi[l] - ai * qr[l]);
        qr[l] += ar * pr[l] - ai * pi[l];  // q + a p
        qi[l] += ar * pi[l] + ai * pr[l];
        pr[l] = zr[l] * ur + zi[l] * ui;  // conj(z) u
        pi[l] = zr[l] * ui - zi[l] * ur;
      }
    }
    for (std::size_t l = 0; l < W; ++l) {
      backward_args[l] += std::atan2(qi[l] * q0r[l] - qr[l] * q0i[l],
                                     qr[l] * q0r[l] + qi[l] * q0i[l]);
      const double inv = 1.0 / std::hypot(qr[l], qi[l]);
      pr[l] *= inv;
      pi[l] *= inv;
      qr[l] *= inv;
      qi[l] *= inv;
    }
  }

  for (std::size_t l = 0; l < W; ++l) {
    out[l] = static_cast<double>(n_) * theta[l] - target_ -
             2.0 * forward_args[l] + 2.0 * backward_args[l];
  }
}

double paraorthogonal_log_modulus(const VerblunskyCoefficients& coefficients,
                                  double theta) {
  const auto& a = coefficients.alphas;
  const Complex z = std::polar(1.0, theta);
  Complex phi(1.0, 0.0);
  Complex phi_star(1.0, 0.0);
  double log_scale = 0.0;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const Complex next = z * phi - std::conj(a[k]) * phi_star;
    const Complex next_star = phi_star - a[k] * z * phi;
    const double scale = std::max(std::abs(next), std::abs(next_star));
    phi = next / scale;
    phi_star = next_star / scale;
    log_scale += std::log(scale);
  }
  const Complex top = z * phi - std::conj(a.back()) * phi_star;
  return std::log(std::abs(top)) + log_scale;
}

namespace {

// Brent's zeroin for one zero of phase(theta) - level, written as a state
// machine so several roots can share one batched phase evaluation. The root
// always lies between b and c.
struct RootBracket {
  double a, b, c, fa, fb, fc, d, e;
  bool converged = false;

  void start(double lo, double hi, double f_lo, double f_hi) {
    a = lo;
    fa = f_lo;
    b = hi;
    fb = f_hi;
    c = a;
    fc = fa;
    d = e = b - a;
    converged = (f_lo == 0.0) || (f_hi == 0.0);
    if (f_lo == 0.0) {
      b = c = lo;
      fb = fc = 0.0;
    }
  }

  // Advances to the next trial point; returns false once converged.
  bool prepare(double& trial) {
    if (converged) return false;
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                       0.25 * kRootWidth;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) {
      converged = true;
      return false;
    }
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;
    } else {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < 3.0 * m * q - std::abs(tol * q) && p < std::abs(0.5 * e * q)) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    trial = b;
    return true;
  }

  void accept(double f) {
    fb = f;
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
  }

  double root() const { return b; }
  double width() const { return fb == 0.0 ? 0.0 : std::abs(c - b); }
};

}  // namespace

UnitSpectrum eigenangles(const VerblunskyCoefficients& coefficients,
                         PhaseSolverDiagnostics* diagnostics) {
  const PruferPhase phase(coefficients);
  const std::size_t n = coefficients.size();
  PhaseSolverDiagnostics diag;

  // Coarse grid of 2n cells; the phase gains 2 pi n over [0, 2 pi].
  const std::size_t cells = 2 * n;
  std::vector<double> grid_theta(cells + 1);
  std::vector<double> grid_phase(cells + 1);
  for (std::size_t g = 0; g <= cells; ++g) {
    grid_theta[g] = kTwoPi * static_cast<double>(g) / static_cast<double>(cells);
  }
  phase.evaluate(std::span<const double>(grid_theta).first(cells),
                 std::span<double>(grid_phase).first(cells));
  diag.phase_evaluations += cells;
  grid_phase[cells] = grid_phase[0] + kTwoPi * static_cast<double>(n);
  const double slack = 1e-9 * (1.0 + std::abs(grid_phase[cells]));
  for (std::size_t g = 0; g < cells; ++g) {
    if (grid_phase[g + 1] < grid_phase[g] - slack) {
      throw ConsistencyError("Pruefer phase is not monotone at theta = " +
                             std::to_string(grid_theta[g]) +
                             " (numerical breakdown)");
    }
  }

  // Zeros sit at the levels 2 pi j inside [phase(0), phase(0) + 2 pi n).
  const double first = std::ceil(grid_phase[0] / kTwoPi);
  std::vector<double> levels(n);
  std::vector<RootBracket> brackets(n);
  std::size_t cell = 0;
  for (std::size_t j = 0; j < n; ++j) {
    levels[j] = kTwoPi * (first + static_cast<double>(j));
    while (cell < cells && grid_phase[cell + 1] <= levels[j]) ++cell;
    if (cell >= cells) {
      throw ConsistencyError("located " + std::to_string(j) +
                             " eigenangles, expected " + std::to_string(n));
    }
    brackets[j].start(grid_theta[cell], grid_theta[cell + 1],
                      grid_phase[cell] - levels[j], grid_phase[cell + 1] - levels[j]);
  }

  // Refine up to kLanes brackets in lockstep; a lane picks up the next pending
  // root as soon as its own has converged.
  constexpr std::size_t kMaxIterations = 200;
  constexpr std::size_t kLanes = PruferPhase::kLanes;
  std::array<std::size_t, kLanes> lane_root{};
  std::array<std::size_t, kLanes> lane_iterations{};
  std::array<double, kLanes> x{};
  std::array<double, kLanes> fx{};
  std::size_t pending = 0;
  // Puts the next root that still needs a trial point into `lane`.
  auto refill = [&](std::size_t lane) {
    for (; pending < n; ++pending) {
      if (brackets[pending].prepare(x[lane])) {
        lane_root[lane] = pending++;
        lane_iterations[lane] = 0;
        return;
      }
    }
    lane_root[lane] = n;
    x[lane] = 0.0;
  };
  for (std::size_t l = 0; l < kLanes; ++l) refill(l);
  while (std::any_of(lane_root.begin(), lane_root.end(),
                     [n](std::size_t j) { return j < n; })) {
    phase.evaluate(x, fx);
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::size_t j = lane_root[l];
      if (j >= n) continue;
      ++diag.phase_evaluations;
      RootBracket& r = brackets[j];
      r.accept(fx[l] - levels[j]);
      if (++lane_iterations[l] >= kMaxIterations || !r.prepare(x[l])) {
        refill(l);
      }
    }
  }

  UnitSpectrum out;
  out.angles.reserve(n);
  for (const RootBracket& r : brackets) {
    double root = r.root();
    if (root >= kTwoPi) root = std::nextafter(kTwoPi, 0.0);
    if (!out.angles.empty() && root - out.angles.back() < kCollapseWidth) {
      ++diag.collapsed_brackets;
      root = std::max(root, out.angles.back());
    }
    diag.max_bracket_width = std::max(diag.max_bracket_width, r.width());
    out.angles.push_back(root);
  }
  diag.max_residual_bound = static_cast<double>(n) * diag.max_bracket_width;
  if (diagnostics != nullptr) *diagnostics = diag;
  return out;
}

UnitSpectrum sample_cbe(std::size_t n, BetaParam beta, RandomState& rng) {
  return eigenangles(sample_verblunsky(n, beta, rng));
}

RenormalizedConfiguration renormalize(const UnitSpectrum& spectrum) {
  const double n = static_cast<double>(spectrum.size());
  RenormalizedConfiguration out;
  out.period = n;
  out.points.reserve(spectrum.size());
  for (const double theta : spectrum.angles) {
    double x = n * theta / kTwoPi;
    if (x >= 0.5 * n) x -= n;
    out.points.push_back(x);
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace sinebeta
