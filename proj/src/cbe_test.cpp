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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sinebeta/cbe.hpp"
#include "sinebeta/errors.hpp"

using namespace sinebeta;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dense CMV matrix assembled directly from the block definition.
Eigen::MatrixXcd dense_cmv(const VerblunskyCoefficients& c) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(0, 0) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::MatrixXcd& f = (j % 2 == 0) ? l : m;
    const Complex a = c.alphas[static_cast<std::size_t>(j)];
    f(j, j) = std::conj(a);
    if (j + 1 < n) {
      const double rho = std::sqrt(1.0 - std::norm(a));
      f(j, j + 1) = rho;
      f(j + 1, j) = rho;
      f(j + 1, j + 1) = -a;
    }
  }
  return l * m;
}

std::vector<double> dense_angles(const VerblunskyCoefficients& c) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense_cmv(c), false);
  std::vector<double> out;
  for (const Complex& z : solver.eigenvalues()) {
    double t = std::arg(z);
    if (t < 0.0) t += kTwoPi;
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Distance on the circle.
double circle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

TEST_CASE("beta must be positive") {
  CHECK_THROWS_AS(BetaParam(0.0), ParameterError);
  CHECK_THROWS_AS(BetaParam(-1.0), ParameterError);
  CHECK_THROWS_AS(BetaParam(std::nan("")), ParameterError);
  CHECK(BetaParam(2.0).value() == 2.0);
}

TEST_CASE("coefficient parameters") {
  CHECK(verblunsky_nu(10, BetaParam(2.0), 0) == 19.0);
  CHECK(verblunsky_nu(10, BetaParam(2.0), 9) == 1.0);
  CHECK(verblunsky_nu(5, BetaParam(0.5), 2) == 2.0);
}

TEST_CASE("Theta_nu draws") {
  RandomState rng(9, 0);
  SUBCASE("nu = 1 is on the circle") {
    for (int i = 0; i < 100; ++i) CHECK(std::abs(sample_theta(1.0, rng)) == doctest::Approx(1.0));
  }
  SUBCASE("E|z|^2 = 2 / (nu + 1)") {
    for (double nu : {1.5, 3.0, 9.0, 101.0}) {
      const int count = 200000;
      double sum = 0.0;
      double sum2 = 0.0;
      for (int i = 0; i < count; ++i) {
        const double r2 = std::norm(sample_theta(nu, rng));
        REQUIRE(r2 < 1.0);
        sum += r2;
        sum2 += r2 * r2;
      }
      const double mean = sum / count;
      const double se = std::sqrt((sum2 / count - mean * mean) / count);
      CHECK(std::abs(mean - 2.0 / (nu + 1.0)) < 4.0 * se);
    }
  }
  SUBCASE("argument is uniform") {
    const int count = 200000;
    Complex sum;
    for (int i = 0; i < count; ++i) {
      const Complex z = sample_theta(5.0, rng);
      sum += z / std::abs(z);
    }
    CHECK(std::abs(sum) / count < 0.01);
  }
  CHECK_THROWS_AS(sample_theta(0.5, rng), ParameterError);
}

TEST_CASE("sampled coefficients satisfy the modulus constraints") {
  RandomState rng(2, 3);
  for (std::size_t n : {1u, 2u, 7u, 100u}) {
    const VerblunskyCoefficients c = sample_verblunsky(n, BetaParam(1.0), rng);
    REQUIRE(c.size() == n);
    for (std::size_t k = 0; k + 1 < n; ++k) CHECK(std::abs(c.alphas[k]) < 1.0);
    CHECK(std::abs(c.alphas.back()) == 1.0);
    CHECK_NOTHROW(c.validate());
  }
  VerblunskyCoefficients bad{{Complex(0.5, 0.0), Complex(0.5, 0.0)}};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("sampling is reproducible") {
  RandomState a(77, 4);
  RandomState b(77, 4);
  const UnitSpectrum sa = sample_cbe(50, BetaParam(4.0), a);
  const UnitSpectrum sb = sample_cbe(50, BetaParam(4.0), b);
  CHECK(sa.angles == sb.angles);
}

TEST_CASE("n = 1 root is the conjugate of the last coefficient") {
  const double phi = 0.8;
  VerblunskyCoefficients c{{std::polar(1.0, phi)}};
  const UnitSpectrum s = eigenangles(c);
  REQUIRE(s.size() == 1);
  CHECK(s.angles[0] == doctest::Approx(kTwoPi - phi).epsilon(1e-13));
}

TEST_CASE("phase roots match a dense CMV eigensolve") {
  RandomState rng(123, 0);
  double worst = 0.0;
  for (double beta : {0.5, 1.0, 2.0, 4.0, 10.0}) {
    for (std::size_t n : {2u, 3u, 5u, 16u, 31u, 64u, 150u}) {
      const VerblunskyCoefficients c = sample_verblunsky(n, BetaParam(beta), rng);
      const UnitSpectrum s = eigenangles(c);
      const std::vector<double> ref = dense_angles(c);
      REQUIRE(s.size() == n);
      for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, circle_gap(s.angles[j], ref[j]));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("spectrum is sorted in [0, 2 pi) with certified residuals") {
  RandomState rng(5, 1);
  for (double beta : {1.0, 2.0, 4.0}) {
    for (std::size_t n : {10u, 256u, 1024u}) {
      PhaseSolverDiagnostics diag;
      const VerblunskyCoefficients c = sample_verblunsky(n, BetaParam(beta), rng);
      const UnitSpectrum s = eigenangles(c, &diag);
      REQUIRE(s.size() == n);
      CHECK(std::is_sorted(s.angles.begin(), s.angles.end()));
      CHECK(s.angles.front() >= 0.0);
      CHECK(s.angles.back() < kTwoPi);
      CHECK(diag.max_residual_bound < 1e-8);
      CHECK(diag.collapsed_brackets == 0);
    }
  }
}

TEST_CASE("roots are zeros of the paraorthogonal polynomial") {
  RandomState rng(8, 2);
  const VerblunskyCoefficients c = sample_verblunsky(40, BetaParam(2.0), rng);
  const UnitSpectrum s = eigenangles(c);
  double scale = -1e300;
  for (int i = 0; i < 4000; ++i) {
    scale = std::max(scale, paraorthogonal_log_modulus(c, kTwoPi * i / 4000.0));
  }
  for (double t : s.angles) CHECK(paraorthogonal_log_modulus(c, t) - scale < std::log(1e-8));
}

TEST_CASE("phase is increasing and winds n times") {
  RandomState rng(4, 4);
  const std::size_t n = 200;
  const VerblunskyCoefficients c = sample_verblunsky(n, BetaParam(1.0), rng);
  const PruferPhase phase(c);
  double prev = phase(0.0);
  for (int i = 1; i <= 5000; ++i) {
    const double cur = phase(kTwoPi * i / 5000.0 - (i == 5000 ? 1e-15 : 0.0));
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(phase(std::nextafter(kTwoPi, 0.0)) - phase(0.0) ==
        doctest::Approx(kTwoPi * static_cast<double>(n)).epsilon(1e-9));
}

TEST_CASE("every split locates the same roots") {
  RandomState rng(6, 0);
  const std::size_t n = 24;
  const VerblunskyCoefficients c = sample_verblunsky(n, BetaParam(2.0), rng);
  const UnitSpectrum s = eigenangles(c);
  for (std::size_t m = 0; m < n; ++m) {
    const PruferPhase phase(c, m);
    for (double t : s.angles) {
      const double turns = phase(t) / kTwoPi;
      CHECK(std::abs(turns - std::round(turns)) < 1e-7);
    }
  }
  CHECK_THROWS_AS(PruferPhase(c, n), ParameterError);
}

TEST_CASE("batched evaluation matches scalar evaluation") {
  RandomState rng(6, 1);
  const VerblunskyCoefficients c = sample_verblunsky(77, BetaParam(4.0), rng);
  const PruferPhase phase(c);
  std::vector<double> thetas;
  for (int i = 0; i < 11; ++i) thetas.push_back(0.5 * i + 0.01);
  std::vector<double> out(thetas.size());
  phase.evaluate(thetas, out);
  for (std::size_t i = 0; i < thetas.size(); ++i) CHECK(out[i] == doctest::Approx(phase(thetas[i])).epsilon(1e-12));
}

TEST_CASE("renormalized configuration") {
  RandomState rng(10, 0);
  const std::size_t n = 64;
  const UnitSpectrum s = sample_cbe(n, BetaParam(2.0), rng);
  const RenormalizedConfiguration e = renormalize(s);
  REQUIRE(e.size() == n);
  CHECK(e.period == 64.0);
  CHECK(std::is_sorted(e.points.begin(), e.points.end()));
  for (double x : e.points) {
    CHECK(x >= -32.0);
    CHECK(x < 32.0);
  }
  const UnitSpectrum one{{std::numbers::pi}};
  CHECK(renormalize(one).points[0] == doctest::Approx(-0.5));
}
