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


#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "sinebeta/errors.hpp"
#include "sinebeta/trace_stats.hpp"

namespace sinebeta {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre on (0, 1) composed with t^q / (t^q + (1 - t)^q), which
// clusters nodes at both ends where the pair repulsion vanishes.
Rule sigmoid_gauss_legendre(std::size_t nodes) {
  constexpr double q = 4.0;
  const int order = static_cast<int>(nodes);
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  std::vector<double> t;
  std::vector<double> wt;
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(order, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    t.push_back(0.5 * (1.0 + z));
    wt.push_back(0.5 * w);
    if (z != 0.0) {
      t.push_back(0.5 * (1.0 - z));
      wt.push_back(0.5 * w);
    }
  }
  Rule rule;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = std::pow(t[i], q);
    const double b = std::pow(1.0 - t[i], q);
    const double ds = q * std::pow(t[i] * (1.0 - t[i]), q - 1.0) / ((a + b) * (a + b));
    rule.x.push_back(a / (a + b));
    rule.w.push_back(wt[i] * ds);
  }
  return rule;
}

double repulsion(double gap, double beta) { return std::pow(2.0 * std::sin(0.5 * gap), beta); }

double wrap(double theta) {
  const double r = std::fmod(theta, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

}  // namespace

double cbe_quadrature_oracle(std::size_t n, BetaParam beta,
                             const AngleObservable& observable,
                             const QuadratureOptions& options) {
  if (n < 1 || n > 3) {
    throw ParameterError("quadrature oracle supports n in {1, 2, 3}, got " + std::to_string(n));
  }
  if (options.nodes < 400) {
    throw ParameterError("quadrature oracle requires at least 400 nodes per dimension");
  }
  const std::size_t rotations = options.rotation_invariant ? 1 : options.nodes;
  const double b = beta.value();
  const Rule rule = sigmoid_gauss_legendre(options.nodes);

  // Gap configurations with their density weights.
  std::vector<std::array<double, 3>> offsets;
  std::vector<double> weights;
  if (n == 1) {
    offsets.push_back({0.0, 0.0, 0.0});
    weights.push_back(1.0);
  } else if (n == 2) {
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double g = kTwoPi * rule.x[i];
      offsets.push_back({0.0, g, 0.0});
      weights.push_back(rule.w[i] * repulsion(g, b));
    }
  } else {
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double u = rule.x[i];
      for (std::size_t j = 0; j < rule.x.size(); ++j) {
        const double v = rule.x[j];
        const double g1 = kTwoPi * u;
        const double g2 = kTwoPi * (1.0 - u) * v;
        const double g3 = kTwoPi * (1.0 - u) * (1.0 - v);
        offsets.push_back({0.0, g1, g1 + g2});
        weights.push_back(rule.w[i] * rule.w[j] * (1.0 - u) * repulsion(g1, b) *
                          repulsion(g2, b) * repulsion(g3, b));
      }
    }
  }

  double total = 0.0;
  double mass = 0.0;
  std::vector<double> angles(n);
  for (std::size_t r = 0; r < rotations; ++r) {
    const double phi = kTwoPi * static_cast<double>(r) / static_cast<double>(rotations);
    for (std::size_t c = 0; c < offsets.size(); ++c) {
      for (std::size_t a = 0; a < n; ++a) angles[a] = wrap(phi + offsets[c][a]);
      std::sort(angles.begin(), angles.end());
      total += weights[c] * observable(angles);
      mass += weights[c];
    }
  }
  return total / mass;
}

}  // namespace sinebeta
