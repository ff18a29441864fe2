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


#include "sinebeta/linstat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sinebeta/errors.hpp"
#include "sinebeta/parallel.hpp"

namespace sinebeta {

namespace {

constexpr double kLineTailTolerance = 1e-8;
constexpr std::size_t kMaxPeriods = 1000000;

void check_replicas(std::size_t replicas) {
  if (replicas < 100) {
    throw ParameterError("Monte Carlo estimates require replicas >= 100, got " + std::to_string(replicas));
  }
}

// Highest k with f^(k/n) possibly nonzero: k/n < 1 / (2 L_min).
long spectral_cutoff(const ScaleMixture& mix, std::size_t n) {
  if (mix.empty()) return 0;
  const double kmax = std::ceil(0.5 * static_cast<double>(n) / mix.min_scale());
  return std::min(static_cast<long>(n / 2), static_cast<long>(kmax));
}

double folded_statistic(const std::vector<Complex>& traces, const std::vector<double>& weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) sum += weights[k] * traces[k].real();
  return sum;
}

// 2 f^(k/n) / n for k = 1..kmax.
std::vector<double> folded_weights(const ScaleMixture& mix, std::size_t n) {
  const long kmax = spectral_cutoff(mix, n);
  std::vector<double> w(static_cast<std::size_t>(kmax));
  const double dn = static_cast<double>(n);
  for (long k = 1; k <= kmax; ++k) w[static_cast<std::size_t>(k - 1)] = 2.0 * eval_freq(mix, k / dn) / dn;
  return w;
}

}  // namespace

Complex CircleFourierFunction::coefficient(long k) const {
  const auto it = coeffs.find(k);
  return it == coeffs.end() ? Complex{} : it->second;
}

long CircleFourierFunction::bandwidth() const {
  long b = 0;
  for (const auto& [k, c] : coeffs) {
    if (c != Complex{}) b = std::max(b, std::abs(k));
  }
  return b;
}

Complex CircleFourierFunction::operator()(double theta) const {
  Complex sum;
  for (const auto& [k, c] : coeffs) sum += c * std::polar(1.0, static_cast<double>(k) * theta);
  return sum;
}

Complex circle_linear_statistic(const UnitSpectrum& spectrum, const CircleFourierFunction& f) {
  const long half = static_cast<long>(spectrum.size() / 2);
  if (f.coefficient(0) != Complex{}) throw ParameterError("circle function must have a zero constant mode");
  if (f.bandwidth() > half) {
    throw ParameterError("circle function modes must satisfy |k| <= n/2 = " + std::to_string(half) +
                         ", got bandwidth " + std::to_string(f.bandwidth()));
  }
  const std::vector<Complex> traces = trace_powers(spectrum, f.bandwidth());
  Complex sum;
  for (const auto& [k, c] : f.coeffs) {
    if (k == 0 || c == Complex{}) continue;
    const Complex t = traces[static_cast<std::size_t>(std::abs(k) - 1)];
    sum += c * (k > 0 ? t : std::conj(t));
  }
  return sum;
}

CircleFourierFunction g_from_f(const ScaleMixture& mix, std::size_t n) {
  if (n < 1) throw ParameterError("g_from_f requires n >= 1");
  CircleFourierFunction g;
  const long kmax = spectral_cutoff(mix, n);
  const double dn = static_cast<double>(n);
  for (long k = 1; k <= kmax; ++k) {
    const double v = eval_freq(mix, k / dn) / dn;
    if (v == 0.0) continue;
    g.coeffs[k] = v;
    g.coeffs[-k] = v;
  }
  return g;
}

double line_linear_statistic(const RenormalizedConfiguration& config, const ScaleMixture& mix,
                             LineStatisticReport* report) {
  const std::size_t count = config.size();
  const double period = config.period;
  if (!(period > 0.0)) throw ParameterError("configuration period must be positive");
  for (double x : config.points) {
    if (!(x >= -0.5 * period && x < 0.5 * period)) {
      throw ParameterError("configuration points must lie in [-period/2, period/2)");
    }
  }
  std::size_t periods = 0;
  double tail = mix.empty() ? 0.0 : periodized_tail_bound(mix, count, period, 0.5 * period);
  while (tail > kLineTailTolerance) {
    if (++periods > kMaxPeriods) {
      throw ResourceError("line_linear_statistic: certified tail needs more than 1e6 periods");
    }
    tail = periodized_tail_bound(mix, count, period, (static_cast<double>(periods) + 0.5) * period);
  }
  const TimeEvaluator f(mix);
  double sum = 0.0;
  const long m_max = static_cast<long>(periods);
  for (double x : config.points) {
    for (long m = -m_max; m <= m_max; ++m) sum += f(x + static_cast<double>(m) * period);
  }
  if (report) *report = {periods, tail};
  return sum - integral(mix);
}

double line_linear_statistic_spectral(const UnitSpectrum& spectrum, const ScaleMixture& mix) {
  const std::vector<double> w = folded_weights(mix, spectrum.size());
  return folded_statistic(trace_powers(spectrum, static_cast<long>(w.size())), w);
}

RiemannFunctional riemann_functional(const ScaleMixture& mix, std::size_t n) {
  if (n < 1) throw ParameterError("riemann_functional requires n >= 1");
  const double dn = static_cast<double>(n);
  const long kmax = spectral_cutoff(mix, n);
  double sum = 0.0;
  for (long k = 1; k <= kmax; ++k) {
    const double v = eval_freq(mix, k / dn);
    sum += (k / dn) * v * v;
  }
  return {n, 2.0 * sum / dn};
}

std::vector<MomentEstimate> mc_line_variances(std::size_t n, BetaParam beta,
                                              std::span<const ScaleMixture> mixtures,
                                              std::size_t replicas, std::uint64_t seed) {
  check_replicas(replicas);
  std::vector<std::vector<double>> weights;
  long kmax = 0;
  for (const ScaleMixture& mix : mixtures) {
    weights.push_back(folded_weights(mix, n));
    kmax = std::max(kmax, static_cast<long>(weights.back().size()));
  }
  const auto rows = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t) {
    const std::vector<Complex> traces = trace_powers(sample_cbe(n, beta, rng), kmax);
    std::vector<double> row;
    for (const std::vector<double>& w : weights) {
      const double s = folded_statistic(traces, w);
      row.push_back(s * s);
    }
    return row;
  });
  std::vector<MomentEstimate> out;
  std::vector<double> column(replicas);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = rows[r][i];
    out.push_back(summarize(column, seed));
  }
  return out;
}

MomentEstimate mc_line_variance(std::size_t n, BetaParam beta, const ScaleMixture& mix,
                                std::size_t replicas, std::uint64_t seed) {
  return mc_line_variances(n, beta, std::span<const ScaleMixture>(&mix, 1), replicas, seed).front();
}

MomentEstimate mc_circle_variance(std::size_t n, BetaParam beta, const CircleFourierFunction& f,
                                  std::size_t replicas, std::uint64_t seed) {
  check_replicas(replicas);
  const auto samples = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t) {
    return std::norm(circle_linear_statistic(sample_cbe(n, beta, rng), f));
  });
  return summarize(samples, seed);
}

MomentEstimate mc_variance_decomposition(std::size_t n, BetaParam beta,
                                         const CircleFourierFunction& f,
                                         std::size_t replicas, std::uint64_t seed) {
  check_replicas(replicas);
  const long band = f.bandwidth();
  const auto samples = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t) {
    const UnitSpectrum spectrum = sample_cbe(n, beta, rng);
    const std::vector<Complex> traces = trace_powers(spectrum, band);
    double diagonal = 0.0;
    for (const auto& [k, c] : f.coeffs) {
      if (k != 0) diagonal += std::norm(c) * std::norm(traces[static_cast<std::size_t>(std::abs(k) - 1)]);
    }
    return std::norm(circle_linear_statistic(spectrum, f)) - diagonal;
  });
  return summarize(samples, seed);
}

}  // namespace sinebeta
