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


#include "sinebeta/trace_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sinebeta/errors.hpp"
#include "sinebeta/parallel.hpp"

namespace sinebeta {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n),
      w_(n == 0 ? 0 : std::min(half_bandwidth, n - 1)),
      data_(n * (2 * w_ + 1)) {}

Complex BandedMatrix::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw ParameterError("banded matrix index out of range");
  if (i > j + w_ || j > i + w_) return {};
  return data_[i * (2 * w_ + 1) + (j + w_ - i)];
}

Complex& BandedMatrix::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || i > j + w_ || j > i + w_) {
    throw ParameterError("banded matrix index outside the band");
  }
  return data_[i * (2 * w_ + 1) + (j + w_ - i)];
}

Complex BandedMatrix::trace() const {
  Complex sum;
  for (std::size_t i = 0; i < n_; ++i) sum += data_[i * (2 * w_ + 1) + w_];
  return sum;
}

BandedMatrix operator*(const BandedMatrix& a, const BandedMatrix& b) {
  if (a.n_ != b.n_) throw ParameterError("banded product of mismatched dimensions");
  const std::size_t n = a.n_;
  BandedMatrix c(n, a.w_ + b.w_);
  const std::ptrdiff_t wa = static_cast<std::ptrdiff_t>(a.w_);
  const std::ptrdiff_t wb = static_cast<std::ptrdiff_t>(b.w_);
  const std::ptrdiff_t wc = static_cast<std::ptrdiff_t>(c.w_);
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(0, i - wc);
    const std::ptrdiff_t j_hi = std::min(sn - 1, i + wc);
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
      const std::ptrdiff_t l_lo = std::max({std::ptrdiff_t{0}, i - wa, j - wb});
      const std::ptrdiff_t l_hi = std::min({sn - 1, i + wa, j + wb});
      Complex sum;
      for (std::ptrdiff_t l = l_lo; l <= l_hi; ++l) {
        sum += a.data_[i * (2 * wa + 1) + (l - i + wa)] * b.data_[l * (2 * wb + 1) + (j - l + wb)];
      }
      c.data_[i * (2 * wc + 1) + (j - i + wc)] = sum;
    }
  }
  return c;
}

namespace {

// Block-diagonal factor holding Theta_j for j = first, first + 2, ...
BandedMatrix cmv_factor(const std::vector<Complex>& alphas, std::size_t first) {
  const std::size_t n = alphas.size();
  BandedMatrix f(n, 1);
  if (first == 1 && n > 0) f.at(0, 0) = 1.0;
  for (std::size_t j = first; j < n; j += 2) {
    const Complex a = alphas[j];
    if (j + 1 == n) {
      f.at(j, j) = std::conj(a);
      break;
    }
    const double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
    f.at(j, j) = std::conj(a);
    f.at(j, j + 1) = rho;
    f.at(j + 1, j) = rho;
    f.at(j + 1, j + 1) = -a;
  }
  return f;
}

}  // namespace

BandedUnitary::BandedUnitary(const VerblunskyCoefficients& coeffs)
    : matrix_((coeffs.validate(), cmv_factor(coeffs.alphas, 0) * cmv_factor(coeffs.alphas, 1))) {}

double BandedUnitary::unitarity_defect() const {
  const std::size_t n = dimension();
  if (n > 64) throw ParameterError("unitarity check is dense and limited to n <= 64");
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex sum;
      for (std::size_t l = 0; l < n; ++l) sum += std::conj(entry(l, i)) * entry(l, j);
      if (i == j) sum -= 1.0;
      worst = std::max(worst, std::abs(sum));
    }
  }
  return worst;
}

Complex trace_power(const UnitSpectrum& spectrum, long k) {
  if (k == 0) return static_cast<double>(spectrum.size());
  Complex sum;
  const double kd = static_cast<double>(k);
  for (double theta : spectrum.angles) sum += std::polar(1.0, kd * theta);
  return sum;
}

std::vector<Complex> trace_powers(const UnitSpectrum& spectrum, long kmax) {
  constexpr long kReseed = 128;
  std::vector<Complex> out(static_cast<std::size_t>(std::max(0L, kmax)));
  for (double theta : spectrum.angles) {
    const Complex z = std::polar(1.0, theta);
    Complex w = z;
    for (long k = 1; k <= kmax; ++k) {
      out[static_cast<std::size_t>(k - 1)] += w;
      w = (k % kReseed == 0) ? std::polar(1.0, static_cast<double>(k + 1) * theta) : w * z;
    }
  }
  return out;
}

Complex trace_power_matrix(const BandedUnitary& m, long k) {
  const long n = static_cast<long>(m.dimension());
  if (k < 1 || k > n) {
    throw ParameterError("trace_power_matrix requires 1 <= k <= n, got k = " +
                         std::to_string(k) + ", n = " + std::to_string(n));
  }
  BandedMatrix power = m.matrix();
  for (long r = 1; r < k; ++r) power = power * m.matrix();
  return power.trace();
}

double trace_gram(const BandedUnitary& m) {
  const std::size_t n = m.dimension();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    for (std::size_t j = lo; j < std::min(n, i + 3); ++j) sum += std::norm(m.entry(i, j));
  }
  return sum;
}

MomentEstimate summarize(std::span<const double> samples, std::uint64_t seed) {
  if (samples.size() < 2) throw ParameterError("a moment estimate needs at least 2 replicas");
  const double count = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= count;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  MomentEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(ss / (count - 1.0) / count);
  est.replicas = samples.size();
  est.seed = seed;
  return est;
}

namespace {

void check_replicas(std::size_t replicas) {
  if (replicas < 100) {
    throw ParameterError("Monte Carlo estimates require replicas >= 100, got " +
                         std::to_string(replicas));
  }
}

void check_power(long k) {
  if (k < 1) throw ParameterError("trace power k must be >= 1, got " + std::to_string(k));
}

}  // namespace

std::vector<MomentEstimate> mc_trace_second_moments(std::size_t n, BetaParam beta,
                                                    std::span<const long> ks,
                                                    std::size_t replicas,
                                                    std::uint64_t seed) {
  check_replicas(replicas);
  for (long k : ks) check_power(k);
  const std::vector<long> powers(ks.begin(), ks.end());
  const long kmax = powers.empty() ? 0 : *std::max_element(powers.begin(), powers.end());
  const auto rows = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t) {
    const UnitSpectrum spectrum = sample_cbe(n, beta, rng);
    const std::vector<Complex> traces = trace_powers(spectrum, kmax);
    std::vector<double> row(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i) row[i] = std::norm(traces[static_cast<std::size_t>(powers[i] - 1)]);
    return row;
  });
  std::vector<MomentEstimate> out;
  out.reserve(powers.size());
  std::vector<double> column(replicas);
  for (std::size_t i = 0; i < powers.size(); ++i) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = rows[r][i];
    MomentEstimate est = summarize(column, seed);
    est.above_half_n = 2 * powers[i] > static_cast<long>(n);
    out.push_back(est);
  }
  return out;
}

MomentEstimate mc_trace_second_moment(std::size_t n, BetaParam beta, long k,
                                      std::size_t replicas, std::uint64_t seed) {
  const long ks[] = {k};
  return mc_trace_second_moments(n, beta, ks, replicas, seed).front();
}

ComplexMomentEstimate mc_trace_cross_moment(std::size_t n, BetaParam beta, long k,
                                            long k2, std::size_t replicas,
                                            std::uint64_t seed) {
  check_replicas(replicas);
  check_power(k);
  check_power(k2);
  const auto products = map_replicas(replicas, seed, [&](RandomState& rng, std::size_t) {
    const UnitSpectrum spectrum = sample_cbe(n, beta, rng);
    return trace_power(spectrum, k) * std::conj(trace_power(spectrum, k2));
  });
  std::vector<double> re(replicas);
  std::vector<double> im(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    re[r] = products[r].real();
    im[r] = products[r].imag();
  }
  return {summarize(re, seed), summarize(im, seed)};
}

}  // namespace sinebeta
