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


#include "sinebeta/bandlimited.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sinebeta/errors.hpp"

namespace sinebeta {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Scale ratios beyond this use the leading asymptotic term of the pair
// overlap; the neglected term is below 1e-12 relative.
constexpr double kFarRatio = 1e6;
constexpr double kMaxScale = 1e250;

double raw_bump(double x) {
  const double q = 0.25 - x * x;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// Bisection until the 61- and 31-point Kronrod rules agree on every piece
// to its share of the absolute tolerance, or to rounding of the piece's L1.
template <typename F>
double integrate_abs(const F& f, double a, double b, double tol, int depth) {
  using boost::math::quadrature::gauss_kronrod;
  double l1 = 0.0;
  const double fine = gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, nullptr, &l1);
  const double coarse = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (std::abs(fine - coarse) <= std::max(tol, floor) || depth == 0) return fine;
  const double mid = 0.5 * (a + b);
  return integrate_abs(f, a, mid, 0.5 * tol, depth - 1) + integrate_abs(f, mid, b, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-15) {
  return integrate_abs(f, a, b, tol, 30);
}

// Taylor coefficients of exp(-1 / (1/4 - (x + h)^2)) in h, up to order J.
void bump_taylor(double x, int order, std::vector<double>& e) {
  const double q0 = 0.25 - x * x;
  e.assign(static_cast<std::size_t>(order) + 1, 0.0);
  if (q0 <= 0.0) return;
  const double q1 = -2.0 * x;
  std::vector<double> g(e.size());
  double r_prev2 = 0.0;
  double r_prev = 1.0 / q0;
  g[0] = -r_prev;
  for (int k = 1; k <= order; ++k) {
    const double r = -(q1 * r_prev - r_prev2) / q0;
    g[static_cast<std::size_t>(k)] = -r;
    r_prev2 = r_prev;
    r_prev = r;
  }
  e[0] = std::exp(g[0]);
  for (int k = 1; k <= order; ++k) {
    double s = 0.0;
    for (int m = 1; m <= k; ++m) s += m * g[static_cast<std::size_t>(m)] * e[static_cast<std::size_t>(k - m)];
    e[static_cast<std::size_t>(k)] = s / k;
  }
}

}  // namespace

BumpSpec::BumpSpec() {
  c_ = 1.0 / (2.0 * integrate(raw_bump, 0.0, 0.5));
  peak_ = c_ * std::exp(-4.0);
  for (int k = 0; k <= 5; ++k) {
    moments_.push_back(c_ * integrate([k](double v) { return std::pow(v, k) * raw_bump(v); }, 0.0, 0.5));
  }
  // Midpoint rule for the L1 norms of the derivatives, inflated by 1%.
  constexpr int kGrid = 40000;
  const double h = 0.5 / kGrid;
  derivative_l1_.assign(kMaxDerivative + 1, 0.0);
  std::vector<double> e;
  for (int i = 0; i < kGrid; ++i) {
    bump_taylor((i + 0.5) * h, kMaxDerivative, e);
    double factorial = 1.0;
    for (int j = 1; j <= kMaxDerivative; ++j) {
      factorial *= j;
      derivative_l1_[static_cast<std::size_t>(j)] += std::abs(factorial * e[static_cast<std::size_t>(j)]);
    }
  }
  for (double& d : derivative_l1_) d *= 2.0 * h * c_ * 1.01;
}

const BumpSpec& BumpSpec::standard() {
  static const BumpSpec spec;
  return spec;
}

double BumpSpec::operator()(double x) const { return c_ * raw_bump(x); }

double BumpSpec::half_moment(int k) const {
  if (k < 0 || k >= static_cast<int>(moments_.size())) throw ParameterError("moment order out of range");
  return moments_[static_cast<std::size_t>(k)];
}

double BumpSpec::derivative_l1(int j) const {
  if (j < 1 || j > kMaxDerivative) throw ParameterError("derivative order out of range");
  return derivative_l1_[static_cast<std::size_t>(j)];
}

namespace {

// |f_base(s)| <= min(1, min_j C_j / (2 pi s)^j), returned as a logarithm.
double log_base_envelope(double s) {
  const BumpSpec& b = BumpSpec::standard();
  double best = 0.0;
  const double ls = std::log(kTwoPi * s);
  for (int j = 1; j <= BumpSpec::kMaxDerivative; ++j) {
    best = std::min(best, std::log(b.derivative_l1(j)) - j * ls);
  }
  return best;
}

}  // namespace

double base_transform(double s) {
  s = std::abs(s);
  if (s > 2000.0 && log_base_envelope(s) < std::log(1e-16)) return 0.0;
  const BumpSpec& b = BumpSpec::standard();
  const double w = kTwoPi * s;
  return 2.0 * integrate([&](double x) { return b(x) * std::cos(w * x); }, 0.0, 0.5, 1e-13);
}

ScaleMixture::ScaleMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  for (const MixtureComponent& c : components_) {
    if (!std::isfinite(c.weight)) throw ParameterError("mixture weight must be finite");
    if (!(c.scale >= 1.0) || !std::isfinite(c.scale)) {
      throw ParameterError("mixture scales must be finite and >= 1 so the Fourier support stays in [-1/2, 1/2]");
    }
  }
}

ScaleMixture ScaleMixture::base() { return ScaleMixture({{1.0, 1.0}}); }

double ScaleMixture::weight_sum() const {
  double s = 0.0;
  for (const MixtureComponent& c : components_) s += c.weight;
  return s;
}

double ScaleMixture::min_scale() const {
  double m = std::numeric_limits<double>::infinity();
  for (const MixtureComponent& c : components_) m = std::min(m, c.scale);
  return m;
}

double ScaleMixture::max_scale() const {
  double m = 0.0;
  for (const MixtureComponent& c : components_) m = std::max(m, c.scale);
  return m;
}

std::vector<MixtureComponent> ScaleMixture::merged() const {
  std::vector<MixtureComponent> sorted = components_;
  std::sort(sorted.begin(), sorted.end(),
            [](const MixtureComponent& a, const MixtureComponent& b) { return a.scale < b.scale; });
  std::vector<MixtureComponent> out;
  for (const MixtureComponent& c : sorted) {
    if (!out.empty() && out.back().scale == c.scale) {
      out.back().weight += c.weight;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

double eval_time(const ScaleMixture& mix, double t) {
  double sum = 0.0;
  for (const MixtureComponent& c : mix.merged()) sum += c.weight * base_transform(t / c.scale);
  return sum;
}

double eval_freq(const ScaleMixture& mix, double x) {
  if (std::abs(x) >= 0.5) return 0.0;
  const BumpSpec& b = mix.bump();
  double sum = 0.0;
  for (const MixtureComponent& c : mix.components()) sum += c.weight * c.scale * b(c.scale * x);
  return sum;
}

double integral(const ScaleMixture& mix) {
  double sum = 0.0;
  for (const MixtureComponent& c : mix.components()) sum += c.weight * c.scale;
  return mix.bump().peak() * sum;
}

namespace {

// H^{1/2} inner product of the unit-weight bumps at scales 1 and r >= 1:
// (2 / r) int_0^{1/2} v b(v) b(v / r) dv.
double pair_overlap(double r) {
  static std::mutex mutex;
  static std::unordered_map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find(r);
    if (it != cache.end()) return it->second;
  }
  const BumpSpec& b = BumpSpec::standard();
  const double value =
      2.0 / r * integrate([&](double v) { return v * b(v) * b(v / r); }, 0.0, 0.5);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(r, value);
  return value;
}

// Sum over pairs of w_i w_j <bump_{a_i}, bump_{b_j}>, both lists sorted by scale.
double overlap_sum(const std::vector<MixtureComponent>& a, const std::vector<MixtureComponent>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const BumpSpec& bump = BumpSpec::standard();
  const double far = 2.0 * bump.peak() * bump.half_moment(1);
  const std::size_t nb = b.size();
  // prefix[j] = sum_{l<j} w_l b_l, suffix[j] = sum_{l>=j} w_l / b_l.
  std::vector<double> prefix(nb + 1, 0.0);
  std::vector<double> suffix(nb + 1, 0.0);
  for (std::size_t j = 0; j < nb; ++j) prefix[j + 1] = prefix[j] + b[j].weight * b[j].scale;
  for (std::size_t j = nb; j-- > 0;) suffix[j] = suffix[j + 1] + b[j].weight / b[j].scale;
  auto lower = [&](double scale) {
    return static_cast<std::size_t>(
        std::lower_bound(b.begin(), b.end(), scale,
                         [](const MixtureComponent& c, double s) { return c.scale < s; }) -
        b.begin());
  };
  double total = 0.0;
  for (const MixtureComponent& ai : a) {
    const std::size_t lo = lower(ai.scale / kFarRatio);
    const std::size_t hi = lower(ai.scale * kFarRatio);
    double row = far * (prefix[lo] / ai.scale + suffix[hi] * ai.scale);
    for (std::size_t j = lo; j < hi; ++j) {
      const double r = b[j].scale >= ai.scale ? b[j].scale / ai.scale : ai.scale / b[j].scale;
      row += b[j].weight * pair_overlap(r);
    }
    total += ai.weight * row;
  }
  return total;
}

}  // namespace

double dilation_overlap(const ScaleMixture& mix, double L) {
  if (!(L > 0.0)) throw ParameterError("dilation factor must be positive");
  const std::vector<MixtureComponent> a = mix.merged();
  std::vector<MixtureComponent> b = a;
  for (MixtureComponent& c : b) c.scale *= L;
  return overlap_sum(a, b);
}

double h_half_norm_squared(const ScaleMixture& mix) {
  const std::vector<MixtureComponent> a = mix.merged();
  return std::max(0.0, overlap_sum(a, a));
}

double h_half_norm(const ScaleMixture& mix) { return std::sqrt(h_half_norm_squared(mix)); }

ScaleMixture dilate(const ScaleMixture& mix, double lambda) {
  if (!(lambda >= 1.0)) throw ParameterError("dilation factor must be >= 1");
  std::vector<MixtureComponent> out = mix.components();
  for (MixtureComponent& c : out) c.scale *= lambda;
  return ScaleMixture(std::move(out));
}

ScaleMixture dilate_average(const ScaleMixture& mix, double L) {
  if (!(L > 1.0)) throw ParameterError("dilate_average requires L > 1");
  std::vector<MixtureComponent> out;
  out.reserve(2 * mix.size());
  for (const MixtureComponent& c : mix.components()) out.push_back({0.5 * c.weight, c.scale});
  for (const MixtureComponent& c : mix.components()) out.push_back({0.5 * c.weight, L * c.scale});
  return ScaleMixture(std::move(out));
}

ScaleMixture reduce_norm(const ScaleMixture& mix, double target, const ReductionOptions& options,
                         std::vector<ReductionStep>* steps) {
  if (!(target > 0.0)) throw ParameterError("reduce_norm target must be positive");
  ScaleMixture current = mix;
  double norm_sq = h_half_norm_squared(current);
  auto fail = [&](const std::string& why) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "; achieved H^1/2 norm %.6e with %zu components", std::sqrt(norm_sq),
                  current.size());
    throw ResourceError("reduce_norm: " + why + buf);
  };
  while (std::sqrt(norm_sq) > target) {
    if (2 * current.size() > options.component_cap) fail("component cap exceeded");
    double L = 2.0;
    for (;;) {
      if (current.max_scale() * L > kMaxScale) fail("scales leave the floating-point range");
      const double candidate = 0.5 * (norm_sq + dilation_overlap(current, L));
      if (candidate <= options.contraction * norm_sq) break;
      L *= 2.0;
    }
    ScaleMixture next = dilate_average(current, L);
    const double next_sq = h_half_norm_squared(next);
    if (next_sq > options.contraction * norm_sq * (1.0 + 1e-12)) {
      throw ConsistencyError("reduce_norm: accepted step violates the contraction factor");
    }
    if (steps) steps->push_back({L, norm_sq, next_sq});
    current = std::move(next);
    norm_sq = next_sq;
  }
  return current;
}

namespace {

constexpr int kChebDegree = 16;
constexpr int kTablePieces = static_cast<int>(TimeEvaluator::kCutoff);

// Chebyshev coefficients of f_base on [j, j + 1], j = 0..kTablePieces-1.
// Node values use the periodic trapezoid rule, which is spectrally accurate
// because b vanishes to all orders at +-1/2.
const std::vector<std::array<double, kChebDegree + 1>>& base_table() {
  static const std::vector<std::array<double, kChebDegree + 1>> table = [] {
    constexpr int kQuad = 2048;
    const BumpSpec& b = BumpSpec::standard();
    std::vector<double> xs(kQuad);
    std::vector<double> bs(kQuad);
    for (int m = 0; m < kQuad; ++m) {
      xs[static_cast<std::size_t>(m)] = -0.5 + static_cast<double>(m) / kQuad;
      bs[static_cast<std::size_t>(m)] = b(xs[static_cast<std::size_t>(m)]) / kQuad;
    }
    constexpr int kNodes = kChebDegree + 1;
    std::vector<std::array<double, kChebDegree + 1>> out(kTablePieces);
    std::array<double, kNodes> values{};
    for (int j = 0; j < kTablePieces; ++j) {
      for (int k = 0; k < kNodes; ++k) {
        const double u = std::cos(kPi * (k + 0.5) / kNodes);
        const double s = j + 0.5 * (u + 1.0);
        double sum = 0.0;
        for (int m = 0; m < kQuad; ++m) sum += bs[static_cast<std::size_t>(m)] * std::cos(kTwoPi * xs[static_cast<std::size_t>(m)] * s);
        values[static_cast<std::size_t>(k)] = sum;
      }
      for (int d = 0; d < kNodes; ++d) {
        double c = 0.0;
        for (int k = 0; k < kNodes; ++k) c += values[static_cast<std::size_t>(k)] * std::cos(kPi * d * (k + 0.5) / kNodes);
        out[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] = (d == 0 ? 1.0 : 2.0) * c / kNodes;
      }
    }
    return out;
  }();
  return table;
}

}  // namespace

double TimeEvaluator::base(double s) {
  s = std::abs(s);
  if (s >= kCutoff) return 0.0;
  const auto& table = base_table();
  const int j = static_cast<int>(s);
  const auto& c = table[static_cast<std::size_t>(j)];
  const double u = 2.0 * (s - j) - 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (int d = kChebDegree; d >= 1; --d) {
    const double t = 2.0 * u * b1 - b2 + c[static_cast<std::size_t>(d)];
    b2 = b1;
    b1 = t;
  }
  return u * b1 - b2 + c[0];
}

TimeEvaluator::TimeEvaluator(const ScaleMixture& mix) {
  const double m1 = 2.0 * BumpSpec::standard().half_moment(1);
  for (const MixtureComponent& c : mix.merged()) {
    weights_.push_back(c.weight);
    inverse_scales_.push_back(1.0 / c.scale);
    lipschitz_ += kTwoPi * m1 * std::abs(c.weight) / c.scale;
  }
  base_table();
}

double TimeEvaluator::operator()(double t) const {
  const double at = std::abs(t);
  double sum = 0.0;
  // Scales ascend, so arguments descend; skip those beyond the table.
  for (std::size_t i = weights_.size(); i-- > 0;) {
    const double s = at * inverse_scales_[i];
    if (s >= kCutoff) break;
    sum += weights_[i] * base(s);
  }
  return sum;
}

double certified_flatness(const ScaleMixture& mix, double R, double slack) {
  if (!(R > 0.0) || !(slack > 0.0)) throw ParameterError("certified_flatness requires R > 0 and slack > 0");
  const TimeEvaluator f(mix);
  double abs_weights = 0.0;
  for (const MixtureComponent& c : mix.components()) abs_weights += std::abs(c.weight);
  const double lip = f.lipschitz();
  const double h_max = lip > 0.0 ? 2.0 * slack / lip : R;
  const double cells = std::ceil(R / h_max);
  if (cells > 1e8) throw ResourceError("certified_flatness: grid too fine");
  const std::size_t count = static_cast<std::size_t>(cells);
  const double h = R / static_cast<double>(count);
  double worst = 0.0;
  // f is even, so [0, R] covers [-R, R].
  for (std::size_t i = 0; i <= count; ++i) worst = std::max(worst, std::abs(f(h * static_cast<double>(i)) - 1.0));
  return worst + 0.5 * lip * h + TimeEvaluator::kTableError * abs_weights;
}

ScaleMixture flatten(const ScaleMixture& mix, double R, double eps, FlattenReport* report) {
  if (!(eps > 0.0)) throw ParameterError("flatten requires eps > 0");
  if (!(R > 0.0)) throw ParameterError("flatten requires R > 0");
  for (int k = 0; k <= 30; ++k) {
    const double lambda = std::ldexp(1.0, k);
    ScaleMixture candidate = dilate(mix, lambda);
    const double sup = certified_flatness(candidate, R, 0.25 * eps);
    if (sup <= eps) {
      if (report) *report = {lambda, sup};
      return candidate;
    }
  }
  throw ResourceError("flatten: sup |f - 1| <= eps not reached with dilation <= 2^30");
}

namespace {

// log of the bound on int_T^inf |f_base(t / L)| dt, T > 0.
double log_component_tail(double L, double T) {
  const BumpSpec& b = BumpSpec::standard();
  double best = std::numeric_limits<double>::infinity();
  const double lt = std::log(T);
  const double ll = std::log(L / kTwoPi);
  for (int j = 2; j <= BumpSpec::kMaxDerivative; ++j) {
    best = std::min(best, std::log(b.derivative_l1(j)) + j * ll + (1 - j) * lt - std::log(j - 1.0));
  }
  return best;
}

}  // namespace

double tail_integral_bound(const ScaleMixture& mix, double T) {
  if (!(T > 0.0)) throw ParameterError("tail bound requires T > 0");
  double sum = 0.0;
  for (const MixtureComponent& c : mix.components()) sum += std::abs(c.weight) * std::exp(log_component_tail(c.scale, T));
  return 2.0 * sum;
}

double tail_sup_bound(const ScaleMixture& mix, double T) {
  if (!(T > 0.0)) throw ParameterError("tail bound requires T > 0");
  double sum = 0.0;
  for (const MixtureComponent& c : mix.components()) sum += std::abs(c.weight) * std::exp(log_base_envelope(T / c.scale));
  return sum;
}

double periodized_tail_bound(const ScaleMixture& mix, std::size_t count, double period, double T) {
  if (!(T > 0.0) || !(period > 0.0)) throw ParameterError("tail bound requires T > 0 and period > 0");
  const BumpSpec& b = BumpSpec::standard();
  const double lt = std::log(T);
  double sum = 0.0;
  // Per side and point: E(T) + (1/P) int_T^inf E for the decreasing envelope
  // E_j(t) = C_j (L / (2 pi t))^j.
  for (const MixtureComponent& c : mix.components()) {
    const double ll = std::log(c.scale / kTwoPi);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 2; j <= BumpSpec::kMaxDerivative; ++j) {
      const double head = std::log(b.derivative_l1(j)) + j * (ll - lt);
      best = std::min(best, head + std::log1p(T / ((j - 1.0) * period)));
    }
    sum += std::abs(c.weight) * std::exp(best);
  }
  return 2.0 * static_cast<double>(count) * sum;
}

std::string serialize(const ScaleMixture& mix) {
  std::string out = "sinebeta-mixture 1\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "normalization %.16e\ncomponents %zu\n", mix.bump().normalization(), mix.size());
  out += buf;
  for (const MixtureComponent& c : mix.components()) {
    std::snprintf(buf, sizeof buf, "%.16e %.16e\n", c.weight, c.scale);
    out += buf;
  }
  return out;
}

ScaleMixture parse_mixture(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "sinebeta-mixture" || version != 1) {
    throw ParameterError("mixture record: missing 'sinebeta-mixture 1' header");
  }
  double normalization = 0.0;
  if (!(in >> tag >> normalization) || tag != "normalization") {
    throw ParameterError("mixture record: missing normalization line");
  }
  const double expected = BumpSpec::standard().normalization();
  if (std::abs(normalization - expected) > 1e-12 * expected) {
    throw ParameterError("mixture record: normalization does not match the standard bump");
  }
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "components") {
    throw ParameterError("mixture record: missing component count");
  }
  std::vector<MixtureComponent> comps(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> comps[i].weight >> comps[i].scale)) {
      throw ParameterError("mixture record: expected " + std::to_string(count) + " components");
    }
  }
  return ScaleMixture(std::move(comps));
}

}  // namespace sinebeta
