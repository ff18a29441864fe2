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


#include "sinebeta/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <unistd.h>

#include "sinebeta/errors.hpp"
#include "sinebeta/linstat.hpp"
#include "sinebeta/parallel.hpp"
#include "sinebeta/rng.hpp"
#include "sinebeta/trace_stats.hpp"

namespace sinebeta {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParameterError(field + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(long x) { return std::to_string(x); }

std::string interval_list(const std::vector<Interval>& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i > 0) out += ",";
    out += fmt(set[i].lo) + ":" + fmt(set[i].hi);
  }
  return out;
}

template <class T>
std::string joined(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

void run_traces(const ExperimentConfig& c, ExperimentResult& r) {
  const auto est = mc_trace_second_moments(c.n, BetaParam(c.beta), c.ks, c.replicas, c.seed);
  r.columns = {"k", "estimate", "std_error", "estimate_over_k", "replicas", "above_half_n"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double ratio = est[i].value / static_cast<double>(c.ks[i]);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    r.rows.push_back({fmt(c.ks[i]), fmt(est[i].value), fmt(est[i].std_error), fmt(ratio), fmt(est[i].replicas),
                      est[i].above_half_n ? "1" : "0"});
  }
  r.summary = {{"ratio_min", lo}, {"ratio_max", hi}, {"ratio_max_over_min", hi / lo}};
}

void run_oracle(const ExperimentConfig& c, ExperimentResult& r) {
  r.columns = {"k", "oracle", "nodes"};
  QuadratureOptions opts;
  opts.nodes = c.nodes;
  opts.rotation_invariant = true;
  for (long k : c.ks) {
    const double v = cbe_quadrature_oracle(
        c.n, BetaParam(c.beta),
        [k](std::span<const double> theta) {
          std::complex<double> s;
          for (double t : theta) s += std::polar(1.0, static_cast<double>(k) * t);
          return std::norm(s);
        },
        opts);
    r.rows.push_back({fmt(k), fmt(v), fmt(c.nodes)});
  }
}

void run_variance(const ExperimentConfig& c, ExperimentResult& r) {
  std::vector<ScaleMixture> mixes;
  for (const std::string& spec : c.mixtures) mixes.push_back(resolve_mixture(spec, c.radius));
  const auto est = mc_line_variances(c.n, BetaParam(c.beta), mixes, c.replicas, c.seed);
  r.columns = {"mixture", "n", "variance", "std_error", "riemann", "ratio", "h_half_norm_sq", "replicas"};
  for (std::size_t i = 0; i < mixes.size(); ++i) {
    const double riemann = riemann_functional(mixes[i], c.n).value;
    r.rows.push_back({c.mixtures[i], fmt(c.n), fmt(est[i].value), fmt(est[i].std_error), fmt(riemann),
                      fmt(est[i].value / riemann), fmt(h_half_norm_squared(mixes[i])), fmt(est[i].replicas)});
  }
}

void run_testfn(const ExperimentConfig& c, ExperimentResult& r) {
  const TestSequenceSpec seq = make_fp_sequence(c.radius, c.p_max);
  r.columns = {"p", "components", "lambda", "h_half_norm", "certified_sup", "max_scale", "integral"};
  for (std::size_t p = 0; p < seq.mixtures.size(); ++p) {
    const ScaleMixture& m = seq.mixtures[p];
    r.rows.push_back({fmt(p), fmt(m.size()), fmt(seq.lambdas[p]), fmt(seq.norms[p]), fmt(seq.certified_sups[p]),
                      fmt(m.max_scale()), fmt(integral(m))});
  }
}

void run_recovery(const ExperimentConfig& c, ExperimentResult& r) {
  const std::vector<Interval> B = c.set.empty() ? std::vector<Interval>{{-c.radius, c.radius}} : c.set;
  const RecoveryResult res = recovery_experiment(c.n, BetaParam(c.beta), c.radius, B, c.p_max, c.replicas, c.seed);
  r.columns = {"replica", "p", "estimate", "true_count", "window_estimate", "window_count", "full_statistic",
               "telescoping_residual", "window_n", "seed"};
  for (const CountRecoveryRecord& rec : res.records) {
    r.rows.push_back({fmt(rec.replica), fmt(rec.p), fmt(rec.estimate), fmt(rec.true_count),
                      fmt(rec.window_estimate), fmt(rec.window_count), fmt(rec.full_statistic),
                      fmt(rec.telescoping_residual), fmt(rec.window_n), std::to_string(rec.seed)});
  }
  for (const RecoverySummary& s : res.summaries) {
    const std::string p = "_p" + std::to_string(s.p);
    r.summary.emplace_back("median_abs_error" + p, s.median_abs_error);
    r.summary.emplace_back("exact_fraction" + p, s.exact_fraction);
    r.summary.emplace_back("max_telescoping_residual" + p, s.max_telescoping_residual);
    r.summary.emplace_back("l2_constant" + p, s.l2_constant);
  }
  r.summary.emplace_back("log2_slope", res.log2_slope);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::traces: return "traces";
    case ExperimentKind::variance: return "variance";
    case ExperimentKind::testfn: return "testfn";
    case ExperimentKind::recovery: return "recovery";
    case ExperimentKind::oracle: return "oracle";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::traces, ExperimentKind::variance, ExperimentKind::testfn,
                           ExperimentKind::recovery, ExperimentKind::oracle}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("kind: unknown experiment '" + name + "'");
}

std::vector<Interval> parse_interval_list(const std::string& text) {
  std::vector<Interval> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    require(colon != std::string::npos, "set: interval '" + item + "' must be written lo:hi");
    Interval I{parse_number<double>("set", item.substr(0, colon)),
               parse_number<double>("set", item.substr(colon + 1))};
    require(I.lo <= I.hi, "set: interval '" + item + "' has lo > hi");
    out.push_back(I);
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number<long>("k", item));
  return out;
}

ScaleMixture resolve_mixture(const std::string& spec, double radius) {
  if (spec == "base") return ScaleMixture::base();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (head == "dilate") return dilate(ScaleMixture::base(), parse_number<double>("mixtures", arg));
  if (head == "fp") {
    const int p = parse_number<int>("mixtures", arg);
    return make_fp_sequence(radius, p).mixtures.back();
  }
  if (head == "file") {
    std::ifstream in(arg);
    require(static_cast<bool>(in), "mixtures: cannot open '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mixture(ss.str());
  }
  throw ParameterError("mixtures: unknown mixture '" + spec + "'");
}

void validate(const ExperimentConfig& c) {
  require(c.beta > 0.0 && std::isfinite(c.beta), "beta: must satisfy beta > 0, got " + fmt(c.beta));
  require(c.plot.empty() || !c.output.empty(), "plot: a plot script needs an output path");
  switch (c.kind) {
    case ExperimentKind::traces:
      require(c.n >= 1, "n: must be >= 1");
      require(!c.ks.empty(), "k: at least one k is required");
      for (long k : c.ks) require(k >= 1, "k: every k must be >= 1, got " + std::to_string(k));
      require(c.replicas >= 100, "replicas: must be >= 100");
      break;
    case ExperimentKind::oracle:
      require(c.n >= 1 && c.n <= 3, "n: the quadrature oracle supports 1 <= n <= 3");
      require(!c.ks.empty(), "k: at least one k is required");
      require(c.nodes >= 400, "nodes: must be >= 400");
      break;
    case ExperimentKind::variance:
      require(c.n >= 2, "n: must be >= 2");
      require(!c.mixtures.empty(), "mixtures: at least one mixture is required");
      require(c.replicas >= 100, "replicas: must be >= 100");
      require(c.radius > 0.0, "radius: must be > 0");
      break;
    case ExperimentKind::testfn:
      require(c.radius > 0.0, "radius: must be > 0");
      require(c.p_max >= 0 && c.p_max <= SequenceOptions{}.p_cap, "p_max: must lie in [0, 5]");
      break;
    case ExperimentKind::recovery:
      require(c.n >= 1, "n: must be >= 1");
      require(c.radius > 0.0, "radius: must be > 0");
      require(c.radius < 0.5 * static_cast<double>(c.n), "radius: must satisfy radius < n/2");
      require(c.p_max >= 0 && c.p_max <= SequenceOptions{}.p_cap, "p_max: must lie in [0, 5]");
      require(c.replicas >= 1, "replicas: must be >= 1");
      for (const Interval& I : c.set) {
        require(I.lo <= I.hi && I.lo >= -c.radius && I.hi <= c.radius, "set: intervals must lie inside [-R, R]");
      }
      break;
  }
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParameterError("config: " + std::string(e.what()));
  }
  ExperimentConfig c;
  c.kind = kind;
  auto apply = [&c](const std::string& key, const std::string& value) {
    if (key == "n") {
      c.n = parse_number<std::size_t>(key, value);
    } else if (key == "beta") {
      c.beta = parse_number<double>(key, value);
    } else if (key == "k") {
      c.ks = parse_long_list(value);
    } else if (key == "mixtures") {
      c.mixtures = split(value, ',');
    } else if (key == "radius") {
      c.radius = parse_number<double>(key, value);
    } else if (key == "set") {
      c.set = parse_interval_list(value);
    } else if (key == "p_max" || key == "p-max") {
      c.p_max = parse_number<int>("p_max", value);
    } else if (key == "replicas") {
      c.replicas = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "nodes") {
      c.nodes = parse_number<std::size_t>(key, value);
    } else if (key == "out") {
      c.output = value;
    } else if (key == "plot") {
      c.plot = value;
    } else {
      throw ParameterError("config: unknown key '" + key + "'");
    }
  };
  for (const auto& [key, node] : tree) {
    if (node.empty()) apply(key, node.data());
  }
  if (const auto section = tree.get_child_optional(std::string(to_string(kind)))) {
    for (const auto& [key, node] : *section) apply(key, node.data());
  }
  return c;
}

std::string ExperimentResult::csv() const {
  std::string out = joined(columns) + "\n";
  for (const auto& row : rows) out += joined(row) + "\n";
  return out;
}

std::string ExperimentResult::metadata() const {
  nlohmann::ordered_json j;
  j["format"] = "sinebeta-result 1";
  j["version"] = version;
  j["rng_scheme"] = rng_scheme;
  j["wall_seconds"] = wall_seconds;
  nlohmann::ordered_json cfg;
  cfg["kind"] = std::string(to_string(config.kind));
  cfg["n"] = config.n;
  cfg["beta"] = config.beta;
  cfg["k"] = config.ks;
  cfg["mixtures"] = config.mixtures;
  cfg["radius"] = config.radius;
  cfg["set"] = interval_list(config.set);
  cfg["p_max"] = config.p_max;
  cfg["replicas"] = config.replicas;
  cfg["seed"] = config.seed;
  cfg["nodes"] = config.nodes;
  j["config"] = cfg;
  const ExperimentKind kind = config.kind;
  std::string cmd = "sinebeta " + std::string(to_string(kind));
  if (kind != ExperimentKind::testfn) cmd += " --n " + fmt(config.n);
  cmd += " --beta " + fmt(config.beta);
  if (kind == ExperimentKind::traces || kind == ExperimentKind::oracle) cmd += " --k " + joined(config.ks);
  if (kind != ExperimentKind::oracle && kind != ExperimentKind::testfn) {
    cmd += " --replicas " + fmt(config.replicas) + " --seed " + std::to_string(config.seed);
  }
  if (kind == ExperimentKind::testfn || kind == ExperimentKind::recovery || kind == ExperimentKind::variance) {
    cmd += " --radius " + fmt(config.radius);
  }
  if (kind == ExperimentKind::testfn || kind == ExperimentKind::recovery) {
    cmd += " --p-max " + std::to_string(config.p_max);
  }
  if (kind == ExperimentKind::recovery && !config.set.empty()) cmd += " --set " + interval_list(config.set);
  if (kind == ExperimentKind::variance) {
    for (const std::string& m : config.mixtures) cmd += " --mixture " + m;
  }
  if (kind == ExperimentKind::oracle) cmd += " --nodes " + fmt(config.nodes);
  j["command"] = cmd;
  j["columns"] = columns;
  j["rows"] = rows.size();
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [key, value] : summary) s[key] = value;
  j["summary"] = s;
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ResourceError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ResourceError("cannot rename onto '" + path + "': " + ec.message());
  }
}

std::string plot_script(const ExperimentResult& result, const std::string& data_path) {
  std::string s = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";
  const std::string data = "'" + data_path + "'";
  switch (result.config.kind) {
    case ExperimentKind::traces:
      s += "set logscale xy\nset xlabel 'k'\nset ylabel 'E|Tr M^k|^2'\n";
      s += "plot " + data + " using 1:2:3 with yerrorbars title 'estimate', x title 'k'\n";
      break;
    case ExperimentKind::oracle:
      s += "set xlabel 'k'\nplot " + data + " using 1:2 with linespoints title 'oracle'\n";
      break;
    case ExperimentKind::variance:
      s += "set style data histograms\nset ylabel 'variance / Riemann functional'\n";
      s += "plot " + data + " using 6:xtic(1) title 'ratio'\n";
      break;
    case ExperimentKind::testfn:
      s += "set logscale y\nset xlabel 'p'\n";
      s += "plot " + data + " using 1:4 with linespoints title 'H^{1/2} norm', " + data +
           " using 1:5 with linespoints title 'certified sup', 2**(-x) title '2^{-p}'\n";
      break;
    case ExperimentKind::recovery:
      s += "set xlabel 'p'\nset ylabel '|estimate - count|'\nset logscale y\n";
      s += "plot " + data + " using ($2+0.3*rand(0)-0.15):(abs($3-$4)) with points pt 7 ps 0.3 title 'replicas'\n";
      break;
  }
  return s;
}

ExperimentResult run(const ExperimentConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r;
  r.config = config;
  r.version = std::string(kVersion);
  r.rng_scheme = std::string(kRngScheme);
  switch (config.kind) {
    case ExperimentKind::traces: run_traces(config, r); break;
    case ExperimentKind::oracle: run_oracle(config, r); break;
    case ExperimentKind::variance: run_variance(config, r); break;
    case ExperimentKind::testfn: run_testfn(config, r); break;
    case ExperimentKind::recovery: run_recovery(config, r); break;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!config.output.empty()) {
    write_atomic(config.output, r.csv());
    write_atomic(config.output + ".meta", r.metadata());
    if (!config.plot.empty()) write_atomic(config.plot, plot_script(r, config.output));
  }
  return r;
}

}  // namespace sinebeta
