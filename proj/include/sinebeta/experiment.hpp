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


#ifndef SINEBETA_EXPERIMENT_HPP
#define SINEBETA_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sinebeta/bandlimited.hpp"
#include "sinebeta/rigidity.hpp"

namespace sinebeta {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { traces, variance, testfn, recovery, oracle };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::traces;
  std::size_t n = 0;
  double beta = 2.0;
  /// traces and oracle.
  std::vector<long> ks;
  /// variance: "base", "dilate:<lambda>", "fp:<p>" (f_p at `radius`) or "file:<path>".
  std::vector<std::string> mixtures = {"base"};
  /// testfn and recovery.
  double radius = 2.0;
  std::vector<Interval> set;
  int p_max = 4;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  /// oracle quadrature nodes.
  std::size_t nodes = 400;
  /// Result path; empty writes nothing. Metadata goes to <output>.meta.
  std::string output;
  /// Optional gnuplot script path.
  std::string plot;
};

/// Throws ParameterError naming the offending field.
void validate(const ExperimentConfig& config);

/// "a:b,c:d" -> {[a, b], [c, d]}.
std::vector<Interval> parse_interval_list(const std::string& text);
/// "1,2,4".
std::vector<long> parse_long_list(const std::string& text);
ScaleMixture resolve_mixture(const std::string& spec, double radius);

/// key = value file. Keys outside any section apply to every experiment;
/// the section named after `kind` overrides them.
ExperimentConfig load_config(const std::string& path, ExperimentKind kind);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, double>> summary;
  double wall_seconds = 0.0;
  std::string version;
  std::string rng_scheme;

  /// Header line plus rows; the numeric payload.
  std::string csv() const;
  /// JSON sidecar: config echo, summary, version, RNG scheme, wall time.
  std::string metadata() const;
};

/// Dispatches to the module operation and, when config.output is set, writes
/// the CSV and its sidecar through a temporary file and a rename.
ExperimentResult run(const ExperimentConfig& config);

void write_atomic(const std::string& path, const std::string& content);

/// gnuplot script plotting the result file at `data_path`.
std::string plot_script(const ExperimentResult& result, const std::string& data_path);

}  // namespace sinebeta

#endif  // SINEBETA_EXPERIMENT_HPP
