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


#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sinebeta/errors.hpp"
#include "sinebeta/experiment.hpp"

namespace {

struct Flags {
  std::size_t n = 0;
  double beta = 0.0;
  std::vector<long> ks;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  int p_max = 0;
  double radius = 0.0;
  std::string set;
  std::vector<std::string> mixtures;
  std::size_t nodes = 0;
  std::string out;
  std::string plot;
  std::string config;
};

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> opts;
  Flags flags;
};

void add_flags(Command& c, sinebeta::ExperimentKind kind) {
  using sinebeta::ExperimentKind;
  Flags& f = c.flags;
  CLI::App& app = *c.app;
  c.opts["n"] = app.add_option("--n", f.n, "matrix size");
  c.opts["beta"] = app.add_option("--beta", f.beta, "inverse temperature, beta > 0");
  if (kind == ExperimentKind::traces || kind == ExperimentKind::oracle) {
    c.opts["k"] = app.add_option("--k", f.ks, "trace powers")->delimiter(',');
  }
  if (kind != ExperimentKind::oracle && kind != ExperimentKind::testfn) {
    c.opts["replicas"] = app.add_option("--replicas", f.replicas, "Monte Carlo replicas");
    c.opts["seed"] = app.add_option("--seed", f.seed, "master seed");
  }
  if (kind == ExperimentKind::testfn || kind == ExperimentKind::recovery || kind == ExperimentKind::variance) {
    c.opts["radius"] = app.add_option("--radius", f.radius, "window radius R");
  }
  if (kind == ExperimentKind::testfn || kind == ExperimentKind::recovery) {
    c.opts["p_max"] = app.add_option("--p-max", f.p_max, "largest p of the test-function sequence");
  }
  if (kind == ExperimentKind::recovery) {
    c.opts["set"] = app.add_option("--set", f.set, "target set B as \"a:b,c:d\"; default [-R, R]");
  }
  if (kind == ExperimentKind::variance) {
    c.opts["mixtures"] =
        app.add_option("--mixture", f.mixtures, "base | dilate:<lambda> | fp:<p> | file:<path>; repeatable");
  }
  if (kind == ExperimentKind::oracle) c.opts["nodes"] = app.add_option("--nodes", f.nodes, "quadrature nodes");
  c.opts["out"] = app.add_option("--out", f.out, "result CSV; metadata goes to <out>.meta");
  c.opts["plot"] = app.add_option("--plot", f.plot, "write a gnuplot script");
  c.opts["config"] = app.add_option("--config", f.config, "key = value file, one section per experiment");
}

bool given(const Command& c, const std::string& name) {
  const auto it = c.opts.find(name);
  return it != c.opts.end() && it->second->count() > 0;
}

sinebeta::ExperimentConfig build(const Command& c, sinebeta::ExperimentKind kind) {
  sinebeta::ExperimentConfig cfg;
  if (given(c, "config")) {
    cfg = sinebeta::load_config(c.flags.config, kind);
  } else {
    cfg.kind = kind;
  }
  const Flags& f = c.flags;
  if (given(c, "n")) cfg.n = f.n;
  if (given(c, "beta")) cfg.beta = f.beta;
  if (given(c, "k")) cfg.ks = f.ks;
  if (given(c, "replicas")) cfg.replicas = f.replicas;
  if (given(c, "seed")) cfg.seed = f.seed;
  if (given(c, "radius")) cfg.radius = f.radius;
  if (given(c, "p_max")) cfg.p_max = f.p_max;
  if (given(c, "set")) cfg.set = sinebeta::parse_interval_list(f.set);
  if (given(c, "mixtures")) cfg.mixtures = f.mixtures;
  if (given(c, "nodes")) cfg.nodes = f.nodes;
  if (given(c, "out")) cfg.output = f.out;
  if (given(c, "plot")) cfg.plot = f.plot;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using sinebeta::ExperimentKind;
  CLI::App app{"Monte Carlo laboratory for circular beta ensembles and number rigidity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sinebeta::kVersion));

  const std::vector<std::pair<ExperimentKind, std::string>> kinds = {
      {ExperimentKind::traces, "E|Tr M^k|^2 by Monte Carlo"},
      {ExperimentKind::variance, "line-statistic variance against the Riemann functional"},
      {ExperimentKind::testfn, "build and certify the flattened test-function sequence"},
      {ExperimentKind::recovery, "recover the count in B from the points outside [-R, R]"},
      {ExperimentKind::oracle, "E|Tr M^k|^2 by quadrature for n <= 3"}};
  std::vector<Command> commands(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    commands[i].app = app.add_subcommand(std::string(sinebeta::to_string(kinds[i].first)), kinds[i].second);
    add_flags(commands[i], kinds[i].first);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (!commands[i].app->parsed()) continue;
      const sinebeta::ExperimentConfig cfg = build(commands[i], kinds[i].first);
      const sinebeta::ExperimentResult result = sinebeta::run(cfg);
      if (cfg.output.empty()) {
        std::cout << result.csv();
      } else {
        std::cout << "wrote " << cfg.output << " (" << result.rows.size() << " rows) and " << cfg.output
                  << ".meta\n";
      }
      for (const auto& [key, value] : result.summary) std::cerr << key << " = " << value << "\n";
    }
  } catch (const sinebeta::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sinebeta::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
