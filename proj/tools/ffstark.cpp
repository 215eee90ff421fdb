/*
   Copyright 2026 The ffstark Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Command-line front end: one subcommand per experiment kind, plus `run` for
// mixed batches.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ffstark/harness.hpp"

namespace h = ffstark::harness;

int main(int argc, char** argv) {
  CLI::App app{"Stickelberger elements, refined regulators and Gross-Stark checks over F_q(t)"};
  app.require_subcommand(1);
  std::string config, out;
  int jobs = 1;
  uint64_t seed = h::RunOptions{}.seed;
  bool quiet = false;

  std::vector<std::pair<CLI::App*, std::string>> subs;
  auto add = [&](const std::string& name, const std::string& kind, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", out, "write the report here instead of stdout");
    s->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
    s->add_option("--seed", seed, "seed for randomized oracles");
    s->add_flag("--quiet", quiet, "no timing log on stderr");
    subs.push_back({s, kind});
  };
  add("run", "", "run every experiment in the config, whatever its kind");
  add("theta", "theta", "Stickelberger polynomial and theta_G");
  add("interpolation", "interpolation", "Theta against per-character L-functions");
  add("gross-check", "gross-check", "theta against h times the local-symbol determinant");
  add("stark-check", "stark-check", "refined Stark solution and verification");
  add("burns-check", "burns-check", "functional-symbol determinant against Phi(epsilon)");
  add("product-formula", "product-formula", "theta of subfields as products over characters");
  add("factorization", "factorization", "leading-form polynomials on a Z_p^d layer");
  add("aug-oracle", "aug-oracle", "augmentation-filtration oracle suite");
  add("selftest", "selftest", "built-in examples");

  CLI11_PARSE(app, argc, argv);

  std::string kind;
  for (auto& [s, k] : subs)
    if (s->parsed()) kind = k;
  try {
    auto cfgs = h::load_config(config, kind);
    h::RunOptions opt;
    opt.jobs = jobs;
    opt.seed = seed;
    h::json report = h::run_all(cfgs, opt, quiet ? nullptr : &std::cerr);
    std::string text = h::dump(report);
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + out);
      f << text;
    }
    return report["summary"]["ok"].get<bool>() ? 0 : 1;
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
