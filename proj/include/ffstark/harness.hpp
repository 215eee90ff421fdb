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

#pragma once

// Experiment configuration, orchestration and machine-readable reports.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffstark/classfield.hpp"

namespace ffstark::harness {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportFormat = "ffstark-report/1";

// Experiment kinds accepted by run().
const std::vector<std::string>& kinds();

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string id, kind;
  int q = 3;
  int64_t p = 3;
  json extension;  // extension descriptor
  json H;          // subgroup spec for layer kinds
  std::vector<Place> S, T, S0, places;
  int n = 1, M = 3, B = 8, W = 4, D = 1;
  json units;        // {"source": "auto"} or supplied basis
  json epsilon;      // optional wedge
  json functionals;  // optional n x n matrix over Z[Gamma]
  json layers;       // stark-check layers
  json bridge;       // numerical companion layers
  json expect;       // kind-specific expected values
  json params;       // kind-specific extra parameters
  json raw;          // the experiment object as given
};

// Parsing. A config file holds one experiment object or {"experiments": [...]}.
std::vector<ExperimentConfig> parse_config(const json& j, const std::string& kind = "");
std::vector<ExperimentConfig> load_config(const std::string& path, const std::string& kind = "");
ExperimentConfig parse_experiment(const json& j, const std::string& kind = "");

FqPoly parse_poly(int q, const std::string& s);
Place parse_place(int q, const std::string& s);
std::string place_name(const Place& v);

// Extensions built from descriptors keep their components so subgroup specs
// can refer to them.
struct BuiltExtension {
  ExtPtr ext;
  std::string type;
  std::optional<FqPoly> modulus;      // Carlitz and quotients of Carlitz
  std::vector<BuiltExtension> parts;  // composite components
};

BuiltExtension build_extension(int q, const json& desc);
Subgroup build_subgroup(const BuiltExtension& e, const json& spec, int64_t p);

struct Check {
  std::string id;
  std::string status;  // verified-exact, verified-at-precision(M'), failed, out-of-scope
  std::string detail;
  json witness;
  json to_json() const;
};

struct Report {
  std::string id, kind;
  json inputs;
  json results = json::object();
  std::vector<Check> checks;
  double seconds = 0;  // reported on the log stream only

  void exact(const std::string& id, const std::string& detail);
  void at_precision(const std::string& id, int prec, const std::string& detail);
  void failed(const std::string& id, const std::string& detail, json witness);
  void out_of_scope(const std::string& id, const std::string& reason);
  // exact() or failed() depending on ok.
  void expect(bool ok, const std::string& id, const std::string& detail, json witness = nullptr);
  void expect_at(bool ok, int prec, const std::string& id, const std::string& detail, json witness = nullptr);

  bool ok() const;
  const Check* find(const std::string& id) const;
  json to_json() const;
};

struct RunOptions {
  int jobs = 1;
  uint64_t seed = 20260101;
};

Report run(const ExperimentConfig& cfg, const RunOptions& opt);

// Runs experiments (concurrently up to opt.jobs) and assembles the report
// ordered by experiment id. Per-experiment timings go to `log` when given.
json run_all(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opt, std::ostream* log = nullptr);

// Canonical serialization.
std::string dump(const json& report);

namespace kind {
Report theta(const ExperimentConfig& c, const RunOptions& o);
Report interpolation(const ExperimentConfig& c, const RunOptions& o);
Report gross_check(const ExperimentConfig& c, const RunOptions& o);
Report stark_check(const ExperimentConfig& c, const RunOptions& o);
Report burns_check(const ExperimentConfig& c, const RunOptions& o);
Report product_formula(const ExperimentConfig& c, const RunOptions& o);
Report factorization(const ExperimentConfig& c, const RunOptions& o);
Report aug_oracle(const ExperimentConfig& c, const RunOptions& o);
Report selftest(const ExperimentConfig& c, const RunOptions& o);
}  // namespace kind

}  // namespace ffstark::harness
