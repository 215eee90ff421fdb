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

#include "ffstark/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "ffstark/units.hpp"

namespace ffstark::harness {

const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k = {"theta",          "interpolation",   "gross-check",
                                             "stark-check",    "burns-check",     "product-formula",
                                             "factorization",  "aug-oracle",      "selftest"};
  return k;
}

// ---------------------------------------------------------------------------
// Polynomials and places

FqPoly parse_poly(int q, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ConfigError("empty polynomial");
  std::vector<int> c;
  size_t i = 0;
  auto bad = [&] { return ConfigError("cannot parse polynomial '" + text + "'"); };
  auto number = [&](int64_t& out) {
    size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) return false;
    out = std::stoll(s.substr(i, j - i));
    i = j;
    return true;
  };
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      throw bad();
    }
    int64_t coef = 1, e = 0;
    bool has_coef = number(coef);
    if (i < s.size() && s[i] == '*') {
      if (!has_coef) throw bad();
      ++i;
    }
    if (i < s.size() && s[i] == 't') {
      ++i;
      e = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        if (!number(e)) throw bad();
      }
    } else if (!has_coef) {
      throw bad();
    }
    if (e > 4096) throw bad();
    if (static_cast<int64_t>(c.size()) <= e) c.resize(e + 1, 0);
    c[e] = static_cast<int>(posmod(c[e] + sign * coef, q));
  }
  return FqPoly(q, c);
}

Place parse_place(int q, const std::string& s) {
  if (s == "inf" || s == "infinity") return Place::infinity(q);
  FqPoly P = parse_poly(q, s);
  if (!P.is_monic() || !is_irreducible(P)) throw ConfigError("place '" + s + "' is not monic irreducible");
  return Place::finite(P);
}

std::string place_name(const Place& v) { return v.str(); }

// ---------------------------------------------------------------------------
// Extensions and subgroups

namespace {

std::string type_of(const json& d) {
  if (d.is_string()) return d.get<std::string>();
  if (!d.is_object() || !d.contains("type")) throw ConfigError("descriptor needs a type: " + d.dump());
  return d.at("type").get<std::string>();
}

// Offset of component i in a composite's group indexing.
int64_t part_offset(const BuiltExtension& e, size_t i) {
  int64_t off = 1;
  for (size_t k = 0; k < i; ++k) off *= e.parts[k].ext->G->order();
  return off;
}

}  // namespace

BuiltExtension build_extension(int q, const json& d) {
  BuiltExtension b;
  b.type = type_of(d);
  if (b.type == "trivial") {
    b.ext = trivial_extension(q);
  } else if (b.type == "constant") {
    int64_t n = d.at("degree").get<int64_t>();
    if (n < 1) throw ConfigError("constant extension degree must be positive");
    b.ext = constant_extension(q, n);
  } else if (b.type == "carlitz") {
    FqPoly m = parse_poly(q, d.at("modulus").get<std::string>());
    if (!m.is_monic() || m.deg() < 1) throw ConfigError("Carlitz modulus must be monic of positive degree");
    b.modulus = m;
    ExtPtr c = carlitz_extension(q, m);
    if (d.value("plus", false)) {
      // Maximal real subfield: fix the image of F_q^*.
      c = quotient_extension(c, carlitz_subgroup(*c, {FqPoly::constant(q, primitive_root(q))}), "carlitz+(" + m.str() + ")");
    }
    b.ext = c;
  } else if (b.type == "composite") {
    std::vector<ExtPtr> exts;
    for (const json& p : d.at("parts")) {
      b.parts.push_back(build_extension(q, p));
      exts.push_back(b.parts.back().ext);
    }
    if (exts.empty()) throw ConfigError("composite extension without parts");
    b.ext = composite_extension(exts);
  } else if (b.type == "quotient") {
    BuiltExtension of = build_extension(q, d.at("of"));
    Subgroup K = build_subgroup(of, d.at("kernel"), 0);
    b.modulus = of.modulus;
    b.ext = quotient_extension(of.ext, K);
    b.parts.push_back(std::move(of));
  } else {
    throw ConfigError("unknown extension type '" + b.type + "'");
  }
  return b;
}

Subgroup build_subgroup(const BuiltExtension& e, const json& spec, int64_t p) {
  const FinAbGroup& G = *e.ext->G;
  std::string t = type_of(spec);
  if (t == "whole") return whole_group(G);
  if (t == "trivial") return generate_subgroup(G, {});
  if (t == "sylow") {
    int64_t pp = spec.is_object() && spec.contains("p") ? spec.at("p").get<int64_t>() : p;
    if (pp < 2) throw ConfigError("sylow subgroup needs a prime");
    return sylow_subgroup(G, pp);
  }
  if (t == "residues") {
    if (!e.modulus) throw ConfigError("residue subgroups need a Carlitz extension or a quotient of one");
    std::vector<FqPoly> rs;
    for (auto& r : spec.at("residues")) rs.push_back(parse_poly(e.ext->q, r.get<std::string>()));
    return carlitz_subgroup(*e.ext, rs);
  }
  if (t == "reduction_kernel") {
    if (e.type != "carlitz" || !e.modulus) throw ConfigError("reduction kernels need a Carlitz extension");
    return carlitz_reduction_kernel(*e.ext, *e.modulus, parse_poly(e.ext->q, spec.at("to").get<std::string>()));
  }
  if (t == "part" || t == "constants") {
    if (e.type != "composite") throw ConfigError("'" + t + "' subgroups need a composite extension");
    size_t idx = 0;
    if (t == "part") {
      idx = spec.at("index").get<size_t>();
    } else {
      auto it = std::find_if(e.parts.begin(), e.parts.end(), [](const BuiltExtension& b) { return b.type == "constant"; });
      if (it == e.parts.end()) throw ConfigError("composite has no constant part");
      idx = it - e.parts.begin();
    }
    if (idx >= e.parts.size()) throw ConfigError("part index out of range");
    return part_subgroup(*e.ext, idx);
  }
  if (t == "parts") {
    if (e.type != "composite") throw ConfigError("'parts' subgroups need a composite extension");
    const json& specs = spec.at("specs");
    if (specs.size() != e.parts.size()) throw ConfigError("'parts' needs one spec per component");
    std::vector<int64_t> gens;
    for (size_t i = 0; i < e.parts.size(); ++i) {
      Subgroup Hi = build_subgroup(e.parts[i], specs[i], p);
      for (int64_t g : Hi.gens) gens.push_back(g * part_offset(e, i));
    }
    return generate_subgroup(G, gens);
  }
  if (t == "generated") {
    std::vector<int64_t> gens;
    for (auto& el : spec.at("elements")) {
      auto a = el.get<std::vector<int64_t>>();
      if (static_cast<int>(a.size()) != G.rank()) throw ConfigError("generator has the wrong number of coordinates");
      gens.push_back(G.index(a));
    }
    return generate_subgroup(G, gens);
  }
  throw ConfigError("unknown subgroup type '" + t + "'");
}

// ---------------------------------------------------------------------------
// Configs

namespace {

std::vector<Place> places_of(int q, const json& j, const char* key) {
  std::vector<Place> out;
  if (!j.contains(key)) return out;
  for (auto& s : j.at(key)) {
    Place v = parse_place(q, s.get<std::string>());
    if (std::find(out.begin(), out.end(), v) != out.end()) throw ConfigError(std::string(key) + " lists " + v.str() + " twice");
    out.push_back(v);
  }
  return out;
}

bool contains_place(const std::vector<Place>& S, const Place& v) { return std::find(S.begin(), S.end(), v) != S.end(); }

}  // namespace

ExperimentConfig parse_experiment(const json& j, const std::string& kind) {
  if (!j.is_object()) throw ConfigError("experiment must be a JSON object");
  static const std::set<std::string> known = {"id", "kind", "q", "p", "extension", "H", "S", "T", "S0", "places",
                                              "n", "M", "B", "W", "D", "units", "epsilon", "functionals", "layers",
                                              "bridge", "expect", "params"};
  for (auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown field '" + k + "'");
  ExperimentConfig c;
  c.raw = j;
  c.kind = j.value("kind", kind);
  if (!kind.empty() && c.kind != kind) throw ConfigError("experiment kind '" + c.kind + "' does not match '" + kind + "'");
  if (std::find(kinds().begin(), kinds().end(), c.kind) == kinds().end()) throw ConfigError("unknown kind '" + c.kind + "'");
  c.id = j.value("id", c.kind);
  c.q = j.value("q", 3);
  if (!is_prime(c.q)) throw ConfigError("q must be prime");
  c.p = j.value("p", static_cast<int64_t>(c.q));
  if (!is_prime(c.p)) throw ConfigError("p must be prime");
  c.extension = j.value("extension", json{{"type", "trivial"}});
  c.H = j.value("H", json("whole"));
  c.S = places_of(c.q, j, "S");
  c.T = places_of(c.q, j, "T");
  c.S0 = places_of(c.q, j, "S0");
  c.places = places_of(c.q, j, "places");
  c.n = j.value("n", 1);
  c.M = j.value("M", 3);
  c.B = j.value("B", 8);
  c.W = j.value("W", 4);
  c.D = j.value("D", 1);
  c.units = j.value("units", json{{"source", "auto"}});
  c.epsilon = j.value("epsilon", json());
  c.functionals = j.value("functionals", json());
  c.layers = j.value("layers", json::array());
  c.bridge = j.value("bridge", json::array());
  c.expect = j.value("expect", json::object());
  c.params = j.value("params", json::object());

  if (c.M < 1 || c.B < 0 || c.W < 1 || c.n < 0 || c.D < 1) throw ConfigError("M, W, D must be positive and B, n nonnegative");
  if (c.D >= c.p) throw ConfigError("D must be smaller than p");
  for (const Place& v : c.T)
    if (contains_place(c.S, v)) throw ConfigError("T meets S at " + v.str());
  bool needs_ST = c.kind != "aug-oracle" && c.kind != "selftest";
  if (needs_ST) {
    if (c.S.empty()) throw ConfigError("S must be nonempty");
    if (c.T.empty()) throw ConfigError("T must be nonempty");
  }
  for (const Place& v : c.S0)
    if (!contains_place(c.S, v)) throw ConfigError("S0 is not contained in S");
  if (!c.S0.empty() && c.S0.size() >= c.S.size()) throw ConfigError("S0 must be a proper subset of S");
  for (const Place& v : c.places)
    if (!contains_place(c.S, v)) throw ConfigError("places must lie in S");
  return c;
}

std::vector<ExperimentConfig> parse_config(const json& j, const std::string& kind) {
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("experiments")) {
    for (auto& e : j.at("experiments")) out.push_back(parse_experiment(e, kind));
  } else {
    out.push_back(parse_experiment(j, kind));
  }
  std::set<std::string> ids;
  for (auto& c : out)
    if (!ids.insert(c.id).second) throw ConfigError("duplicate experiment id '" + c.id + "'");
  return out;
}

std::vector<ExperimentConfig> load_config(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(j, kind);
}

// ---------------------------------------------------------------------------
// Reports

json Check::to_json() const {
  json j;
  j["id"] = id;
  j["status"] = status;
  j["detail"] = detail;
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

void Report::exact(const std::string& id, const std::string& detail) { checks.push_back({id, "verified-exact", detail, nullptr}); }

void Report::at_precision(const std::string& id, int prec, const std::string& detail) {
  checks.push_back({id, "verified-at-precision(" + std::to_string(prec) + ")", detail, nullptr});
}

void Report::failed(const std::string& id, const std::string& detail, json witness) {
  checks.push_back({id, "failed", detail, std::move(witness)});
}

void Report::out_of_scope(const std::string& id, const std::string& reason) {
  checks.push_back({id, "out-of-scope", reason, nullptr});
}

void Report::expect(bool ok, const std::string& id, const std::string& detail, json witness) {
  if (ok)
    exact(id, detail);
  else
    failed(id, detail, std::move(witness));
}

void Report::expect_at(bool ok, int prec, const std::string& id, const std::string& detail, json witness) {
  if (ok)
    at_precision(id, prec, detail);
  else
    failed(id, detail, std::move(witness));
}

bool Report::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == "failed"; });
}

const Check* Report::find(const std::string& cid) const {
  for (auto& c : checks)
    if (c.id == cid) return &c;
  return nullptr;
}

json Report::to_json() const {
  json j;
  j["id"] = id;
  j["kind"] = kind;
  j["inputs"] = inputs;
  j["results"] = results;
  json cs = json::array();
  for (auto& c : checks) cs.push_back(c.to_json());
  j["checks"] = cs;
  j["ok"] = ok();
  return j;
}

Report run(const ExperimentConfig& cfg, const RunOptions& opt) {
  using Fn = Report (*)(const ExperimentConfig&, const RunOptions&);
  static const std::map<std::string, Fn> table = {
      {"theta", kind::theta},
      {"interpolation", kind::interpolation},
      {"gross-check", kind::gross_check},
      {"stark-check", kind::stark_check},
      {"burns-check", kind::burns_check},
      {"product-formula", kind::product_formula},
      {"factorization", kind::factorization},
      {"aug-oracle", kind::aug_oracle},
      {"selftest", kind::selftest},
  };
  auto t0 = std::chrono::steady_clock::now();
  Report r;
  try {
    r = table.at(cfg.kind)(cfg, opt);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(cfg.id + ": " + e.what());
  } catch (const std::exception& e) {
    r = Report{};
    r.failed("run", "experiment aborted", json{{"error", e.what()}});
  }
  r.id = cfg.id;
  r.kind = cfg.kind;
  r.inputs = cfg.raw;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json run_all(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opt, std::ostream* log) {
  std::vector<Report> reports(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::atomic<size_t> next{0};
  std::mutex log_mu;
  // Outer parallelism across experiments; each experiment gets the remaining
  // share of workers for its own enumeration.
  int outer = std::max(1, std::min<int>(opt.jobs, static_cast<int>(cfgs.size())));
  RunOptions inner = opt;
  inner.jobs = std::max(1, opt.jobs / outer);
  auto worker = [&] {
    for (size_t i; (i = next++) < cfgs.size();) {
      try {
        reports[i] = run(cfgs[i], inner);
        if (log) {
          std::lock_guard<std::mutex> lk(log_mu);
          *log << cfgs[i].id << " [" << cfgs[i].kind << "] " << (reports[i].ok() ? "ok" : "FAILED") << " in "
               << reports[i].seconds << " s\n";
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < outer; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<size_t> order(cfgs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return cfgs[a].id < cfgs[b].id; });
  json out;
  out["format"] = kReportFormat;
  out["seed"] = std::to_string(opt.seed);
  json exps = json::array();
  std::map<std::string, int> tally;
  bool ok = true;
  for (size_t i : order) {
    exps.push_back(reports[i].to_json());
    for (auto& c : reports[i].checks) {
      std::string s = c.status.rfind("verified-at-precision", 0) == 0 ? "verified-at-precision" : c.status;
      ++tally[s];
    }
    ok = ok && reports[i].ok();
  }
  out["experiments"] = exps;
  json summary;
  summary["experiments"] = cfgs.size();
  for (const char* s : {"verified-exact", "verified-at-precision", "failed", "out-of-scope"}) summary[s] = tally[s];
  summary["ok"] = ok;
  out["summary"] = summary;
  return out;
}

std::string dump(const json& report) { return report.dump(2) + "\n"; }

}  // namespace ffstark::harness
