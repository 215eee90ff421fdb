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

// Acceptance suite: runs the shipped configs and prints one PASS/FAIL line per
// criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ffstark/harness.hpp"

using namespace ffstark::harness;

namespace {

std::string cfg_path(const std::string& name) { return std::string(FFSTARK_CONFIG_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int default_jobs() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

// A criterion collects reasons for failure; an empty list means PASS.
struct Verdict {
  std::vector<std::string> problems;
  std::string note;
  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

struct Timed {
  json report;
  double seconds = 0;
};

Timed run_file(const std::string& name, int jobs) {
  auto t0 = std::chrono::steady_clock::now();
  RunOptions opt;
  opt.jobs = jobs;
  Timed t{run_all(load_config(cfg_path(name)), opt)};
  t.seconds = seconds_since(t0);
  return t;
}

const json* experiment(const json& rep, const std::string& id) {
  for (auto& e : rep["experiments"])
    if (e["id"] == id) return &e;
  return nullptr;
}

const json* check(const json& exp, const std::string& id) {
  for (auto& c : exp["checks"])
    if (c["id"] == id) return &c;
  return nullptr;
}

bool passed(const json* c) {
  if (!c) return false;
  std::string s = (*c)["status"];
  return s == "verified-exact" || s.rfind("verified-at-precision(", 0) == 0;
}

int precision_of(const json* c) {
  std::string s = (*c)["status"];
  if (s == "verified-exact") return 1 << 20;
  return std::stoi(s.substr(std::string("verified-at-precision(").size()));
}

void no_failures(Verdict& v, const json& rep) {
  for (auto& e : rep["experiments"])
    for (auto& c : e["checks"])
      if (c["status"] == "failed")
        v.require(false, e["id"].get<std::string>() + ": " + c["id"].get<std::string>() + " failed");
}

std::string fmt(double s) {
  std::ostringstream o;
  o.precision(3);
  o << s << " s";
  return o.str();
}

// 1. Closed-form Theta for trivial Gamma.
Verdict closed_forms() {
  Verdict v;
  auto cfgs = load_config(cfg_path("theta_closed_forms.json"));
  v.require(cfgs.size() == 2, "expected two closed-form experiments");
  std::string times;
  for (auto& c : cfgs) {
    auto t0 = std::chrono::steady_clock::now();
    Report r = run(c, RunOptions{});
    double s = seconds_since(t0);
    times += (times.empty() ? "" : ", ") + c.id + " " + fmt(s);
    v.require(c.B == 8 && c.W == 4, c.id + ": B = 8, W = 4 expected");
    v.require(r.ok(), c.id + ": a check failed");
    const Check* e = r.find("theta.expected");
    v.require(e && e->status == "verified-exact", c.id + ": Theta differs from the closed form");
    v.require(s < 1.0, c.id + ": took " + fmt(s));
  }
  v.note = times;
  return v;
}

// 2. Fourier transform of Theta against per-character L-functions.
Verdict interpolation() {
  Verdict v;
  Timed t = run_file("interpolation.json", 1);
  no_failures(v, t.report);
  std::set<std::pair<int, std::string>> seen;
  for (auto& e : t.report["experiments"]) {
    const json* c = check(e, "interpolation.characters");
    v.require(c && (*c)["status"] == "verified-exact", e["id"].get<std::string>() + ": characters not verified exactly");
    const json& in = e["inputs"];
    seen.insert({in["q"].get<int>(), in["extension"]["modulus"].get<std::string>()});
  }
  for (int q : {2, 3})
    for (std::string m : {"t", "t^2", "t^2+t"})
      v.require(seen.count({q, m}), "missing layer q = " + std::to_string(q) + ", m = " + m);
  v.require(t.seconds < 30, "took " + fmt(t.seconds));
  v.note = std::to_string(seen.size()) + " layers in " + fmt(t.seconds);
  return v;
}

// 3. Stickelberger product formula on a layer with |G| <= 200.
Verdict product_formula() {
  Verdict v;
  Timed t = run_file("product_formula.json", default_jobs());
  no_failures(v, t.report);
  for (auto& e : t.report["experiments"]) {
    int64_t order = 1;
    for (auto& f : e["results"]["group"]) order *= f.get<int64_t>();
    v.require(order <= 200, "|G| = " + std::to_string(order) + " exceeds 200");
    const json* c = check(e, "product-formula.characters");
    v.require(c && (*c)["status"] == "verified-exact", "product over characters not verified exactly");
    v.note = "|G| = " + std::to_string(order) + ", " + std::to_string(e["results"]["subgroups"].size()) + " subgroups";
  }
  return v;
}

// 4. Gross congruence, including a deliberately inverted unit basis.
Verdict gross(const json& rep) {
  Verdict v;
  no_failures(v, rep);
  auto congruence = [&](const std::string& id, bool want_discriminating) {
    const json* e = experiment(rep, id);
    v.require(e != nullptr, id + ": missing");
    if (!e) return;
    const json* c = check(*e, "gross.congruence");
    v.require(passed(c), id + ": congruence not verified");
    if (c && passed(c)) v.require(precision_of(c) >= 3, id + ": precision below p^3");
    if (want_discriminating) v.require((*e)["results"]["sign_discriminated"] == true, id + ": sign not discriminated");
  };
  // (a) the closed-form configurations over the constant tower and a Carlitz tower.
  congruence("gross-constant-r0", false);
  congruence("gross-constant-r1", false);
  congruence("gross-carlitz-r0", false);
  congruence("gross-carlitz-r1", true);
  congruence("gross-carlitz3-r1", true);
  // (b) r = 2.
  congruence("gross-constant-r2", false);
  congruence("gross-carlitz-r2", false);
  for (auto id : {"gross-constant-r2", "gross-carlitz-r2"})
    if (const json* e = experiment(rep, id)) v.require((*e)["results"]["r"] == 2, std::string(id) + ": r != 2");

  // A sign error must fail: invert the oriented basis of a discriminating config.
  json file = json::parse(std::ifstream(cfg_path("gross.json")));
  json base;
  for (auto& e : file["experiments"])
    if (e["id"] == "gross-carlitz-r1") base = e;
  base.erase("bridge");
  Report ok = run(parse_experiment(base), RunOptions{});
  json basis = json::array();
  for (auto& u : ok.results["units"]["basis"]) {
    json ex = json::array();
    for (auto& x : u["exponents"]) {
      std::string s = x.get<std::string>();
      ex.push_back(s == "0" ? s : s[0] == '-' ? s.substr(1) : "-" + s);
    }
    basis.push_back(json{{"constant", u["constant"]}, {"exponents", ex}});  // q = 3: constants are involutions
  }
  base["id"] = "gross-carlitz-r1-inverted";
  base["units"] = json{{"source", "supplied"}, {"basis", basis}};
  Report bad = run(parse_experiment(base), RunOptions{});
  const Check* g = bad.find("gross.congruence");
  bool caught = g && g->status == "failed" && g->witness.value("sign_flip_only", false);
  v.require(caught, "inverted unit basis was not reported as a sign-flip failure");

  int exps = static_cast<int>(rep["experiments"].size());
  v.note = std::to_string(exps) + " configs; inverted basis fails with sign_flip_only";
  return v;
}

// 5. One epsilon solving a Carlitz layer and the constant layer.
Verdict stark(const json& rep) {
  Verdict v;
  no_failures(v, rep);
  const json* e = experiment(rep, "stark-carlitz-constant");
  v.require(e != nullptr, "stark-carlitz-constant missing");
  if (!e) return v;
  bool carlitz = false, constant = false;
  for (auto& L : (*e)["results"]["layers"]) {
    std::string name = L["name"];
    std::string desc = L["extension"];
    v.require(passed(check(*e, "stark[" + name + "].S0-splits")), name + ": S0 does not split");
    v.require(passed(check(*e, "stark[" + name + "].theta-in-I_H^n")), name + ": theta_G not in I_H");
    bool solved = passed(check(*e, "stark[" + name + "].solve"));
    v.require(solved, name + ": no solution");
    carlitz |= solved && desc.rfind("carlitz", 0) == 0;
    constant |= solved && desc.rfind("constant", 0) == 0;
  }
  v.require(carlitz && constant, "need a solved Carlitz layer and a solved constant layer");
  v.require(passed(check(*e, "stark.common-epsilon")), "no epsilon common to all layers");
  v.require(passed(check(*e, "stark.classical-epsilon")), "classical epsilon does not solve every layer");
  v.note = "common c = " + (*e)["results"]["common_solutions"].dump() + " mod " +
           (*e)["results"]["common_modulus"].get<std::string>();
  return v;
}

// 6. Bridge identities on every config of items 4 and 5.
Verdict bridges(const std::vector<const json*>& reps) {
  Verdict v;
  int count = 0;
  for (const json* rep : reps)
    for (auto& e : (*rep)["experiments"]) {
      std::string id = e["id"];
      int lead = 0, reg = 0;
      for (auto& c : e["checks"]) {
        std::string cid = c["id"];
        if (cid.rfind("bridge[", 0) != 0) continue;
        ++count;
        v.require(passed(&c), id + ": " + cid + " is " + c["status"].get<std::string>());
        lead += cid.find(".leading-coefficient") != std::string::npos;
        reg += cid.find(".regulator") != std::string::npos;
      }
      v.require(lead >= 1 && reg >= 1, id + ": no bridge checks");
    }
  v.note = std::to_string(count) + " bridge checks";
  return v;
}

// 7. Burns congruence with supplied functionals.
Verdict burns() {
  Verdict v;
  Timed t = run_file("burns.json", default_jobs());
  no_failures(v, t.report);
  for (auto& e : t.report["experiments"]) {
    std::string id = e["id"];
    v.require(passed(check(e, "burns.functionals")), id + ": functionals do not span");
    v.require(passed(check(e, "burns.congruence")), id + ": congruence not verified");
    v.require(e["results"]["r"].get<int>() > e["results"]["n"].get<int>(), id + ": not a nontrivial case (r = n)");
  }
  v.note = std::to_string(t.report["experiments"].size()) + " functional choices";
  return v;
}

// 8. Augmentation-filtration oracle suite.
Verdict oracle() {
  Verdict v;
  Timed t = run_file("aug_oracle.json", default_jobs());
  no_failures(v, t.report);
  for (auto& e : t.report["experiments"]) {
    auto p = e["inputs"]["params"];
    v.require(p.value("max_order", 0) >= 27 && p.value("max_M", 0) >= 3 && p.value("gamma_max", 0) >= 6,
              "oracle bounds below |H| <= 27, M <= 3, |Gamma| <= 6");
    for (auto id : {"oracle.filtration", "oracle.coset-decomposition", "oracle.base-change", "oracle.transfer"})
      v.require(passed(check(e, id)), std::string(id) + " not verified");
  }
  v.require(t.seconds < 120, "took " + fmt(t.seconds));
  v.note = fmt(t.seconds);
  return v;
}

// 9. Factorization probe on a rank-2 layer.
Verdict factorization() {
  Verdict v;
  Timed t = run_file("factorization.json", 1);
  no_failures(v, t.report);
  for (auto& e : t.report["experiments"]) {
    v.require(e["results"]["d"] == 2, "layer is not of rank 2");
    v.require(passed(check(e, "factorization.rational-basis")), "rational-basis check did not pass");
    for (auto id : {"factorization.xi-product", "factorization.f-product", "factorization.xi-vs-f",
                    "factorization.xi_G-h-f_G"})
      v.require(passed(check(e, id)), std::string(id) + " not verified");
    const json* u = check(e, "factorization.unrestricted");
    v.note = std::string("unrestrictedness ") + (u ? (*u)["status"].get<std::string>() : "unreported");
  }
  return v;
}

// 10. Byte-identical reports across runs and --jobs values.
Verdict determinism() {
  Verdict v;
  std::vector<std::string> files{"gross.json", "stark.json", "burns.json", "aug_oracle.json"};
  for (auto& f : files) {
    auto cfgs = load_config(cfg_path(f));
    RunOptions one, many;
    many.jobs = 4;
    std::string a = dump(run_all(cfgs, one)), b = dump(run_all(cfgs, many)), c = dump(run_all(cfgs, many));
    v.require(a == b, f + ": jobs 1 and 4 differ");
    v.require(b == c, f + ": repeated runs differ");
  }
  v.note = std::to_string(files.size()) + " config files, jobs 1 and 4";
  return v;
}

}  // namespace

int main() {
  int jobs = default_jobs();
  json gross_rep, stark_rep;
  std::map<int, std::function<Verdict()>> criteria{
      {1, closed_forms},
      {2, interpolation},
      {3, product_formula},
      {4, [&] { return gross(gross_rep); }},
      {5, [&] { return stark(stark_rep); }},
      {6, [&] { return bridges({&gross_rep, &stark_rep}); }},
      {7, burns},
      {8, oracle},
      {9, factorization},
      {10, determinism},
  };
  gross_rep = run_file("gross.json", jobs).report;
  stark_rep = run_file("stark.json", jobs).report;

  int failed = 0;
  for (auto& [n, f] : criteria) {
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v.problems.push_back(std::string("exception: ") + e.what());
    }
    bool ok = v.problems.empty();
    failed += !ok;
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL");
    if (!v.note.empty()) std::cout << " (" << v.note << ")";
    std::cout << "\n";
    for (auto& p : v.problems) std::cout << "    " << p << "\n";
    std::cout.flush();
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? 1 : 0;
}
