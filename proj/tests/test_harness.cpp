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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <string>

#include "ffstark/harness.hpp"

using namespace ffstark;
using namespace ffstark::harness;

static std::string cfg_path(const std::string& name) { return std::string(FFSTARK_CONFIG_DIR) + "/" + name; }

static json base_theta() {
  return json::parse(R"({"id": "x", "kind": "theta", "q": 3, "S": ["inf"], "T": ["t"]})");
}

TEST_CASE("polynomial and place parsing") {
  CHECK(parse_poly(3, "2*t^2+t+1") == FqPoly(3, {1, 1, 2}));
  CHECK(parse_poly(3, "t^6+t^3+1") == FqPoly(3, {1, 0, 0, 1, 0, 0, 1}));
  CHECK(parse_poly(3, "t-1") == FqPoly(3, {2, 1}));
  CHECK(parse_poly(3, "4*t") == FqPoly(3, {0, 1}));
  CHECK(parse_poly(2, "t^2+t+1") == FqPoly(2, {1, 1, 1}));
  CHECK(parse_place(3, "inf") == Place::infinity(3));
  CHECK(place_name(parse_place(3, "inf")) == "inf");
  CHECK(place_name(parse_place(3, "t+2")) == place_name(parse_place(3, "t-1")));
  CHECK_THROWS_AS(parse_place(3, "t^2+1+"), ConfigError);
  CHECK_THROWS_AS(parse_place(3, "t^2+2"), ConfigError);   // t^2 - 1 is reducible
  CHECK_THROWS_AS(parse_place(3, "2*t+1"), ConfigError);  // not monic
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_experiment(base_theta()));
  json j = base_theta();
  j["D"] = 3;
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["T"] = json::array({"inf"});
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["colour"] = "blue";
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["q"] = 4;
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["S0"] = json::array({"inf"});
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["kind"] = "nonsense";
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  j = base_theta();
  j["S"] = json::array();
  CHECK_THROWS_AS(parse_experiment(j), ConfigError);

  json two{{"experiments", json::array({base_theta(), base_theta()})}};
  CHECK_THROWS_AS(parse_config(two), ConfigError);
  two["experiments"][1]["id"] = "y";
  CHECK(parse_config(two).size() == 2);
  CHECK_THROWS_AS(parse_config(two, "gross-check"), ConfigError);
}

TEST_CASE("extension and subgroup builders") {
  auto carl = build_extension(3, json::parse(R"({"type": "carlitz", "modulus": "t^2"})"));
  CHECK(carl.ext->G->order() == 6);
  auto plus = build_extension(3, json::parse(R"({"type": "carlitz", "modulus": "t^2", "plus": true})"));
  CHECK(plus.ext->G->order() == 3);
  auto cst = build_extension(3, json::parse(R"({"type": "constant", "degree": 27})"));
  CHECK(cst.ext->G->order() == 27);
  auto comp = build_extension(3, json::parse(
      R"({"type": "composite", "parts": [{"type": "carlitz", "modulus": "t^2"}, {"type": "constant", "degree": 9}]})"));
  CHECK(comp.ext->G->order() == 54);
  CHECK(comp.parts.size() == 2);

  CHECK(build_subgroup(comp, json("whole"), 3).order() == 54);
  CHECK(build_subgroup(comp, json("trivial"), 3).order() == 1);
  CHECK(build_subgroup(comp, json("sylow"), 3).order() == 27);
  CHECK(build_subgroup(comp, json("constants"), 3).order() == 9);
  CHECK(build_subgroup(comp, json::parse(R"({"type": "part", "index": 0})"), 3).order() == 6);
  CHECK(build_subgroup(comp, json::parse(R"({"type": "parts", "specs": ["sylow", "whole"]})"), 3).order() == 27);
  CHECK(build_subgroup(carl, json::parse(R"({"type": "reduction_kernel", "to": "t"})"), 3).order() == 3);
  CHECK_THROWS_AS(build_subgroup(cst, json::parse(R"({"type": "reduction_kernel", "to": "t"})"), 3), ConfigError);

  auto quo = build_extension(3, json::parse(
      R"({"type": "quotient", "of": {"type": "carlitz", "modulus": "t^2"}, "kernel": {"type": "reduction_kernel", "to": "t"}})"));
  CHECK(quo.ext->G->order() == 2);
  CHECK(quo.modulus.has_value());
}

TEST_CASE("report statuses") {
  Report r;
  r.exact("a", "x");
  r.at_precision("b", 3, "y");
  r.out_of_scope("c", "z");
  CHECK(r.ok());
  CHECK(r.find("b")->status == "verified-at-precision(3)");
  CHECK(r.find("c")->status == "out-of-scope");
  r.expect(false, "d", "w", json{{"coefficient", "2"}});
  CHECK_FALSE(r.ok());
  CHECK(r.find("d")->status == "failed");
  CHECK(r.find("d")->witness["coefficient"] == "2");
  CHECK(r.find("missing") == nullptr);
}

TEST_CASE("runs are deterministic across jobs") {
  auto cfgs = load_config(cfg_path("stark.json"));
  RunOptions one, four;
  four.jobs = 4;
  std::string a = dump(run_all(cfgs, one)), b = dump(run_all(cfgs, four)), c = dump(run_all(cfgs, one));
  CHECK(a == b);
  CHECK(a == c);
  json rep = json::parse(a);
  CHECK(rep["format"] == kReportFormat);
  CHECK(rep["summary"]["ok"] == true);
}

TEST_CASE("config errors surface as ConfigError, scope errors do not fail") {
  json j = json::parse(R"({"id": "g", "kind": "gross-check", "q": 3, "S": ["inf", "t"], "T": ["t+2"],
                           "places": [], "extension": {"type": "constant", "degree": 27}})");
  CHECK_THROWS_AS(run(parse_experiment(j), RunOptions{}), ConfigError);
}

TEST_CASE("an inverted unit basis is caught as a sign-flip-only failure") {
  json base, file = json::parse(std::ifstream(cfg_path("gross.json")));
  for (auto& e : file["experiments"])
    if (e["id"] == "gross-carlitz-r1") base = e;
  REQUIRE(base.is_object());
  base.erase("bridge");
  Report ok = run(parse_experiment(base), RunOptions{});
  REQUIRE(ok.ok());
  REQUIRE(ok.results["sign_discriminated"] == true);

  json basis = json::array();
  for (auto& u : ok.results["units"]["basis"]) {
    json ex = json::array();
    for (auto& e : u["exponents"]) {
      std::string s = e.get<std::string>();
      ex.push_back(s == "0" ? s : s[0] == '-' ? s.substr(1) : "-" + s);
    }
    int c = u["constant"].get<int>();  // q = 3: every nonzero constant is its own inverse
    basis.push_back(json{{"constant", c}, {"exponents", ex}});
  }
  json flipped = base;
  flipped["id"] = "flipped";
  flipped["units"] = json{{"source", "supplied"}, {"basis", basis}};
  Report bad = run(parse_experiment(flipped), RunOptions{});
  const Check* g = bad.find("gross.congruence");
  REQUIRE(g != nullptr);
  CHECK(g->status == "failed");
  CHECK(g->witness["sign_flip_only"] == true);
  CHECK_FALSE(bad.ok());
}
