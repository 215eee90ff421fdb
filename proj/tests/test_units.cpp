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

#include <random>

#include "ffstark/units.hpp"

using namespace ffstark;

static Place fin(int q, std::vector<int> c) { return Place::finite(FqPoly(q, c)); }

TEST_CASE("small unit lattices") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), t1 = fin(q, {2, 1}), tp = fin(q, {1, 1});
  UnitLattice a = sunit_lattice({inf, t0}, {t1}, q);
  CHECK(a.rank() == 1);
  CHECK(a.h == 1);
  CHECK(a.unit(0) == RatFunc(FqPoly::t(q)).pow(ord_at(a.unit(0), t0)));
  CHECK((ord_at(a.unit(0), t0) == 1 || ord_at(a.unit(0), t0) == -1));

  UnitLattice b = sunit_lattice({inf}, {t0}, q);
  CHECK(b.rank() == 0);
  CHECK(b.h == 1);

  UnitLattice c = sunit_lattice({inf, t0, tp}, {t1}, q);
  CHECK(c.rank() == 2);
  for (const RatFunc& u : c.units()) {
    ResidueLog lg(t1);
    CHECK(lg.log(u) == 0);
  }
  CHECK_THROWS(sunit_lattice({inf, t0}, {t0}, q));
  CHECK_THROWS(sunit_lattice({inf, t0}, {}, q));
}

TEST_CASE("class numbers from the exact sequence") {
  // S = {inf}, T = {v}: h = |F_v^*| / |F_q^*| (Pic(O_S) trivial).
  for (int q : {2, 3, 5})
    for (int d = 1; d <= 2; ++d) {
      Place v = Place::finite(irreducibles(q, d).front());
      UnitLattice L = sunit_lattice({Place::infinity(q)}, {v}, q);
      CHECK(L.rank() == 0);
      CHECK(L.h == (ipow(q, d) - 1) / (q - 1));
    }
  // Without infinity: Pic(O_S) has order gcd of the degrees.
  int q = 2;
  UnitLattice L = sunit_lattice({fin(q, {0, 1}), fin(q, {1, 1, 1})}, {fin(q, {1, 1})}, q);
  CHECK(L.rank() == 1);
  CHECK(L.pic == 1);
}

TEST_CASE("valuation rows sum to zero (lambda(U) in X)") {
  int q = 3;
  std::vector<Place> S = {Place::infinity(q), fin(q, {0, 1}), fin(q, {1, 1}), fin(q, {1, 0, 1})};
  UnitLattice L = sunit_lattice(S, {fin(q, {2, 1})}, q);
  for (int j = 0; j < L.rank(); ++j) {
    Int s = 0;
    for (size_t i = 0; i < S.size(); ++i) s += L.deg_at(j, static_cast<int>(i));
    CHECK(s == 0);
    for (size_t i = 0; i < S.size(); ++i) CHECK(L.ord[j][i] == ord_at(L.unit(j), S[i]));
  }
}

TEST_CASE("orientation makes the classical regulator positive") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), tp = fin(q, {1, 1});
  UnitLattice L = sunit_lattice({inf, t0, tp}, {fin(q, {2, 1})}, q);
  orient(L, {inf, t0});
  CHECK(classical_regulator_det(L, {inf, t0}) > 0);
  UnitLattice a = sunit_lattice({inf, t0}, {fin(q, {2, 1})}, q);
  orient(a, {inf});
  CHECK(a.unit(0) == RatFunc(FqPoly::t(q)));
}

TEST_CASE("supplied lattices are re-verified") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), t1 = fin(q, {2, 1});
  CHECK_NOTHROW(supplied_lattice({inf, t0}, {t1}, q, {SUnit{1, {Int(-1)}}}));
  CHECK_THROWS(supplied_lattice({inf, t0}, {t1}, q, {SUnit{1, {Int(2)}}}));
  CHECK_THROWS(supplied_lattice({inf, t0}, {t1}, q, {SUnit{2, {Int(1)}}}));
}

TEST_CASE("r_chi formula agrees with the permutation-character oracle") {
  GroupPtr gamma = make_group({2, 3});
  std::vector<Place> S = {Place::infinity(3), fin(3, {0, 1}), fin(3, {1, 1})};
  for (const Subgroup& D0 : all_subgroups(*gamma))
    for (const Subgroup& D1 : all_subgroups(*gamma)) {
      PlaceModule pm = place_module(gamma, S, {D0, D1, generate_subgroup(*gamma, {})});
      int total = 0;
      for (const Character& chi : characters(*gamma)) {
        CHECK(r_chi(pm, chi) == r_chi_trace(pm, chi));
        total += r_chi(pm, chi);
      }
      CHECK(total == static_cast<int>(pm.rank_Y()) - 1);
    }
  // Gamma trivial: r = #S - 1; all of S split: r_chi = #S for chi nontrivial.
  PlaceModule split = place_module(gamma, S, std::vector<Subgroup>(3, generate_subgroup(*gamma, {})));
  for (const Character& chi : characters(*gamma)) CHECK(r_chi(split, chi) == (char_is_trivial(chi) ? 2 : 3));
}

TEST_CASE("wedges and iota") {
  WedgeElem a = WedgeElem::monomial({1, 0});
  CHECK(a.terms.at({0, 1}) == -1);
  CHECK(WedgeElem::monomial({1, 1}).is_zero());
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Int>> v(2, std::vector<Int>(3));
    for (auto& r : v)
      for (auto& x : r) x = static_cast<long>(rng() % 9) - 4;
    auto sc = [](const Int& d, const Rat& c) { return Int(d * c.get_num() / c.get_den()); };
    Int direct = v[0][0] * v[1][2] - v[0][2] * v[1][0];
    CHECK(iota_eval(v, WedgeElem::monomial({0, 2}), Int(0), Int(1), sc) == direct);
    CHECK(iota_eval(v, WedgeElem::monomial({2, 0}), Int(0), Int(1), sc) == -direct);
  }
  CHECK_THROWS(iota_eval(std::vector<std::vector<Int>>(1, std::vector<Int>(2, 1)), WedgeElem::monomial({0, 1}), Int(0),
                         Int(1), [](const Int& d, const Rat&) { return d; }));
}
