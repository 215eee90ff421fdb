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

#include "ffstark/lseries.hpp"
#include "ffstark/regulators.hpp"

using namespace ffstark;

static FqPoly P(int q, std::vector<int> c) { return FqPoly(q, c); }
static Place fin(int q, std::vector<int> c) { return Place::finite(P(q, c)); }

static ZElem theta_G(const ExtensionData& e, const std::vector<Place>& S, const std::vector<Place>& T, int B) {
  return theta_at_zero(theta_polynomial(apply_T_factors(euler_coefficients(e, S, B), T, e, S), 4));
}

TEST_CASE("Gross congruence on the constant tower, r = 1") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), t1 = fin(q, {2, 1});
  ExtPtr c = constant_extension(q, 27);
  UnitLattice U = sunit_lattice({inf, t0}, {t1}, q);
  orient(U, {inf});
  ZElem th = theta_G(*c, {inf, t0}, {t1}, 8);
  ZElem expect = ZElem::one(c->G, IntRing{}) - ZElem::basis(c->G, IntRing{}, 1);
  CHECK(th == expect);
  GrossData g = gross_check(*c, th, U, {inf}, 3, 3);
  CHECK(g.theta_degree == 1);
  CHECK(g.det_degree == 1);
  CHECK(g.congruent);
  CHECK(!g.congruent_if_negated);
}

TEST_CASE("refined and classical regulators on the constant tower") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), t1 = fin(q, {2, 1});
  ExtPtr c = constant_extension(q, 27);
  UnitLattice U = sunit_lattice({inf, t0}, {t1}, q);
  orient(U, {inf});
  Layer L = make_layer(c, whole_group(*c->G), 3, 3, 2);
  L.sigma = 1;
  WedgeElem eps = WedgeElem::monomial({0});
  RefinedValue rv = refined_regulator(L, U, {inf}, eps);
  CHECK(rv.cls.n == 1);
  QElem cl = classical_regulator(L, U, {inf}, eps);
  CHECK(cl[0] == -1);
  ModElem val = val_numerical(L, rv.value, 1);
  CHECK(val == reduce_rat(cl, val.ring()));
  // The Stickelberger element equals the refined regulator in I/I^2.
  ZElem th = theta_G(*c, {inf, t0}, {t1}, 8);
  CHECK(L.rel.contains(reduce(th, L.ring()) - rv.value, 2));
  auto sols = solve_stark_degree_one(L, U, inf, reduce(th, L.ring()));
  REQUIRE(!sols.empty());
  bool has_one = false;
  for (auto& s : sols) has_one |= s[0] % 9 == 1;
  CHECK(has_one);
  // epsilon = 0 gives the zero class.
  CHECK(refined_regulator(L, U, {inf}, WedgeElem{1, {}}).value.is_zero());
}

TEST_CASE("Gross congruence with r = 2") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), tp = fin(q, {1, 1}), t1 = fin(q, {2, 1});
  std::vector<Place> S = {inf, t0, tp};
  ExtPtr c = constant_extension(q, 27);
  UnitLattice U = sunit_lattice(S, {t1}, q);
  orient(U, {inf, t0});
  ZElem th = theta_G(*c, S, {t1}, 10);
  GrossData g = gross_check(*c, th, U, {inf, t0}, 3, 3);
  CHECK(g.theta_degree >= 2);
  CHECK(g.congruent);
}

TEST_CASE("pairing discriminant equals the determinant class") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = fin(q, {0, 1}), tp = fin(q, {1, 1}), t1 = fin(q, {2, 1});
  std::vector<Place> S = {inf, t0, tp};
  ExtPtr c = constant_extension(q, 27);
  UnitLattice U = sunit_lattice(S, {t1}, q);
  ModRing R(3, 3);
  AugPowerTest test(c->G, 3, 3, 3);
  std::vector<Place> places = {inf, t0};
  ModElem disc = discriminant(*c, R, U.units(), S, coordinate_functionals(S, places));
  ModElem det = gross_det(*c, R, U, places);
  CHECK(test.contains(disc - det, 3));
  // A unimodular change of units changes the class by det = +-1.
  IntMat Pm = {{Int(1), Int(1)}, {Int(0), Int(-1)}};
  ModElem disc2 = discriminant(*c, R, transform_units(U.units(), Pm), S, coordinate_functionals(S, places));
  CHECK(test.contains(disc2 + disc, 3));
  // The all-ones functional pairs into I^2 by reciprocity.
  for (const RatFunc& u : U.units())
    CHECK(test.contains(pairing_value(*c, R, u, S, std::vector<Int>(S.size(), 1)), 2));
}

TEST_CASE("cyclotomic homogeneous polynomials") {
  HomPoly f;
  f.d = 2;
  f.n = 1;
  f.p = 3;
  f.prec = 2;
  f.mons = monomials_of_degree(2, 1);
  f.coeff = {1, 2};
  CycHomPoly a = to_cyc_poly(f, 3);
  CycHomPoly b = a * a;
  CHECK(b.n == 2);
  CHECK(b.coeff.size() == 3);
  CHECK(projective_compare(scaled(a, CycInt(3, 4)), a).proportional);
  CHECK(!projective_compare(b, scaled(b, CycInt(3, 3))).a_zero);
}
