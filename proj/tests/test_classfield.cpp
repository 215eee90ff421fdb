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

#include "ffstark/classfield.hpp"

using namespace ffstark;

static FqPoly P(int q, std::vector<int> c) { return FqPoly(q, c); }

static RatFunc random_ratfunc(std::mt19937_64& rng, int q) {
  for (;;) {
    std::vector<int> a(1 + rng() % 4), b(1 + rng() % 3);
    for (auto& x : a) x = static_cast<int>(rng() % q);
    for (auto& x : b) x = static_cast<int>(rng() % q);
    FqPoly n(q, a), d(q, b);
    if (!n.is_zero() && !d.is_zero()) return RatFunc(n, d);
  }
}

static std::vector<ExtPtr> sample_extensions() {
  std::vector<ExtPtr> out;
  out.push_back(constant_extension(3, 9));
  out.push_back(carlitz_extension(3, P(3, {0, 0, 1})));
  out.push_back(carlitz_extension(3, P(3, {0, 1, 1})));
  out.push_back(carlitz_extension(2, P(2, {0, 0, 0, 1})));
  out.push_back(carlitz_extension(2, P(2, {1, 1, 1})));
  out.push_back(composite_extension({carlitz_extension(3, P(3, {0, 0, 1})), constant_extension(3, 3)}));
  ExtPtr c = carlitz_extension(3, P(3, {0, 0, 0, 1}));
  out.push_back(quotient_extension(c, carlitz_subgroup(*c, {P(3, {2})})));
  return out;
}

TEST_CASE("Frobenius is multiplicative on coprime polynomials") {
  std::mt19937_64 rng(1);
  for (const ExtPtr& e : sample_extensions()) {
    int q = e->q;
    for (int trial = 0; trial < 20; ++trial) {
      auto a = enumerate_monics(q, 1 + trial % 3), b = enumerate_monics(q, 2);
      FqPoly f = a[rng() % a.size()], g = b[rng() % b.size()];
      bool ok = true;
      for (const Place& v : e->ramified)
        if (!v.is_inf() && (poly_gcd(f * g, v.poly()).deg() > 0)) ok = false;
      if (!ok) continue;
      CHECK(e->frob_poly(f * g) == e->G->add(e->frob_poly(f), e->frob_poly(g)));
    }
  }
}

TEST_CASE("local symbols satisfy the reciprocity law") {
  std::mt19937_64 rng(2);
  for (const ExtPtr& e : sample_extensions()) {
    for (int trial = 0; trial < 25; ++trial) {
      RatFunc u = random_ratfunc(rng, e->q);
      CHECK_MESSAGE(reciprocity_defect(*e, u) == 0, e->descriptor << " at " << u.str());
    }
  }
}

TEST_CASE("local symbols are multiplicative") {
  std::mt19937_64 rng(3);
  for (const ExtPtr& e : sample_extensions())
    for (const Place& v : e->ramified)
      for (int trial = 0; trial < 8; ++trial) {
        RatFunc a = random_ratfunc(rng, e->q), b = random_ratfunc(rng, e->q);
        CHECK(artin_local(*e, a * b, v) == e->G->add(artin_local(*e, a, v), artin_local(*e, b, v)));
      }
}

TEST_CASE("inertia and decomposition in Carlitz extensions") {
  ExtPtr c = carlitz_extension(3, P(3, {0, 0, 1}));  // t^2: G = (F_3[t]/t^2)^*, order 6
  Place t0 = Place::finite(P(3, {0, 1})), inf = Place::infinity(3);
  CHECK(c->G->order() == 6);
  CHECK(inertia_group(*c, t0).order() == 6);
  CHECK(inertia_group(*c, inf).order() == 2);
  CHECK(decomposition_group(*c, inf).order() == 2);
  // Units deep in the filtration have trivial symbol at the conductor place.
  RatFunc deep(P(3, {1, 0, 1}));
  CHECK(artin_local(*c, deep, t0) == 0);
  // Frobenius of t+1 is its residue class.
  CHECK(frobenius(*c, Place::finite(P(3, {1, 1}))) == c->frob_poly(P(3, {1, 1})));

  // Carlitz plus: infinity splits completely.
  ExtPtr cp = quotient_extension(c, carlitz_subgroup(*c, {P(3, {2})}));
  CHECK(cp->G->order() == 3);
  CHECK(!cp->is_ramified(inf));
  CHECK(frobenius(*cp, inf) == 0);
}

TEST_CASE("constant extensions") {
  ExtPtr c = constant_extension(3, 9);
  Place v = Place::finite(P(3, {1, 0, 1}));
  CHECK(frobenius(*c, v) == 2);
  CHECK(frobenius(*c, Place::infinity(3)) == 1);
  RatFunc t(P(3, {0, 1}));
  // rec_v(u) = sigma^{deg_v(u)}.
  CHECK(artin_local(*c, t, Place::infinity(3)) == c->G->pow(1, -1));
  CHECK(decomposition_group(*c, v).order() == 9);
}

TEST_CASE("Sylow subgroups and reduction kernels") {
  ExtPtr c = carlitz_extension(3, P(3, {0, 0, 0, 1}));  // order 18
  CHECK(sylow_subgroup(*c->G, 3).order() == 9);
  Subgroup K = carlitz_reduction_kernel(*c, P(3, {0, 0, 0, 1}), P(3, {0, 1}));
  CHECK(K.order() == 9);
}
