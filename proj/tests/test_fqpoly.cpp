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

#include "ffstark/fqpoly.hpp"

using namespace ffstark;

// Number of monic irreducibles of degree d over F_q: (1/d) sum_{e|d} mu(e) q^{d/e}.
static int64_t necklace(int64_t q, int d) {
  auto mu = [](int n) {
    int m = 1;
    for (int p = 2; p * p <= n; ++p)
      if (n % p == 0) {
        n /= p;
        if (n % p == 0) return 0;
        m = -m;
      }
    return n > 1 ? -m : m;
  };
  int64_t s = 0;
  for (int e = 1; e <= d; ++e)
    if (d % e == 0) s += mu(e) * ipow(q, d / e);
  return s / d;
}

static FqPoly random_poly(std::mt19937_64& rng, int q, int deg) {
  std::vector<int> c(deg + 1);
  for (auto& x : c) x = static_cast<int>(rng() % q);
  return FqPoly(q, c);
}

TEST_CASE("irreducible counts match the necklace formula") {
  for (int q : {2, 3, 5})
    for (int d = 1; d <= (q == 5 ? 3 : 5); ++d) CHECK(static_cast<int64_t>(irreducibles(q, d).size()) == necklace(q, d));
}

TEST_CASE("division, gcd and inverses") {
  std::mt19937_64 rng(3);
  for (int q : {2, 3, 5, 7})
    for (int trial = 0; trial < 30; ++trial) {
      FqPoly a = random_poly(rng, q, 6), b = random_poly(rng, q, 3);
      if (b.is_zero()) continue;
      FqPoly qu, r;
      FqPoly::divmod(a, b, qu, r);
      CHECK(qu * b + r == a);
      CHECK((r.is_zero() || r.deg() < b.deg()));
      FqPoly g = poly_gcd(a, b);
      if (!g.is_zero()) {
        CHECK((a % g).is_zero());
        CHECK((b % g).is_zero());
      }
      FqPoly m = irreducibles(q, 3)[trial % irreducibles(q, 3).size()];
      FqPoly x = a % m;
      if (!x.is_zero()) CHECK(((x * poly_invmod(x, m)) % m).is_one());
    }
}

TEST_CASE("trial factorization recovers products") {
  FqPoly t = FqPoly::t(3), one = FqPoly::constant(3, 1);
  FqPoly f = t * t * (t + one) * (t * t + one);
  auto fac = factor_trial(f);
  FqPoly back = one;
  for (auto& [P, k] : fac) back = back * poly_pow(P, k);
  CHECK(back == f);
  CHECK(fac.size() == 3);
}

TEST_CASE("places and valuations") {
  int q = 3;
  FqPoly t = FqPoly::t(q), one = FqPoly::constant(q, 1);
  Place inf = Place::infinity(q), v0 = Place::finite(t), v1 = Place::finite(t + one);
  CHECK(inf < v0);
  CHECK(v0.norm() == 3);
  RatFunc x(t * t, t + one);
  CHECK(ord_at(x, v0) == 2);
  CHECK(ord_at(x, v1) == -1);
  CHECK(ord_at(x, inf) == -1);
  // Product formula: sum of deg_v(x) over all places is zero.
  CHECK(ord_at(x, v0) * 1 + ord_at(x, v1) * 1 + ord_at(x, inf) == 0);
  CHECK_THROWS(Place::finite(t * t));
}

TEST_CASE("weak approximation meets every constraint") {
  std::mt19937_64 rng(5);
  int q = 3;
  FqPoly t = FqPoly::t(q), one = FqPoly::constant(q, 1);
  std::vector<Place> places = {Place::infinity(q), Place::finite(t), Place::finite(t + one),
                               Place::finite(t * t + one)};
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<ApproxConstraint> cons;
    for (size_t i = 0; i < places.size(); ++i) {
      if ((trial >> i) & 1) continue;
      FqPoly n = random_poly(rng, q, 3), d = random_poly(rng, q, 2);
      if (n.is_zero() || d.is_zero()) continue;
      cons.push_back({places[i], RatFunc(n, d), 1 + static_cast<int>(rng() % 4)});
    }
    if (cons.empty()) continue;
    ApproxResult a = weak_approximation(cons);
    for (auto& c : cons) CHECK(unit_level(a.alpha / c.target, c.v, 100) >= c.precision);
    RatFunc away(a.away_num, a.away_den);
    for (auto& c : cons)
      if (!c.v.is_inf()) CHECK(ord_at(away, c.v) == 0);
  }
}

TEST_CASE("local expansions reconstruct the element") {
  int q = 3;
  FqPoly t = FqPoly::t(q), one = FqPoly::constant(q, 1);
  Place v = Place::finite(t * t + one);
  RatFunc x(t * t * t + t + one, t);
  LocalExpansion e = expand_at(x, v, 4);
  CHECK(e.val == 0);
  FqPoly acc = FqPoly::zero(q), pw = FqPoly::constant(q, 1);
  for (int i = 0; i < 4; ++i) {
    acc += e.digits[i] * pw;
    pw = pw * v.poly();
  }
  CHECK(unit_level(RatFunc(acc) / x, v, 10) >= 4);
}
