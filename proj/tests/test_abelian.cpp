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

#include "ffstark/abelian.hpp"

using namespace ffstark;

TEST_CASE("group arithmetic in mixed radix") {
  FinAbGroup G({4, 6});
  CHECK(G.order() == 24);
  CHECK(G.exponent() == 12);
  for (int64_t x = 0; x < 24; ++x) {
    CHECK(G.add(x, G.neg(x)) == 0);
    CHECK(G.pow(x, G.element_order(x)) == 0);
    CHECK(G.index(G.coords(x)) == x);
    for (int64_t y = 0; y < 24; ++y) CHECK(G.add(x, y) == G.add(y, x));
  }
  CHECK(G.is_p_group(2) == false);
  CHECK(FinAbGroup({9, 3}).is_p_group(3));
}

TEST_CASE("subgroup lattice sizes") {
  CHECK(all_subgroups(FinAbGroup({2, 2})).size() == 5);
  CHECK(all_subgroups(FinAbGroup({4, 2})).size() == 8);
  CHECK(all_subgroups(FinAbGroup({3, 3})).size() == 6);
  CHECK(all_subgroups(FinAbGroup({27})).size() == 4);
  CHECK(all_subgroups(FinAbGroup({6})).size() == 4);
}

TEST_CASE("quotients are homomorphic with the right kernel") {
  GroupPtr G = make_group({4, 6, 3});
  for (const Subgroup& H : all_subgroups(*G)) {
    Quotient q = quotient(G, H);
    CHECK(q.Q->order() * H.order() == G->order());
    for (int64_t g = 0; g < G->order(); g += 5)
      for (int64_t h = 0; h < G->order(); h += 7)
        CHECK(q.proj.map[G->add(g, h)] == q.Q->add(q.proj.map[g], q.proj.map[h]));
    for (int64_t g = 0; g < G->order(); ++g) CHECK((q.proj.map[g] == 0) == H.contains(g));
    for (int64_t x = 0; x < q.Q->order(); ++x) CHECK(q.proj.map[q.section[x]] == x);
  }
}

TEST_CASE("embedded subgroups are isomorphic copies") {
  GroupPtr G = make_group({8, 4});
  for (const Subgroup& S : all_subgroups(*G)) {
    EmbeddedSubgroup e = embed_subgroup(G, S);
    CHECK(e.H->order() == S.order());
    for (int64_t a = 0; a < e.H->order(); ++a) {
      CHECK(S.contains(e.incl.map[a]));
      for (int64_t b = 0; b < e.H->order(); ++b)
        CHECK(e.incl.map[e.H->add(a, b)] == G->add(e.incl.map[a], e.incl.map[b]));
    }
  }
}

TEST_CASE("cyclotomic integers") {
  CHECK(euler_phi(12) == 4);
  CycInt z = CycInt::root(5, 1);
  CycInt s(5, 0);
  for (int k = 0; k < 5; ++k) s += CycInt::root(5, k);
  CHECK(s.is_zero());
  CycInt p = CycInt(5, 1);
  for (int k = 0; k < 5; ++k) p = p * z;
  CHECK(p == CycInt(5, 1));
  CHECK(CycInt::root(6, 1).galois(5) == CycInt::root(6, 5));
  CHECK(CycInt::root(3, 1).embed(6) == CycInt::root(6, 2));
}

TEST_CASE("Fourier transform inverts and is multiplicative on convolutions") {
  std::mt19937_64 rng(17);
  for (auto f : {std::vector<int64_t>{6}, std::vector<int64_t>{2, 4}, std::vector<int64_t>{3, 3}}) {
    FinAbGroup G(f);
    std::vector<Int> a(G.order()), b(G.order()), c(G.order(), 0);
    for (auto& x : a) x = static_cast<long>(rng() % 11) - 5;
    for (auto& x : b) x = static_cast<long>(rng() % 11) - 5;
    for (int64_t g = 0; g < G.order(); ++g)
      for (int64_t h = 0; h < G.order(); ++h) c[G.add(g, h)] += a[g] * b[h];
    auto Fa = fourier(G, a), Fb = fourier(G, b), Fc = fourier(G, c);
    for (int64_t i = 0; i < G.order(); ++i) CHECK(Fc[i] == Fa[i] * Fb[i]);
    // Direct character sums.
    for (const Character& chi : characters(G)) {
      CycInt s(static_cast<int>(G.exponent()), 0);
      for (int64_t g = 0; g < G.order(); ++g) s += char_value(G, chi, g).scaled(a[g]);
      CHECK(s == Fa[char_index(G, chi)]);
    }
    InverseFourier inv = inverse_fourier(G, Fa);
    REQUIRE(inv.exact);
    for (int64_t g = 0; g < G.order(); ++g) CHECK(inv.coeffs[g] == CycInt(static_cast<int>(G.exponent()), a[g]));
  }
}
