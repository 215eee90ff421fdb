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

#include "ffstark/groupring.hpp"

using namespace ffstark;

static ZElem random_z(std::mt19937_64& rng, GroupPtr G) {
  ZElem x(G, IntRing{});
  for (int64_t g = 0; g < G->order(); ++g) x[g] = static_cast<long>(rng() % 9) - 4;
  return x;
}

TEST_CASE("group ring axioms") {
  std::mt19937_64 rng(1);
  GroupPtr G = make_group({4, 3});
  for (int trial = 0; trial < 20; ++trial) {
    ZElem a = random_z(rng, G), b = random_z(rng, G), c = random_z(rng, G);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a * b).augment() == a.augment() * b.augment());
    CHECK(a * ZElem::one(G, IntRing{}) == a);
  }
  ZElem m = ZElem::minus_one(G, IntRing{}, 5);
  CHECK(m.augment() == 0);
  CHECK(m[5] == 1);
  CHECK(m[0] == -1);
}

TEST_CASE("reduction modulo p^M is a ring map") {
  std::mt19937_64 rng(2);
  GroupPtr G = make_group({9});
  ModRing R(3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    ZElem a = random_z(rng, G), b = random_z(rng, G);
    CHECK(reduce(a * b, R) == reduce(a, R) * reduce(b, R));
  }
}

TEST_CASE("chi twists are ring maps and recover characters") {
  std::mt19937_64 rng(3);
  GroupPtr G = make_group({4, 6});
  for (const Subgroup& H : all_subgroups(*G)) {
    if (H.order() == 1 || H.order() == G->order()) continue;
    Quotient q = quotient(G, H);
    ZElem a = random_z(rng, G), b = random_z(rng, G);
    for (const Character& chi : characters(*q.Q)) {
      CHECK(chi_twist(a * b, q, chi) == chi_twist(a, q, chi) * chi_twist(b, q, chi));
      ModRing R(2, 3);
      CycModRing CR(static_cast<int>(q.Q->exponent()), 2, 3);
      CHECK(chi_twist(reduce(a, R), q, chi) == reduce(chi_twist(a, q, chi), CR));
    }
  }
}

TEST_CASE("transfer is a ring map into the subgroup") {
  std::mt19937_64 rng(4);
  GroupPtr G = make_group({3, 9});
  Subgroup H = generate_subgroup(*G, {G->index({0, 1})});
  Quotient q = quotient(G, H);
  ZElem a = random_z(rng, G), b = random_z(rng, G);
  int64_t n = q.Q->order();
  CHECK(transfer_ver(a * b, H, n) == transfer_ver(a, H, n) * transfer_ver(b, H, n));
  EmbeddedSubgroup e = embed_subgroup(G, H);
  ZElem r = restrict_to(transfer_ver(a, H, n), e);
  CHECK(r.augment() == a.augment());
  CHECK_THROWS(restrict_to(a + ZElem::basis(G, IntRing{}, G->index({1, 0})), e));
}

TEST_CASE("pushforward and coset parts") {
  std::mt19937_64 rng(5);
  GroupPtr G = make_group({2, 6});
  Subgroup H = generate_subgroup(*G, {G->index({1, 3})});
  Quotient q = quotient(G, H);
  ZElem a = random_z(rng, G);
  ZElem sum(G, IntRing{});
  for (int64_t r : coset_reps(*G, H)) sum += gamma_part(a, H, r);
  CHECK(sum == a);
  CHECK(project(a, q.proj).augment() == a.augment());
}
