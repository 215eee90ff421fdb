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

#include "ffstark/augoracle.hpp"

using namespace ffstark;

TEST_CASE("abelian p-groups are enumerated by partitions") {
  CHECK(abelian_p_groups(2, 16).size() == 1 + 2 + 3 + 5);
  CHECK(abelian_p_groups(3, 27).size() == 1 + 2 + 3);
  CHECK(abelian_p_groups(5, 27).size() == 1 + 2);
  CHECK(abelian_p_groups(7, 27).size() == 1);
}

TEST_CASE("small filtrations by hand") {
  // Z/2 over Z/4: (g-1)^2 = -2(g-1), so I^n = 2^{n-1} I.
  GroupPtr H = make_group({2});
  AugFiltration F(H, 2, 2, 3);
  ModElem x = ModElem::minus_one(H, F.ring(), 1);
  CHECK(F.test().degree(x) == 1);
  CHECK(F.test().degree(x.scaled(2)) == 2);
  CHECK(F.test().degree(x * x) == 2);
  // Z/3 over F_3: I^n has rank 3 - n.
  GroupPtr C3 = make_group({3});
  AugFiltration G3(C3, 3, 1, 3);
  for (int n = 0; n <= 3; ++n) CHECK(G3.dense_basis(n).nrows() == static_cast<size_t>(3 - std::min(n, 3)));
}

TEST_CASE("dense closure, product span and expansion test agree") {
  // The comparison separates consecutive powers.
  GroupPtr H = make_group({9, 3});
  AugPowerTest t(H, 3, 2, 3);
  for (int n = 1; n <= 3; ++n) {
    CHECK(same_module(exhaustive_power_span(H, 3, 2, n), test_kernel_module(t, n)));
    CHECK(!same_module(exhaustive_power_span(H, 3, 2, n + 1), test_kernel_module(t, n)));
  }
  SuiteResult r = filtration_suite(27, 3, 3);
  INFO(r.witness);
  CHECK(r.cases > 60);
  CHECK(r.failures == 0);
}

TEST_CASE("coset decomposition round trips") {
  std::vector<std::pair<std::vector<int64_t>, std::vector<std::vector<int64_t>>>> cases = {
      {{9}, {{3}}},              // non-split: Gamma = Z/3
      {{4, 2}, {{2, 0}, {0, 1}}}, // Gamma = Z/2
      {{6, 3}, {{2, 0}, {0, 1}}}, // Gamma = Z/2, H = Z/3 x Z/3
      {{27}, {{3}}},
  };
  SuiteResult a = pounds_suite({cases[0], cases[2], cases[3]}, 3, 3, 2, 4, 11);
  INFO(a.witness);
  CHECK(a.failures == 0);
  SuiteResult b = pounds_suite({cases[1]}, 2, 3, 2, 4, 12);
  INFO(b.witness);
  CHECK(b.failures == 0);
}

TEST_CASE("integral and p-adic augmentation powers meet correctly") {
  SuiteResult r = base_change_suite(16, 2, 9, 3, 5);
  INFO(r.witness);
  CHECK(r.cases > 0);
  CHECK(r.failures == 0);
}

TEST_CASE("transfer scales degree-m classes by |Gamma|^m") {
  SuiteResult r = ver_suite(9, 6, 3, 2, 2, 7);
  INFO(r.witness);
  CHECK(r.failures == 0);
}

TEST_CASE("certified precision") {
  GroupPtr H = make_group({27});
  AugFiltration F(H, 3, 3, 2);
  CHECK(F.certified_precision(1) == 2);
  CHECK(F.certified_precision(2) == 1);
  CHECK_THROWS(F.certified_precision(3));
  GroupPtr H2 = make_group({243});
  AugFiltration F2(H2, 3, 5, 2);
  CHECK(F2.certified_precision(1) == 4);
  CHECK(F2.certified_precision(2) == 3);
}
