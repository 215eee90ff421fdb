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

#include "ffstark/integer.hpp"

using namespace ffstark;

static IntMat random_mat(std::mt19937_64& rng, size_t r, size_t c, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IntMat A(r, std::vector<Int>(c));
  for (auto& row : A)
    for (auto& x : row) x = d(rng);
  return A;
}

static IntMat mul(const IntMat& A, const IntMat& B) {
  IntMat C(A.size(), std::vector<Int>(B.at(0).size(), 0));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t k = 0; k < B.size(); ++k)
      for (size_t j = 0; j < B[0].size(); ++j) C[i][j] += A[i][k] * B[k][j];
  return C;
}

TEST_CASE("modular helpers") {
  CHECK(posmod(-7, 5) == 3);
  CHECK(powmod(3, 4, 7) == 4);
  CHECK(mulmod(invmod(5, 27), 5, 27) == 1);
  CHECK(vp(Int(162), 3) == 4);
  CHECK(vp(int64_t{48}, 2) == 4);
  CHECK(prime_factors(360) == std::vector<int64_t>{2, 3, 5});
  CHECK(binom(6, 3) == 20);
  CHECK(reduce_mod(Int(-1), 9) == 8);
}

TEST_CASE("Smith form reproduces the matrix") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IntMat A = random_mat(rng, r, c, 6);
    SmithForm s = smith_form(A);
    IntMat D = mul(mul(s.U, A), s.V);
    CHECK(D == s.D);
    for (size_t i = 0; i + 1 < std::min(r, c); ++i)
      if (s.D[i + 1][i + 1] != 0) CHECK(s.D[i + 1][i + 1] % s.D[i][i] == 0);
  }
}

TEST_CASE("kernel and determinants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    IntMat A = random_mat(rng, 2, 4, 5);
    IntMat K = integer_kernel(A, 4);
    for (auto& v : K) {
      for (auto& row : A) {
        Int s = 0;
        for (size_t j = 0; j < 4; ++j) s += row[j] * v[j];
        CHECK(s == 0);
      }
    }
    IntMat B = random_mat(rng, 3, 3, 5);
    std::vector<std::vector<Rat>> Bq(3, std::vector<Rat>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Bq[i][j] = B[i][j];
    Int leib = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) - B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
               B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    CHECK(det_bareiss(B) == leib);
    CHECK(det_rat(Bq) == Rat(leib));
  }
}
