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

using namespace ffstark;

static FqPoly P(int q, std::vector<int> c) { return FqPoly(q, c); }

static ThetaPoly theta_of(const ExtensionData& e, const std::vector<Place>& S, const std::vector<Place>& T, int B, int W) {
  return theta_polynomial(apply_T_factors(euler_coefficients(e, S, B), T, e, S), W);
}

TEST_CASE("closed forms over the rational function field") {
  int q = 3;
  ExtPtr triv = trivial_extension(q);
  Place inf = Place::infinity(q), t0 = Place::finite(P(q, {0, 1})), t1 = Place::finite(P(q, {2, 1}));
  ThetaPoly a = theta_of(*triv, {inf}, {t0}, 8, 4);
  REQUIRE(a.degree() == 0);
  CHECK(a.coeffs[0][0] == 1);
  ThetaPoly b = theta_of(*triv, {inf, t0}, {t1}, 8, 4);
  REQUIRE(b.degree() == 1);
  CHECK(b.coeffs[0][0] == 1);
  CHECK(b.coeffs[1][0] == -1);
  auto d = derivative_coeffs(b);
  CHECK(d[0][0] == 0);
  CHECK(d[1][0] == -1);
  CHECK(vanishing_order(d) == 1);
  CHECK_THROWS(theta_of(*triv, {inf, t0}, {t1}, 3, 4));
}

TEST_CASE("constant extension substitution matches direct enumeration") {
  int q = 3;
  Place inf = Place::infinity(q), t0 = Place::finite(P(q, {0, 1})), t1 = Place::finite(P(q, {2, 1}));
  ThetaPoly base = theta_of(*trivial_extension(q), {inf, t0}, {t1}, 8, 4);
  ExtPtr c = constant_extension(q, 9);
  ThetaPoly direct = theta_of(*c, {inf, t0}, {t1}, 8, 4);
  ZElem sub = constant_ext_theta(base, 9);
  ZElem th = theta_at_zero(direct);
  for (int64_t g = 0; g < 9; ++g) CHECK(sub[g] == th[g]);
}

TEST_CASE("interpolation of per-character L-functions") {
  for (auto [q, m] : std::vector<std::pair<int, FqPoly>>{{3, P(3, {0, 0, 1})}, {2, P(2, {0, 1, 1})}}) {
    ExtPtr e = carlitz_extension(q, m);
    std::vector<Place> S = e->ramified;
    if (std::find(S.begin(), S.end(), Place::infinity(q)) == S.end()) S.insert(S.begin(), Place::infinity(q));
    std::vector<Place> T = {Place::finite(irreducibles(q, 2).back())};
    int B = theta_degree_bound(m, S, T) + 4;
    ThetaPoly th = theta_of(*e, S, T, B, 4);
    std::vector<std::vector<int64_t>> chis;
    auto cs = characters(*e->G);
    for (auto& chi : cs) {
      std::vector<int64_t> ex(e->G->order());
      for (int64_t g = 0; g < e->G->order(); ++g) ex[g] = char_exponent(*e->G, chi, g);
      chis.push_back(ex);
    }
    int N = static_cast<int>(e->G->exponent());
    auto L = per_character_L(chis, N, S, T, B, *e);
    for (int d = 0; d <= th.degree(); ++d) {
      std::vector<Int> co(th.coeffs[d].coeffs().begin(), th.coeffs[d].coeffs().end());
      auto F = fourier(*e->G, co);
      for (size_t c = 0; c < cs.size(); ++c) CHECK(F[c] == L[c].coeffs[d]);
    }
  }
}

TEST_CASE("subfield series: power sums agree with direct Euler products") {
  int q = 3;
  ExtPtr e = composite_extension({quotient_extension(carlitz_extension(q, P(q, {0, 0, 1})),
                                                     generate_subgroup(*carlitz_extension(q, P(q, {0, 0, 1}))->G, {})),
                                  constant_extension(q, 2)});
  Place inf = Place::infinity(q), t0 = Place::finite(P(q, {0, 1})), t1 = Place::finite(P(q, {2, 1}));
  std::vector<Place> S = {inf, t0}, T = {t1};
  ThetaPoly th = theta_of(*e, S, T, 10, 4);
  for (const Subgroup& Hp : all_subgroups(*e->G)) {
    int64_t idx = e->G->order() / Hp.order();
    if (idx * th.degree() + 4 > 9) continue;
    int B = static_cast<int>(idx * th.degree()) + 4;
    LSeriesTrunc a = subfield_euler_series(*e, Hp, S, T, B);
    LSeriesTrunc b = subfield_series_from_power_sums(th, Hp, B);
    for (int d = 0; d <= B; ++d) CHECK(a.c[d] == b.c[d]);
  }
}
