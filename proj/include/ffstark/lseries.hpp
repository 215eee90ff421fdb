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

#pragma once

// Equivariant L-functions as polynomials in u = q^{-s} with group-ring
// coefficients, Stickelberger elements, (u-1)-expansions, the constant
// extension substitution u -> sigma, and a per-character oracle.

#include <algorithm>
#include <string>
#include <thread>
#include <vector>

#include "ffstark/classfield.hpp"
#include "ffstark/groupring.hpp"

namespace ffstark {

struct LSeriesTrunc {
  GroupPtr G;
  int B = 0;
  std::vector<ZElem> c;  // c[d], d = 0..B
  int last_nonzero = -1;
  void refresh() {
    last_nonzero = -1;
    for (int d = 0; d <= B; ++d)
      if (!c[d].is_zero()) last_nonzero = d;
  }
};

struct ThetaPoly {
  GroupPtr G;
  std::vector<ZElem> coeffs;  // Theta = sum coeffs[d] u^d
  int B = 0, W = 0;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

namespace detail {

inline void check_places(const ExtensionData& ext, const std::vector<Place>& S, const std::vector<Place>* T) {
  for (const Place& v : ext.ramified)
    if (std::find(S.begin(), S.end(), v) == S.end())
      throw std::invalid_argument("ramified place " + v.str() + " not in S");
  if (T) {
    if (T->empty()) throw std::invalid_argument("T must be nonempty");
    for (const Place& v : *T)
      if (std::find(S.begin(), S.end(), v) != S.end()) throw std::invalid_argument("S and T overlap at " + v.str());
  }
}

inline bool coprime_to_places(const FqPoly& f, const std::vector<FqPoly>& Ps) {
  for (const FqPoly& P : Ps)
    if ((f % P).is_zero()) return false;
  return true;
}

// Counts of Frobenius classes of monic polynomials of degree d coprime to Ps.
inline std::vector<int64_t> degree_counts(const ExtensionData& ext, int d, const std::vector<FqPoly>& Ps, int jobs) {
  int64_t n = ext.G->order();
  uint64_t total = static_cast<uint64_t>(ipow(ext.q, d));
  int nt = static_cast<int>(std::max<uint64_t>(1, std::min<uint64_t>(jobs, total / 4096 + 1)));
  std::vector<std::vector<int64_t>> part(nt, std::vector<int64_t>(n, 0));
  auto work = [&](int k) {
    uint64_t lo = total * k / nt, hi = total * (k + 1) / nt;
    for (uint64_t c = lo; c < hi; ++c) {
      FqPoly f = FqPoly::monic_from_code(ext.q, d, c);
      if (!coprime_to_places(f, Ps)) continue;
      ++part[k][ext.frob_poly(f)];
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> th;
    for (int k = 0; k < nt; ++k) th.emplace_back(work, k);
    for (auto& t : th) t.join();
  }
  std::vector<int64_t> out(n, 0);
  for (auto& p : part)
    for (int64_t g = 0; g < n; ++g) out[g] += p[g];
  return out;
}

inline std::vector<FqPoly> finite_polys(const std::vector<Place>& S) {
  std::vector<FqPoly> Ps;
  for (const Place& v : S)
    if (!v.is_inf()) Ps.push_back(v.poly());
  return Ps;
}

inline bool has_inf(const std::vector<Place>& S) {
  return std::any_of(S.begin(), S.end(), [](const Place& v) { return v.is_inf(); });
}

}  // namespace detail

// c_d = sum over monic f of degree d coprime to S_fin of [f], convolved with
// (1 - [inf] u)^{-1} when infinity is not in S.
inline LSeriesTrunc euler_coefficients(const ExtensionData& ext, const std::vector<Place>& S, int B, int jobs = 1) {
  detail::check_places(ext, S, nullptr);
  LSeriesTrunc s;
  s.G = ext.G;
  s.B = B;
  IntRing Z;
  auto Ps = detail::finite_polys(S);
  for (int d = 0; d <= B; ++d) {
    auto cnt = detail::degree_counts(ext, d, Ps, jobs);
    ZElem e(ext.G, Z);
    for (int64_t g = 0; g < ext.G->order(); ++g) e[g] = static_cast<long>(cnt[g]);
    s.c.push_back(e);
  }
  if (!detail::has_inf(S)) {
    int64_t fi = *ext.frob_inf;
    for (int d = 1; d <= B; ++d) s.c[d] += s.c[d - 1].translated(fi);
  }
  s.refresh();
  return s;
}

// Multiply by prod_{v in T} (1 - [v] q^{deg v} u^{deg v}), truncated at B.
inline LSeriesTrunc apply_T_factors(LSeriesTrunc s, const std::vector<Place>& T, const ExtensionData& ext,
                                    const std::vector<Place>& S) {
  detail::check_places(ext, S, &T);
  for (const Place& v : T) {
    int64_t fr = frobenius(ext, v);
    int dv = v.degree();
    Int nv = v.norm();
    for (int d = s.B; d >= dv; --d) {
      ZElem sh = s.c[d - dv].translated(fr);
      for (auto& x : sh.coeffs()) x *= nv;
      s.c[d] -= sh;
    }
  }
  s.refresh();
  return s;
}

// The polynomial Theta, certified by W vanishing coefficients past its degree.
inline ThetaPoly theta_polynomial(const LSeriesTrunc& s, int W) {
  if (s.last_nonzero + W > s.B)
    throw std::runtime_error("no stabilization within B = " + std::to_string(s.B) + " (window " + std::to_string(W) +
                             "); increase B");
  ThetaPoly t;
  t.G = s.G;
  t.B = s.B;
  t.W = W;
  for (int d = 0; d <= std::max(0, s.last_nonzero); ++d) t.coeffs.push_back(s.c[d]);
  return t;
}

inline ZElem theta_at_zero(const ThetaPoly& t) {
  ZElem r(t.G, IntRing{});
  for (auto& c : t.coeffs) r += c;
  return r;
}

// Theta = sum a_k (u - 1)^k, a_k = sum_{d >= k} binom(d, k) c_d.
inline std::vector<ZElem> derivative_coeffs(const ThetaPoly& t) {
  std::vector<ZElem> a;
  for (int k = 0; k <= t.degree(); ++k) {
    ZElem s(t.G, IntRing{});
    for (int d = k; d <= t.degree(); ++d) {
      Int b = binom(d, k);
      for (int64_t g = 0; g < t.G->order(); ++g) s[g] += b * t.coeffs[d][g];
    }
    a.push_back(s);
  }
  return a;
}

// Least k with a_k != 0 (the order of vanishing at u = 1), or -1 if Theta = 0.
inline int vanishing_order(const std::vector<ZElem>& a) {
  for (size_t k = 0; k < a.size(); ++k)
    if (!a[k].is_zero()) return static_cast<int>(k);
  return -1;
}

// theta_G over Gamma' x Z/n: substitute u -> sigma (the Frobenius of the
// constant layer of degree n).
inline ZElem constant_ext_theta(const ThetaPoly& t, int64_t n) {
  GroupPtr G = direct_product(*t.G, FinAbGroup({n}));
  ZElem r(G, IntRing{});
  int64_t ng = t.G->order();
  for (int d = 0; d <= t.degree(); ++d)
    for (int64_t g = 0; g < ng; ++g) r[g + ng * (d % n)] += t.coeffs[d][g];
  return r;
}

// Degree bound for every L_{S,T}(chi, u) on layers built from Carlitz moduli
// dividing `modulus` and constant extensions.
inline int theta_degree_bound(const FqPoly& modulus, const std::vector<Place>& S, const std::vector<Place>& T) {
  int b = modulus.deg() - 1;
  for (const Place& v : S)
    if (!v.is_inf()) b += v.degree();
  for (const Place& v : T) b += v.degree();
  return b;
}

// Per-character L-polynomials by direct enumeration with the character applied
// before accumulation. Characters are given by exponent tables at level N.
struct CharLPoly {
  std::vector<CycInt> coeffs;  // truncated at B
  int last_nonzero = -1;
};

inline std::vector<CharLPoly> per_character_L(const std::vector<std::vector<int64_t>>& chi_exps, int N,
                                              const std::vector<Place>& S, const std::vector<Place>& T, int B,
                                              const ExtensionData& ext) {
  detail::check_places(ext, S, &T);
  auto Ps = detail::finite_polys(S);
  size_t nc = chi_exps.size();
  // counts[chi][d][k] = #{f : deg f = d, chi(f) = zeta^k}
  std::vector<std::vector<std::vector<int64_t>>> cnt(nc, std::vector<std::vector<int64_t>>(B + 1, std::vector<int64_t>(N, 0)));
  for (int d = 0; d <= B; ++d)
    for_each_monic(ext.q, d, [&](const FqPoly& f) {
      if (!detail::coprime_to_places(f, Ps)) return;
      int64_t g = ext.frob_poly(f);
      for (size_t c = 0; c < nc; ++c) ++cnt[c][d][chi_exps[c][g]];
    });
  std::vector<CharLPoly> out(nc);
  for (size_t c = 0; c < nc; ++c) {
    auto& L = out[c].coeffs;
    for (int d = 0; d <= B; ++d) {
      std::vector<Int> p(N, 0);
      for (int k = 0; k < N; ++k) p[k] = static_cast<long>(cnt[c][d][k]);
      L.push_back(CycInt::from_poly(N, p));
    }
    if (!detail::has_inf(S)) {
      CycInt z = CycInt::root(N, chi_exps[c][*ext.frob_inf]);
      for (int d = 1; d <= B; ++d) L[d] += z * L[d - 1];
    }
    for (const Place& v : T) {
      CycInt z = CycInt::root(N, chi_exps[c][frobenius(ext, v)]).scaled(v.norm());
      int dv = v.degree();
      for (int d = B; d >= dv; --d) L[d] -= z * L[d - dv];
    }
    for (int d = 0; d <= B; ++d)
      if (!L[d].is_zero()) out[c].last_nonzero = d;
  }
  return out;
}

// Euler product for theta of the fixed field K' of H' (with S(K'), T(K')),
// from decomposition data: each unramified v contributes
// (1 - [Frob_v^f] u^{f deg v})^{-g}, f the order of Frob_v in G/H' and
// g = [G:H']/f. Coefficients in Z[G], supported on H'; u counts F_q-degree.
inline LSeriesTrunc subfield_euler_series(const ExtensionData& ext, const Subgroup& Hp, const std::vector<Place>& S,
                                          const std::vector<Place>& T, int B) {
  detail::check_places(ext, S, &T);
  const FinAbGroup& G = *ext.G;
  int64_t index = G.order() / Hp.order();
  auto residue_order = [&](int64_t x) {
    int64_t f = 1, y = x;
    while (!Hp.contains(y)) {
      y = G.add(y, x);
      ++f;
    }
    return std::pair<int64_t, int64_t>(f, y);
  };
  LSeriesTrunc s;
  s.G = ext.G;
  s.B = B;
  for (int d = 0; d <= B; ++d) s.c.emplace_back(ext.G, IntRing{});
  s.c[0][0] = 1;
  auto euler = [&](int64_t fr, int dv, int sign, const Int& weight) {
    // multiply by (1 - [x] w u^m)^{sign * g}
    auto [f, x] = residue_order(fr);
    int64_t g = index / f;
    int64_t m = f * dv;
    if (m > B) return;
    Int wf = 1;
    for (int64_t i = 0; i < f; ++i) wf *= weight;
    if (sign < 0) {
      // (1 - y)^{-g} = sum_k binom(g + k - 1, k) y^k
      for (int d = B; d >= 1; --d)
        for (int64_t k = 1; k * m <= d; ++k) {
          Int cf = binom(static_cast<unsigned long>(g + k - 1), static_cast<unsigned long>(k));
          for (int64_t i = 0; i < k; ++i) cf *= wf;
          ZElem t = s.c[d - k * m].translated(G.pow(x, k));
          for (auto& z : t.coeffs()) z *= cf;
          s.c[d] += t;
        }
    } else {
      for (int d = B; d >= 1; --d)
        for (int64_t k = 1; k <= g && k * m <= d; ++k) {
          Int cf = binom(static_cast<unsigned long>(g), static_cast<unsigned long>(k));
          for (int64_t i = 0; i < k; ++i) cf *= -wf;
          ZElem t = s.c[d - k * m].translated(G.pow(x, k));
          for (auto& z : t.coeffs()) z *= cf;
          s.c[d] += t;
        }
    }
  };
  auto in_S = [&](const Place& v) { return std::find(S.begin(), S.end(), v) != S.end(); };
  Place inf = Place::infinity(ext.q);
  if (!in_S(inf)) euler(frobenius(ext, inf), 1, -1, 1);
  for (int dv = 1; dv <= B; ++dv)
    for (const FqPoly& P : irreducibles(ext.q, dv)) {
      Place v = Place::finite(P);
      if (in_S(v)) continue;
      euler(frobenius(ext, v), dv, -1, 1);
    }
  for (const Place& v : T) euler(frobenius(ext, v), v.degree(), +1, v.norm());
  s.refresh();
  return s;
}

// Theta of the fixed field K' of H' from the power sums of Theta_G: with
// u Theta'/Theta = sum N_n u^n, every unramified v splits in K' into g places
// of residue degree f, which gives N'_n = [G:H'] * (N_n restricted to H').
// Theta_{K'} is then recovered by the Newton recurrence n c'_n = sum N'_k c'_{n-k}.
inline LSeriesTrunc subfield_series_from_power_sums(const ThetaPoly& t, const Subgroup& Hp, int B) {
  const GroupPtr& G = t.G;
  IntRing Z;
  if (t.coeffs.empty() || !(t.coeffs[0] == ZElem::one(G, Z)))
    throw std::invalid_argument("subfield_series_from_power_sums: constant term must be 1");
  auto coeff = [&](int d) { return d <= t.degree() ? t.coeffs[d] : ZElem(G, Z); };
  std::vector<ZElem> N(B + 1, ZElem(G, Z));
  for (int n = 1; n <= B; ++n) {
    ZElem x = coeff(n).scaled(Int(n));
    for (int k = std::max(1, n - t.degree()); k < n; ++k) x -= N[k] * coeff(n - k);
    N[n] = x;
  }
  Int index = static_cast<long>(G->order() / Hp.order());
  for (int n = 1; n <= B; ++n)
    for (int64_t g = 0; g < G->order(); ++g) N[n][g] = Hp.contains(g) ? N[n][g] * index : Int(0);
  LSeriesTrunc s;
  s.G = G;
  s.B = B;
  s.c.assign(B + 1, ZElem(G, Z));
  s.c[0] = ZElem::one(G, Z);
  for (int n = 1; n <= B; ++n) {
    ZElem x(G, Z);
    for (int k = 1; k <= n; ++k) x += N[k] * s.c[n - k];
    for (int64_t g = 0; g < G->order(); ++g) {
      if (!mpz_divisible_ui_p(x[g].get_mpz_t(), static_cast<unsigned long>(n)))
        throw std::logic_error("subfield_series_from_power_sums: non-integral coefficient");
      x[g] /= n;
    }
    s.c[n] = x;
  }
  s.refresh();
  return s;
}

}  // namespace ffstark
