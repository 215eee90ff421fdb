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

// Independent checks of the augmentation filtrations: the span of all
// n-fold products of (g - 1), the kernel of the expansion test, the dense
// closure basis, coset decompositions, integral lattices and the transfer.

#include <random>
#include <string>
#include <vector>

#include "ffstark/augfilt.hpp"

namespace ffstark {

// Abelian p-groups of order at most `max_order`, one per isomorphism type,
// as lists of cyclic factors (partitions of the exponent).
inline std::vector<std::vector<int64_t>> abelian_p_groups(int64_t p, int64_t max_order) {
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> cur;
  std::function<void(int64_t, int64_t)> rec = [&](int64_t largest, int64_t order) {
    if (!cur.empty()) out.push_back(cur);
    for (int64_t f = p; f <= largest && order * f <= max_order; f *= p) {
      cur.push_back(f);
      rec(f, order * f);
      cur.pop_back();
    }
  };
  rec(max_order, 1);
  return out;
}

// Span over Z/p^M of all products (g_1 - 1)...(g_n - 1), g_i in H.
inline ModEchelon exhaustive_power_span(const GroupPtr& H, int64_t p, int M, int n) {
  ModRing R(p, M);
  int64_t N = H->order();
  std::vector<std::vector<int64_t>> gens;
  std::vector<ModElem> prefix(n + 1, ModElem::one(H, R));
  std::function<void(int, int64_t)> rec = [&](int depth, int64_t start) {
    if (depth == n) {
      gens.push_back(prefix[n].coeffs());
      return;
    }
    for (int64_t g = start; g < N; ++g) {
      if (g == 0) continue;
      prefix[depth + 1] = prefix[depth] * ModElem::minus_one(H, R, g);
      rec(depth + 1, g);
    }
  };
  rec(0, 0);
  ModEchelon E(p, M, static_cast<size_t>(N));
  if (n == 0) {
    for (int64_t g = 0; g < N; ++g) gens.push_back(ModElem::basis(H, R, g).coeffs());
  }
  E.build(gens);
  return E;
}

// {x : x passes AugPowerTest::contains(., n)} as an explicit module: the
// kernel of x -> expand(x) modulo the relation span, read off a Howell form
// with the expansion columns placed first.
inline ModEchelon test_kernel_module(const AugPowerTest& t, int n) {
  const GroupPtr& H = t.group();
  const ModRing& R = t.ring();
  int64_t N = H->order();
  size_t c = t.count_below(n);
  std::vector<std::vector<int64_t>> rows;
  for (int64_t h = 0; h < N; ++h) {
    std::vector<int64_t> v(c + N, 0);
    auto e = t.expand(ModElem::basis(H, R, h), n);
    std::copy(e.begin(), e.end(), v.begin());
    v[c + h] = R.one();
    rows.push_back(v);
  }
  for (auto& w : t.relations(n)) {
    std::vector<int64_t> v(c + N, 0);
    std::copy(w.begin(), w.end(), v.begin());
    rows.push_back(v);
  }
  ModEchelon full(R.p, R.M, c + N);
  full.build(rows);
  std::vector<std::vector<int64_t>> ker;
  for (size_t i = 0; i < full.nrows(); ++i) {
    const auto& r = full.row(i);
    bool low_zero = std::all_of(r.begin(), r.begin() + c, [](int64_t x) { return x == 0; });
    if (low_zero) ker.emplace_back(r.begin() + c, r.end());
  }
  ModEchelon K(R.p, R.M, static_cast<size_t>(N));
  K.build(ker);
  return K;
}

struct FiltrationOracleResult {
  bool dense_equals_span = true;
  bool span_equals_test = true;
  bool generators_pass_test = true;
  std::string witness;
};

// Compare the three descriptions of I(H)^n, n = 0..D+1.
inline FiltrationOracleResult filtration_oracle(const GroupPtr& H, int64_t p, int M, int D) {
  FiltrationOracleResult out;
  AugFiltration F(H, p, M, D);
  for (int n = 0; n <= D + 1; ++n) {
    ModEchelon S = exhaustive_power_span(H, p, M, n);
    if (!same_module(S, F.dense_basis(n))) {
      out.dense_equals_span = false;
      out.witness = "dense basis differs from the product span at n = " + std::to_string(n);
      return out;
    }
    if (n == 0) continue;
    for (size_t i = 0; i < S.nrows(); ++i) {
      ModElem x(H, F.ring());
      x.coeffs() = S.row(i);
      if (!F.contains(x, n)) {
        out.generators_pass_test = false;
        out.witness = "span generator rejected by the expansion test at n = " + std::to_string(n);
        return out;
      }
    }
    if (!same_module(S, test_kernel_module(F.test(), n))) {
      out.span_equals_test = false;
      out.witness = "expansion-test kernel differs from the product span at n = " + std::to_string(n);
      return out;
    }
  }
  return out;
}

// Random element of I(H)^n over Z/p^M: a random combination of span rows.
inline ModElem random_in_power(const AugFiltration& F, int n, std::mt19937_64& rng) {
  const ModEchelon& E = F.dense_basis(n);
  ModElem x(F.group(), F.ring());
  for (size_t i = 0; i < E.nrows(); ++i) {
    int64_t c = static_cast<int64_t>(rng() % static_cast<uint64_t>(F.ring().mod));
    for (int64_t g = 0; g < F.group()->order(); ++g) x[g] = (x[g] + mulmod(c, E.row(i)[g], F.ring().mod)) % F.ring().mod;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Integral lattices I_Z(H)^n by closure of a Z-basis under s_i - 1.

inline IntMat integral_power_basis(const FinAbGroup& H, int n) {
  int64_t N = H.order();
  IntMat cur;
  for (int64_t g = 0; g < N; ++g) {
    std::vector<Int> v(N, 0);
    v[g] = 1;
    cur.push_back(v);
  }
  for (int k = 1; k <= n; ++k) {
    IntMat next;
    for (auto& b : cur)
      for (int i = 0; i < H.rank(); ++i) {
        std::vector<Int> v(N, 0);
        for (int64_t g = 0; g < N; ++g) {
          if (b[g] == 0) continue;
          v[H.add(g, H.gen(i))] += b[g];
          v[g] -= b[g];
        }
        next.push_back(v);
      }
    cur = hermite_rows(next);
  }
  return cur;
}

// Membership in the row lattice of a Hermite basis.
inline bool in_hermite_lattice(const IntMat& Hm, std::vector<Int> x) {
  for (const auto& r : Hm) {
    size_t c = 0;
    while (c < r.size() && r[c] == 0) ++c;
    if (c == r.size()) continue;
    for (size_t j = 0; j < c; ++j)
      if (x[j] != 0) return false;
    if (x[c] % r[c] != 0) return false;
    Int k = x[c] / r[c];
    for (size_t j = c; j < x.size(); ++j) x[j] -= k * r[j];
  }
  for (auto& v : x)
    if (v != 0) return false;
  return true;
}

// Smallest M with p^M (s_i - 1) in the lattice In (= I_Z^n) for all generators,
// so that p^M kills I/I^n.
inline int killing_exponent(const FinAbGroup& H, int64_t p, const IntMat& In) {
  for (int M = 0; M < 64; ++M) {
    Int pm = 1;
    for (int i = 0; i < M; ++i) pm *= static_cast<long>(p);
    bool ok = true;
    for (int i = 0; i < H.rank() && ok; ++i) {
      std::vector<Int> v(H.order(), 0);
      v[H.gen(i)] += pm;
      v[0] -= pm;
      ok = in_hermite_lattice(In, v);
    }
    if (ok) return M;
  }
  throw std::logic_error("killing_exponent: not found");
}

// ---------------------------------------------------------------------------
// Suites over families of groups. Each reports the number of cases checked and
// the first failure.

struct SuiteResult {
  int64_t cases = 0;
  int64_t failures = 0;
  std::string witness;
  void fail(const std::string& w) {
    if (!failures++) witness = w;
  }
};

inline std::string group_str(const FinAbGroup& G) {
  std::string s = "Z/1";
  for (size_t i = 0; i < G.factors().size(); ++i) s = (i ? s + " x Z/" : "Z/") + std::to_string(G.factors()[i]);
  return s;
}

inline std::vector<int64_t> small_primes(int64_t bound) {
  std::vector<int64_t> out;
  for (int64_t p = 2; p <= bound; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

// Dense closure, product span and expansion test agree for every abelian
// p-group of order <= max_order and every precision 1..maxM.
inline SuiteResult filtration_suite(int64_t max_order, int maxM, int D) {
  SuiteResult r;
  for (int64_t p : small_primes(max_order))
    for (auto& f : abelian_p_groups(p, max_order))
      for (int M = 1; M <= maxM; ++M) {
        GroupPtr H = make_group(f);
        ++r.cases;
        auto o = filtration_oracle(H, p, M, D);
        if (!o.dense_equals_span || !o.span_equals_test || !o.generators_pass_test)
          r.fail(group_str(*H) + ", M = " + std::to_string(M) + ": " + o.witness);
      }
  return r;
}

// The coset isomorphism Z[Gamma] (x) gr^n I(H) -> gr^n I_H: round trip,
// injectivity on graded pieces, independence of the section and
// multiplicativity up to the next filtration step.
inline SuiteResult pounds_suite(const std::vector<std::pair<std::vector<int64_t>, std::vector<std::vector<int64_t>>>>& cases,
                                int64_t p, int M, int D, int samples, uint64_t seed) {
  SuiteResult r;
  std::mt19937_64 rng(seed);
  for (auto& [factors, hgens] : cases) {
    GroupPtr G = make_group(factors);
    std::vector<int64_t> gens;
    for (auto& c : hgens) gens.push_back(G->index(c));
    Subgroup Hs = generate_subgroup(*G, gens);
    RelativeFiltration rel(G, Hs, p, M, D, true);
    const AugFiltration& F = rel.filtration();
    const Quotient& q = rel.gamma();
    const auto& incl = rel.embedded().incl;
    int64_t ng = q.Q->order();
    std::string tag = group_str(*G) + " / " + group_str(*q.Q);
    for (int n = 0; n <= D; ++n)
      for (int s = 0; s < samples; ++s) {
        ++r.cases;
        std::vector<ModElem> comps;
        for (int64_t gam = 0; gam < ng; ++gam) comps.push_back(random_in_power(F, n, rng));
        ModElem xi = rel.compose(comps);
        auto back = rel.decompose(xi);
        bool ok = true;
        for (int64_t gam = 0; gam < ng; ++gam) ok &= back[gam] == comps[gam];
        if (!ok) r.fail(tag + ": decompose o compose is not the identity");
        if (!rel.contains(xi, n)) r.fail(tag + ": image of degree " + std::to_string(n) + " not in I_H^n");
        bool all_next = true;
        for (auto& c : comps) all_next &= F.contains(c, n + 1);
        if (rel.contains(xi, n + 1) != all_next) r.fail(tag + ": graded injectivity fails at n = " + std::to_string(n));
        // Another section: s'(gamma) = s(gamma) + h_gamma.
        ModElem alt(G, F.ring());
        for (int64_t gam = 0; gam < ng; ++gam) {
          int64_t shift = incl.map[rng() % incl.map.size()];
          int64_t base = G->add(q.section[gam], shift);
          for (int64_t h = 0; h < static_cast<int64_t>(incl.map.size()); ++h) {
            int64_t g = G->add(base, incl.map[h]);
            alt[g] = (alt[g] + comps[gam][h]) % F.ring().mod;
          }
        }
        if (!rel.contains(alt - xi, n + 1)) r.fail(tag + ": class depends on the section at n = " + std::to_string(n));
        // Multiplicativity: L(a) L(b) = L(a * b) mod I_H^{n+m+1}.
        for (int m = 0; n + m <= D; ++m) {
          std::vector<ModElem> b;
          for (int64_t gam = 0; gam < ng; ++gam) b.push_back(random_in_power(F, m, rng));
          std::vector<ModElem> ab(ng, ModElem(F.group(), F.ring()));
          for (int64_t g1 = 0; g1 < ng; ++g1)
            for (int64_t g2 = 0; g2 < ng; ++g2) ab[q.Q->add(g1, g2)] += comps[g1] * b[g2];
          ModElem lhs = xi * rel.compose(b), rhs = rel.compose(ab);
          if (!rel.contains(lhs - rhs, n + m + 1))
            r.fail(tag + ": product rule fails for degrees " + std::to_string(n) + ", " + std::to_string(m));
        }
      }
  }
  return r;
}

// Z[H] meets I_{Z_p}(H)^n in I_Z(H)^n: for bounded integral x, membership in
// the integral lattice agrees with (aug x = 0 and x mod p^M in I^n), where
// p^M kills I/I^n.
inline SuiteResult base_change_suite(int64_t max_order, int D, int samples, int64_t height, uint64_t seed) {
  SuiteResult r;
  std::mt19937_64 rng(seed);
  auto rnd = [&](int64_t b) { return static_cast<long>(static_cast<int64_t>(rng() % (2 * b + 1)) - b); };
  for (int64_t p : small_primes(max_order))
    for (auto& f : abelian_p_groups(p, max_order)) {
      GroupPtr H = make_group(f);
      int64_t N = H->order();
      std::vector<IntMat> lat;
      for (int n = 0; n <= D + 1; ++n) lat.push_back(integral_power_basis(*H, n));
      for (int n = 1; n <= D + 1; ++n) {
        int M = std::max(1, killing_exponent(*H, p, lat[n]));
        if (ipow(p, M) > (int64_t{1} << 40)) continue;
        AugPowerTest test(H, p, M, n);
        ModRing R(p, M);
        for (int s = 0; s < samples; ++s) {
          ++r.cases;
          std::vector<Int> x(N, 0);
          int mode = s % 3;
          const IntMat& src = mode == 0 ? lat[n] : lat[n - 1];
          if (mode < 2) {
            for (auto& row : src) {
              Int a = rnd(height);
              for (int64_t g = 0; g < N; ++g) x[g] += a * row[g];
            }
            if (mode == 1)
              for (auto& row : lat[n]) {
                Int a = rnd(height);
                for (int64_t g = 0; g < N; ++g) x[g] += a * row[g];
              }
          } else {
            for (auto& v : x) v = rnd(height);
          }
          Int aug = 0;
          for (auto& v : x) aug += v;
          ZElem xz(H, IntRing{});
          xz.coeffs() = x;
          bool integral = in_hermite_lattice(lat[n], x);
          bool local = aug == 0 && test.contains(reduce(xz, R), n);
          if (integral != local)
            r.fail(group_str(*H) + ", n = " + std::to_string(n) + ": integral " + (integral ? "yes" : "no") +
                   ", p-adic " + (local ? "yes" : "no"));
        }
      }
    }
  return r;
}

// Ver(x) - |Gamma|^m sum_gamma x_gamma lies in I(H)^{m+1} for x in I_H^m of
// R[Gamma x H].
inline SuiteResult ver_suite(int64_t max_order, int maxGamma, int M, int D, int samples, uint64_t seed) {
  SuiteResult r;
  std::mt19937_64 rng(seed);
  for (int64_t p : small_primes(max_order))
    for (auto& f : abelian_p_groups(p, max_order))
      for (int ng = 1; ng <= maxGamma; ++ng) {
        GroupPtr gam = make_group({ng});
        GroupPtr Hg = make_group(f);
        GroupPtr G = direct_product(*gam, *Hg);
        std::vector<int64_t> gens;
        for (int i = gam->rank(); i < G->rank(); ++i) gens.push_back(G->gen(i));
        Subgroup Hs = generate_subgroup(*G, gens);
        RelativeFiltration rel(G, Hs, p, M, D, true);
        const AugFiltration& F = rel.filtration();
        int64_t nq = rel.gamma().Q->order();
        for (int m = 0; m <= D; ++m)
          for (int s = 0; s < samples; ++s) {
            ++r.cases;
            std::vector<ModElem> comps;
            for (int64_t g = 0; g < nq; ++g) comps.push_back(random_in_power(F, m, rng));
            ModElem xi = rel.compose(comps);
            ModElem v = restrict_to(transfer_ver(xi, Hs, ng), rel.embedded());
            ModElem sum(F.group(), F.ring());
            for (auto& c : comps) sum += c;
            int64_t scale = powmod(ng, m, F.ring().mod);
            if (!F.contains(v - sum.scaled(scale), m + 1))
              r.fail(group_str(*G) + ", m = " + std::to_string(m) + ": Ver is not multiplication by |Gamma|^m");
          }
      }
  return r;
}

}  // namespace ffstark
