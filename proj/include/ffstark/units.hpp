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

// (S,T)-unit lattices over F_q(t), the modified class number, S-place
// permutation modules, wedge elements with Z_(p) coefficients and the
// determinant pairing iota.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ffstark/abelian.hpp"
#include "ffstark/fqpoly.hpp"
#include "ffstark/integer.hpp"

namespace ffstark {

// ---------------------------------------------------------------------------
// Discrete logarithms in residue fields.

class ResidueLog {
 public:
  ResidueLog() = default;
  explicit ResidueLog(const Place& v) : v_(v), q_(v.q()) {
    int d = v.degree();
    order_ = ipow(q_, d) - 1;
    table_.assign(order_ + 1, -1);
    // search for a primitive element by code
    for (uint64_t c = 1; c <= static_cast<uint64_t>(order_); ++c) {
      FqPoly g = from_code(c, d);
      std::fill(table_.begin(), table_.end(), -1);
      FqPoly x = FqPoly::constant(q_, 1);
      int64_t k = 0;
      bool ok = true;
      while (true) {
        uint64_t code = x.full_code();
        if (table_[code] >= 0) {
          ok = k == order_;
          break;
        }
        table_[code] = k++;
        x = reduce(x * g);
      }
      if (ok) return;
    }
    throw std::logic_error("ResidueLog: no primitive element");
  }

  int64_t order() const { return order_; }
  // Discrete log of the residue of x (a unit at v).
  int64_t log(const RatFunc& x) const {
    if (v_.is_inf()) {
      if (ord_at(x, v_) != 0) throw std::invalid_argument("ResidueLog: not a unit at inf");
      int r = static_cast<int>(mulmod(x.num().lc(), invmod(x.den().lc(), q_), q_));
      return table_.at(r);
    }
    FqPoly a = x.num() % v_.poly(), b = x.den() % v_.poly();
    if (a.is_zero() || b.is_zero()) throw std::invalid_argument("ResidueLog: not a unit at " + v_.str());
    int64_t la = table_.at(a.full_code()), lb = table_.at(b.full_code());
    return posmod(la - lb, order_);
  }

 private:
  FqPoly from_code(uint64_t c, int d) const {
    std::vector<int> co(d, 0);
    for (int i = 0; i < d; ++i) {
      co[i] = static_cast<int>(c % q_);
      c /= q_;
    }
    return FqPoly(q_, co);
  }
  FqPoly reduce(const FqPoly& x) const { return v_.is_inf() ? x : x % v_.poly(); }

  Place v_ = Place::infinity(2);
  int q_ = 2;
  int64_t order_ = 1;
  std::vector<int64_t> table_;
};

inline int primitive_root(int q) {
  for (int g = 1; g < q; ++g) {
    int64_t x = 1, k = 0;
    do {
      x = x * g % q;
      ++k;
    } while (x != 1);
    if (k == q - 1) return g;
  }
  throw std::logic_error("primitive_root: none");
}

// ---------------------------------------------------------------------------
// Unit lattices over k = F_q(t).

// A k-element c * prod P^{a_P} over the finite places of S.
struct SUnit {
  int c = 1;
  std::vector<Int> exps;
};

struct UnitLattice {
  int q = 2;
  std::vector<Place> S, T;
  std::vector<Place> sfin;  // finite places of S, in S order
  std::vector<SUnit> basis;
  IntMat ord;  // ord[j][i] = ord_{S[i]}(u_j)
  Int h = 1;
  Int pic = 1;      // |Pic(O_S)| = gcd of the degrees in S
  Int coker = 1;    // |coker(O_S^* -> prod F_v^*)|

  int rank() const { return static_cast<int>(basis.size()); }
  RatFunc unit(int j) const { return to_ratfunc(basis.at(j)); }
  std::vector<RatFunc> units() const {
    std::vector<RatFunc> r;
    for (int j = 0; j < rank(); ++j) r.push_back(unit(j));
    return r;
  }
  // deg_w(u_j) = deg(w) * ord_w(u_j) at the i-th place of S.
  Int deg_at(int j, int i) const { return ord[j][i] * S[i].degree(); }
  int place_index(const Place& v) const {
    auto it = std::find(S.begin(), S.end(), v);
    if (it == S.end()) throw std::invalid_argument("place " + v.str() + " not in S");
    return static_cast<int>(it - S.begin());
  }

  RatFunc to_ratfunc(const SUnit& u) const {
    FqPoly num = FqPoly::constant(q, u.c), den = FqPoly::constant(q, 1);
    for (size_t i = 0; i < sfin.size(); ++i) {
      if (!u.exps[i].fits_slong_p()) throw std::overflow_error("unit exponent too large");
      long e = u.exps[i].get_si();
      if (e > 0) num = num * poly_pow(sfin[i].poly(), static_cast<int>(e));
      if (e < 0) den = den * poly_pow(sfin[i].poly(), static_cast<int>(-e));
    }
    return RatFunc(num, den);
  }
  std::string str(const SUnit& u) const {
    std::string s = std::to_string(u.c);
    for (size_t i = 0; i < sfin.size(); ++i)
      if (u.exps[i] != 0) s += "*(" + sfin[i].poly().str() + ")^" + u.exps[i].get_str();
    return s;
  }
};

namespace detail {

inline void check_ST(const std::vector<Place>& S, const std::vector<Place>& T) {
  if (S.empty()) throw std::invalid_argument("S must be nonempty");
  if (T.empty()) throw std::invalid_argument("T must be nonempty (torsion would survive)");
  for (const Place& v : T)
    if (std::find(S.begin(), S.end(), v) != S.end()) throw std::invalid_argument("S and T overlap at " + v.str());
  for (size_t i = 0; i < S.size(); ++i)
    for (size_t j = i + 1; j < S.size(); ++j)
      if (S[i] == S[j]) throw std::invalid_argument("repeated place in S");
}

}  // namespace detail

inline void recompute_valuations(UnitLattice& L) {
  L.ord.assign(L.rank(), std::vector<Int>(L.S.size(), 0));
  for (int j = 0; j < L.rank(); ++j) {
    Int total = 0;
    for (size_t i = 0; i < L.sfin.size(); ++i) total += L.basis[j].exps[i] * L.sfin[i].degree();
    for (size_t i = 0; i < L.S.size(); ++i) {
      if (L.S[i].is_inf()) {
        L.ord[j][i] = -total;
      } else {
        auto it = std::find(L.sfin.begin(), L.sfin.end(), L.S[i]);
        L.ord[j][i] = L.basis[j].exps[it - L.sfin.begin()];
      }
    }
  }
}

// U = ker(O_S^* -> prod_{v in T} F_v^*), O_S^* = F_q^* x <P in S_fin>
// (degree zero when inf is not in S), and h = |Pic(O_S)| |coker|.
inline UnitLattice sunit_lattice(const std::vector<Place>& S, const std::vector<Place>& T, int q) {
  detail::check_ST(S, T);
  UnitLattice L;
  L.q = q;
  L.S = S;
  L.T = T;
  for (const Place& v : S)
    if (!v.is_inf()) L.sfin.push_back(v);
  bool inf_in_S = std::any_of(S.begin(), S.end(), [](const Place& v) { return v.is_inf(); });
  size_t s = L.sfin.size();
  int g = primitive_root(q);

  std::vector<ResidueLog> logs;
  for (const Place& v : T) logs.emplace_back(v);
  size_t nt = T.size();

  // Lattice of exponent vectors (a_P) allowed in O_S^*.
  IntMat Lexp;
  if (inf_in_S) {
    Lexp = identity_mat(s);
  } else {
    IntMat degrow(1, std::vector<Int>(s));
    for (size_t i = 0; i < s; ++i) degrow[0][i] = L.sfin[i].degree();
    Lexp = integer_kernel(degrow, s);
  }

  // Images in prod Z/(N_v - 1): constant generator and lattice generators.
  auto image = [&](int c, const std::vector<Int>& a) {
    SUnit u{c, a};
    RatFunc x = L.to_ratfunc(u);
    std::vector<Int> img(nt);
    for (size_t k = 0; k < nt; ++k) img[k] = logs[k].log(x);
    return img;
  };
  IntMat gens;
  gens.push_back(image(g, std::vector<Int>(s, 0)));
  for (auto& a : Lexp) gens.push_back(image(1, a));

  // coker = prod(N_v - 1) / |image|.
  IntMat rel = gens;
  for (size_t k = 0; k < nt; ++k) {
    std::vector<Int> r(nt, 0);
    r[k] = logs[k].order();
    rel.push_back(r);
  }
  SmithForm sf = smith_form(rel, nt);
  Int idx = 1;
  for (size_t k = 0; k < nt; ++k) idx *= abs(sf.D[k][k]);
  L.coker = idx;
  Int gdeg = 0;
  for (const Place& v : S) gdeg = gcd(gdeg, Int(v.degree()));
  L.pic = gdeg;
  L.h = L.pic * L.coker;

  // Kernel: (z, y) with z the constant exponent and y coordinates in Lexp.
  // Solve z*img(g) + sum y_i img(L_i) = sum m_k (N_k - 1) e_k.
  size_t nvar = 1 + Lexp.size() + nt;
  IntMat sys(nt, std::vector<Int>(nvar, 0));
  for (size_t k = 0; k < nt; ++k) {
    sys[k][0] = gens[0][k];
    for (size_t i = 0; i < Lexp.size(); ++i) sys[k][1 + i] = gens[1 + i][k];
    sys[k][1 + Lexp.size() + k] = -Int(logs[k].order());
  }
  IntMat ker = integer_kernel(sys, nvar);
  // Project to the free part (exponent vectors); the constant is then unique.
  IntMat proj;
  for (auto& v : ker) {
    std::vector<Int> a(s, 0);
    for (size_t i = 0; i < Lexp.size(); ++i)
      for (size_t c = 0; c < s; ++c) a[c] += v[1 + i] * Lexp[i][c];
    proj.push_back(a);
  }
  IntMat hb = hermite_rows(proj);
  for (auto& a : hb) {
    SUnit u{1, a};
    std::vector<Int> base = image(1, a);
    bool found = false;
    for (int z = 0; z < q - 1 && !found; ++z) {
      int c = static_cast<int>(powmod(g, z, q));
      bool ok = true;
      for (size_t k = 0; k < nt; ++k) {
        Int tot = base[k] + Int(z) * gens[0][k];
        if (tot % logs[k].order() != 0) ok = false;
      }
      if (ok) {
        u.c = c;
        found = true;
      }
    }
    if (!found) throw std::logic_error("sunit_lattice: no constant makes the unit congruent to 1");
    L.basis.push_back(u);
  }
  size_t expect = S.size() - 1;
  if (L.basis.size() != expect) throw std::logic_error("sunit_lattice: rank mismatch");
  recompute_valuations(L);
  return L;
}

// A supplied lattice: units re-verified to be S-units congruent to 1 on T.
inline UnitLattice supplied_lattice(const std::vector<Place>& S, const std::vector<Place>& T, int q,
                                    const std::vector<SUnit>& basis) {
  UnitLattice auto_l = sunit_lattice(S, T, q);
  UnitLattice L = auto_l;
  L.basis = basis;
  for (auto& u : L.basis) {
    if (u.exps.size() != L.sfin.size()) throw std::invalid_argument("supplied unit: exponent vector length");
    RatFunc x = L.to_ratfunc(u);
    if (!std::any_of(S.begin(), S.end(), [](const Place& v) { return v.is_inf(); }) && ord_at(x, Place::infinity(q)) != 0)
      throw std::invalid_argument("supplied unit " + L.str(u) + " is not a unit at inf");
    for (const Place& v : T) {
      ResidueLog lg(v);
      if (lg.log(x) != 0) throw std::invalid_argument("supplied unit " + L.str(u) + " is not 1 mod " + v.str());
    }
  }
  recompute_valuations(L);
  // Same lattice: the exponent matrices must have equal Hermite forms.
  auto exps = [](const UnitLattice& M) {
    IntMat E;
    for (auto& u : M.basis) E.push_back(u.exps);
    return hermite_rows(E);
  };
  if (L.rank() != auto_l.rank() || exps(L) != exps(auto_l))
    throw std::invalid_argument("supplied units do not form a basis of U");
  return L;
}

// Classical regulator in degree form: det(-deg_{w_i}(u_j)) over the given
// places (log|u|_w = -deg_w(u) log q, so this is the regulator up to (log q)^r).
inline Int classical_regulator_det(const UnitLattice& L, const std::vector<Place>& places) {
  int r = L.rank();
  if (static_cast<int>(places.size()) != r) throw std::invalid_argument("regulator: need r places");
  IntMat A(r, std::vector<Int>(r));
  for (int i = 0; i < r; ++i) {
    int pi = L.place_index(places[i]);
    for (int j = 0; j < r; ++j) A[i][j] = -L.deg_at(j, pi);
  }
  return det_bareiss(A);
}

// Invert the last basis unit if needed so the classical regulator over
// `places` is positive.
inline void orient(UnitLattice& L, const std::vector<Place>& places) {
  if (L.rank() == 0) return;
  Int d = classical_regulator_det(L, places);
  if (d == 0) throw std::invalid_argument("orient: regulator vanishes for the chosen places");
  if (d < 0) {
    auto& u = L.basis.back();
    for (auto& e : u.exps) e = -e;
    u.c = static_cast<int>(invmod(u.c, L.q));
    recompute_valuations(L);
  }
}

// ---------------------------------------------------------------------------
// Place modules over K/k with group Gamma. A place w of K over v is a coset
// gamma + D_v; w_v denotes the place of the zero coset.

struct PlaceModule {
  GroupPtr gamma;
  std::vector<Place> S;
  std::vector<Subgroup> decomp;  // D_v in Gamma, per place of S
  struct W {
    int v;
    int64_t rep;  // minimal coset representative
  };
  std::vector<W> places;  // S(K), grouped by v then by representative

  int64_t index_of(int v, int64_t gamma_elem) const {
    const FinAbGroup& G = *gamma;
    int64_t rep = gamma_elem;
    for (int64_t d : decomp[v].elems) rep = std::min(rep, G.add(gamma_elem, d));
    for (size_t i = 0; i < places.size(); ++i)
      if (places[i].v == v && places[i].rep == rep) return static_cast<int64_t>(i);
    throw std::logic_error("PlaceModule: place not found");
  }
  // gamma . w
  int64_t act(int64_t gamma_elem, int64_t w) const {
    return index_of(places[w].v, gamma->add(gamma_elem, places[w].rep));
  }
  size_t rank_Y() const { return places.size(); }
  // w^*(w') = sum_{gamma w = w'} gamma, as coefficient vectors over Gamma.
  std::vector<std::vector<Int>> dual_star(int64_t w) const {
    std::vector<std::vector<Int>> out(places.size(), std::vector<Int>(gamma->order(), 0));
    for (int64_t g = 0; g < gamma->order(); ++g) out[act(g, w)][g] += 1;
    return out;
  }
};

inline PlaceModule place_module(GroupPtr gamma, const std::vector<Place>& S, const std::vector<Subgroup>& decomp) {
  if (decomp.size() != S.size()) throw std::invalid_argument("place_module: decomposition data missing");
  PlaceModule pm{gamma, S, decomp, {}};
  for (size_t v = 0; v < S.size(); ++v) {
    std::vector<char> seen(gamma->order(), 0);
    for (int64_t g = 0; g < gamma->order(); ++g) {
      if (seen[g]) continue;
      for (int64_t d : decomp[v].elems) seen[gamma->add(g, d)] = 1;
      pm.places.push_back({static_cast<int>(v), g});
    }
  }
  return pm;
}

// r_chi = sum_{v in S} [chi trivial on D_v] - [chi trivial].
inline int r_chi(const PlaceModule& pm, const Character& chi) {
  int r = 0;
  for (auto& D : pm.decomp) {
    bool triv = true;
    for (int64_t d : D.elems)
      if (char_exponent(*pm.gamma, chi, d) != 0) triv = false;
    r += triv;
  }
  return r - (char_is_trivial(chi) ? 1 : 0);
}

// Oracle: dim of the chi-eigenspace of C (x) X(K) from the character of the
// permutation module, (1/|Gamma|) sum_gamma chi(gamma)^{-1} (fix(gamma) - 1).
inline int r_chi_trace(const PlaceModule& pm, const Character& chi) {
  const FinAbGroup& G = *pm.gamma;
  int N = static_cast<int>(G.exponent());
  CycInt acc(N, 0);
  for (int64_t g = 0; g < G.order(); ++g) {
    int64_t fix = 0;
    for (size_t w = 0; w < pm.places.size(); ++w)
      if (pm.act(g, static_cast<int64_t>(w)) == static_cast<int64_t>(w)) ++fix;
    acc += CycInt::root(N, -char_exponent(G, chi, g)).scaled(Int(static_cast<long>(fix - 1)));
  }
  Int n = G.order();
  if (!acc.divisible_by(n)) throw std::logic_error("r_chi_trace: non-integral multiplicity");
  CycInt m = acc.div_exact(n);
  for (size_t i = 1; i < m.coeffs().size(); ++i)
    if (m.coeffs()[i] != 0) throw std::logic_error("r_chi_trace: non-rational multiplicity");
  return static_cast<int>(m.coeffs()[0].get_si());
}

// ---------------------------------------------------------------------------
// Wedge elements over a unit basis with Z_(p) coefficients.

struct WedgeElem {
  int n = 0;
  std::map<std::vector<int>, Rat> terms;  // sorted strictly increasing indices

  static WedgeElem monomial(std::vector<int> idx, Rat c = 1) {
    WedgeElem w;
    w.n = static_cast<int>(idx.size());
    // sort with sign
    int sign = 1;
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j + 1 < idx.size() - i; ++j)
        if (idx[j] > idx[j + 1]) {
          std::swap(idx[j], idx[j + 1]);
          sign = -sign;
        }
    for (size_t i = 0; i + 1 < idx.size(); ++i)
      if (idx[i] == idx[i + 1]) return w;
    if (c != 0) w.terms[idx] = sign > 0 ? c : Rat(-c);
    return w;
  }
  WedgeElem& operator+=(const WedgeElem& o) {
    if (!terms.empty() && !o.terms.empty() && n != o.n) throw std::invalid_argument("WedgeElem: degree mismatch");
    if (terms.empty()) n = o.n;
    for (auto& [k, c] : o.terms) {
      Rat& t = terms[k];
      t += c;
      if (t == 0) terms.erase(k);
    }
    return *this;
  }
  WedgeElem scaled(const Rat& s) const {
    WedgeElem r;
    r.n = n;
    if (s == 0) return r;
    for (auto& [k, c] : terms) r.terms[k] = c * s;
    return r;
  }
  bool is_zero() const { return terms.empty(); }
  bool p_integral(int64_t p) const {
    for (auto& [k, c] : terms)
      if (vp(Int(c.get_den()), p) > 0) return false;
    return true;
  }
  std::string str() const {
    std::string s;
    for (auto& [k, c] : terms) {
      if (!s.empty()) s += " + ";
      s += c.get_str() + "*u";
      for (size_t i = 0; i < k.size(); ++i) s += (i ? "^u" : "") + std::to_string(k[i] + 1);
    }
    return s.empty() ? "0" : s;
  }
};

// Determinant by Leibniz expansion over any commutative ring with +, -, *.
template <class T>
T leibniz_det(const std::vector<std::vector<T>>& A, const T& zero, const T& one) {
  size_t n = A.size();
  if (n == 0) return one;
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T total = zero;
  do {
    int inv = 0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    T term = one;
    for (size_t i = 0; i < n; ++i) term = term * A[i][perm[i]];
    if (inv % 2) total = total - term;
    else total = total + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// iota(psi_1 ^ ... ^ psi_n)(m) = sum_terms c * det(psi_i(u_{j_k})), where
// vals[i][j] = psi_i(u_j). Coefficients are applied through `scale`.
template <class T, class Scale>
T iota_eval(const std::vector<std::vector<T>>& vals, const WedgeElem& m, const T& zero, const T& one, Scale scale) {
  if (m.is_zero()) return zero;
  if (static_cast<int>(vals.size()) != m.n) throw std::invalid_argument("iota_eval: shape mismatch");
  T total = zero;
  for (auto& [idx, c] : m.terms) {
    std::vector<std::vector<T>> A(m.n, std::vector<T>(m.n, zero));
    for (int i = 0; i < m.n; ++i)
      for (int k = 0; k < m.n; ++k) {
        if (idx[k] >= static_cast<int>(vals[i].size())) throw std::invalid_argument("iota_eval: unit index out of range");
        A[i][k] = vals[i][idx[k]];
      }
    total = total + scale(leibniz_det(A, zero, one), c);
  }
  return total;
}

// Projection to Lambda^n_{S,T} for Gamma-invariant wedges (built from units
// of k): only the trivial eigencomponent is present, killed iff r_1 > n.
inline WedgeElem lambda_st_project(const WedgeElem& eps, const PlaceModule& pm) {
  Character triv{std::vector<int64_t>(pm.gamma->rank(), 0)};
  if (r_chi(pm, triv) > eps.n) return WedgeElem{eps.n, {}};
  return eps;
}

}  // namespace ffstark
