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

// Regulators over admissible layers: the classical degree regulator, the
// refined regulator in relative augmentation quotients, the determinant of
// local symbols, the unit pairing and its discriminants, leading forms with
// cyclotomic coefficients, and the mixed functional / local-symbol matrix.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffstark/augfilt.hpp"
#include "ffstark/classfield.hpp"
#include "ffstark/units.hpp"

namespace ffstark {

// Image of a p-integral rational in Z/p^M.
inline int64_t rat_mod(const Rat& c, const ModRing& R) {
  Int den = c.get_den();
  if (vp(den, R.p) > 0) throw std::domain_error("coefficient " + c.get_str() + " is not p-integral");
  return mulmod(R.from_int(c.get_num()), invmod(reduce_mod(den, R.mod), R.mod), R.mod);
}

inline ModElem reduce_rat(const QElem& x, const ModRing& R) {
  return map_coeffs(x, R, [&](const Rat& a) { return rat_mod(a, R); });
}

// ---------------------------------------------------------------------------
// Layers: an extension L/k with group G and an admissible kernel H, so that
// Gamma = G/H is the group of K/k.

struct Layer {
  ExtPtr ext;
  Subgroup H;
  RelativeFiltration rel;
  std::vector<int64_t> h_index;  // G element -> index in the embedded H, -1 outside
  int64_t p = 2;
  int M = 1;
  int D = 1;
  std::optional<int64_t> sigma;  // Frobenius of the constant layer when H is that layer
  GroupPtr GH;                   // Gamma x H, index gamma + |Gamma| h

  const GroupPtr& G() const { return ext->G; }
  const GroupPtr& gamma() const { return rel.gamma().Q; }
  const Quotient& gamma_quotient() const { return rel.gamma(); }
  const GroupPtr& Hgrp() const { return rel.embedded().H; }
  int64_t gamma_order() const { return gamma()->order(); }
  ModRing ring() const { return ModRing(p, M); }
};

inline Layer make_layer(ExtPtr ext, const Subgroup& H, int64_t p, int M, int D) {
  Layer L;
  L.ext = ext;
  L.H = H;
  L.p = p;
  L.M = M;
  L.D = D;
  L.rel = RelativeFiltration(ext->G, H, p, M, D);
  L.h_index.assign(ext->G->order(), -1);
  const auto& emb = L.rel.embedded();
  for (int64_t h = 0; h < emb.H->order(); ++h) L.h_index[emb.incl.map[h]] = h;
  L.GH = direct_product(*L.gamma(), *emb.H);
  return L;
}

// Image of the decomposition group D_v(L/k) in Gamma.
inline Subgroup gamma_decomposition(const Layer& L, const Place& v) {
  Subgroup D = decomposition_group(*L.ext, v);
  std::vector<int64_t> gens;
  for (int64_t g : D.gens) gens.push_back(L.gamma_quotient().proj.map[g]);
  return generate_subgroup(*L.gamma(), gens);
}

// n_v = [K_w : k_v].
inline int64_t local_degree(const Layer& L, const Place& v) { return gamma_decomposition(L, v).order(); }

inline bool splits_completely(const Layer& L, const Place& v) { return local_degree(L, v) == 1; }

inline PlaceModule layer_place_module(const Layer& L, const std::vector<Place>& S) {
  std::vector<Subgroup> dec;
  for (const Place& v : S) dec.push_back(gamma_decomposition(L, v));
  return place_module(L.gamma(), S, dec);
}

// lambda_{w,H}(u) for u in k and w | v: rec_{K_w}(u) = n_v rec_v(u), as an
// index in the embedded H.
inline int64_t lambda_H(const Layer& L, const RatFunc& u, const Place& v, int64_t nv) {
  int64_t g = L.G()->pow(artin_local(*L.ext, u, v), nv);
  int64_t h = L.h_index[g];
  if (h < 0) throw std::logic_error("lambda_H: local symbol at " + v.str() + " is outside H");
  return h;
}

inline int64_t lambda_H(const Layer& L, const RatFunc& u, const Place& v) {
  return lambda_H(L, u, v, local_degree(L, v));
}

// The isomorphism R[Gamma] (x) gr I(H) -> gr I_H on representatives:
// gamma (x) x -> section(gamma) x.
inline ModElem pounds(const Layer& L, const ModElem& x) {
  if (!(*x.group() == *L.GH)) throw std::invalid_argument("pounds: element is not over Gamma x H");
  int64_t ng = L.gamma_order();
  ModElem out(L.G(), x.ring());
  for (int64_t i = 0; i < x.group()->order(); ++i) {
    if (!x[i]) continue;
    int64_t g = L.G()->add(L.gamma_quotient().section[i % ng], L.rel.embedded().incl.map[i / ng]);
    out[g] = x.ring().add(out[g], x[i]);
  }
  return out;
}

// R^|>_{w*,H}(u) = sum_gamma gamma (x) (lambda_{gamma w,H}(u) - 1); for u in k
// every lambda_{gamma w,H}(u) equals lambda_{w,H}(u).
inline ModElem refined_row_entry(const Layer& L, const RatFunc& u, const Place& v, int64_t nv) {
  ModRing R = L.ring();
  int64_t h = lambda_H(L, u, v, nv);
  int64_t ng = L.gamma_order();
  ModElem e(L.GH, R);
  if (h == 0) return e;
  for (int64_t gam = 0; gam < ng; ++gam) {
    e[gam + ng * h] = R.add(e[gam + ng * h], R.one());
    e[gam] = R.sub(e[gam], R.one());
  }
  return e;
}

struct RefinedValue {
  ModElem graded;  // in R[Gamma x H]
  ModElem value;   // representative in R[G]
  AugClass cls;
};

// Refined regulator of eps (a wedge over the basis of U(k)) for the functionals
// w_1^*, ..., w_n^*, w_i the place over w[i] with trivial coset.
inline RefinedValue refined_regulator(const Layer& L, const UnitLattice& U, const std::vector<Place>& w,
                                      const WedgeElem& eps) {
  if (!eps.p_integral(L.p)) throw std::domain_error("refined_regulator: epsilon is not p-integral");
  int n = static_cast<int>(w.size());
  if (!eps.is_zero() && eps.n != n) throw std::invalid_argument("refined_regulator: wedge degree mismatch");
  if (n > L.D) throw std::domain_error("refined_regulator: degree beyond filtration depth");
  ModRing R = L.ring();
  std::vector<std::vector<ModElem>> vals(n);
  for (int i = 0; i < n; ++i) {
    int64_t nv = local_degree(L, w[i]);
    for (int j = 0; j < U.rank(); ++j) vals[i].push_back(refined_row_entry(L, U.unit(j), w[i], nv));
  }
  ModElem zero(L.GH, R), one = ModElem::one(L.GH, R);
  RefinedValue out;
  out.graded = iota_eval(vals, eps, zero, one, [&](const ModElem& d, const Rat& c) { return d.scaled(rat_mod(c, R)); });
  out.value = pounds(L, out.graded);
  out.cls = L.rel.residue_class(out.value);
  return out;
}

// Classical regulator R_Psi(eps) in Q[Gamma] for Psi = w_1^* ^ ... ^ w_n^*:
// w^*(lambda(u)) = n_v deg_v(u) N_Gamma for u in k.
inline QElem classical_regulator(const Layer& L, const UnitLattice& U, const std::vector<Place>& w,
                                 const WedgeElem& eps) {
  int n = static_cast<int>(w.size());
  if (!eps.is_zero() && eps.n != n) throw std::invalid_argument("classical_regulator: wedge degree mismatch");
  RatRing Q;
  const GroupPtr& Gam = L.gamma();
  std::vector<std::vector<QElem>> vals(n);
  for (int i = 0; i < n; ++i) {
    int64_t nv = local_degree(L, w[i]);
    int idx = U.place_index(w[i]);
    for (int j = 0; j < U.rank(); ++j) {
      QElem e(Gam, Q);
      for (int64_t g = 0; g < Gam->order(); ++g) e[g] = Rat(U.deg_at(j, idx) * Int(static_cast<long>(nv)));
      vals[i].push_back(e);
    }
  }
  return iota_eval(vals, eps, QElem(Gam, Q), QElem::one(Gam, Q), [](const QElem& d, const Rat& c) { return d.scaled(c); });
}

// Val_{sigma,n} on a numerical layer whose H is generated by sigma.
inline ModElem val_numerical(const Layer& L, const ModElem& xi, int n) {
  if (!L.sigma) throw std::invalid_argument("val_numerical: layer has no constant Frobenius");
  int64_t s = L.h_index[*L.sigma];
  if (s < 0) throw std::invalid_argument("val_numerical: Frobenius is not in H");
  return L.rel.val_map(xi, n, s);
}

// Solutions c in (Z/p^M)^r of [theta]_{(1,H)} = sum_j c_j R_{w*,H}(u_j).
inline std::vector<std::vector<int64_t>> solve_stark_degree_one(const Layer& L, const UnitLattice& U, const Place& w,
                                                                const ModElem& theta) {
  int r = U.rank();
  ModRing R = L.ring();
  std::vector<ModElem> rows;
  for (int j = 0; j < r; ++j) {
    WedgeElem e = WedgeElem::monomial({j});
    rows.push_back(refined_regulator(L, U, {w}, e).value);
  }
  int64_t total = 1;
  for (int j = 0; j < r; ++j) {
    total *= R.mod;
    if (total > 2000000) throw std::domain_error("solve_stark_degree_one: search space too large");
  }
  std::vector<std::vector<int64_t>> sols;
  for (int64_t code = 0; code < total; ++code) {
    std::vector<int64_t> c(r);
    int64_t x = code;
    ModElem acc = theta;
    for (int j = 0; j < r; ++j) {
      c[j] = x % R.mod;
      x /= R.mod;
      acc -= rows[j].scaled(c[j]);
    }
    if (L.rel.contains(acc, 2)) sols.push_back(c);
  }
  return sols;
}

// ---------------------------------------------------------------------------
// Determinant of local symbols (K' = k, H' = G) and the congruence with theta.

inline ModElem gross_det(const ExtensionData& ext, const ModRing& R, const std::vector<RatFunc>& units,
                         const std::vector<Place>& places) {
  size_t r = units.size();
  if (places.size() != r) throw std::invalid_argument("gross_det: need one place per unit");
  std::vector<std::vector<ModElem>> A(r);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) A[i].push_back(ModElem::minus_one(ext.G, R, artin_local(ext, units[j], places[i])));
  return leibniz_det(A, ModElem(ext.G, R), ModElem::one(ext.G, R));
}

inline ModElem gross_det(const ExtensionData& ext, const ModRing& R, const UnitLattice& U,
                         const std::vector<Place>& places) {
  return gross_det(ext, R, U.units(), places);
}

struct GrossData {
  int r = 0;
  Int h = 1;
  ModElem theta, det;
  int theta_degree = 0, det_degree = 0, maxdeg = 0;
  bool congruent = false;
  bool congruent_if_negated = false;
};

inline GrossData gross_check(const ExtensionData& ext, const ZElem& theta, const UnitLattice& U,
                             const std::vector<Place>& places, int64_t p, int M) {
  GrossData d;
  ModRing R(p, M);
  d.r = U.rank();
  d.h = U.h;
  d.maxdeg = d.r + 1;
  AugPowerTest test(ext.G, p, M, d.maxdeg);
  d.theta = reduce(theta, R);
  d.det = gross_det(ext, R, U, places);
  d.theta_degree = test.degree(d.theta);
  d.det_degree = test.degree(d.det);
  ModElem hd = d.det.scaled(R.from_int(U.h));
  d.congruent = test.contains(d.theta - hd, d.r + 1);
  d.congruent_if_negated = test.contains(d.theta + hd, d.r + 1);
  return d;
}

// ---------------------------------------------------------------------------
// The pairing <u, phi> = sum_v phi(v) (rec_v(u) - 1) in I(G)/I(G)^2 at K' = k,
// with phi a functional on Y(k) given by its values on S.

inline ModElem pairing_value(const ExtensionData& ext, const ModRing& R, const RatFunc& u, const std::vector<Place>& S,
                             const std::vector<Int>& phi) {
  if (phi.size() != S.size()) throw std::invalid_argument("pairing: functional length");
  ModElem s(ext.G, R);
  for (size_t i = 0; i < S.size(); ++i) {
    if (phi[i] == 0) continue;
    s += ModElem::minus_one(ext.G, R, artin_local(ext, u, S[i])).scaled(R.from_int(phi[i]));
  }
  return s;
}

// Functionals phi_i with phi_i(a_1 w_1 + ... ) = a_i for the listed places.
inline std::vector<std::vector<Int>> coordinate_functionals(const std::vector<Place>& S, const std::vector<Place>& places) {
  std::vector<std::vector<Int>> out;
  for (const Place& w : places) {
    std::vector<Int> f(S.size(), 0);
    auto it = std::find(S.begin(), S.end(), w);
    if (it == S.end()) throw std::invalid_argument("coordinate_functionals: place not in S");
    f[it - S.begin()] = 1;
    out.push_back(f);
  }
  return out;
}

// det(<a_i, b_j>) for units a_i and functionals b_j.
inline ModElem discriminant(const ExtensionData& ext, const ModRing& R, const std::vector<RatFunc>& units,
                            const std::vector<Place>& S, const std::vector<std::vector<Int>>& funcs) {
  size_t r = units.size();
  if (funcs.size() != r) throw std::invalid_argument("discriminant: bases of different size");
  std::vector<std::vector<ModElem>> A(r);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) A[i].push_back(pairing_value(ext, R, units[i], S, funcs[j]));
  return leibniz_det(A, ModElem(ext.G, R), ModElem::one(ext.G, R));
}

// Units prod_k u_k^{P[i][k]}.
inline std::vector<RatFunc> transform_units(const std::vector<RatFunc>& units, const IntMat& P) {
  std::vector<RatFunc> out;
  for (auto& row : P) {
    RatFunc x = RatFunc::constant(units.at(0).q(), 1);
    for (size_t k = 0; k < row.size(); ++k)
      if (row[k] != 0) x = x * units[k].pow(row[k].get_si());
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homogeneous polynomials with coefficients in O/p^prec, O = Z[zeta_N].

struct CycHomPoly {
  int d = 0, n = 0, N = 1;
  int64_t p = 2;
  int prec = 0;
  std::vector<std::vector<int>> mons;
  std::vector<CycInt> coeff;

  bool is_zero() const {
    for (auto& c : coeff)
      if (!c.is_zero()) return false;
    return true;
  }
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < mons.size(); ++i) {
      if (coeff[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + coeff[i].str() + ")";
      for (int j = 0; j < d; ++j)
        if (mons[i][j]) s += "*s" + std::to_string(j + 1) + (mons[i][j] > 1 ? "^" + std::to_string(mons[i][j]) : "");
    }
    return s.empty() ? "0" : s;
  }
};

inline CycInt reduce_cyc(const CycInt& c, int64_t p, int prec) { return CycModRing(c.level(), p, prec).norm(c); }

inline CycHomPoly constant_poly(int d, int N, int64_t p, int prec, const CycInt& c) {
  CycHomPoly f;
  f.d = d;
  f.N = N;
  f.p = p;
  f.prec = prec;
  f.mons = monomials_of_degree(d, 0);
  f.coeff = {reduce_cyc(c, p, prec)};
  return f;
}

inline CycHomPoly to_cyc_poly(const HomPoly& f, int N) {
  CycHomPoly g;
  g.d = f.d;
  g.n = f.n;
  g.N = N;
  g.p = f.p;
  g.prec = f.prec;
  g.mons = f.mons;
  for (int64_t c : f.coeff) g.coeff.push_back(CycInt(N, Int(static_cast<long>(c))));
  return g;
}

inline CycHomPoly with_prec(CycHomPoly f, int prec) {
  if (prec > f.prec) throw std::invalid_argument("with_prec: cannot raise precision");
  f.prec = prec;
  for (auto& c : f.coeff) c = reduce_cyc(c, f.p, prec);
  return f;
}

inline CycHomPoly scaled(const CycHomPoly& f, const CycInt& s) {
  CycHomPoly g = f;
  for (auto& c : g.coeff) c = reduce_cyc(c * s, f.p, f.prec);
  return g;
}

inline CycHomPoly operator*(const CycHomPoly& a, const CycHomPoly& b) {
  if (a.d != b.d || a.N != b.N || a.p != b.p) throw std::invalid_argument("CycHomPoly: incompatible factors");
  CycHomPoly r;
  r.d = a.d;
  r.n = a.n + b.n;
  r.N = a.N;
  r.p = a.p;
  r.prec = std::min(a.prec, b.prec);
  r.mons = monomials_of_degree(r.d, r.n);
  std::map<std::vector<int>, size_t> idx;
  for (size_t i = 0; i < r.mons.size(); ++i) idx[r.mons[i]] = i;
  r.coeff.assign(r.mons.size(), CycInt(r.N, 0));
  for (size_t i = 0; i < a.mons.size(); ++i) {
    if (a.coeff[i].is_zero()) continue;
    for (size_t j = 0; j < b.mons.size(); ++j) {
      if (b.coeff[j].is_zero()) continue;
      std::vector<int> m(r.d);
      for (int k = 0; k < r.d; ++k) m[k] = a.mons[i][k] + b.mons[j][k];
      CycInt& c = r.coeff[idx.at(m)];
      c = c + a.coeff[i] * b.coeff[j];
    }
  }
  for (auto& c : r.coeff) c = reduce_cyc(c, r.p, r.prec);
  return r;
}

// p-adic valuation of an element of O/p^prec (prec when zero).
inline int cyc_val(const CycInt& c, int64_t p, int prec) {
  int v = prec;
  CycInt r = reduce_cyc(c, p, prec);
  for (const Int& x : r.coeffs())
    if (x != 0) v = std::min(v, vp(x, p));
  return v;
}

inline bool equal_at(const CycHomPoly& a, const CycHomPoly& b, int prec) {
  if (a.d != b.d || a.n != b.n) return false;
  for (size_t i = 0; i < a.mons.size(); ++i)
    if (reduce_cyc(a.coeff[i] - b.coeff[i], a.p, prec) != CycInt(a.N, 0)) return false;
  return true;
}

// a and b proportional: with the pivot the first monomial where b has minimal
// valuation, a[m] b[pivot] = a[pivot] b[m] for all m, modulo p^prec.
struct ProjectiveCompare {
  bool proportional = false;
  bool a_zero = false, b_zero = false;
  int prec = 0;
  size_t pivot = 0;
  int pivot_val = 0;
};

inline ProjectiveCompare projective_compare(const CycHomPoly& a, const CycHomPoly& b) {
  ProjectiveCompare pc;
  pc.prec = std::min(a.prec, b.prec);
  if (a.d != b.d || a.n != b.n || a.N != b.N) return pc;
  CycHomPoly x = with_prec(a, pc.prec), y = with_prec(b, pc.prec);
  pc.a_zero = x.is_zero();
  pc.b_zero = y.is_zero();
  if (pc.a_zero || pc.b_zero) return pc;
  pc.pivot_val = pc.prec;
  for (size_t i = 0; i < y.mons.size(); ++i) {
    int v = cyc_val(y.coeff[i], y.p, pc.prec);
    if (v < pc.pivot_val) {
      pc.pivot_val = v;
      pc.pivot = i;
    }
  }
  pc.proportional = true;
  for (size_t i = 0; i < y.mons.size(); ++i) {
    CycInt lhs = x.coeff[i] * y.coeff[pc.pivot], rhs = x.coeff[pc.pivot] * y.coeff[i];
    if (reduce_cyc(lhs - rhs, y.p, pc.prec) != CycInt(y.N, 0)) pc.proportional = false;
  }
  return pc;
}

// Coordinates of an element of (O/p^M)[H] in the power basis, as elements of Z/p^M[H].
inline std::vector<ModElem> cyc_components(const CycModElem& x) {
  const CycModRing& CR = x.ring();
  ModRing R(CR.p, CR.M);
  int k = euler_phi(CR.N);
  std::vector<ModElem> out(k, ModElem(x.group(), R));
  for (int64_t g = 0; g < x.group()->order(); ++g) {
    const auto& c = x[g].coeffs();
    for (int i = 0; i < k; ++i) out[i][g] = R.from_int(c[i]);
  }
  return out;
}

inline int cyc_degree(const AugPowerTest& t, const CycModElem& x) {
  int n = t.maxdeg() + 1;
  for (auto& c : cyc_components(x)) n = std::min(n, t.degree(c));
  return n;
}

// d_E of the degree-n class of x, coefficients reduced mod p^prec.
inline CycHomPoly cyc_leading_form(const AugPowerTest& t, const CycModElem& x, int n, int prec) {
  const CycModRing& CR = x.ring();
  auto comps = cyc_components(x);
  CycHomPoly f;
  f.d = t.group()->rank();
  f.n = n;
  f.N = CR.N;
  f.p = CR.p;
  f.prec = prec;
  f.mons = monomials_of_degree(f.d, n);
  std::vector<std::vector<Int>> co(f.mons.size(), std::vector<Int>(comps.size(), 0));
  for (size_t k = 0; k < comps.size(); ++k) {
    auto lf = t.leading_form(comps[k], n);
    for (size_t m = 0; m < lf.size(); ++m) co[m][k] = Int(static_cast<long>(lf[m]));
  }
  for (size_t m = 0; m < f.mons.size(); ++m) f.coeff.push_back(reduce_cyc(CycInt::from_poly(CR.N, co[m]), f.p, prec));
  return f;
}

inline HomPoly leading_form_poly(const AugPowerTest& t, const ModElem& x, int n, int prec) {
  HomPoly f;
  f.d = t.group()->rank();
  f.n = n;
  f.p = t.ring().p;
  f.prec = prec;
  f.mons = monomials_of_degree(f.d, n);
  int64_t m = ipow(f.p, prec);
  for (int64_t c : t.leading_form(x, n)) f.coeff.push_back(c % m);
  return f;
}

// Ver: g -> |Gamma| g, landing in the embedded H.
template <class R>
GroupRingElem<R> ver_to_H(const Layer& L, const GroupRingElem<R>& x) {
  return restrict_to(transfer_ver(x, L.H, L.gamma_order()), L.rel.embedded());
}

// det(a_{v_i} rec_{v_i}(u_j) - 1) over R[H], with multipliers a_v (the local
// degrees for the pairing at K, |Gamma| for Gamma-invariant functionals).
inline ModElem scaled_symbol_det(const Layer& L, const std::vector<RatFunc>& units, const std::vector<Place>& places,
                                 const std::vector<int64_t>& mult) {
  ModRing R = L.ring();
  size_t r = units.size();
  const GroupPtr& H = L.Hgrp();
  std::vector<std::vector<ModElem>> A(r);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) A[i].push_back(ModElem::minus_one(H, R, lambda_H(L, units[j], places[i], mult[i])));
  return leibniz_det(A, ModElem(H, R), ModElem::one(H, R));
}

// ---------------------------------------------------------------------------
// Leading-form polynomials f and xi on a layer with H of rank d.

struct CharacterForms {
  std::vector<int64_t> chi;  // exponent vector
  int r_chi = 0;
  int n_chi = 0;
  bool n_capped = false;  // Ver(theta_chi) lies in I^{D+1}
  std::optional<CycHomPoly> xi;
  std::optional<CycHomPoly> f;
  std::string f_status;
  std::string xi_status;
};

struct FactorizationData {
  int d = 0, rK = 0, rk = 0, N = 1;
  std::vector<CharacterForms> chars;
  std::optional<HomPoly> xi_H, f_H, xi_G, f_G;
  std::optional<CycHomPoly> xi_prod, f_prod;
  std::string xi_H_status, f_H_status, f_G_status;
  bool degree_sum_ok = false;
  bool xi_product_holds = false;
  int xi_product_prec = 0;
  ProjectiveCompare f_factorization;
  ProjectiveCompare xi_vs_f;
  bool xi_G_equals_h_f_G = false;
  int xi_G_prec = 0;
};

inline FactorizationData factorization_probe(const Layer& L, const std::vector<Place>& S, const UnitLattice& U,
                                             const std::vector<Place>& places, const ZElem& theta_G,
                                             const ZElem& theta_H) {
  FactorizationData out;
  ModRing R = L.ring();
  const AugPowerTest& test = L.rel.filtration().test();
  const AugFiltration& filt = L.rel.filtration();
  out.d = L.Hgrp()->rank();
  out.rk = U.rank();
  PlaceModule pm = layer_place_module(L, S);
  out.rK = static_cast<int>(pm.rank_Y()) - 1;
  out.N = static_cast<int>(L.gamma()->exponent());
  auto prec_of = [&](int n) -> std::optional<int> {
    try {
      return filt.certified_precision(n);
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  };

  // xi_chi from Ver(theta_chi).
  ModElem thG = reduce(theta_G, R);
  int nsum = 0;
  bool all_xi = true;
  for (const Character& chi : characters(*L.gamma())) {
    CharacterForms cf;
    cf.chi = chi.b;
    cf.r_chi = r_chi(pm, chi);
    CycModElem V = ver_to_H(L, chi_twist(thG, L.gamma_quotient(), chi));
    cf.n_chi = cyc_degree(test, V);
    cf.n_capped = cf.n_chi == test.maxdeg() + 1;
    nsum += cf.n_chi;
    if (cf.n_capped) {
      cf.xi_status = "vanishes to the filtration depth";
      all_xi = false;
    } else if (auto pr = prec_of(cf.n_chi)) {
      cf.xi = cyc_leading_form(test, V, cf.n_chi, *pr);
      cf.xi_status = "computed";
    } else {
      cf.xi_status = "precision exhausted";
      all_xi = false;
    }
    // f_chi: empty determinant when r_chi = 0; Gamma-invariant functionals
    // paired with units of k for the trivial character.
    if (cf.r_chi == 0) {
      cf.f = constant_poly(out.d, out.N, L.p, L.M, CycInt(out.N, 1));
      cf.f_status = "empty determinant";
    } else if (char_is_trivial(chi)) {
      if (cf.r_chi != out.rk) throw std::logic_error("factorization_probe: trivial eigenspace rank mismatch");
      // Ver(det_G): symbols at k scaled by |Gamma|.
      std::vector<int64_t> mult(places.size(), L.gamma_order());
      ModElem V1 = scaled_symbol_det(L, U.units(), places, mult);
      if (auto pr = prec_of(cf.r_chi); pr && test.contains(V1, cf.r_chi)) {
        cf.f = to_cyc_poly(leading_form_poly(test, V1, cf.r_chi, *pr), out.N);
        cf.f_status = "computed from units of k";
      } else {
        cf.f_status = "precision exhausted";
      }
    } else {
      cf.f_status = "out of scope: needs units of K in a nontrivial eigenspace";
    }
    out.chars.push_back(cf);
  }
  out.degree_sum_ok = nsum == out.rK;

  // xi_H from Ver(theta_H) in degree r_K.
  ModElem VH = ver_to_H(L, reduce(theta_H, R));
  auto prK = prec_of(out.rK);
  if (prK && out.rK <= test.maxdeg() && test.contains(VH, out.rK)) {
    out.xi_H = leading_form_poly(test, VH, out.rK, *prK);
    out.xi_H_status = "computed";
  } else {
    out.xi_H_status = prK ? "not in I^{r_K}" : "precision exhausted";
  }

  if (all_xi && out.xi_H) {
    CycHomPoly prod = constant_poly(out.d, out.N, L.p, L.M, CycInt(out.N, 1));
    for (auto& cf : out.chars) prod = prod * *cf.xi;
    out.xi_prod = prod;
    if (out.degree_sum_ok) {
      out.xi_product_prec = std::min(prod.prec, out.xi_H->prec);
      out.xi_product_holds = equal_at(prod, to_cyc_poly(*out.xi_H, out.N), out.xi_product_prec);
    }
  }

  // f_H: when r_K = r_k the units of k have finite index in U(K).
  if (out.rK == out.rk && prK) {
    // Ver(det_H): lambda_{w,H} = n_v rec_v, then scaled by |Gamma|.
    std::vector<int64_t> mult;
    for (const Place& v : places) mult.push_back(L.gamma_order() * local_degree(L, v));
    ModElem VfH = scaled_symbol_det(L, U.units(), places, mult);
    if (test.contains(VfH, out.rK)) {
      out.f_H = leading_form_poly(test, VfH, out.rK, *prK);
      out.f_H_status = "computed from units of k (finite index in U(K))";
    } else {
      out.f_H_status = "not in I^{r_K}";
    }
  } else {
    out.f_H_status = out.rK != out.rk ? "out of scope: r_K > r_k needs units of K" : "precision exhausted";
  }

  bool all_f = std::all_of(out.chars.begin(), out.chars.end(), [](const CharacterForms& c) { return c.f.has_value(); });
  if (all_f) {
    CycHomPoly prod = constant_poly(out.d, out.N, L.p, L.M, CycInt(out.N, 1));
    for (auto& cf : out.chars) prod = prod * *cf.f;
    out.f_prod = prod;
    if (out.f_H) out.f_factorization = projective_compare(to_cyc_poly(*out.f_H, out.N), prod);
  }
  if (out.f_H && out.xi_H) out.xi_vs_f = projective_compare(to_cyc_poly(*out.xi_H, out.N), to_cyc_poly(*out.f_H, out.N));

  // K' = k: xi_G = h_k f_G exactly at the certified precision.
  auto prk = prec_of(out.rk);
  if (prk && out.rk <= test.maxdeg()) {
    ModElem VdG = ver_to_H(L, gross_det(*L.ext, R, U, places));
    ModElem VtG = ver_to_H(L, thG);
    if (test.contains(VdG, out.rk) && test.contains(VtG, out.rk)) {
      out.f_G = leading_form_poly(test, VdG, out.rk, *prk);
      out.xi_G = leading_form_poly(test, VtG, out.rk, *prk);
      out.xi_G_prec = *prk;
      int64_t m = ipow(L.p, *prk);
      int64_t h = reduce_mod(U.h, m);
      out.xi_G_equals_h_f_G = true;
      for (size_t i = 0; i < out.f_G->coeff.size(); ++i)
        if (mulmod(h, out.f_G->coeff[i], m) != out.xi_G->coeff[i] % m) out.xi_G_equals_h_f_G = false;
      out.f_G_status = "computed";
    } else {
      out.f_G_status = "not in I^{r_k}";
    }
  } else {
    out.f_G_status = "precision exhausted";
  }
  return out;
}

// ---------------------------------------------------------------------------
// The matrix with functional rows and local-symbol rows over Z[Gamma].
// Functionals are phi_i = sum_k c_ik R_{w_k^*} with w_k over the split
// places v_1..v_n, so phi_i^{(id)}(u) = sum_k aug(c_ik) deg_{v_k}(u).

inline ZElem functional_symbol_det(const ExtensionData& gext, const UnitLattice& U, const std::vector<Place>& v, int n,
                                   const std::vector<std::vector<ZElem>>& c) {
  int r = U.rank();
  if (static_cast<int>(v.size()) != r) throw std::invalid_argument("functional_symbol_det: need r_k places");
  if (n < 0 || n > r) throw std::invalid_argument("functional_symbol_det: n out of range");
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("functional_symbol_det: coefficient matrix shape");
  const GroupPtr& Gam = gext.G;
  IntRing Z;
  std::vector<std::vector<ZElem>> A(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (i < n) {
        Int s = 0;
        for (int k = 0; k < n; ++k) s += c[i].at(k).augment() * U.deg_at(j, U.place_index(v[k]));
        A[i].push_back(ZElem::one(Gam, Z).scaled(s));
      } else {
        A[i].push_back(ZElem::minus_one(Gam, Z, artin_local(gext, U.unit(j), v[i])));
      }
    }
  return leibniz_det(A, ZElem(Gam, Z), ZElem::one(Gam, Z));
}

struct FunctionalSymbolData {
  int r = 0, n = 0;
  Int h = 1;
  ZElem detA, detc, a_n, phi_eps;
  int detA_degree = 0;
  bool detA_in_I = false;  // det(A) in I_p^{r-n}
  bool congruent = false;  // Phi(eps) - h det(A) in I_p^{r-n+1}
  bool congruent_if_negated = false;
};

// Phi(eps) = det(c) R_eta(eps) = det(c) a_n for the functionals above.
inline FunctionalSymbolData functional_symbol_check(const ExtensionData& gext, const UnitLattice& U,
                                                    const std::vector<Place>& v, int n,
                                                    const std::vector<std::vector<ZElem>>& c, const ZElem& a_n,
                                                    int64_t p, int M) {
  FunctionalSymbolData d;
  d.r = U.rank();
  d.n = n;
  d.h = U.h;
  d.a_n = a_n;
  d.detA = functional_symbol_det(gext, U, v, n, c);
  IntRing Z;
  d.detc = leibniz_det(c, ZElem(gext.G, Z), ZElem::one(gext.G, Z));
  d.phi_eps = d.detc * a_n;
  ModRing R(p, M);
  int target = d.r - n;
  AugPowerTest test(gext.G, p, M, target + 1);
  ModElem A = reduce(d.detA, R), P = reduce(d.phi_eps, R);
  ModElem hA = A.scaled(R.from_int(U.h));
  d.detA_degree = test.degree(A);
  d.detA_in_I = test.contains(A, target);
  d.congruent = test.contains(P - hA, target + 1);
  d.congruent_if_negated = test.contains(P + hA, target + 1);
  return d;
}

}  // namespace ffstark
