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

// Explicit abelian extensions of F_q(t): Carlitz cyclotomic layers, constant
// extensions, composites and quotients. Frobenius elements, and local
// reciprocity symbols through weak approximation and global reciprocity.
//
// Convention: rec_v(pi_v) = Frob_v at unramified v, and the product of all
// local symbols of a global element is trivial.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffstark/abelian.hpp"
#include "ffstark/fqpoly.hpp"

namespace ffstark {

struct ExtensionData;
using ExtPtr = std::shared_ptr<const ExtensionData>;

struct ExtensionData {
  int q = 2;
  GroupPtr G;
  std::string descriptor;
  std::vector<Place> ramified;  // sorted
  std::map<Place, int> precision;
  // Frobenius of the divisor of a monic polynomial coprime to the finite
  // ramified places.
  std::function<int64_t(const FqPoly&)> frob_poly;
  std::optional<int64_t> frob_inf;
  // Components of a composite: factor-block offsets into G's factors.
  std::vector<std::pair<std::string, std::pair<int, int>>> parts;
  // For quotients: local symbols at ramified places come from the parent.
  ExtPtr parent;
  GroupHom from_parent;

  bool is_ramified(const Place& v) const { return std::find(ramified.begin(), ramified.end(), v) != ramified.end(); }
  int local_precision(const Place& v) const { return precision.at(v); }
};

namespace detail {

inline void check_unramified_poly(const ExtensionData& e, const FqPoly& f) {
  for (const Place& v : e.ramified)
    if (!v.is_inf() && poly_gcd(f, v.poly()).deg() != 0)
      throw std::invalid_argument("Frobenius requested at a ramified place " + v.str());
}

}  // namespace detail

inline int64_t frobenius(const ExtensionData& e, const Place& v) {
  if (e.is_ramified(v)) throw std::invalid_argument("frobenius: place " + v.str() + " is ramified");
  if (v.is_inf()) return *e.frob_inf;
  return e.frob_poly(v.poly());
}

// Frobenius of the divisor of a monic polynomial (multiplicative extension).
inline int64_t frobenius_of_poly(const ExtensionData& e, const FqPoly& f) {
  detail::check_unramified_poly(e, f);
  return e.frob_poly(f);
}

// Local symbol rec_v(u). At a ramified v: alpha close to u at v and to 1 at
// the other ramified places, then rec_v(u) = -sum ord_w(alpha) Frob_w over
// the unramified w.
inline int64_t artin_local(const ExtensionData& e, const RatFunc& u, const Place& v) {
  if (u.is_zero()) throw std::invalid_argument("artin_local: zero argument");
  const FinAbGroup& G = *e.G;
  if (!e.is_ramified(v)) return G.pow(frobenius(e, v), ord_at(u, v));
  if (e.parent) return e.from_parent.map[artin_local(*e.parent, u, v)];
  std::vector<ApproxConstraint> cons;
  cons.push_back({v, u, e.local_precision(v)});
  for (const Place& w : e.ramified)
    if (w != v) cons.push_back({w, RatFunc::constant(u.q(), 1), e.local_precision(w)});
  ApproxResult a = weak_approximation(cons);
  int64_t s = G.sub(e.frob_poly(a.away_num), e.frob_poly(a.away_den));
  if (a.ord_inf) s = G.add(s, G.pow(*e.frob_inf, *a.ord_inf));
  return G.neg(s);
}

// Sum of all local symbols of u (must be the identity).
inline int64_t reciprocity_defect(const ExtensionData& e, const RatFunc& u) {
  const FinAbGroup& G = *e.G;
  int64_t s = 0;
  std::set<Place> seen;
  for (const Place& v : e.ramified) {
    s = G.add(s, artin_local(e, u, v));
    seen.insert(v);
  }
  auto add_poly = [&](const FqPoly& f, int sign) {
    for (auto& [P, k] : factor_trial(f)) {
      Place w = Place::finite(P);
      if (seen.count(w)) continue;
      s = G.add(s, G.pow(frobenius(e, w), sign * k));
    }
  };
  add_poly(u.num().monic(), 1);
  add_poly(u.den(), -1);
  Place inf = Place::infinity(e.q);
  if (!seen.count(inf)) s = G.add(s, G.pow(*e.frob_inf, ord_at(u, inf)));
  return s;
}

// Uniformizer used for rec_v(pi_v): P at finite places, 1/t at infinity.
inline RatFunc uniformizer(const Place& v) {
  int q = v.q();
  if (v.is_inf()) return RatFunc(FqPoly::constant(q, 1), FqPoly::t(q));
  return RatFunc(v.poly());
}

// Generators of O_v^* modulo level-e units: a primitive residue unit and
// 1 + t^k pi^i for 0 <= k < deg v, 1 <= i < e.
inline std::vector<RatFunc> local_unit_generators(const Place& v, int e) {
  int q = v.q();
  std::vector<RatFunc> out;
  if (v.is_inf()) {
    for (int c = 1; c < q; ++c) {
      bool prim = true;
      for (int k = 1; k < q - 1; ++k)
        if (powmod(c, k, q) == 1) prim = false;
      if (prim) {
        out.push_back(RatFunc::constant(q, c));
        break;
      }
    }
    for (int i = 1; i < e; ++i)
      out.push_back(RatFunc(FqPoly::monomial(q, i) + FqPoly::constant(q, 1), FqPoly::monomial(q, i)));
    return out;
  }
  const FqPoly& P = v.poly();
  int64_t nres = ipow(q, P.deg()) - 1;
  auto fac = prime_factors(nres);
  for (uint64_t code = 1;; ++code) {
    std::vector<int> c;
    for (uint64_t x = code; x; x /= q) c.push_back(static_cast<int>(x % q));
    FqPoly g(q, c);
    if (g.is_zero() || g.deg() >= P.deg()) continue;
    bool prim = true;
    for (int64_t r : fac)
      if (poly_powmod(g, Int(static_cast<long>(nres / r)), P).is_one()) prim = false;
    if (prim || nres == 1) {
      out.push_back(RatFunc(g));
      break;
    }
  }
  FqPoly Pi = FqPoly::constant(q, 1);
  for (int i = 1; i < e; ++i) {
    Pi = Pi * P;
    for (int k = 0; k < P.deg(); ++k) out.push_back(RatFunc(FqPoly::constant(q, 1) + FqPoly::monomial(q, k) * Pi));
  }
  return out;
}

inline Subgroup inertia_group(const ExtensionData& e, const Place& v) {
  if (!e.is_ramified(v)) return generate_subgroup(*e.G, {});
  std::vector<int64_t> gens;
  for (const RatFunc& x : local_unit_generators(v, e.local_precision(v))) gens.push_back(artin_local(e, x, v));
  return generate_subgroup(*e.G, gens);
}

inline Subgroup decomposition_group(const ExtensionData& e, const Place& v) {
  if (!e.is_ramified(v)) return generate_subgroup(*e.G, {frobenius(e, v)});
  Subgroup I = inertia_group(e, v);
  auto gens = I.gens;
  gens.push_back(artin_local(e, uniformizer(v), v));
  return generate_subgroup(*e.G, gens);
}

// ---------------------------------------------------------------------------
// Constructors.

inline ExtPtr trivial_extension(int q) {
  auto e = std::make_shared<ExtensionData>();
  e->q = q;
  e->G = make_group({});
  e->descriptor = "trivial";
  e->frob_poly = [](const FqPoly&) { return int64_t{0}; };
  e->frob_inf = 0;
  e->parts = {{"trivial", {0, 0}}};
  return e;
}

// Constant field extension of degree n: Frob_v = sigma^{deg v}.
inline ExtPtr constant_extension(int q, int64_t n) {
  auto e = std::make_shared<ExtensionData>();
  e->q = q;
  e->G = make_group({n});
  e->descriptor = "constant(" + std::to_string(n) + ")";
  GroupPtr G = e->G;
  e->frob_poly = [G, n](const FqPoly& f) { return G->index({posmod(f.deg(), n)}); };
  e->frob_inf = G->index({1 % n});
  e->parts = {{e->descriptor, {0, G->rank()}}};
  return e;
}

// Carlitz cyclotomic extension for the modulus M: G = (F_q[t]/M)^*,
// Frob_P = P mod M. Infinity ramifies with inertia F_q^* (trivial for q = 2).
inline ExtPtr carlitz_extension(int q, const FqPoly& M, const std::string& name = "") {
  if (!M.is_monic() || M.deg() < 1) throw std::invalid_argument("carlitz_extension: modulus must be monic of positive degree");
  int n = M.deg();
  uint64_t total = static_cast<uint64_t>(ipow(q, n));
  std::vector<uint64_t> units;
  auto from_code = [q, n](uint64_t c) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = static_cast<int>(c % q);
      c /= q;
    }
    return FqPoly(q, v);
  };
  for (uint64_t c = 1; c < total; ++c)
    if (poly_gcd(from_code(c), M).deg() == 0) units.push_back(c);
  auto mul = [q, M, from_code](uint64_t a, uint64_t b) { return ((from_code(a) * from_code(b)) % M).full_code(); };
  auto cg = std::make_shared<ConcreteGroup>(build_concrete_group(1, units, mul));
  auto e = std::make_shared<ExtensionData>();
  e->q = q;
  e->G = cg->G;
  e->descriptor = name.empty() ? "carlitz(" + M.str() + ")" : name;
  e->frob_poly = [cg, M](const FqPoly& f) { return cg->dlog.at((f % M).full_code()); };
  for (auto& [P, k] : factor_trial(M)) {
    Place v = Place::finite(P);
    e->ramified.push_back(v);
    e->precision[v] = n + 1;
  }
  if (q > 2) {
    Place inf = Place::infinity(q);
    e->ramified.push_back(inf);
    e->precision[inf] = n + 1;
  } else {
    e->frob_inf = 0;
  }
  std::sort(e->ramified.begin(), e->ramified.end());
  e->parts = {{e->descriptor, {0, e->G->rank()}}};
  return e;
}

// Discrete log in a Carlitz group of a residue polynomial (coprime to M).
inline int64_t carlitz_class(const ExtensionData& e, const FqPoly& residue) {
  return e.frob_poly(residue);
}

inline ExtPtr composite_extension(const std::vector<ExtPtr>& exts) {
  auto e = std::make_shared<ExtensionData>();
  e->q = exts.at(0)->q;
  GroupPtr G = make_group({});
  std::vector<int64_t> offs;  // index multiplier of each part
  std::set<Place> ram;
  e->descriptor = "composite(";
  int fac = 0;
  for (size_t i = 0; i < exts.size(); ++i) {
    offs.push_back(G->order());
    e->parts.push_back({exts[i]->descriptor, {fac, fac + exts[i]->G->rank()}});
    fac += exts[i]->G->rank();
    G = direct_product(*G, *exts[i]->G);
    for (auto& v : exts[i]->ramified) {
      ram.insert(v);
      e->precision[v] = std::max(e->precision[v], exts[i]->precision.at(v));
    }
    e->descriptor += (i ? "," : "") + exts[i]->descriptor;
  }
  e->descriptor += ")";
  e->G = G;
  e->ramified.assign(ram.begin(), ram.end());
  auto parts = exts;
  e->frob_poly = [parts, offs](const FqPoly& f) {
    int64_t x = 0;
    for (size_t i = 0; i < parts.size(); ++i) x += offs[i] * parts[i]->frob_poly(f);
    return x;
  };
  Place inf = Place::infinity(e->q);
  if (!ram.count(inf)) {
    int64_t x = 0;
    for (size_t i = 0; i < parts.size(); ++i) x += offs[i] * *parts[i]->frob_inf;
    e->frob_inf = x;
  }
  return e;
}

// Subgroup of G given by one part of a composite (the other coordinates zero).
inline Subgroup part_subgroup(const ExtensionData& e, size_t i) {
  auto [lo, hi] = e.parts.at(i).second;
  std::vector<int64_t> gens;
  for (int f = lo; f < hi; ++f) gens.push_back(e.G->gen(f));
  return generate_subgroup(*e.G, gens);
}

// Fixed field of K: the extension with group G/K.
inline ExtPtr quotient_extension(const ExtPtr& parent, const Subgroup& K, const std::string& name = "") {
  Quotient qt = quotient(parent->G, K);
  auto e = std::make_shared<ExtensionData>();
  e->q = parent->q;
  e->G = qt.Q;
  e->descriptor = name.empty() ? parent->descriptor + "/" + std::to_string(K.order()) : name;
  e->parent = parent;
  e->from_parent = qt.proj;
  for (const Place& v : parent->ramified) {
    Subgroup I = inertia_group(*parent, v);
    bool nontrivial = false;
    for (int64_t g : I.elems) nontrivial |= qt.proj.map[g] != 0;
    if (nontrivial) {
      e->ramified.push_back(v);
      e->precision[v] = parent->precision.at(v);
    }
  }
  // Places unramified here but ramified in the parent use rec_v(pi_v) from the parent.
  std::vector<std::pair<FqPoly, int64_t>> fixed;
  for (const Place& v : parent->ramified) {
    if (e->is_ramified(v)) continue;
    int64_t fr = qt.proj.map[artin_local(*parent, uniformizer(v), v)];
    if (v.is_inf())
      e->frob_inf = fr;
    else
      fixed.push_back({v.poly(), fr});
  }
  if (!parent->is_ramified(Place::infinity(e->q))) e->frob_inf = qt.proj.map[*parent->frob_inf];
  GroupPtr Q = qt.Q;
  auto proj = qt.proj.map;
  e->frob_poly = [parent, proj, fixed, Q](const FqPoly& f0) {
    FqPoly f = f0;
    int64_t x = 0;
    for (auto& [P, fr] : fixed) {
      int k = poly_ord(f, P);
      for (int i = 0; i < k; ++i) f = f / P;
      x = Q->add(x, Q->pow(fr, k));
    }
    return Q->add(x, proj[parent->frob_poly(f)]);
  };
  return e;
}

// Subgroup generated by the classes of the given residues in a Carlitz group.
inline Subgroup carlitz_subgroup(const ExtensionData& e, const std::vector<FqPoly>& residues) {
  std::vector<int64_t> gens;
  for (auto& r : residues) gens.push_back(e.frob_poly(r));
  return generate_subgroup(*e.G, gens);
}

// Kernel of the reduction (F_q[t]/M)^* -> (F_q[t]/m)^* for m | M.
inline Subgroup carlitz_reduction_kernel(const ExtensionData& e, const FqPoly& M, const FqPoly& m) {
  std::vector<int64_t> gens;
  int n = M.deg();
  uint64_t total = static_cast<uint64_t>(ipow(e.q, n));
  for (uint64_t c = 1; c < total; ++c) {
    std::vector<int> v(n);
    uint64_t x = c;
    for (int i = 0; i < n; ++i) {
      v[i] = static_cast<int>(x % e.q);
      x /= e.q;
    }
    FqPoly r(e.q, v);
    if (poly_gcd(r, M).deg() != 0) continue;
    if (m.deg() == 0 || (r % m).is_one()) gens.push_back(e.frob_poly(r));
  }
  return generate_subgroup(*e.G, gens);
}

// p-Sylow subgroup.
inline Subgroup sylow_subgroup(const FinAbGroup& G, int64_t p) {
  return subgroup_from_predicate(G, [&](int64_t g) {
    int64_t o = G.element_order(g);
    while (o % p == 0) o /= p;
    return o == 1;
  });
}

}  // namespace ffstark
