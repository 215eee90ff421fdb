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

// Group rings R[G] over Z, Z/p^M and cyclotomic integers, with coset
// decomposition, character twists, transfer and pushforwards.

#include <memory>
#include <string>
#include <vector>

#include "ffstark/abelian.hpp"

namespace ffstark {

struct IntRing {
  using T = Int;
  T zero() const { return 0; }
  T one() const { return 1; }
  T from_int(const Int& a) const { return a; }
  T add(const T& a, const T& b) const { return a + b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T mul(const T& a, const T& b) const { return a * b; }
  T neg(const T& a) const { return -a; }
  bool is_zero(const T& a) const { return a == 0; }
  std::string tag() const { return "Z"; }
  std::string str(const T& a) const { return a.get_str(); }
  friend bool operator==(const IntRing&, const IntRing&) { return true; }
};

struct ModRing {
  int64_t p = 2;
  int M = 1;
  int64_t mod = 2;
  ModRing() = default;
  ModRing(int64_t p_, int M_) : p(p_), M(M_), mod(ipow(p_, M_)) {}
  using T = int64_t;
  T zero() const { return 0; }
  T one() const { return 1 % mod; }
  T from_int(const Int& a) const { return reduce_mod(a, mod); }
  T add(T a, T b) const { return (a + b) % mod; }
  T sub(T a, T b) const { return posmod(a - b, mod); }
  T mul(T a, T b) const { return mulmod(a, b, mod); }
  T neg(T a) const { return a ? mod - a : 0; }
  bool is_zero(T a) const { return a == 0; }
  std::string tag() const { return "Z/" + std::to_string(p) + "^" + std::to_string(M); }
  std::string str(T a) const { return std::to_string(a); }
  friend bool operator==(const ModRing& a, const ModRing& b) { return a.mod == b.mod; }
};

struct CycRing {
  int N = 1;
  using T = CycInt;
  T zero() const { return CycInt(N, 0); }
  T one() const { return CycInt(N, 1); }
  T from_int(const Int& a) const { return CycInt(N, a); }
  T add(const T& a, const T& b) const { return a + b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T mul(const T& a, const T& b) const { return a * b; }
  T neg(const T& a) const { return -a; }
  bool is_zero(const T& a) const { return a.is_zero(); }
  std::string tag() const { return "Z[zeta_" + std::to_string(N) + "]"; }
  std::string str(const T& a) const { return a.str(); }
  friend bool operator==(const CycRing& a, const CycRing& b) { return a.N == b.N; }
};

struct RatRing {
  using T = Rat;
  T zero() const { return 0; }
  T one() const { return 1; }
  T from_int(const Int& a) const { return Rat(a); }
  T add(const T& a, const T& b) const { return a + b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T mul(const T& a, const T& b) const { return a * b; }
  T neg(const T& a) const { return -a; }
  bool is_zero(const T& a) const { return a == 0; }
  std::string tag() const { return "Q"; }
  std::string str(const T& a) const { return a.get_str(); }
  friend bool operator==(const RatRing&, const RatRing&) { return true; }
};

// O/p^M with O = Z[zeta_N], coordinates in the power basis reduced mod p^M.
struct CycModRing {
  int N = 1;
  int64_t p = 2;
  int M = 1;
  CycModRing() = default;
  CycModRing(int N_, int64_t p_, int M_) : N(N_), p(p_), M(M_) {}
  using T = CycInt;
  Int modulus() const { return Int(static_cast<long>(ipow(p, M))); }
  T norm(T a) const {
    std::vector<Int> c = a.coeffs();
    Int m = modulus();
    for (auto& x : c) {
      x %= m;
      if (x < 0) x += m;
    }
    return CycInt::from_poly(N, c);
  }
  T zero() const { return CycInt(N, 0); }
  T one() const { return norm(CycInt(N, 1)); }
  T from_int(const Int& a) const { return norm(CycInt(N, a)); }
  T add(const T& a, const T& b) const { return norm(a + b); }
  T sub(const T& a, const T& b) const { return norm(a - b); }
  T mul(const T& a, const T& b) const { return norm(a * b); }
  T neg(const T& a) const { return norm(-a); }
  bool is_zero(const T& a) const { return a.is_zero(); }
  std::string tag() const { return "Z[zeta_" + std::to_string(N) + "]/" + std::to_string(p) + "^" + std::to_string(M); }
  std::string str(const T& a) const { return a.str(); }
  friend bool operator==(const CycModRing& a, const CycModRing& b) { return a.N == b.N && a.p == b.p && a.M == b.M; }
};

template <class R>
class GroupRingElem {
 public:
  using T = typename R::T;
  GroupRingElem() = default;
  GroupRingElem(GroupPtr G, R ring) : G_(std::move(G)), R_(std::move(ring)), c_(G_->order(), R_.zero()) {}

  static GroupRingElem basis(GroupPtr G, R ring, int64_t g) {
    GroupRingElem e(G, ring);
    e.c_[g] = e.R_.one();
    return e;
  }
  static GroupRingElem one(GroupPtr G, R ring) { return basis(G, ring, 0); }
  // g - 1
  static GroupRingElem minus_one(GroupPtr G, R ring, int64_t g) {
    GroupRingElem e = basis(G, ring, g);
    e.c_[0] = e.R_.sub(e.c_[0], e.R_.one());
    return e;
  }

  const GroupPtr& group() const { return G_; }
  const R& ring() const { return R_; }
  const std::vector<T>& coeffs() const { return c_; }
  std::vector<T>& coeffs() { return c_; }
  const T& operator[](int64_t g) const { return c_[g]; }
  T& operator[](int64_t g) { return c_[g]; }

  bool is_zero() const {
    for (auto& x : c_)
      if (!R_.is_zero(x)) return false;
    return true;
  }
  T augment() const {
    T s = R_.zero();
    for (auto& x : c_) s = R_.add(s, x);
    return s;
  }

  GroupRingElem& operator+=(const GroupRingElem& o) {
    chk(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] = R_.add(c_[i], o.c_[i]);
    return *this;
  }
  GroupRingElem& operator-=(const GroupRingElem& o) {
    chk(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] = R_.sub(c_[i], o.c_[i]);
    return *this;
  }
  friend GroupRingElem operator+(GroupRingElem a, const GroupRingElem& b) { return a += b; }
  friend GroupRingElem operator-(GroupRingElem a, const GroupRingElem& b) { return a -= b; }
  GroupRingElem operator-() const {
    GroupRingElem r = *this;
    for (auto& x : r.c_) x = R_.neg(x);
    return r;
  }
  friend GroupRingElem operator*(const GroupRingElem& a, const GroupRingElem& b) {
    a.chk(b);
    GroupRingElem r(a.G_, a.R_);
    const FinAbGroup& G = *a.G_;
    std::vector<int64_t> nzb;
    for (int64_t j = 0; j < G.order(); ++j)
      if (!a.R_.is_zero(b.c_[j])) nzb.push_back(j);
    for (int64_t i = 0; i < G.order(); ++i) {
      if (a.R_.is_zero(a.c_[i])) continue;
      for (int64_t j : nzb) {
        int64_t k = G.add(i, j);
        r.c_[k] = a.R_.add(r.c_[k], a.R_.mul(a.c_[i], b.c_[j]));
      }
    }
    return r;
  }
  GroupRingElem scaled(const T& s) const {
    GroupRingElem r = *this;
    for (auto& x : r.c_) x = R_.mul(x, s);
    return r;
  }
  // Multiplication by the group element g.
  GroupRingElem translated(int64_t g) const {
    GroupRingElem r(G_, R_);
    for (int64_t i = 0; i < G_->order(); ++i) r.c_[G_->add(i, g)] = c_[i];
    return r;
  }
  GroupRingElem pow(int e) const {
    GroupRingElem r = one(G_, R_);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }
  friend bool operator==(const GroupRingElem& a, const GroupRingElem& b) {
    if (!(*a.G_ == *b.G_)) return false;
    for (size_t i = 0; i < a.c_.size(); ++i)
      if (!(a.c_[i] == b.c_[i])) return false;
    return true;
  }
  friend bool operator!=(const GroupRingElem& a, const GroupRingElem& b) { return !(a == b); }

 private:
  void chk(const GroupRingElem& o) const {
    if (!(*G_ == *o.G_)) throw std::invalid_argument("GroupRingElem: mismatched groups");
    if (!(R_ == o.R_)) throw std::invalid_argument("GroupRingElem: mismatched rings");
  }
  GroupPtr G_;
  R R_;
  std::vector<T> c_;
};

using ZElem = GroupRingElem<IntRing>;
using ModElem = GroupRingElem<ModRing>;
using CycElem = GroupRingElem<CycRing>;
using CycModElem = GroupRingElem<CycModRing>;
using QElem = GroupRingElem<RatRing>;

// Coefficientwise change of rings.
template <class R2, class R1, class F>
GroupRingElem<R2> map_coeffs(const GroupRingElem<R1>& x, const R2& ring, F f) {
  GroupRingElem<R2> r(x.group(), ring);
  for (int64_t g = 0; g < x.group()->order(); ++g) r[g] = f(x[g]);
  return r;
}

inline ModElem reduce(const ZElem& x, const ModRing& R) {
  return map_coeffs(x, R, [&](const Int& a) { return R.from_int(a); });
}

inline CycModElem reduce(const CycElem& x, const CycModRing& R) {
  return map_coeffs(x, R, [&](const CycInt& a) { return R.norm(a); });
}

inline CycElem to_cyc(const ZElem& x, int N) {
  CycRing R{N};
  return map_coeffs(x, R, [&](const Int& a) { return CycInt(N, a); });
}

inline CycModElem to_cycmod(const ModElem& x, int N) {
  CycModRing R(N, x.ring().p, x.ring().M);
  return map_coeffs(x, R, [&](int64_t a) { return R.from_int(Int(static_cast<long>(a))); });
}

// Pushforward along a homomorphism (coefficients of the fibres summed).
template <class R>
GroupRingElem<R> push(const GroupRingElem<R>& x, const GroupHom& h) {
  GroupRingElem<R> r(h.dst, x.ring());
  for (int64_t g = 0; g < x.group()->order(); ++g) r[h.map[g]] = x.ring().add(r[h.map[g]], x[g]);
  return r;
}

// Pushforward along a surjection (the quotient map G -> Gamma').
template <class R>
GroupRingElem<R> project(const GroupRingElem<R>& x, const GroupHom& h) {
  if (!h.is_surjective()) throw std::invalid_argument("project: map is not surjective");
  return push(x, h);
}

// Minimal-index representative of each coset of H in G, in increasing order.
inline std::vector<int64_t> coset_reps(const FinAbGroup& G, const Subgroup& H) {
  std::vector<char> seen(G.order(), 0);
  std::vector<int64_t> reps;
  for (int64_t g = 0; g < G.order(); ++g) {
    if (seen[g]) continue;
    reps.push_back(g);
    for (int64_t h : H.elems) seen[G.add(g, h)] = 1;
  }
  return reps;
}

// Restriction of xi to the coset gamma + H, extended by zero.
template <class R>
GroupRingElem<R> gamma_part(const GroupRingElem<R>& xi, const Subgroup& H, int64_t gamma) {
  const FinAbGroup& G = *xi.group();
  for (int64_t h : H.elems)
    if (G.add(gamma, h) < gamma) throw std::invalid_argument("gamma_part: not the minimal coset representative");
  GroupRingElem<R> r(xi.group(), xi.ring());
  for (int64_t h : H.elems) {
    int64_t g = G.add(gamma, h);
    r[g] = xi[g];
  }
  return r;
}

// xi_chi = sum_gamma chi(gamma) * gamma_part(xi, gamma), for chi a character of
// Gamma = G/H given through the quotient map.
inline CycElem chi_twist(const ZElem& xi, const Quotient& q, const Character& chi) {
  int N = static_cast<int>(q.Q->exponent());
  CycRing R{N};
  CycElem r(xi.group(), R);
  for (int64_t g = 0; g < xi.group()->order(); ++g) {
    if (xi[g] == 0) continue;
    r[g] = CycInt::root(N, char_exponent(*q.Q, chi, q.proj.map[g])).scaled(xi[g]);
  }
  return r;
}

inline CycModElem chi_twist(const ModElem& xi, const Quotient& q, const Character& chi) {
  int N = static_cast<int>(q.Q->exponent());
  CycModRing R(N, xi.ring().p, xi.ring().M);
  CycModElem r(xi.group(), R);
  for (int64_t g = 0; g < xi.group()->order(); ++g) {
    if (xi[g] == 0) continue;
    r[g] = R.norm(CycInt::root(N, char_exponent(*q.Q, chi, q.proj.map[g])).scaled(Int(static_cast<long>(xi[g]))));
  }
  return r;
}

// Ring map induced by g -> g^N; for N = [G:H] the image lies in R[H].
template <class R>
GroupRingElem<R> transfer_ver(const GroupRingElem<R>& xi, const Subgroup& H, int64_t N) {
  const FinAbGroup& G = *xi.group();
  GroupRingElem<R> r(xi.group(), xi.ring());
  for (int64_t g = 0; g < G.order(); ++g) {
    int64_t h = G.pow(g, N);
    if (!H.contains(h)) throw std::logic_error("transfer_ver: image outside the subgroup");
    r[h] = xi.ring().add(r[h], xi[g]);
  }
  return r;
}

// Coefficients of an element supported on a subgroup, rewritten over the
// subgroup's own group structure.
template <class R>
GroupRingElem<R> restrict_to(const GroupRingElem<R>& xi, const EmbeddedSubgroup& S) {
  GroupRingElem<R> r(S.H, xi.ring());
  std::vector<char> covered(xi.group()->order(), 0);
  for (int64_t h = 0; h < S.H->order(); ++h) {
    r[h] = xi[S.incl.map[h]];
    covered[S.incl.map[h]] = 1;
  }
  for (int64_t g = 0; g < xi.group()->order(); ++g)
    if (!covered[g] && !xi.ring().is_zero(xi[g])) throw std::invalid_argument("restrict_to: support outside subgroup");
  return r;
}

}  // namespace ffstark
