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

// Finite abelian groups as products of cyclic factors, characters, and exact
// arithmetic in the cyclotomic integers Z[x]/Phi_N.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ffstark/integer.hpp"

namespace ffstark {

// Product of cyclic groups Z/d_0 x ... x Z/d_{r-1}. Elements are indexed
// mixed-radix with the first factor least significant.
class FinAbGroup {
 public:
  FinAbGroup() = default;
  explicit FinAbGroup(std::vector<int64_t> factors) {
    for (int64_t d : factors) {
      if (d < 1) throw std::invalid_argument("FinAbGroup: factor must be positive");
      if (d > 1) d_.push_back(d);
    }
    order_ = 1;
    for (int64_t d : d_) {
      stride_.push_back(order_);
      order_ *= d;
    }
  }

  const std::vector<int64_t>& factors() const { return d_; }
  int rank() const { return static_cast<int>(d_.size()); }
  int64_t order() const { return order_; }
  int64_t exponent() const {
    int64_t e = 1;
    for (int64_t d : d_) e = std::lcm(e, d);
    return e;
  }
  bool is_invariant_form() const {
    for (size_t i = 1; i < d_.size(); ++i)
      if (d_[i] % d_[i - 1]) return false;
    return true;
  }
  bool is_p_group(int64_t p) const {
    for (int64_t d : d_) {
      int64_t x = d;
      while (x % p == 0) x /= p;
      if (x != 1) return false;
    }
    return true;
  }

  std::vector<int64_t> coords(int64_t idx) const {
    std::vector<int64_t> a(d_.size());
    for (size_t i = 0; i < d_.size(); ++i) {
      a[i] = idx % d_[i];
      idx /= d_[i];
    }
    return a;
  }
  int64_t index(const std::vector<int64_t>& a) const {
    int64_t r = 0;
    for (size_t i = 0; i < d_.size(); ++i) r += posmod(a[i], d_[i]) * stride_[i];
    return r;
  }
  int64_t gen(int i) const { return stride_[i]; }
  int64_t identity() const { return 0; }

  int64_t add(int64_t x, int64_t y) const {
    int64_t r = 0;
    for (size_t i = 0; i < d_.size(); ++i) {
      int64_t s = x % d_[i] + y % d_[i];
      if (s >= d_[i]) s -= d_[i];
      r += s * stride_[i];
      x /= d_[i];
      y /= d_[i];
    }
    return r;
  }
  int64_t neg(int64_t x) const {
    int64_t r = 0;
    for (size_t i = 0; i < d_.size(); ++i) {
      int64_t a = x % d_[i];
      r += (a ? d_[i] - a : 0) * stride_[i];
      x /= d_[i];
    }
    return r;
  }
  int64_t sub(int64_t x, int64_t y) const { return add(x, neg(y)); }
  int64_t pow(int64_t x, int64_t k) const {
    auto a = coords(x);
    for (size_t i = 0; i < a.size(); ++i) a[i] = mulmod(a[i], posmod(k, d_[i]), d_[i]);
    return index(a);
  }
  int64_t element_order(int64_t x) const {
    auto a = coords(x);
    int64_t o = 1;
    for (size_t i = 0; i < a.size(); ++i) o = std::lcm(o, d_[i] / std::gcd(a[i], d_[i]));
    return o;
  }

  std::string descriptor() const {
    if (d_.empty()) return "1";
    std::ostringstream os;
    for (size_t i = 0; i < d_.size(); ++i) os << (i ? " x " : "") << "Z/" << d_[i];
    return os.str();
  }
  friend bool operator==(const FinAbGroup& a, const FinAbGroup& b) { return a.d_ == b.d_; }

 private:
  std::vector<int64_t> d_, stride_;
  int64_t order_ = 1;
};

using GroupPtr = std::shared_ptr<const FinAbGroup>;

inline GroupPtr make_group(std::vector<int64_t> factors) {
  return std::make_shared<const FinAbGroup>(std::move(factors));
}

// A x B with index(a, b) = a + |A| * b.
inline GroupPtr direct_product(const FinAbGroup& A, const FinAbGroup& B) {
  std::vector<int64_t> f = A.factors();
  f.insert(f.end(), B.factors().begin(), B.factors().end());
  return make_group(f);
}

// Group homomorphism stored as an image table.
struct GroupHom {
  GroupPtr src, dst;
  std::vector<int64_t> map;
  int64_t operator()(int64_t g) const { return map[g]; }
  bool is_surjective() const {
    std::vector<char> hit(dst->order(), 0);
    for (int64_t x : map) hit[x] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c; });
  }
};

// Homomorphism from images of the factor generators.
inline GroupHom hom_from_generators(GroupPtr src, GroupPtr dst, const std::vector<int64_t>& gen_images) {
  GroupHom h{src, dst, std::vector<int64_t>(src->order())};
  for (int64_t g = 0; g < src->order(); ++g) {
    auto a = src->coords(g);
    int64_t x = 0;
    for (size_t i = 0; i < a.size(); ++i) x = dst->add(x, dst->pow(gen_images[i], a[i]));
    h.map[g] = x;
  }
  for (int i = 0; i < src->rank(); ++i)
    if (dst->pow(gen_images[i], src->factors()[i]) != 0) throw std::invalid_argument("hom_from_generators: ill-defined");
  return h;
}

struct Subgroup {
  std::vector<int64_t> elems;  // sorted
  std::vector<char> member;    // indexed by ambient element
  std::vector<int64_t> gens;
  int64_t order() const { return static_cast<int64_t>(elems.size()); }
  bool contains(int64_t g) const { return member[g] != 0; }
};

inline Subgroup generate_subgroup(const FinAbGroup& G, const std::vector<int64_t>& gens) {
  Subgroup H;
  H.member.assign(G.order(), 0);
  H.member[0] = 1;
  H.gens = gens;
  std::vector<int64_t> cur{0};
  for (int64_t g : gens) {
    if (H.member[g]) continue;
    std::vector<int64_t> next = cur;
    int64_t x = g;
    while (!H.member[x]) {
      for (int64_t s : cur) {
        int64_t y = G.add(x, s);
        H.member[y] = 1;
        next.push_back(y);
      }
      x = G.add(x, g);
    }
    cur = next;
  }
  for (int64_t i = 0; i < G.order(); ++i)
    if (H.member[i]) H.elems.push_back(i);
  return H;
}

inline Subgroup whole_group(const FinAbGroup& G) {
  std::vector<int64_t> gens;
  for (int i = 0; i < G.rank(); ++i) gens.push_back(G.gen(i));
  return generate_subgroup(G, gens);
}

inline Subgroup subgroup_from_predicate(const FinAbGroup& G, const std::function<bool(int64_t)>& pred) {
  Subgroup H;
  H.member.assign(G.order(), 0);
  for (int64_t g = 0; g < G.order(); ++g)
    if (pred(g)) {
      H.member[g] = 1;
      H.elems.push_back(g);
    }
  if (!H.member[0]) throw std::invalid_argument("subgroup_from_predicate: identity missing");
  for (int64_t a : H.elems)
    for (int64_t b : H.elems)
      if (!H.member[G.add(a, b)]) throw std::invalid_argument("subgroup_from_predicate: not closed");
  H.gens = H.elems;
  return H;
}

// All subgroups, by closure from the trivial subgroup; deterministic order.
inline std::vector<Subgroup> all_subgroups(const FinAbGroup& G) {
  std::vector<Subgroup> out;
  std::set<std::vector<char>> seen;
  std::deque<Subgroup> todo;
  Subgroup triv = generate_subgroup(G, {});
  seen.insert(triv.member);
  todo.push_back(triv);
  while (!todo.empty()) {
    Subgroup H = todo.front();
    todo.pop_front();
    for (int64_t g = 0; g < G.order(); ++g) {
      if (H.member[g]) continue;
      auto gens = H.gens;
      gens.push_back(g);
      Subgroup K = generate_subgroup(G, gens);
      if (seen.insert(K.member).second) todo.push_back(K);
    }
    out.push_back(std::move(H));
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.elems < b.elems;
  });
  return out;
}

// G/H with the projection and minimal-index coset representatives.
struct Quotient {
  GroupPtr Q;
  GroupHom proj;
  std::vector<int64_t> section;  // Q element -> minimal G representative
};

inline Quotient quotient(GroupPtr G, const Subgroup& H) {
  size_t r = G->rank();
  std::vector<std::vector<int64_t>> cols;
  for (size_t i = 0; i < r; ++i) {
    std::vector<int64_t> c(r, 0);
    c[i] = G->factors()[i];
    cols.push_back(c);
  }
  for (int64_t h : H.gens) cols.push_back(G->coords(h));
  IntMat A(r, std::vector<Int>(cols.size()));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < cols.size(); ++j) A[i][j] = static_cast<long>(cols[j][i]);
  SmithForm s = smith_form(A, cols.size());
  std::vector<int64_t> qf;
  std::vector<size_t> keep;
  for (size_t i = 0; i < r; ++i) {
    int64_t d = s.D[i][i].get_si();
    if (d > 1) {
      qf.push_back(d);
      keep.push_back(i);
    }
  }
  Quotient out;
  out.Q = make_group(qf);
  out.proj.src = G;
  out.proj.dst = out.Q;
  out.proj.map.resize(G->order());
  for (int64_t g = 0; g < G->order(); ++g) {
    auto a = G->coords(g);
    std::vector<int64_t> y;
    for (size_t k = 0; k < keep.size(); ++k) {
      Int acc = 0;
      for (size_t j = 0; j < r; ++j) acc += s.U[keep[k]][j] * static_cast<long>(a[j]);
      y.push_back(reduce_mod(acc, qf[k]));
    }
    out.proj.map[g] = out.Q->index(y);
  }
  out.section.assign(out.Q->order(), -1);
  for (int64_t g = 0; g < G->order(); ++g)
    if (out.section[out.proj.map[g]] < 0) out.section[out.proj.map[g]] = g;
  return out;
}

inline Subgroup kernel(const GroupHom& h) {
  return subgroup_from_predicate(*h.src, [&](int64_t g) { return h.map[g] == 0; });
}

inline Subgroup image_subgroup(const GroupHom& h) {
  std::vector<int64_t> gens;
  for (int i = 0; i < h.src->rank(); ++i) gens.push_back(h.map[h.src->gen(i)]);
  return generate_subgroup(*h.dst, gens);
}

// A concrete abelian group (elements keyed by uint64) turned into a product
// of cyclic factors with a discrete-log table.
struct ConcreteGroup {
  GroupPtr G;
  std::unordered_map<uint64_t, int64_t> dlog;
  std::vector<uint64_t> elem;  // index -> concrete key
};

inline ConcreteGroup build_concrete_group(uint64_t identity, const std::vector<uint64_t>& candidates,
                                          const std::function<uint64_t(uint64_t, uint64_t)>& mul) {
  // Incremental generator table: each element of the current subgroup with its exponent vector.
  std::vector<uint64_t> gens;
  std::unordered_map<uint64_t, std::vector<int64_t>> vec;
  std::vector<uint64_t> elems{identity};
  vec[identity] = {};
  std::vector<std::vector<int64_t>> relations;
  for (uint64_t g : candidates) {
    if (vec.count(g)) continue;
    size_t k = gens.size();
    gens.push_back(g);
    for (auto& kv : vec) kv.second.push_back(0);
    std::vector<uint64_t> layer = elems, all = elems;
    int64_t m = 1;
    uint64_t gm = g;
    while (!vec.count(gm)) {
      std::vector<uint64_t> next;
      for (uint64_t s : layer) {
        uint64_t y = mul(s, g);
        auto v = vec.at(s);
        v[k] += 1;
        vec[y] = v;
        next.push_back(y);
      }
      for (uint64_t y : next) all.push_back(y);
      layer = next;
      gm = mul(gm, g);
      ++m;
    }
    std::vector<int64_t> rel = vec.at(gm);
    for (auto& x : rel) x = -x;
    rel[k] += m;
    for (auto& old : relations) old.push_back(0);
    relations.push_back(rel);
    elems = all;
  }
  size_t k = gens.size();
  IntMat R(relations.size(), std::vector<Int>(k));
  for (size_t i = 0; i < relations.size(); ++i)
    for (size_t j = 0; j < k; ++j) R[i][j] = static_cast<long>(relations[i][j]);
  SmithForm s = smith_form(R, k);
  std::vector<int64_t> f;
  std::vector<size_t> keep;
  for (size_t i = 0; i < k; ++i) {
    int64_t d = s.D[i][i].get_si();
    if (d > 1) {
      f.push_back(d);
      keep.push_back(i);
    }
  }
  ConcreteGroup out;
  out.G = make_group(f);
  out.elem.assign(out.G->order(), 0);
  for (uint64_t e : elems) {
    const auto& x = vec.at(e);
    std::vector<int64_t> y;
    for (size_t t = 0; t < keep.size(); ++t) {
      Int acc = 0;
      for (size_t j = 0; j < k; ++j) acc += static_cast<long>(x[j]) * s.V[j][keep[t]];
      y.push_back(reduce_mod(acc, f[t]));
    }
    int64_t idx = out.G->index(y);
    out.dlog[e] = idx;
    out.elem[idx] = e;
  }
  if (static_cast<int64_t>(elems.size()) != out.G->order())
    throw std::logic_error("build_concrete_group: order mismatch");
  return out;
}

// Subgroup as an abstract group, with the embedding into the ambient group.
struct EmbeddedSubgroup {
  GroupPtr H;
  GroupHom incl;  // H -> G
};

inline EmbeddedSubgroup embed_subgroup(GroupPtr G, const Subgroup& S) {
  std::vector<uint64_t> cand(S.elems.begin(), S.elems.end());
  ConcreteGroup c = build_concrete_group(0, cand, [&](uint64_t a, uint64_t b) {
    return static_cast<uint64_t>(G->add(static_cast<int64_t>(a), static_cast<int64_t>(b)));
  });
  EmbeddedSubgroup out{c.G, {c.G, G, {}}};
  out.incl.map.resize(c.G->order());
  for (int64_t i = 0; i < c.G->order(); ++i) out.incl.map[i] = static_cast<int64_t>(c.elem[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Cyclotomic integers.

namespace detail {

inline std::vector<Int> compute_cyclotomic(int N, std::map<int, std::vector<Int>>& memo) {
  auto it = memo.find(N);
  if (it != memo.end()) return it->second;
  // Phi_N = (x^N - 1) / prod_{d | N, d < N} Phi_d, by exact division.
  std::vector<Int> num(N + 1, 0);
  num[0] = -1;
  num[N] = 1;
  for (int d = 1; d < N; ++d) {
    if (N % d) continue;
    std::vector<Int> den = compute_cyclotomic(d, memo);
    int dn = static_cast<int>(num.size()) - 1, dd = static_cast<int>(den.size()) - 1;
    std::vector<Int> quo(dn - dd + 1, 0);
    for (int i = dn; i >= dd; --i) {
      Int c = num[i];
      quo[i - dd] = c;
      for (int j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
    }
    num = quo;
  }
  memo[N] = num;
  return num;
}

}  // namespace detail

inline const std::vector<Int>& cyclotomic_poly(int N) {
  static std::mutex mu;
  static std::map<int, std::vector<Int>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  std::vector<Int> phi = detail::compute_cyclotomic(N, cache);
  return cache[N];
}

inline int euler_phi(int N) {
  int r = N;
  for (int64_t p : prime_factors(N)) r = r / static_cast<int>(p) * static_cast<int>(p - 1);
  return r;
}

class CycInt {
 public:
  CycInt() = default;
  explicit CycInt(int N, Int a = 0) : N_(N), c_(euler_phi(N), 0) { c_[0] = a; }
  // Reduce an arbitrary polynomial in zeta_N.
  static CycInt from_poly(int N, std::vector<Int> p) {
    CycInt r(N);
    const auto& phi = cyclotomic_poly(N);
    int dp = static_cast<int>(phi.size()) - 1;
    for (int i = static_cast<int>(p.size()) - 1; i >= dp; --i) {
      if (p[i] == 0) continue;
      Int c = p[i];
      for (int j = 0; j <= dp; ++j) p[i - dp + j] -= c * phi[j];
    }
    for (int i = 0; i < dp && i < static_cast<int>(p.size()); ++i) r.c_[i] = p[i];
    return r;
  }
  static CycInt root(int N, int64_t k) {
    std::vector<Int> p(N, 0);
    p[posmod(k, N)] = 1;
    return from_poly(N, p);
  }

  int level() const { return N_; }
  const std::vector<Int>& coeffs() const { return c_; }
  bool is_zero() const {
    for (auto& x : c_)
      if (x != 0) return false;
    return true;
  }

  CycInt& operator+=(const CycInt& o) {
    chk(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CycInt& operator-=(const CycInt& o) {
    chk(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend CycInt operator+(CycInt a, const CycInt& b) { return a += b; }
  friend CycInt operator-(CycInt a, const CycInt& b) { return a -= b; }
  CycInt operator-() const {
    CycInt r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend CycInt operator*(const CycInt& a, const CycInt& b) {
    a.chk(b);
    std::vector<Int> p(2 * a.c_.size(), 0);
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) p[i + j] += a.c_[i] * b.c_[j];
    }
    return from_poly(a.N_, p);
  }
  CycInt scaled(const Int& s) const {
    CycInt r = *this;
    for (auto& x : r.c_) x *= s;
    return r;
  }
  friend bool operator==(const CycInt& a, const CycInt& b) { return a.N_ == b.N_ && a.c_ == b.c_; }
  friend bool operator!=(const CycInt& a, const CycInt& b) { return !(a == b); }

  // zeta -> zeta^a for a coprime to N.
  CycInt galois(int64_t a) const {
    std::vector<Int> p(N_, 0);
    for (size_t i = 0; i < c_.size(); ++i) p[posmod(static_cast<int64_t>(i) * a, N_)] += c_[i];
    return from_poly(N_, p);
  }
  // Image under Z[zeta_N] -> Z[zeta_M], zeta_N -> zeta_M^{M/N}.
  CycInt embed(int M) const {
    if (M % N_) throw std::invalid_argument("CycInt::embed: level does not divide");
    std::vector<Int> p(M, 0);
    for (size_t i = 0; i < c_.size(); ++i) p[i * (M / N_)] += c_[i];
    return from_poly(M, p);
  }
  bool divisible_by(const Int& n) const {
    for (auto& x : c_)
      if (x % n != 0) return false;
    return true;
  }
  CycInt div_exact(const Int& n) const {
    CycInt r = *this;
    for (auto& x : r.c_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), n.get_mpz_t());
    return r;
  }
  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i].get_str();
    os << "]/Phi_" << N_;
    return os.str();
  }

 private:
  void chk(const CycInt& o) const {
    if (N_ != o.N_) throw std::invalid_argument("CycInt: mismatched levels");
  }
  int N_ = 1;
  std::vector<Int> c_{0};
};

// ---------------------------------------------------------------------------
// Characters. chi_b(g) = zeta_N^{sum a_i b_i N/d_i}, N = exponent of G.

struct Character {
  std::vector<int64_t> b;
};

inline int64_t char_exponent(const FinAbGroup& G, const Character& chi, int64_t g) {
  int64_t N = G.exponent();
  auto a = G.coords(g);
  int64_t e = 0;
  for (size_t i = 0; i < a.size(); ++i) e += a[i] * chi.b[i] % G.factors()[i] * (N / G.factors()[i]);
  return posmod(e, N);
}

inline CycInt char_value(const FinAbGroup& G, const Character& chi, int64_t g) {
  return CycInt::root(static_cast<int>(G.exponent()), char_exponent(G, chi, g));
}

// All characters in mixed-radix order of their exponent arrays.
inline std::vector<Character> characters(const FinAbGroup& G) {
  std::vector<Character> out;
  for (int64_t i = 0; i < G.order(); ++i) out.push_back({G.coords(i)});
  return out;
}

inline int64_t char_index(const FinAbGroup& G, const Character& chi) { return G.index(chi.b); }

inline bool char_is_trivial(const Character& chi) {
  return std::all_of(chi.b.begin(), chi.b.end(), [](int64_t x) { return x == 0; });
}

// chi^a.
inline Character char_pow(const FinAbGroup& G, const Character& chi, int64_t a) {
  Character r = chi;
  for (size_t i = 0; i < r.b.size(); ++i) r.b[i] = mulmod(posmod(a, G.factors()[i]), chi.b[i], G.factors()[i]);
  return r;
}

// Pullback of a character of Q along a homomorphism G -> Q, as a function
// returning exponents at level N = exponent(Q).
inline std::vector<int64_t> pullback_exponents(const FinAbGroup& Q, const Character& chi, const GroupHom& h) {
  std::vector<int64_t> e(h.src->order());
  for (int64_t g = 0; g < h.src->order(); ++g) e[g] = char_exponent(Q, chi, h.map[g]);
  return e;
}

namespace detail {

// Separable transform in Z[x]/(x^N - 1): out[b] = sum_g v[g] x^{sign * <g,b>}.
inline std::vector<std::vector<Int>> rotation_transform(const FinAbGroup& G, int N,
                                                        std::vector<std::vector<Int>> v, int sign) {
  int64_t stride = 1;
  for (int64_t d : G.factors()) {
    int64_t unit = N / d;  // x-power of one step on this axis
    for (int64_t base = 0; base < G.order(); ++base) {
      if ((base / stride) % d != 0) continue;
      std::vector<std::vector<Int>> line(d), out(d, std::vector<Int>(N, 0));
      for (int64_t a = 0; a < d; ++a) line[a] = v[base + a * stride];
      for (int64_t b = 0; b < d; ++b)
        for (int64_t a = 0; a < d; ++a) {
          int64_t sh = posmod(sign * unit * ((a * b) % d), N);
          const auto& src = line[a];
          auto& dst = out[b];
          for (int k = 0; k < N; ++k)
            if (src[k] != 0) dst[(k + sh) % N] += src[k];
        }
      for (int64_t b = 0; b < d; ++b) v[base + b * stride] = std::move(out[b]);
    }
    stride *= d;
  }
  return v;
}

inline std::vector<Int> to_rotation(const CycInt& c, int N) {
  CycInt e = c.level() == N ? c : c.embed(N);
  std::vector<Int> r(N, 0);
  for (size_t i = 0; i < e.coeffs().size(); ++i) r[i] = e.coeffs()[i];
  return r;
}

}  // namespace detail

// fourier(xi)(chi) = sum_g xi_g chi(g), indexed by character index. The
// coefficient level must divide N, and N must be a multiple of exponent(G).
inline std::vector<CycInt> fourier(const FinAbGroup& G, const std::vector<CycInt>& xi, int N) {
  if (N % G.exponent()) throw std::invalid_argument("fourier: level not a multiple of the exponent");
  std::vector<std::vector<Int>> v(G.order());
  for (int64_t g = 0; g < G.order(); ++g) v[g] = detail::to_rotation(xi[g], N);
  v = detail::rotation_transform(G, N, std::move(v), 1);
  std::vector<CycInt> out;
  out.reserve(G.order());
  for (auto& x : v) out.push_back(CycInt::from_poly(N, x));
  return out;
}

inline std::vector<CycInt> fourier(const FinAbGroup& G, const std::vector<Int>& xi) {
  int N = static_cast<int>(G.exponent());
  std::vector<CycInt> c;
  for (auto& x : xi) c.emplace_back(N, x);
  return fourier(G, c, N);
}

struct InverseFourier {
  std::vector<CycInt> coeffs;  // divided by |G| when exact, numerators otherwise
  Int denominator = 1;
  bool exact = true;
};

inline InverseFourier inverse_fourier(const FinAbGroup& G, const std::vector<CycInt>& f) {
  int N = f.empty() ? 1 : f[0].level();
  std::vector<std::vector<Int>> v(G.order());
  for (int64_t i = 0; i < G.order(); ++i) v[i] = detail::to_rotation(f[i], N);
  v = detail::rotation_transform(G, N, std::move(v), -1);
  InverseFourier out;
  Int n = static_cast<long>(G.order());
  for (auto& x : v) {
    out.coeffs.push_back(CycInt::from_poly(N, x));
    if (!out.coeffs.back().divisible_by(n)) out.exact = false;
  }
  if (out.exact)
    for (auto& c : out.coeffs) c = c.div_exact(n);
  else
    out.denominator = n;
  return out;
}

}  // namespace ffstark
