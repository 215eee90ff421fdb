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

// Arithmetic in F_q[t] (q prime), places of F_q(t), local expansions and
// weak approximation.

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ffstark/integer.hpp"

namespace ffstark {

class FqPoly {
 public:
  FqPoly() = default;
  FqPoly(int q, std::vector<int> c) : q_(q), c_(std::move(c)) { normalize(); }

  static FqPoly zero(int q) { return FqPoly(q, {}); }
  static FqPoly constant(int q, int a) { return FqPoly(q, {a}); }
  static FqPoly t(int q) { return FqPoly(q, {0, 1}); }
  static FqPoly monomial(int q, int d, int a = 1) {
    std::vector<int> c(d + 1, 0);
    c[d] = a;
    return FqPoly(q, c);
  }
  // t^d + sum_{i<d} digit_i(code) t^i, digits base q.
  static FqPoly monic_from_code(int q, int d, uint64_t code) {
    std::vector<int> c(d + 1, 0);
    for (int i = 0; i < d; ++i) {
      c[i] = static_cast<int>(code % q);
      code /= q;
    }
    c[d] = 1;
    return FqPoly(q, c);
  }

  int q() const { return q_; }
  int deg() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  int coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0; }
  int lc() const { return c_.empty() ? 0 : c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  const std::vector<int>& coeffs() const { return c_; }

  // Coefficients below the leading one read as a base-q number.
  uint64_t code() const {
    uint64_t r = 0;
    for (int i = deg() - 1; i >= 0; --i) r = r * q_ + c_[i];
    return r;
  }
  // All coefficients read as a base-q number (index of low part mod t^n).
  uint64_t full_code() const {
    uint64_t r = 0;
    for (int i = deg(); i >= 0; --i) r = r * q_ + c_[i];
    return r;
  }

  int eval(int a) const {
    int64_t r = 0;
    for (int i = deg(); i >= 0; --i) r = (r * a + c_[i]) % q_;
    return static_cast<int>(r);
  }

  FqPoly operator-() const {
    FqPoly r = *this;
    for (auto& x : r.c_) x = (q_ - x) % q_;
    return r;
  }
  FqPoly& operator+=(const FqPoly& o) {
    check(o);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] = (c_[i] + o.c_[i]) % q_;
    normalize();
    return *this;
  }
  FqPoly& operator-=(const FqPoly& o) { return *this += -o; }
  friend FqPoly operator+(FqPoly a, const FqPoly& b) { return a += b; }
  friend FqPoly operator-(FqPoly a, const FqPoly& b) { return a -= b; }
  friend FqPoly operator*(const FqPoly& a, const FqPoly& b) {
    a.check(b);
    if (a.is_zero() || b.is_zero()) return zero(a.q_);
    std::vector<int64_t> r(a.c_.size() + b.c_.size() - 1, 0);
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (!a.c_[i]) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += static_cast<int64_t>(a.c_[i]) * b.c_[j];
    }
    std::vector<int> c(r.size());
    for (size_t i = 0; i < r.size(); ++i) c[i] = static_cast<int>(r[i] % a.q_);
    return FqPoly(a.q_, c);
  }
  FqPoly scaled(int a) const {
    std::vector<int> c(c_.size());
    int s = static_cast<int>(posmod(a, q_));
    for (size_t i = 0; i < c_.size(); ++i) c[i] = static_cast<int>(static_cast<int64_t>(c_[i]) * s % q_);
    return FqPoly(q_, c);
  }
  FqPoly shifted(int k) const {  // times t^k
    if (is_zero()) return *this;
    std::vector<int> c(k, 0);
    c.insert(c.end(), c_.begin(), c_.end());
    return FqPoly(q_, c);
  }
  // Truncation mod t^n.
  FqPoly low(int n) const {
    std::vector<int> c(c_.begin(), c_.begin() + std::min<size_t>(c_.size(), n));
    return FqPoly(q_, c);
  }

  // Euclidean division; b nonzero.
  static void divmod(const FqPoly& a, const FqPoly& b, FqPoly& quo, FqPoly& rem) {
    a.check(b);
    if (b.is_zero()) throw std::domain_error("FqPoly division by zero");
    int q = a.q_;
    std::vector<int> r = a.c_;
    int db = b.deg();
    int inv = static_cast<int>(invmod(b.lc(), q));
    std::vector<int> qu(std::max(0, a.deg() - db + 1), 0);
    for (int i = a.deg(); i >= db; --i) {
      int co = r[i];
      if (!co) continue;
      int f = static_cast<int>(static_cast<int64_t>(co) * inv % q);
      qu[i - db] = f;
      for (int j = 0; j <= db; ++j)
        r[i - db + j] = static_cast<int>(posmod(r[i - db + j] - static_cast<int64_t>(f) * b.c_[j], q));
    }
    quo = FqPoly(q, qu);
    r.resize(std::max(0, std::min(db, static_cast<int>(r.size()))));
    rem = FqPoly(q, r);
  }
  friend FqPoly operator%(const FqPoly& a, const FqPoly& b) {
    FqPoly qu, r;
    divmod(a, b, qu, r);
    return r;
  }
  friend FqPoly operator/(const FqPoly& a, const FqPoly& b) {
    FqPoly qu, r;
    divmod(a, b, qu, r);
    return qu;
  }

  friend bool operator==(const FqPoly& a, const FqPoly& b) { return a.q_ == b.q_ && a.c_ == b.c_; }
  friend bool operator!=(const FqPoly& a, const FqPoly& b) { return !(a == b); }
  // Degree first, then coefficients from the top.
  friend bool operator<(const FqPoly& a, const FqPoly& b) {
    if (a.deg() != b.deg()) return a.deg() < b.deg();
    for (int i = a.deg(); i >= 0; --i)
      if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
    return false;
  }

  FqPoly monic() const { return is_zero() ? *this : scaled(static_cast<int>(invmod(lc(), q_))); }

  std::string str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = deg(); i >= 0; --i) {
      int a = c_[i];
      if (!a) continue;
      if (!first) os << "+";
      first = false;
      if (i == 0 || a != 1) os << a;
      if (i >= 1) os << "t";
      if (i >= 2) os << "^" << i;
    }
    return os.str();
  }

 private:
  void normalize() {
    for (auto& x : c_) x = static_cast<int>(posmod(x, q_));
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  void check(const FqPoly& o) const {
    if (q_ != o.q_) throw std::invalid_argument("FqPoly: mismatched fields");
  }
  int q_ = 2;
  std::vector<int> c_;
};

inline FqPoly poly_gcd(FqPoly a, FqPoly b) {
  while (!b.is_zero()) {
    FqPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

// Inverse of a modulo m; throws if not coprime.
inline FqPoly poly_invmod(const FqPoly& a, const FqPoly& m) {
  int q = m.q();
  FqPoly r0 = m, r1 = a % m, s0 = FqPoly::zero(q), s1 = FqPoly::constant(q, 1);
  while (!r1.is_zero()) {
    FqPoly qu, r;
    FqPoly::divmod(r0, r1, qu, r);
    r0 = r1;
    r1 = r;
    FqPoly s = s0 - qu * s1;
    s0 = s1;
    s1 = s;
  }
  if (r0.deg() != 0) throw std::domain_error("poly_invmod: not coprime");
  return (s0.scaled(static_cast<int>(invmod(r0.lc(), q))) % m);
}

inline FqPoly poly_powmod(FqPoly b, Int e, const FqPoly& m) {
  FqPoly r = FqPoly::constant(m.q(), 1) % m;
  b = b % m;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = (r * b) % m;
    b = (b * b) % m;
    e >>= 1;
  }
  return r;
}

inline FqPoly poly_pow(FqPoly b, int e) {
  FqPoly r = FqPoly::constant(b.q(), 1);
  for (int i = 0; i < e; ++i) r = r * b;
  return r;
}

// Rabin's test: t^{q^n} = t mod f and gcd(t^{q^{n/r}} - t, f) = 1 for primes r | n.
inline bool is_irreducible(const FqPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("is_irreducible: zero polynomial");
  int n = f.deg();
  if (n <= 0) return false;
  if (n == 1) return true;
  int q = f.q();
  FqPoly t = FqPoly::t(q);
  auto frob_iter = [&](int k) {
    Int e;
    mpz_ui_pow_ui(e.get_mpz_t(), q, k);
    return poly_powmod(t, e, f);
  };
  if ((frob_iter(n) - t) % f != FqPoly::zero(q)) return false;
  for (int64_t r : prime_factors(n)) {
    FqPoly g = poly_gcd(f, frob_iter(static_cast<int>(n / r)) - t);
    if (g.deg() != 0) return false;
  }
  return true;
}

// Monic polynomials of degree d (coprime to `coprime_to` if given), in
// increasing base-q code order of the non-leading coefficients.
inline void for_each_monic(int q, int d, const std::function<void(const FqPoly&)>& fn,
                           const FqPoly* coprime_to = nullptr) {
  uint64_t count = static_cast<uint64_t>(ipow(q, d));
  for (uint64_t c = 0; c < count; ++c) {
    FqPoly f = FqPoly::monic_from_code(q, d, c);
    if (coprime_to && poly_gcd(f, *coprime_to).deg() != 0) continue;
    fn(f);
  }
}

inline std::vector<FqPoly> enumerate_monics(int q, int d, std::optional<FqPoly> coprime_to = std::nullopt) {
  std::vector<FqPoly> out;
  for_each_monic(q, d, [&](const FqPoly& f) { out.push_back(f); }, coprime_to ? &*coprime_to : nullptr);
  return out;
}

inline std::vector<FqPoly> irreducibles(int q, int d) {
  std::vector<FqPoly> out;
  for_each_monic(q, d, [&](const FqPoly& f) {
    if (is_irreducible(f)) out.push_back(f);
  });
  return out;
}

// Multiplicity of P in f (f nonzero).
inline int poly_ord(FqPoly f, const FqPoly& P) {
  if (f.is_zero()) throw std::domain_error("poly_ord of zero");
  int k = 0;
  for (;;) {
    FqPoly qu, r;
    FqPoly::divmod(f, P, qu, r);
    if (!r.is_zero()) return k;
    f = qu;
    ++k;
  }
}

// Factorization of a monic polynomial by trial division with enumerated irreducibles.
inline std::vector<std::pair<FqPoly, int>> factor_trial(FqPoly f) {
  std::vector<std::pair<FqPoly, int>> out;
  int q = f.q();
  f = f.monic();
  for (int d = 1; 2 * d <= f.deg(); ++d) {
    for (const FqPoly& P : irreducibles(q, d)) {
      int k = 0;
      for (;;) {
        FqPoly qu, r;
        FqPoly::divmod(f, P, qu, r);
        if (!r.is_zero()) break;
        f = qu;
        ++k;
      }
      if (k) out.push_back({P, k});
    }
  }
  if (f.deg() > 0) out.push_back({f, 1});
  std::sort(out.begin(), out.end());
  return out;
}

class Place {
 public:
  Place() = default;
  static Place infinity(int q) {
    Place v;
    v.inf_ = true;
    v.P_ = FqPoly::zero(q);
    return v;
  }
  static Place finite(const FqPoly& P) {
    if (!P.is_monic() || !is_irreducible(P)) throw std::invalid_argument("Place: not monic irreducible: " + P.str());
    Place v;
    v.P_ = P;
    return v;
  }
  bool is_inf() const { return inf_; }
  const FqPoly& poly() const { return P_; }
  int q() const { return P_.q(); }
  int degree() const { return inf_ ? 1 : P_.deg(); }
  Int norm() const {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), q(), degree());
    return r;
  }
  std::string str() const { return inf_ ? "inf" : P_.str(); }
  friend bool operator==(const Place& a, const Place& b) { return a.inf_ == b.inf_ && a.P_ == b.P_; }
  friend bool operator!=(const Place& a, const Place& b) { return !(a == b); }
  // Infinity first, then finite places by degree and coefficients.
  friend bool operator<(const Place& a, const Place& b) {
    if (a.inf_ != b.inf_) return a.inf_;
    return a.P_ < b.P_;
  }

 private:
  bool inf_ = false;
  FqPoly P_;
};

// Element of k^* = F_q(t)^* as num/den with den monic and gcd 1.
class RatFunc {
 public:
  RatFunc() = default;
  RatFunc(FqPoly num, FqPoly den) {
    if (den.is_zero()) throw std::domain_error("RatFunc: zero denominator");
    FqPoly g = poly_gcd(num, den);
    if (!num.is_zero()) {
      num = num / g;
      den = den / g;
    } else {
      den = FqPoly::constant(den.q(), 1);
    }
    int inv = static_cast<int>(invmod(den.lc(), den.q()));
    num_ = num.scaled(inv);
    den_ = den.scaled(inv);
  }
  explicit RatFunc(const FqPoly& f) : RatFunc(f, FqPoly::constant(f.q(), 1)) {}
  static RatFunc constant(int q, int a) { return RatFunc(FqPoly::constant(q, a)); }

  const FqPoly& num() const { return num_; }
  const FqPoly& den() const { return den_; }
  int q() const { return num_.q(); }
  bool is_zero() const { return num_.is_zero(); }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) { return RatFunc(a.num_ * b.num_, a.den_ * b.den_); }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw std::domain_error("RatFunc: division by zero");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  RatFunc pow(int64_t e) const {
    RatFunc base = e >= 0 ? *this : RatFunc::constant(q(), 1) / *this;
    RatFunc r = RatFunc::constant(q(), 1);
    for (int64_t i = 0; i < (e >= 0 ? e : -e); ++i) r = r * base;
    return r;
  }
  std::string str() const {
    if (den_.is_one()) return "(" + num_.str() + ")";
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  FqPoly num_, den_;
};

inline int ord_at(const RatFunc& x, const Place& w) {
  if (x.is_zero()) throw std::domain_error("ord of zero");
  if (w.is_inf()) return x.den().deg() - x.num().deg();
  return poly_ord(x.num(), w.poly()) - poly_ord(x.den(), w.poly());
}

// (ord_w(x), deg_w(x) = ord_w(x) * deg w).
inline std::pair<int, int> local_ord_and_deg(const RatFunc& x, const Place& w) {
  int o = ord_at(x, w);
  return {o, o * w.degree()};
}

// Truncated expansion x = sum_{i<prec} digit_i * pi^{val+i} in the completion
// at v; pi = P for finite v (digits of degree < deg P), pi = 1/t at infinity.
struct LocalExpansion {
  Place v;
  int val = 0;
  std::vector<FqPoly> digits;
  int prec() const { return static_cast<int>(digits.size()); }
};

inline LocalExpansion expand_at(const RatFunc& x, const Place& v, int nterms) {
  if (x.is_zero()) throw std::domain_error("expand_at of zero");
  int q = x.q();
  LocalExpansion out{v, ord_at(x, v), {}};
  if (v.is_inf()) {
    // x = pi^val * N(pi)/D(pi) with N, D the reversed polynomials.
    auto rev = [&](const FqPoly& f) {
      std::vector<int> c(f.coeffs().rbegin(), f.coeffs().rend());
      return c;
    };
    std::vector<int> N = rev(x.num()), D = rev(x.den());
    N.resize(std::max<size_t>(N.size(), nterms), 0);
    D.resize(std::max<size_t>(D.size(), nterms), 0);
    std::vector<int> s(nterms, 0);
    for (int i = 0; i < nterms; ++i) {
      int64_t acc = N[i];
      for (int j = 1; j <= i; ++j) acc -= static_cast<int64_t>(D[j]) * s[i - j];
      s[i] = static_cast<int>(posmod(acc, q));  // D[0] = 1
    }
    for (int i = 0; i < nterms; ++i) out.digits.push_back(FqPoly::constant(q, s[i]));
    return out;
  }
  const FqPoly& P = v.poly();
  FqPoly Pn = poly_pow(P, nterms);
  FqPoly num = x.num(), den = x.den();
  if (out.val > 0)
    for (int i = 0; i < out.val; ++i) num = num / P;
  else
    for (int i = 0; i < -out.val; ++i) den = den / P;
  FqPoly y = (num * poly_invmod(den, Pn)) % Pn;
  for (int i = 0; i < nterms; ++i) {
    FqPoly qu, r;
    FqPoly::divmod(y, P, qu, r);
    out.digits.push_back(r);
    y = qu;
  }
  return out;
}

// Largest e with ord_v(x - 1) >= e, capped at cap (x a unit at v).
inline int unit_level(const RatFunc& x, const Place& v, int cap) {
  RatFunc d = x - RatFunc::constant(x.q(), 1);
  if (d.is_zero()) return cap;
  return std::min(cap, ord_at(d, v));
}

struct ApproxConstraint {
  Place v;
  RatFunc target;
  int precision = 1;  // require ord_v(alpha/target - 1) >= precision
};

struct ApproxResult {
  RatFunc alpha;
  // alpha's divisor away from the constraint places: monic num/den
  // polynomials and, if infinity is unconstrained, ord_inf(alpha).
  FqPoly away_num, away_den;
  std::optional<int> ord_inf;
};

inline ApproxResult weak_approximation(const std::vector<ApproxConstraint>& cons) {
  if (cons.empty()) throw std::invalid_argument("weak_approximation: no constraints");
  int q = cons[0].target.q();
  for (size_t i = 0; i < cons.size(); ++i) {
    if (cons[i].precision <= 0) throw std::invalid_argument("weak_approximation: precision must be positive");
    if (cons[i].target.is_zero()) throw std::invalid_argument("weak_approximation: zero target");
    for (size_t j = 0; j < i; ++j)
      if (cons[i].v == cons[j].v) throw std::invalid_argument("weak_approximation: repeated place");
  }
  const ApproxConstraint* inf_con = nullptr;
  std::vector<const ApproxConstraint*> fin;
  for (auto& c : cons) {
    if (c.v.is_inf())
      inf_con = &c;
    else
      fin.push_back(&c);
  }

  FqPoly one = FqPoly::constant(q, 1);
  std::vector<int> k(fin.size());
  RatFunc Pk = RatFunc::constant(q, 1);
  FqPoly Pi = one;
  int E = 0;
  for (size_t i = 0; i < fin.size(); ++i) {
    k[i] = ord_at(fin[i]->target, fin[i]->v);
    Pk = Pk * RatFunc(fin[i]->v.poly()).pow(k[i]);
    Pi = Pi * poly_pow(fin[i]->v.poly(), fin[i]->precision);
    E += fin[i]->v.degree() * fin[i]->precision;
  }

  // Auxiliary denominator g = Q^s (Q a fresh place) gives freedom at infinity.
  FqPoly g = one;
  int D = 0;
  if (inf_con) {
    FqPoly Q;
    for (int d = 1; Q.is_zero(); ++d)
      for (const FqPoly& c : irreducibles(q, d)) {
        bool used = false;
        for (auto* f : fin) used |= (f->v.poly() == c);
        if (!used) {
          Q = c;
          break;
        }
      }
    int a = ord_at(Pk, Place::infinity(q));
    int kinf = ord_at(inf_con->target, inf_con->v);
    int s = 0;
    while (s * Q.deg() + a - kinf < E + inf_con->precision - 1) ++s;
    g = poly_pow(Q, s);
    D = s * Q.deg() + a - kinf;
  }

  // CRT for f mod Pi with f = g * y_i * prod_{j != i} P_j^{-k_j} mod P_i^{e_i}.
  FqPoly F0 = FqPoly::zero(q);
  for (size_t i = 0; i < fin.size(); ++i) {
    FqPoly Pe = poly_pow(fin[i]->v.poly(), fin[i]->precision);
    RatFunc z = fin[i]->target / RatFunc(fin[i]->v.poly()).pow(k[i]);
    for (size_t j = 0; j < fin.size(); ++j)
      if (j != i) z = z / RatFunc(fin[j]->v.poly()).pow(k[j]);
    z = z * RatFunc(g);
    FqPoly r = (z.num() * poly_invmod(z.den(), Pe)) % Pe;
    FqPoly other = Pi / Pe;
    FqPoly e = (other * poly_invmod(other % Pe, Pe)) % Pi;
    F0 = (F0 + r * e) % Pi;
  }

  FqPoly f = F0;
  if (inf_con) {
    // Match the top `precision` coefficients of f with the Laurent expansion of g*z/Pk.
    RatFunc W = RatFunc(g) * inf_con->target / Pk;
    LocalExpansion ex = expand_at(W, Place::infinity(q), inf_con->precision);
    if (-ex.val != D) throw std::logic_error("weak_approximation: degree bookkeeping");
    std::vector<int> h(D - E + 1, 0);
    const auto& pc = Pi.coeffs();
    for (int i = 0; i < inf_con->precision; ++i) {
      int target = ex.digits[i].coeff(0);
      int deg_i = D - i;
      int64_t acc = target - F0.coeff(deg_i);
      for (int j = D - E - i + 1; j <= D - E; ++j) {
        int idx = deg_i - j;
        if (idx >= 0 && idx < static_cast<int>(pc.size())) acc -= static_cast<int64_t>(h[j]) * pc[idx];
      }
      h[D - E - i] = static_cast<int>(posmod(acc, q));
    }
    f = F0 + Pi * FqPoly(q, h);
  }
  if (f.is_zero()) throw std::logic_error("weak_approximation: degenerate solution");

  ApproxResult res;
  res.alpha = Pk * RatFunc(f, g);
  res.away_num = f.monic();
  res.away_den = g;
  if (!inf_con) res.ord_inf = ord_at(res.alpha, Place::infinity(q));

  for (auto& c : cons)
    if (unit_level(res.alpha / c.target, c.v, c.precision) < c.precision)
      throw std::logic_error("weak_approximation: self-check failed at " + c.v.str());
  return res;
}

}  // namespace ffstark
