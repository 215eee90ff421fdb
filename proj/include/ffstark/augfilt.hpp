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

// Powers of augmentation ideals over Z/p^M, residue classes, relative
// (coset) decomposition, homogeneous leading forms and the Val / yen maps.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ffstark/groupring.hpp"

namespace ffstark {

// Submodule of (Z/p^M)^n in Howell form. Pivots are chosen by minimal
// p-valuation, ties broken by lowest generator index.
class ModEchelon {
 public:
  ModEchelon() = default;
  ModEchelon(int64_t p, int M, size_t ncols) : p_(p), M_(M), mod_(ipow(p, M)), n_(ncols) {}

  void build(const std::vector<std::vector<int64_t>>& gens, bool track = false) {
    track_ = track;
    ngens_ = gens.size();
    rows_.clear();
    std::vector<Row> pool;
    for (size_t i = 0; i < gens.size(); ++i) {
      Row r;
      r.v.resize(n_);
      for (size_t j = 0; j < n_; ++j) r.v[j] = posmod(gens[i][j], mod_);
      if (track_) {
        r.combo.assign(ngens_, 0);
        r.combo[i] = 1 % mod_;
      }
      if (!zero(r.v)) pool.push_back(std::move(r));
    }
    for (size_t col = 0; col < n_ && !pool.empty(); ++col) {
      int best = -1, bestval = M_;
      for (size_t i = 0; i < pool.size(); ++i) {
        int64_t x = pool[i].v[col];
        if (!x) continue;
        int v = vp(x, p_);
        if (v < bestval) {
          bestval = v;
          best = static_cast<int>(i);
        }
      }
      if (best < 0) continue;
      Row r = std::move(pool[best]);
      pool.erase(pool.begin() + best);
      int64_t pv = ipow(p_, bestval);
      int64_t unit = r.v[col] / pv;
      scale(r, invmod(unit, mod_));
      r.col = col;
      r.val = bestval;
      for (auto& o : pool) {
        int64_t x = o.v[col];
        if (x) axpy(o, r, mod_ - x / pv);
      }
      Row sat = r;
      scale(sat, ipow(p_, M_ - bestval));
      if (!zero(sat.v)) pool.push_back(std::move(sat));
      pool.erase(std::remove_if(pool.begin(), pool.end(), [&](const Row& x) { return zero(x.v); }), pool.end());
      rows_.push_back(std::move(r));
    }
    for (size_t j = 0; j < rows_.size(); ++j) {
      int64_t pv = ipow(p_, rows_[j].val);
      for (size_t i = 0; i < j; ++i) {
        int64_t k = rows_[i].v[rows_[j].col] / pv;
        if (k) axpy(rows_[i], rows_[j], mod_ - k);
      }
    }
  }

  // Canonical remainder; optionally the combination of generators subtracted.
  std::vector<int64_t> reduce(std::vector<int64_t> v, std::vector<int64_t>* combo = nullptr) const {
    for (auto& x : v) x = posmod(x, mod_);
    if (combo) combo->assign(ngens_, 0);
    for (const Row& r : rows_) {
      int64_t k = v[r.col] / ipow(p_, r.val);
      if (!k) continue;
      for (size_t j = 0; j < n_; ++j) v[j] = posmod(v[j] - mulmod(k, r.v[j], mod_), mod_);
      if (combo)
        for (size_t j = 0; j < ngens_; ++j) (*combo)[j] = (( *combo)[j] + mulmod(k, r.combo[j], mod_)) % mod_;
    }
    return v;
  }
  bool contains(const std::vector<int64_t>& v) const { return zero(reduce(v)); }
  std::optional<std::vector<int64_t>> solve(const std::vector<int64_t>& v) const {
    if (!track_) throw std::logic_error("ModEchelon::solve needs tracking");
    std::vector<int64_t> c;
    if (!zero(reduce(v, &c))) return std::nullopt;
    return c;
  }
  size_t ncols() const { return n_; }
  size_t nrows() const { return rows_.size(); }
  const std::vector<int64_t>& row(size_t i) const { return rows_[i].v; }
  // log_p of the index of the module in (Z/p^M)^n's full lattice, i.e. sum of (M - val).
  int64_t log_size() const {
    int64_t s = 0;
    for (auto& r : rows_) s += M_ - r.val;
    return s;
  }
  friend bool same_module(const ModEchelon& a, const ModEchelon& b) {
    for (auto& r : a.rows_)
      if (!b.contains(r.v)) return false;
    for (auto& r : b.rows_)
      if (!a.contains(r.v)) return false;
    return true;
  }

 private:
  struct Row {
    std::vector<int64_t> v, combo;
    size_t col = 0;
    int val = 0;
  };
  static bool zero(const std::vector<int64_t>& v) {
    for (auto x : v)
      if (x) return false;
    return true;
  }
  void scale(Row& r, int64_t s) const {
    for (auto& x : r.v) x = mulmod(x, s, mod_);
    for (auto& x : r.combo) x = mulmod(x, s, mod_);
  }
  void axpy(Row& dst, const Row& src, int64_t k) const {  // dst += k * src
    for (size_t j = 0; j < n_; ++j) dst.v[j] = (dst.v[j] + mulmod(k, src.v[j], mod_)) % mod_;
    for (size_t j = 0; j < dst.combo.size(); ++j) dst.combo[j] = (dst.combo[j] + mulmod(k, src.combo[j], mod_)) % mod_;
  }
  int64_t p_ = 2;
  int M_ = 1;
  int64_t mod_ = 2;
  size_t n_ = 0, ngens_ = 0;
  bool track_ = false;
  std::vector<Row> rows_;
};

// Homogeneous polynomial of degree n in s_1..s_d with coefficients mod p^prec.
struct HomPoly {
  int d = 0, n = 0;
  int64_t p = 2;
  int prec = 0;
  std::vector<std::vector<int>> mons;  // exponent vectors, graded-lex order
  std::vector<int64_t> coeff;
  bool is_zero() const {
    for (auto c : coeff)
      if (c) return false;
    return true;
  }
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < mons.size(); ++i) {
      if (!coeff[i]) continue;
      if (!s.empty()) s += " + ";
      s += std::to_string(coeff[i]);
      for (int j = 0; j < d; ++j)
        if (mons[i][j]) s += "*s" + std::to_string(j + 1) + (mons[i][j] > 1 ? "^" + std::to_string(mons[i][j]) : "");
    }
    return s.empty() ? "0" : s;
  }
};

// Exponent vectors of total degree n in d variables, lexicographically decreasing.
inline std::vector<std::vector<int>> monomials_of_degree(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(d, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d - 1) {
      a[i] = left;
      out.push_back(a);
      return;
    }
    for (int k = left; k >= 0; --k) {
      a[i] = k;
      rec(i + 1, left - k);
    }
  };
  if (d == 0) {
    if (n == 0) out.push_back({});
    return out;
  }
  rec(0, n);
  return out;
}

// Membership in I(H)^n over Z/p^M for any finite abelian H, through the
// presentation R[H] = R[x]/((1+x_i)^{e_i} - 1), x_i = sigma_i - 1: xi is in I^n
// iff its expansion truncated below degree n lies in the span of the
// truncated relations x^beta f_i.
class AugPowerTest {
 public:
  AugPowerTest() = default;
  AugPowerTest(GroupPtr H, int64_t p, int M, int maxdeg) : H_(std::move(H)), R_(p, M), maxdeg_(maxdeg) {
    d_ = H_->rank();
    for (int k = 0; k <= maxdeg_ + 1; ++k)
      for (auto& a : monomials_of_degree(d_, k)) {
        index_[a] = static_cast<int>(mons_.size());
        mons_.push_back(a);
      }
    int64_t emax = 1;
    for (auto e : H_->factors()) emax = std::max(emax, e);
    binom_.assign(emax + 1, std::vector<int64_t>(maxdeg_ + 2, 0));
    for (int64_t a = 0; a <= emax; ++a) {
      binom_[a][0] = R_.one();
      for (int k = 1; k <= maxdeg_ + 1; ++k)
        binom_[a][k] = a == 0 ? 0 : (binom_[a - 1][k - 1] + binom_[a - 1][k]) % R_.mod;
    }
    W_.resize(maxdeg_ + 2);
    rel_.resize(maxdeg_ + 2);
    for (int n = 1; n <= maxdeg_ + 1; ++n) {
      std::vector<std::vector<int64_t>> gens;
      for (int b = 0; b <= n - 2; ++b)
        for (auto& beta : monomials_of_degree(d_, b))
          for (int i = 0; i < d_; ++i) {
            rel_[n].push_back({beta, i});
            gens.push_back(relation(beta, i, n));
          }
      W_[n] = ModEchelon(p, M, count_below(n));
      W_[n].build(gens, true);
    }
  }

  const GroupPtr& group() const { return H_; }
  const ModRing& ring() const { return R_; }
  int maxdeg() const { return maxdeg_; }

  // Number of monomials of degree < n.
  size_t count_below(int n) const {
    size_t c = 0;
    for (auto& a : mons_)
      if (total(a) < n) ++c;
    return c;
  }

  // Coordinates of xi in the x-monomial basis, degrees < n.
  std::vector<int64_t> expand(const ModElem& xi, int n) const {
    size_t cnt = count_below(n);
    std::vector<int64_t> out(cnt, 0);
    for (int64_t h = 0; h < H_->order(); ++h) {
      int64_t c = xi[h];
      if (!c) continue;
      auto a = H_->coords(h);
      for (size_t m = 0; m < cnt; ++m) {
        int64_t t = c;
        for (int i = 0; i < d_ && t; ++i) t = mulmod(t, binom_[a[i]][mons_[m][i]], R_.mod);
        out[m] = (out[m] + t) % R_.mod;
      }
    }
    return out;
  }

  bool contains(const ModElem& xi, int n) const {
    if (n <= 0) return true;
    if (n > maxdeg_ + 1) throw std::out_of_range("AugPowerTest: degree beyond depth");
    return W_[n].contains(expand(xi, n));
  }

  // Generators of the relation span used by contains(., n).
  std::vector<std::vector<int64_t>> relations(int n) const {
    if (n <= 0 || n > maxdeg_ + 1) throw std::out_of_range("AugPowerTest: degree beyond depth");
    std::vector<std::vector<int64_t>> out;
    for (auto& [beta, i] : rel_[n]) out.push_back(relation(beta, i, n));
    return out;
  }

  // Largest n <= maxdeg+1 with xi in I^n.
  int degree(const ModElem& xi) const {
    int n = 0;
    while (n < maxdeg_ + 1 && contains(xi, n + 1)) ++n;
    return n;
  }

  // Degree-n part of xi in I^n after cancelling the low part with relations,
  // coefficients mod p^M over monomials_of_degree(d, n).
  std::vector<int64_t> leading_form(const ModElem& xi, int n) const {
    if (n > maxdeg_) throw std::out_of_range("AugPowerTest: degree beyond depth");
    std::vector<int64_t> full = expand(xi, n + 1);
    if (n > 0) {
      auto sol = W_[n].solve(std::vector<int64_t>(full.begin(), full.begin() + count_below(n)));
      if (!sol) throw std::invalid_argument("leading_form: element not in I^n");
      for (size_t j = 0; j < sol->size(); ++j) {
        if (!(*sol)[j]) continue;
        auto r = relation(rel_[n][j].first, rel_[n][j].second, n + 1);
        for (size_t m = 0; m < r.size(); ++m) full[m] = posmod(full[m] - mulmod((*sol)[j], r[m], R_.mod), R_.mod);
      }
      for (size_t m = 0; m < count_below(n); ++m)
        if (full[m]) throw std::logic_error("leading_form: low part did not cancel");
    }
    std::vector<int64_t> out;
    for (auto& a : monomials_of_degree(d_, n)) out.push_back(full[index_.at(a)]);
    return out;
  }

 private:
  static int total(const std::vector<int>& a) {
    int s = 0;
    for (int x : a) s += x;
    return s;
  }
  // Truncation below degree n of x^beta * ((1+x_i)^{e_i} - 1).
  std::vector<int64_t> relation(const std::vector<int>& beta, int i, int n) const {
    std::vector<int64_t> v(count_below(n), 0);
    int64_t e = H_->factors()[i];
    int b = total(beta);
    for (int k = 1; b + k < n; ++k) {
      std::vector<int> a = beta;
      a[i] += k;
      Int c = k <= e ? binom(static_cast<unsigned long>(e), static_cast<unsigned long>(k)) : Int(0);
      v[index_.at(a)] = R_.from_int(c);
    }
    return v;
  }

  GroupPtr H_;
  ModRing R_;
  int maxdeg_ = 0, d_ = 0;
  std::vector<std::vector<int>> mons_;
  std::map<std::vector<int>, int> index_;
  std::vector<std::vector<int64_t>> binom_;
  std::vector<ModEchelon> W_;
  std::vector<std::vector<std::pair<std::vector<int>, int>>> rel_;
};

struct AugClass {
  int n = 0;
  bool at_least = false;  // membership holds up to the filtration depth
  ModElem rep;
  int M = 0;
  int Mprime = 0;  // certified precision of leading-form data, 0 if n >= p
  bool relative = false;
};

// I(H)^n over Z/p^M for a finite abelian p-group H, n <= D. Dense Howell
// bases are built by closing {h - 1} under multiplication by generators.
class AugFiltration {
 public:
  AugFiltration() = default;
  AugFiltration(GroupPtr H, int64_t p, int M, int D, bool dense = true)
      : H_(H), R_(p, M), D_(D), test_(H, p, M, D) {
    if (!H_->is_p_group(p)) throw std::invalid_argument("AugFiltration: group is not a p-group");
    if (dense) build_dense();
  }

  const GroupPtr& group() const { return H_; }
  const ModRing& ring() const { return R_; }
  int64_t p() const { return R_.p; }
  int M() const { return R_.M; }
  int depth() const { return D_; }
  const AugPowerTest& test() const { return test_; }

  bool contains(const ModElem& xi, int n) const { return test_.contains(xi, n); }
  bool has_dense() const { return !dense_.empty(); }
  const ModEchelon& dense_basis(int n) const { return dense_.at(n); }
  bool dense_contains(const ModElem& xi, int n) const { return dense_.at(n).contains(xi.coeffs()); }

  // Residue class with maximal n (capped at D + 1, flagged as a lower bound).
  AugClass residue_class(const ModElem& xi) const {
    AugClass c;
    c.n = test_.degree(xi);
    c.at_least = c.n == D_ + 1;
    c.rep = xi;
    c.M = R_.M;
    c.Mprime = c.n < R_.p && !c.at_least ? certified_precision_or_zero(c.n) : 0;
    return c;
  }
  bool same_class(const ModElem& a, const ModElem& b, int n) const { return test_.contains(a - b, n + 1); }

  // Precision of degree-n leading forms: min(M, smallest exponent valuation)
  // minus n * ceil(log_p(n + 1)); n must be below p.
  int certified_precision(int n) const {
    if (n >= R_.p) throw std::domain_error("degree " + std::to_string(n) + " >= p: precision not certified");
    int mp = certified_precision_or_zero(n);
    if (mp <= 0) throw std::domain_error("precision exhausted at degree " + std::to_string(n));
    return mp;
  }

  // d_E of the class of xi in I^n/I^{n+1} for the factor-generator basis.
  HomPoly d_E(const ModElem& xi, int n) const {
    HomPoly f;
    f.d = H_->rank();
    f.n = n;
    f.p = R_.p;
    f.prec = certified_precision(n);
    f.mons = monomials_of_degree(f.d, n);
    int64_t m = ipow(R_.p, f.prec);
    for (int64_t c : test_.leading_form(xi, n)) f.coeff.push_back(c % m);
    return f;
  }

 private:
  int certified_precision_or_zero(int n) const {
    int nmin = R_.M;
    for (auto e : H_->factors()) nmin = std::min(nmin, vp(e, R_.p));
    int lg = 0;
    while (ipow(R_.p, lg) < n + 1) ++lg;
    return std::max(0, nmin - n * lg);
  }
  void build_dense() {
    int64_t N = H_->order();
    dense_.resize(D_ + 2);
    std::vector<std::vector<int64_t>> gens;
    for (int64_t g = 0; g < N; ++g) {
      std::vector<int64_t> v(N, 0);
      v[g] = 1;
      gens.push_back(v);
    }
    dense_[0] = ModEchelon(R_.p, R_.M, N);
    dense_[0].build(gens);
    for (int n = 1; n <= D_ + 1; ++n) {
      std::vector<std::vector<int64_t>> next;
      for (size_t r = 0; r < dense_[n - 1].nrows(); ++r) {
        const auto& b = dense_[n - 1].row(r);
        for (int i = 0; i < H_->rank(); ++i) {
          std::vector<int64_t> v(N, 0);
          int64_t s = H_->gen(i);
          for (int64_t g = 0; g < N; ++g) {
            if (!b[g]) continue;
            int64_t h = H_->add(g, s);
            v[h] = (v[h] + b[g]) % R_.mod;
            v[g] = posmod(v[g] - b[g], R_.mod);
          }
          next.push_back(v);
        }
      }
      dense_[n] = ModEchelon(R_.p, R_.M, N);
      dense_[n].build(next);
    }
  }

  GroupPtr H_;
  ModRing R_;
  int D_ = 0;
  AugPowerTest test_;
  std::vector<ModEchelon> dense_;
};

// Automorphism of H sending the i-th entry of `basis` to the i-th factor
// generator; pushing along it expresses d_E in the new basis.
inline GroupHom basis_change(const GroupPtr& H, const std::vector<int64_t>& basis) {
  GroupHom fwd = hom_from_generators(H, H, basis);
  GroupHom inv{H, H, std::vector<int64_t>(H->order(), -1)};
  for (int64_t g = 0; g < H->order(); ++g) {
    if (inv.map[fwd.map[g]] >= 0) throw std::invalid_argument("basis_change: not a basis");
    inv.map[fwd.map[g]] = g;
  }
  return inv;
}

// Relative filtration I_{R,H}^n in R[G] via coset components.
class RelativeFiltration {
 public:
  RelativeFiltration() = default;
  RelativeFiltration(GroupPtr G, const Subgroup& H, int64_t p, int M, int D, bool dense = false)
      : G_(G), Hsub_(H), q_(quotient(G, H)), emb_(embed_subgroup(G, H)), filt_(emb_.H, p, M, D, dense) {}

  const GroupPtr& group() const { return G_; }
  const Subgroup& subgroup() const { return Hsub_; }
  const Quotient& gamma() const { return q_; }
  const EmbeddedSubgroup& embedded() const { return emb_; }
  const AugFiltration& filtration() const { return filt_; }

  // Component at each Gamma element gamma: h -> xi(rep(gamma) + h).
  std::vector<ModElem> decompose(const ModElem& xi) const {
    std::vector<ModElem> out;
    for (int64_t gam = 0; gam < q_.Q->order(); ++gam) {
      ModElem c(emb_.H, xi.ring());
      for (int64_t h = 0; h < emb_.H->order(); ++h) c[h] = xi[G_->add(q_.section[gam], emb_.incl.map[h])];
      out.push_back(c);
    }
    return out;
  }
  ModElem compose(const std::vector<ModElem>& comps) const {
    ModElem xi(G_, comps.at(0).ring());
    for (int64_t gam = 0; gam < q_.Q->order(); ++gam)
      for (int64_t h = 0; h < emb_.H->order(); ++h) xi[G_->add(q_.section[gam], emb_.incl.map[h])] = comps[gam][h];
    return xi;
  }

  bool contains(const ModElem& xi, int n) const {
    for (auto& c : decompose(xi))
      if (!filt_.contains(c, n)) return false;
    return true;
  }
  int degree(const ModElem& xi) const {
    int n = filt_.depth() + 1;
    for (auto& c : decompose(xi)) n = std::min(n, filt_.test().degree(c));
    return n;
  }
  AugClass residue_class(const ModElem& xi) const {
    AugClass c;
    c.n = degree(xi);
    c.at_least = c.n == filt_.depth() + 1;
    c.rep = xi;
    c.M = filt_.M();
    c.relative = true;
    c.Mprime = 0;
    if (!c.at_least && c.n < filt_.p()) {
      try {
        c.Mprime = filt_.certified_precision(c.n);
      } catch (const std::domain_error&) {
      }
    }
    return c;
  }

  // Per-coset leading forms of a class in I_H^n / I_H^{n+1}.
  std::vector<HomPoly> d_E(const ModElem& xi, int n) const {
    std::vector<HomPoly> out;
    for (auto& c : decompose(xi)) out.push_back(filt_.d_E(c, n));
    return out;
  }

  // Val_{sigma,n}: coefficient of s^n, for H cyclic with generator sigma (an
  // element of the embedded subgroup's own indexing). Output over Z/p^{M'}[Gamma].
  ModElem val_map(const ModElem& xi, int n, int64_t sigma) const {
    if (emb_.H->rank() != 1) throw std::invalid_argument("val_map: subgroup is not cyclic");
    int64_t e = emb_.H->factors()[0];
    int64_t u = emb_.H->coords(sigma)[0];
    if (std::gcd(u, e) != 1) throw std::invalid_argument("val_map: sigma is not a generator");
    int prec = filt_.certified_precision(n);
    ModRing out_ring(filt_.p(), prec);
    // sigma = gen^u, so Val_sigma = u^{-n} Val_gen.
    int64_t scale = powmod(invmod(u, out_ring.mod), n, out_ring.mod);
    ModElem out(q_.Q, out_ring);
    auto comps = decompose(xi);
    for (int64_t gam = 0; gam < q_.Q->order(); ++gam) {
      auto lf = filt_.test().leading_form(comps[gam], n);
      out[gam] = mulmod(lf.at(0) % out_ring.mod, scale, out_ring.mod);
    }
    return out;
  }

 private:
  GroupPtr G_;
  Subgroup Hsub_;
  Quotient q_;
  EmbeddedSubgroup emb_;
  AugFiltration filt_;
};

// The yen map for G = Gamma' x Z/e' (Gamma' factors first, the cyclic factor
// last) and H = varpi * Z/e': (g, h) -> (g, h mod varpi, h) in
// Gamma' x Z/varpi x Z/(e'/varpi), where varpi * a in H is identified with a.
struct YenData {
  GroupPtr src, dst;
  GroupHom map;
};

inline YenData yen_setup(const FinAbGroup& gamma_prime, int64_t e, int64_t varpi) {
  if (e % varpi) throw std::invalid_argument("yen: index does not divide the cyclic order");
  YenData y;
  y.src = direct_product(gamma_prime, FinAbGroup({e}));
  y.dst = direct_product(*direct_product(gamma_prime, FinAbGroup({varpi})), FinAbGroup({e / varpi}));
  y.map = {y.src, y.dst, std::vector<int64_t>(y.src->order())};
  int64_t ng = gamma_prime.order();
  for (int64_t g = 0; g < y.src->order(); ++g) {
    int64_t gp = g % ng, h = g / ng;
    int64_t img = gp + ng * ((h % varpi) + varpi * (h % (e / varpi)));
    y.map.map[g] = img;
  }
  return y;
}

template <class R>
GroupRingElem<R> yen_map(const GroupRingElem<R>& xi, const YenData& y) {
  if (!(*xi.group() == *y.src)) throw std::invalid_argument("yen_map: group is not the displayed product");
  return push(xi, y.map);
}

}  // namespace ffstark
