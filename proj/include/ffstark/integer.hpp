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

// Exact integer helpers: GMP aliases, modular arithmetic on machine words,
// and Smith/Hermite reduction of integer matrices.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ffstark {

using Int = mpz_class;
using Rat = mpq_class;
using IntMat = std::vector<std::vector<Int>>;

inline std::string dec(const Int& x) { return x.get_str(); }
inline std::string dec(const Rat& x) { return x.get_str(); }

inline int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

inline int64_t posmod(int64_t a, int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

inline int64_t mulmod(int64_t a, int64_t b, int64_t m) {
  return static_cast<int64_t>(static_cast<__int128>(a) * b % m);
}

inline int64_t powmod(int64_t b, uint64_t e, int64_t m) {
  int64_t r = 1 % m;
  b = posmod(b, m);
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

inline int64_t invmod(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, a1 = posmod(a, m);
  while (a1) {
    int64_t qt = g / a1;
    std::swap(g, a1);
    a1 -= qt * g;
    std::swap(x, x1);
    x1 -= qt * x;
  }
  if (g != 1) throw std::domain_error("invmod: not invertible");
  return posmod(x, m);
}

// p-adic valuation; a must be nonzero.
inline int vp(int64_t a, int64_t p) {
  if (a == 0) throw std::domain_error("vp of zero");
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

inline int vp(const Int& a, int64_t p) {
  if (a == 0) throw std::domain_error("vp of zero");
  Int x = a;
  int v = 0;
  while (mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p))) {
    x /= static_cast<unsigned long>(p);
    ++v;
  }
  return v;
}

inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<int64_t> prime_factors(int64_t n) {
  std::vector<int64_t> out;
  for (int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline Int binom(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Reduce x into [0, m).
inline int64_t reduce_mod(const Int& x, int64_t m) {
  Int r = x % m;
  if (r < 0) r += m;
  return r.get_si();
}

inline IntMat identity_mat(size_t n) {
  IntMat I(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

// U * A * V = D with U, V unimodular and D diagonal, d_i | d_{i+1}, d_i >= 0.
struct SmithForm {
  IntMat U, D, V;
  size_t rank = 0;
};

inline SmithForm smith_form(const IntMat& A, size_t ncols_hint = 0) {
  size_t m = A.size();
  size_t n = m ? A[0].size() : ncols_hint;
  SmithForm s{identity_mat(m), A, identity_mat(n), 0};
  IntMat& D = s.D;
  auto swap_rows = [&](size_t a, size_t b) {
    std::swap(D[a], D[b]);
    std::swap(s.U[a], s.U[b]);
  };
  auto swap_cols = [&](size_t a, size_t b) {
    for (auto& r : D) std::swap(r[a], r[b]);
    for (auto& r : s.V) std::swap(r[a], r[b]);
  };
  auto add_row = [&](size_t dst, size_t src, const Int& c) {  // row_dst += c*row_src
    for (size_t j = 0; j < n; ++j) D[dst][j] += c * D[src][j];
    for (size_t j = 0; j < m; ++j) s.U[dst][j] += c * s.U[src][j];
  };
  auto add_col = [&](size_t dst, size_t src, const Int& c) {
    for (size_t i = 0; i < m; ++i) D[i][dst] += c * D[i][src];
    for (size_t i = 0; i < n; ++i) s.V[i][dst] += c * s.V[i][src];
  };
  size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      size_t pi = m, pj = n;
      for (size_t i = t; i < m; ++i)
        for (size_t j = t; j < n; ++j)
          if (D[i][j] != 0 && (pi == m || abs(D[i][j]) < abs(D[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == m) goto done;
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (size_t i = t + 1; i < m; ++i) {
        if (D[i][t] == 0) continue;
        Int qt;
        mpz_fdiv_q(qt.get_mpz_t(), D[i][t].get_mpz_t(), D[t][t].get_mpz_t());
        add_row(i, t, -qt);
        if (D[i][t] != 0) clean = false;
      }
      for (size_t j = t + 1; j < n; ++j) {
        if (D[t][j] == 0) continue;
        Int qt;
        mpz_fdiv_q(qt.get_mpz_t(), D[t][j].get_mpz_t(), D[t][t].get_mpz_t());
        add_col(j, t, -qt);
        if (D[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      size_t bad = m;
      for (size_t i = t + 1; i < m && bad == m; ++i)
        for (size_t j = t + 1; j < n; ++j)
          if (D[i][j] % D[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad == m) break;
      add_row(t, bad, 1);
    }
    if (D[t][t] < 0) {
      for (size_t j = 0; j < n; ++j) D[t][j] = -D[t][j];
      for (size_t j = 0; j < m; ++j) s.U[t][j] = -s.U[t][j];
    }
  }
done:
  s.rank = t;
  return s;
}

// Row-style Hermite normal form; returns the nonzero rows (a basis of the row lattice).
inline IntMat hermite_rows(IntMat A) {
  if (A.empty()) return A;
  size_t n = A[0].size();
  size_t r = 0;
  for (size_t c = 0; c < n && r < A.size(); ++c) {
    for (;;) {
      size_t piv = A.size();
      for (size_t i = r; i < A.size(); ++i)
        if (A[i][c] != 0 && (piv == A.size() || abs(A[i][c]) < abs(A[piv][c]))) piv = i;
      if (piv == A.size()) break;
      std::swap(A[r], A[piv]);
      bool done = true;
      for (size_t i = r + 1; i < A.size(); ++i) {
        if (A[i][c] == 0) continue;
        Int qt;
        mpz_fdiv_q(qt.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
        for (size_t j = c; j < n; ++j) A[i][j] -= qt * A[r][j];
        if (A[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (r < A.size() && A[r][c] != 0) {
      if (A[r][c] < 0)
        for (auto& x : A[r]) x = -x;
      for (size_t i = 0; i < r; ++i) {
        Int qt;
        mpz_fdiv_q(qt.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
        for (size_t j = c; j < n; ++j) A[i][j] -= qt * A[r][j];
      }
      ++r;
    }
  }
  A.resize(r);
  return A;
}

// Basis of {x in Z^n : A x = 0} as rows.
inline IntMat integer_kernel(const IntMat& A, size_t n) {
  SmithForm s = smith_form(A, n);
  IntMat out;
  for (size_t j = s.rank; j < n; ++j) {
    std::vector<Int> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = s.V[i][j];
    out.push_back(v);
  }
  return hermite_rows(out);
}

inline Int det_bareiss(IntMat A) {
  size_t n = A.size();
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (A[k][k] == 0) {
      size_t i = k + 1;
      while (i < n && A[i][k] == 0) ++i;
      if (i == n) return 0;
      std::swap(A[k], A[i]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]);
        mpz_divexact(A[i][j].get_mpz_t(), A[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = A[k][k];
  }
  return sign * A[n - 1][n - 1];
}

inline Rat det_rat(std::vector<std::vector<Rat>> A) {
  size_t n = A.size();
  Rat d = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && A[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(A[piv], A[c]);
      d = -d;
    }
    d *= A[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (A[i][c] == 0) continue;
      Rat f = A[i][c] / A[c][c];
      for (size_t j = c; j < n; ++j) A[i][j] -= f * A[c][j];
    }
  }
  return d;
}

}  // namespace ffstark
