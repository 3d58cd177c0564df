#pragma once

// Independent reference implementations used only by the tests. They take
// deliberately different routes from the library code (full Gram matrices
// with halves, Gaussian elimination, interpolation, divisor search, naive
// scans) so that agreement is meaningful.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "qpl/forms.hpp"

namespace oracle {

using qpl::BigInt;
using qpl::Rational;

using RMat = std::vector<std::vector<Rational>>;

/// Gram matrix with halved off-diagonal entries.
inline RMat gram(const qpl::PairOfQuadrics<BigInt>& p, bool first) {
  RMat m(4, std::vector<Rational>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const BigInt& c = first ? p.a_at(std::min(i, j), std::max(i, j)) : p.b_at(std::min(i, j), std::max(i, j));
      m[i][j] = i == j ? Rational(c) : Rational(c, 2);
      m[i][j].canonicalize();
    }
  return m;
}

inline Rational det_gauss(RMat m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m[piv][k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    det *= m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const Rational f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return det;
}

/// 16 det(A x + B y) by evaluating at y = 1, x = 0..4 and at (1, 0), then
/// Lagrange interpolation of the dehomogenised quartic.
inline std::array<BigInt, 5> resolvent_by_interpolation(const qpl::PairOfQuadrics<BigInt>& p) {
  const RMat A = gram(p, true);
  const RMat B = gram(p, false);
  auto value = [&](const Rational& x, const Rational& y) {
    RMat m(4, std::vector<Rational>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = A[i][j] * x + B[i][j] * y;
    return Rational(16 * det_gauss(m));
  };
  // g(x) = f(x, 1) has degree <= 4: interpolate at x = 0..4.
  std::array<Rational, 5> ys;
  for (int i = 0; i < 5; ++i) ys[i] = value(Rational(i), Rational(1));
  // Newton divided differences, then expand to monomials.
  std::array<Rational, 5> dd = ys;
  for (int level = 1; level < 5; ++level)
    for (int i = 4; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / Rational(level);
  std::vector<Rational> poly{dd[4]};
  for (int i = 3; i >= 0; --i) {
    // poly = poly * (x - i) + dd[i]
    std::vector<Rational> next(poly.size() + 1, Rational(0));
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= poly[k] * i;
    }
    next[0] += dd[i];
    poly = next;
  }
  poly.resize(5, Rational(0));
  std::array<BigInt, 5> out;  // coefficient of x^(4-k) y^k is poly[4-k]
  for (int k = 0; k < 5; ++k) {
    const Rational c = poly[4 - k];
    if (c.get_den() != 1) throw std::runtime_error("non-integral resolvent coefficient");
    out[k] = c.get_num();
  }
  if (out[0] != value(Rational(1), Rational(0))) throw std::runtime_error("interpolation mismatch");
  return out;
}

/// g4 * M * g4^t on full rational Gram matrices.
inline RMat congruence(const qpl::Mat4<BigInt>& g, const RMat& m) {
  RMat t(4, std::vector<Rational>(4, Rational(0)));
  RMat r(4, std::vector<Rational>(4, Rational(0)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) t[i][j] += Rational(g[i][k]) * m[k][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += t[i][k] * Rational(g[j][k]);
  return r;
}

/// Naive action through Gram matrices, converted back to coordinates.
inline qpl::PairOfQuadrics<BigInt> act_via_gram(const qpl::Mat2<BigInt>& g2, const qpl::Mat4<BigInt>& g4,
                                               const qpl::PairOfQuadrics<BigInt>& p) {
  const RMat a = congruence(g4, gram(p, true));
  const RMat b = congruence(g4, gram(p, false));
  qpl::PairOfQuadrics<BigInt> out;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const Rational na = Rational(g2[0][0]) * a[i][j] + Rational(g2[0][1]) * b[i][j];
      const Rational nb = Rational(g2[1][0]) * a[i][j] + Rational(g2[1][1]) * b[i][j];
      const Rational ca = i == j ? na : Rational(2 * na);
      const Rational cb = i == j ? nb : Rational(2 * nb);
      if (ca.get_den() != 1 || cb.get_den() != 1) throw std::runtime_error("non-integral image");
      out.a_at(i, j) = ca.get_num();
      out.b_at(i, j) = cb.get_num();
    }
  return out;
}

inline std::vector<BigInt> divisors(const BigInt& n_in) {
  BigInt n = abs(n_in);
  std::vector<BigInt> out;
  for (BigInt d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  }
  return out;
}

/// Rational root search over divisor pairs r | e, s | a.
inline std::optional<std::pair<BigInt, BigInt>> rational_root_by_divisors(const qpl::BinaryQuartic<BigInt>& f) {
  if (f[0] == 0) return std::make_pair(BigInt(1), BigInt(0));
  if (f[4] == 0) return std::make_pair(BigInt(0), BigInt(1));
  for (const BigInt& s : divisors(f[0]))
    for (const BigInt& r0 : divisors(f[4]))
      for (int sign : {1, -1}) {
        const BigInt r = sign * r0;
        if (gcd(r, s) != 1) continue;
        if (f(r, s) == 0) return std::make_pair(r, s);
      }
  return std::nullopt;
}

inline qpl::PairOfQuadrics<BigInt> random_pair(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  qpl::PairOfQuadrics<BigInt> p;
  for (int k = 0; k < 20; ++k) p.coord(k) = d(rng);
  return p;
}

inline qpl::Mat2<BigInt> random_mat2(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  qpl::Mat2<BigInt> m;
  for (auto& row : m)
    for (auto& v : row) v = d(rng);
  return m;
}

inline qpl::Mat4<BigInt> random_mat4(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  qpl::Mat4<BigInt> m;
  for (auto& row : m)
    for (auto& v : row) v = d(rng);
  return m;
}

/// Random element of SL_n(Z) as a product of elementary matrices.
inline qpl::Mat4<BigInt> random_sl4(std::mt19937_64& rng, int steps = 6) {
  qpl::Mat4<BigInt> m = qpl::identity4<BigInt>();
  std::uniform_int_distribution<int> idx(0, 3);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int s = 0; s < steps; ++s) {
    const int i = idx(rng);
    int j = idx(rng);
    if (i == j) j = (j + 1) % 4;
    const int k = c(rng);
    for (int col = 0; col < 4; ++col) m[i][col] += k * m[j][col];
  }
  return m;
}

inline qpl::Mat2<BigInt> random_sl2(std::mt19937_64& rng, int steps = 4) {
  qpl::Mat2<BigInt> m = qpl::identity2<BigInt>();
  std::uniform_int_distribution<int> c(-2, 2);
  for (int s = 0; s < steps; ++s) {
    const int k = c(rng);
    if (s % 2 == 0) {
      for (int col = 0; col < 2; ++col) m[0][col] += k * m[1][col];
    } else {
      for (int col = 0; col < 2; ++col) m[1][col] += k * m[0][col];
    }
  }
  return m;
}

}  // namespace oracle
