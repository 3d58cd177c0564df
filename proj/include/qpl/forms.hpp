#pragma once

// Pairs of quaternary quadratic forms, the action of GL2 x GL4 on them and
// the binary quartic resolvent det(2A x + 2B y).
//
// A pair stores the integral coordinates a_ij, b_ij (i <= j). The Gram
// matrix A has diagonal a_ii and off-diagonal a_ij / 2, so 2A has even
// diagonal 2 a_ii and off-diagonal a_ij. Nothing below ever forms A itself.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpl/domain.hpp"
#include "qpl/poly.hpp"

namespace qpl {

template <class T>
using Mat2 = std::array<std::array<T, 2>, 2>;
template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;

/// Position of (i, j), i <= j, in the row-major upper-triangular order
/// 11,12,13,14,22,23,24,33,34,44 (0-based indices).
constexpr int sym_index(int i, int j) {
  constexpr int table[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
  return table[i][j];
}

/// Coordinate labels in canonical order: a11..a44 then b11..b44.
const std::array<std::string, 20>& coordinate_labels();
/// Index 0..19 of a label such as "a14" or "b22"; nullopt if unknown.
std::optional<int> coordinate_index(std::string_view label);

template <class T>
struct PairOfQuadrics {
  std::array<T, 10> a{};
  std::array<T, 10> b{};

  PairOfQuadrics() {
    a.fill(T(0));
    b.fill(T(0));
  }

  T& a_at(int i, int j) { return a[sym_index(i, j)]; }
  T& b_at(int i, int j) { return b[sym_index(i, j)]; }
  const T& a_at(int i, int j) const { return a[sym_index(i, j)]; }
  const T& b_at(int i, int j) const { return b[sym_index(i, j)]; }

  /// Coordinate k in canonical order (0..9 -> a, 10..19 -> b).
  T& coord(int k) { return k < 10 ? a[k] : b[k - 10]; }
  const T& coord(int k) const { return k < 10 ? a[k] : b[k - 10]; }

  /// Entry (i, j) of 2A (first == true) or 2B.
  T doubled(bool first, int i, int j) const {
    const auto& c = first ? a : b;
    if (i == j) return T(c[sym_index(i, i)] * T(2));
    return i < j ? c[sym_index(i, j)] : c[sym_index(j, i)];
  }

  Mat4<T> doubled_matrix(bool first) const {
    Mat4<T> m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = doubled(first, i, j);
    return m;
  }

  /// Q_A(x) = x^t A x (first) or Q_B(x).
  template <class U>
  U quadric(bool first, const std::array<U, 4>& x) const {
    const auto& c = first ? a : b;
    U acc(0);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) acc = U(acc + U(c[sym_index(i, j)]) * x[i] * x[j]);
    return acc;
  }

  PairOfQuadrics scaled(const T& s) const {
    PairOfQuadrics r = *this;
    for (int k = 0; k < 20; ++k) r.coord(k) = T(r.coord(k) * s);
    return r;
  }

  bool is_zero_pair() const {
    for (int k = 0; k < 20; ++k)
      if (!is_zero(coord(k))) return false;
    return true;
  }

  friend bool operator==(const PairOfQuadrics& x, const PairOfQuadrics& y) {
    for (int k = 0; k < 20; ++k)
      if (!(x.coord(k) == y.coord(k))) return false;
    return true;
  }
  friend bool operator!=(const PairOfQuadrics& x, const PairOfQuadrics& y) { return !(x == y); }
};

/// Convert coordinates between domains through a caller-supplied map.
template <class U, class T, class F>
PairOfQuadrics<U> map_pair(const PairOfQuadrics<T>& p, F&& f) {
  PairOfQuadrics<U> r;
  for (int k = 0; k < 20; ++k) r.coord(k) = f(p.coord(k));
  return r;
}

/// a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4, stored as {a, b, c, d, e}.
template <class T>
struct BinaryQuartic {
  std::array<T, 5> c{};

  BinaryQuartic() { c.fill(T(0)); }
  BinaryQuartic(T a, T b, T cc, T d, T e) : c{a, b, cc, d, e} {}

  /// Coefficient of x^(4-k) y^k.
  const T& operator[](int k) const { return c[k]; }
  T& operator[](int k) { return c[k]; }

  template <class U>
  U operator()(const U& x, const U& y) const {
    U acc(0);
    for (int k = 0; k < 5; ++k) {
      U term = U(c[k]);
      for (int i = 0; i < 4 - k; ++i) term = U(term * x);
      for (int i = 0; i < k; ++i) term = U(term * y);
      acc = U(acc + term);
    }
    return acc;
  }

  bool is_zero_form() const {
    for (const auto& v : c)
      if (!is_zero(v)) return false;
    return true;
  }

  BinaryQuartic scaled(const T& s) const {
    BinaryQuartic r = *this;
    for (auto& v : r.c) v = T(v * s);
    return r;
  }

  /// The form (x, y) -> f((x, y) . g) = f(r x + t y, s x + u y) for g = [[r, s], [t, u]].
  BinaryQuartic substituted(const Mat2<T>& g) const {
    // Linear forms as (coef of x, coef of y).
    const std::array<T, 2> X{g[0][0], g[1][0]};
    const std::array<T, 2> Y{g[0][1], g[1][1]};
    BinaryQuartic out;
    for (int k = 0; k < 5; ++k) {
      std::vector<T> prod{c[k]};
      for (int i = 0; i < 4 - k; ++i) prod = multiply_linear(prod, X);
      for (int i = 0; i < k; ++i) prod = multiply_linear(prod, Y);
      for (int m = 0; m < 5; ++m) out.c[m] = T(out.c[m] + prod[m]);
    }
    return out;
  }

  friend bool operator==(const BinaryQuartic& x, const BinaryQuartic& y) {
    for (int k = 0; k < 5; ++k)
      if (!(x.c[k] == y.c[k])) return false;
    return true;
  }
  friend bool operator!=(const BinaryQuartic& x, const BinaryQuartic& y) { return !(x == y); }

  /// Multiply a binary form (coefficients of x^n, x^{n-1} y, ...) by (l0 x + l1 y).
  static std::vector<T> multiply_linear(const std::vector<T>& f, const std::array<T, 2>& l) {
    std::vector<T> r(f.size() + 1, T(0));
    for (std::size_t i = 0; i < f.size(); ++i) {
      r[i] = T(r[i] + f[i] * l[0]);
      r[i + 1] = T(r[i + 1] + f[i] * l[1]);
    }
    return r;
  }
};

template <class T>
T det2(const Mat2<T>& m) {
  return T(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
}

/// Division-free 4x4 determinant (Laplace expansion along the first row).
template <class T>
T det4(const Mat4<T>& m) {
  auto minor3 = [&](int skip) {
    int cols[3];
    int n = 0;
    for (int j = 0; j < 4; ++j)
      if (j != skip) cols[n++] = j;
    const auto& r1 = m[1];
    const auto& r2 = m[2];
    const auto& r3 = m[3];
    return T(r1[cols[0]] * (r2[cols[1]] * r3[cols[2]] - r2[cols[2]] * r3[cols[1]]) -
             r1[cols[1]] * (r2[cols[0]] * r3[cols[2]] - r2[cols[2]] * r3[cols[0]]) +
             r1[cols[2]] * (r2[cols[0]] * r3[cols[1]] - r2[cols[1]] * r3[cols[0]]));
  };
  T acc(0);
  for (int j = 0; j < 4; ++j) {
    const T term = T(m[0][j] * minor3(j));
    acc = (j % 2 == 0) ? T(acc + term) : T(acc - term);
  }
  return acc;
}

template <class T>
Mat2<T> mul(const Mat2<T>& x, const Mat2<T>& y) {
  Mat2<T> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = T(x[i][0] * y[0][j] + x[i][1] * y[1][j]);
  return r;
}

template <class T>
Mat4<T> mul(const Mat4<T>& x, const Mat4<T>& y) {
  Mat4<T> r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      T acc(0);
      for (int k = 0; k < 4; ++k) acc = T(acc + x[i][k] * y[k][j]);
      r[i][j] = acc;
    }
  return r;
}

template <class T>
Mat2<T> identity2() {
  return Mat2<T>{{{T(1), T(0)}, {T(0), T(1)}}};
}
template <class T>
Mat4<T> identity4() {
  Mat4<T> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = T(i == j ? 1 : 0);
  return m;
}

/// Scale factor that brings c to the canonical unit of its domain, if c is a
/// unit (fields: 1/c; Z: sign; Z/mZ: the unit u minimising u*c).
std::optional<BigInt> canonical_scale(const BigInt& c);
std::optional<Rational> canonical_scale(const Rational& c);
std::optional<ModInt> canonical_scale(const ModInt& c);
std::optional<double> canonical_scale(double c);

/// Determinant-one condition, with a relative tolerance for doubles.
bool det_product_is_one(const BigInt& d);
bool det_product_is_one(const Rational& d);
bool det_product_is_one(const ModInt& d);
bool det_product_is_one(double d);
bool det_product_is_one(std::int64_t d);

/// (g2, g4) with det(g2) det(g4) = 1, taken modulo (l^-2 I2, l I4).
template <class T>
class GroupElement {
 public:
  GroupElement(Mat2<T> g2, Mat4<T> g4) : g2_(std::move(g2)), g4_(std::move(g4)) {
    const T d = T(det2(g2_) * det4(g4_));
    if (!det_product_is_one(d))
      fail(ErrorKind::InvalidArgument, "det(g2) det(g4) = " + to_string(d) + ", expected 1");
  }

  static GroupElement identity() { return GroupElement(identity2<T>(), identity4<T>()); }

  /// The scalar element (l^-2 I2, l I4); acts trivially.
  static GroupElement scaling(const T& lambda, const T& lambda_inv) {
    Mat2<T> g2 = identity2<T>();
    Mat4<T> g4 = identity4<T>();
    const T l2inv = T(lambda_inv * lambda_inv);
    g2[0][0] = l2inv;
    g2[1][1] = l2inv;
    for (int i = 0; i < 4; ++i) g4[i][i] = lambda;
    return GroupElement(g2, g4);
  }

  const Mat2<T>& g2() const { return g2_; }
  const Mat4<T>& g4() const { return g4_; }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return GroupElement(mul(x.g2_, y.g2_), mul(x.g4_, y.g4_));
  }

  /// Representative with the first nonzero entry of g4 equal to the
  /// domain's canonical unit. Returns *this if no such scaling exists.
  GroupElement canonical() const {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (is_zero(g4_[i][j])) continue;
        const auto lambda = canonical_scale(g4_[i][j]);
        if (!lambda) return *this;
        // (l^-2 g2, l g4): l^-2 = (1/l)^2 and 1/l exists since l is a unit.
        const T linv = inverse_unit(*lambda);
        Mat2<T> g2 = g2_;
        Mat4<T> g4 = g4_;
        for (auto& row : g2)
          for (auto& v : row) v = T(v * linv * linv);
        for (auto& row : g4)
          for (auto& v : row) v = T(v * *lambda);
        return GroupElement(g2, g4);
      }
    return *this;
  }

  friend bool operator==(const GroupElement& x, const GroupElement& y) { return scaled_equal(x, y); }
  friend bool operator!=(const GroupElement& x, const GroupElement& y) { return !(x == y); }

 private:
  static bool scaled_equal(const GroupElement& x, const GroupElement& y) {
    const GroupElement cx = x.canonical();
    const GroupElement cy = y.canonical();
    return cx.g2_ == cy.g2_ && cx.g4_ == cy.g4_;
  }
  static T inverse_unit(const T& u);

  Mat2<T> g2_;
  Mat4<T> g4_;
};

// Z/mZ with composite m: the canonical representative is not unique when the
// leading entry is a zero divisor, so compare against every unit scaling.
template <>
inline bool GroupElement<ModInt>::scaled_equal(const GroupElement& x, const GroupElement& y) {
  std::int64_t m = 0;
  for (const auto& row : x.g4_)
    for (const auto& v : row)
      if (v.bound()) m = v.modulus();
  if (m == 0) return x.g2_ == y.g2_ && x.g4_ == y.g4_;
  for (std::int64_t l = 1; l < m; ++l) {
    const ModInt lambda(l, m);
    if (!lambda.is_unit()) continue;
    const ModInt linv = lambda.inverse();
    bool same = true;
    for (int i = 0; i < 2 && same; ++i)
      for (int j = 0; j < 2 && same; ++j) same = x.g2_[i][j] * linv * linv == y.g2_[i][j];
    for (int i = 0; i < 4 && same; ++i)
      for (int j = 0; j < 4 && same; ++j) same = x.g4_[i][j] * lambda == y.g4_[i][j];
    if (same) return true;
  }
  return false;
}

template <>
inline BigInt GroupElement<BigInt>::inverse_unit(const BigInt& u) {
  return u;  // +-1
}
template <>
inline Rational GroupElement<Rational>::inverse_unit(const Rational& u) {
  return Rational(Rational(1) / u);
}
template <>
inline ModInt GroupElement<ModInt>::inverse_unit(const ModInt& u) {
  return u.inverse();
}
template <>
inline double GroupElement<double>::inverse_unit(const double& u) {
  return 1.0 / u;
}

/// det(2A x + 2B y), i.e. 16 det(Ax + By), expanded in (x, y).
template <class T>
BinaryQuartic<T> resolvent_quartic(const PairOfQuadrics<T>& p) {
  using Lin = std::array<T, 2>;
  std::array<std::array<Lin, 4>, 4> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = Lin{p.doubled(true, i, j), p.doubled(false, i, j)};

  // Leibniz expansion over S4; each term is a product of four linear forms.
  BinaryQuartic<T> out;
  std::array<int, 4> perm{0, 1, 2, 3};
  int sign = 1;
  // Heap's algorithm tracks the permutation parity incrementally.
  std::array<int, 4> counter{0, 0, 0, 0};
  auto accumulate = [&]() {
    std::vector<T> prod{T(1)};
    for (int i = 0; i < 4; ++i) {
      const Lin& l = m[i][perm[i]];
      if (is_zero(l[0]) && is_zero(l[1])) return;
      prod = BinaryQuartic<T>::multiply_linear(prod, l);
    }
    for (int k = 0; k < 5; ++k) out.c[k] = sign > 0 ? T(out.c[k] + prod[k]) : T(out.c[k] - prod[k]);
  };
  accumulate();
  int i = 0;
  while (i < 4) {
    if (counter[i] < i) {
      if (i % 2 == 0) {
        std::swap(perm[0], perm[i]);
      } else {
        std::swap(perm[counter[i]], perm[i]);
      }
      sign = -sign;
      accumulate();
      ++counter[i];
      i = 0;
    } else {
      counter[i] = 0;
      ++i;
    }
  }
  return out;
}

/// g2 . (A, B) = (rA + sB, tA + uB) and g4 . (A, B) = (g4 A g4^t, g4 B g4^t).
template <class T>
PairOfQuadrics<T> act(const Mat2<T>& g2, const Mat4<T>& g4, const PairOfQuadrics<T>& p) {
  PairOfQuadrics<T> q;
  for (int which = 0; which < 2; ++which) {
    const auto& src = which == 0 ? p.a : p.b;
    auto& dst = which == 0 ? q.a : q.b;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        T acc(0);
        if (i == j) {
          // Q(row_i) computed directly on coordinates.
          for (int k = 0; k < 4; ++k)
            for (int l = k; l < 4; ++l) acc = T(acc + src[sym_index(k, l)] * g4[i][k] * g4[i][l]);
        } else {
          // row_i^t (2A) row_j.
          for (int k = 0; k < 4; ++k) {
            acc = T(acc + T(2) * src[sym_index(k, k)] * g4[i][k] * g4[j][k]);
            for (int l = k + 1; l < 4; ++l)
              acc = T(acc + src[sym_index(k, l)] * (g4[i][k] * g4[j][l] + g4[i][l] * g4[j][k]));
          }
        }
        dst[sym_index(i, j)] = acc;
      }
  }
  PairOfQuadrics<T> r;
  for (int k = 0; k < 10; ++k) {
    r.a[k] = T(g2[0][0] * q.a[k] + g2[0][1] * q.b[k]);
    r.b[k] = T(g2[1][0] * q.a[k] + g2[1][1] * q.b[k]);
  }
  return r;
}

template <class T>
PairOfQuadrics<T> act(const GroupElement<T>& g, const PairOfQuadrics<T>& p) {
  return act(g.g2(), g.g4(), p);
}

/// Checks resolvent(g.p) == det(g4)^2 f_p((x, y) . g2) as polynomials. Valid
/// for any g2, g4 (the determinant condition is not needed).
template <class T>
bool twist_identity_holds(const Mat2<T>& g2, const Mat4<T>& g4, const PairOfQuadrics<T>& p) {
  const BinaryQuartic<T> lhs = resolvent_quartic(act(g2, g4, p));
  const T d4 = det4(g4);
  const BinaryQuartic<T> rhs = resolvent_quartic(p).substituted(g2).scaled(T(d4 * d4));
  return lhs == rhs;
}

template <class T>
bool twist_identity_check(const GroupElement<T>& g, const PairOfQuadrics<T>& p) {
  if (is_zero(det2(g.g2()))) fail(ErrorKind::InvalidArgument, "g2 is singular");
  return twist_identity_holds(g.g2(), g.g4(), p);
}

/// Lemma-style coordinate vanishing patterns that force a non strongly
/// irreducible pair: 1 and 2 make det(A) = 0, 3 and 4 make the
/// discriminant vanish.
const std::array<std::vector<int>, 4>& reducibility_patterns();

/// First pattern (1-based) whose coordinates all vanish, if any.
template <class T>
std::optional<int> reducibility_case(const PairOfQuadrics<T>& p) {
  const auto& pats = reducibility_patterns();
  for (int c = 0; c < 4; ++c) {
    bool all = true;
    for (int k : pats[c])
      if (!is_zero(p.coord(k))) {
        all = false;
        break;
      }
    if (all) return c + 1;
  }
  return std::nullopt;
}

/// Canonical text form: 20 space-separated values a11 .. a44 b11 .. b44.
std::string serialize_pair(const PairOfQuadrics<BigInt>& p);
std::string serialize_pair(const PairOfQuadrics<Rational>& p);
PairOfQuadrics<BigInt> parse_pair(std::string_view text);
/// Like parse_pair but accepts rationals such as 1/2.
PairOfQuadrics<Rational> parse_rational_pair(std::string_view text);

std::string serialize_quartic(const BinaryQuartic<BigInt>& f);
BinaryQuartic<BigInt> parse_quartic(std::string_view text);

}  // namespace qpl
