#pragma once

// Invariant theory and root analysis of binary quartic forms.

#include <optional>
#include <utility>
#include <vector>

#include "qpl/forms.hpp"

namespace qpl {

/// (I, J) with the discriminant and height carried as scaled integers:
/// scaled_disc = 4I^3 - J^2 = 27 Delta, scaled_height = max(4|I|^3, J^2) = 4H.
struct InvariantPair {
  BigInt I;
  BigInt J;
  BigInt scaled_disc;
  BigInt scaled_height;

  static InvariantPair from_IJ(BigInt I, BigInt J);

  Rational disc() const {
    Rational r(scaled_disc, 27);
    r.canonicalize();
    return r;
  }
  Rational height() const {
    Rational r(scaled_height, 4);
    r.canonicalize();
    return r;
  }

  friend bool operator==(const InvariantPair& x, const InvariantPair& y) { return x.I == y.I && x.J == y.J; }
};

/// I = 12ae - 3bd + c^2, J = 72ace + 9bcd - 27ad^2 - 27b^2e - 2c^3, over any domain.
template <class T>
std::pair<T, T> quartic_IJ(const BinaryQuartic<T>& f) {
  const T& a = f[0];
  const T& b = f[1];
  const T& c = f[2];
  const T& d = f[3];
  const T& e = f[4];
  T I = T(T(12) * a * e - T(3) * b * d + c * c);
  T J = T(T(72) * a * c * e + T(9) * b * c * d - T(27) * a * d * d - T(27) * b * b * e - T(2) * c * c * c);
  return {I, J};
}

InvariantPair quartic_invariants(const BinaryQuartic<BigInt>& f);

/// Invariants of a pair: the invariants of its resolvent.
InvariantPair invariants(const PairOfQuadrics<BigInt>& p);

/// Discriminant of f computed independently of I, J: Res(f(x,1), f'(x,1))/a,
/// after a unimodular shift making a nonzero. Zero for the zero form.
BigInt resultant_discriminant(const BinaryQuartic<BigInt>& f);

/// Exact determinant of a square integer matrix (fraction-free Bareiss).
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m);

/// Primitive projective root [r:s] in P^1(Q), or nullopt. Throws ZeroForm.
std::optional<std::pair<BigInt, BigInt>> rational_linear_factor(const BinaryQuartic<BigInt>& f);

struct QuarticClassification {
  std::optional<int> real_class;  ///< pairs of complex roots; empty if disc = 0
  int real_roots = 0;             ///< distinct roots in P^1(R)
  bool has_rational_linear_factor = false;
  bool disc_is_zero = false;
};

QuarticClassification real_classification(const BinaryQuartic<BigInt>& f);

/// Distinct real roots of f in P^1(R), exactly (Sturm over Q plus [1:0]).
int count_real_projective_roots(const BinaryQuartic<Rational>& f);

/// Roots in P^1(F_p), normalised to [x:1] or [1:0]; p+1 point evaluation.
std::vector<std::pair<ModInt, ModInt>> roots_mod_p(const BinaryQuartic<ModInt>& f);

/// Δ != 0 and no root in P^1(Q).
bool is_strongly_irreducible(const PairOfQuadrics<BigInt>& p);

template <class T>
BinaryQuartic<ModInt> reduce_mod(const BinaryQuartic<T>& f, std::int64_t p);

template <>
inline BinaryQuartic<ModInt> reduce_mod(const BinaryQuartic<BigInt>& f, std::int64_t p) {
  BinaryQuartic<ModInt> r;
  for (int k = 0; k < 5; ++k) r[k] = mod(f[k], p);
  return r;
}

inline PairOfQuadrics<ModInt> reduce_mod(const PairOfQuadrics<BigInt>& v, std::int64_t p) {
  return map_pair<ModInt>(v, [p](const BigInt& x) { return mod(x, p); });
}

inline PairOfQuadrics<Rational> to_rational(const PairOfQuadrics<BigInt>& v) {
  return map_pair<Rational>(v, [](const BigInt& x) { return Rational(x); });
}

/// Dehomogenised f(x, 1) as a polynomial over Q.
Poly<Rational> dehomogenize(const BinaryQuartic<BigInt>& f);

}  // namespace qpl
