#pragma once

// Exact real-root isolation for univariate polynomials over Q via Sturm
// sequences. Intervals are half-open (lo, hi]; an exact rational root found
// during bisection is reported as the degenerate interval [r, r].

#include <utility>
#include <vector>

#include "qpl/poly.hpp"

namespace qpl {

using QPoly = Poly<Rational>;

struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact() const { return lo == hi; }
};

class SturmSequence {
 public:
  /// Builds the sequence for the squarefree part of p (p must be nonzero).
  explicit SturmSequence(const QPoly& p);

  const QPoly& squarefree() const { return seq_.front(); }

  /// Number of sign changes at x (zeros skipped).
  int variations_at(const Rational& x) const;
  int variations_at_minus_infinity() const;
  int variations_at_plus_infinity() const;

  /// Distinct real roots in (lo, hi].
  int count_in(const Rational& lo, const Rational& hi) const;
  /// Distinct real roots overall.
  int count_real() const;

  /// One isolating interval per distinct real root, ordered increasingly.
  std::vector<RootInterval> isolate() const;
  /// Shrinks an isolating interval until hi - lo < width (or it is exact).
  RootInterval refine(RootInterval iv, const Rational& width) const;

 private:
  void isolate_rec(const Rational& lo, const Rational& hi, int vlo, int vhi,
                   std::vector<RootInterval>& out) const;

  std::vector<QPoly> seq_;
};

/// Cauchy bound: every complex root z of p has |z| < bound.
Rational cauchy_root_bound(const QPoly& p);

/// The fraction with the smallest denominator in the closed interval
/// [lo, hi] (lo <= hi), via continued fractions.
Rational simplest_fraction_between(const Rational& lo, const Rational& hi);

}  // namespace qpl
