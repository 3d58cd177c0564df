#pragma once

// Selmer-group bookkeeping for S_4 = (Z/4)^a x (Z/2)^b and the extremal
// linear program bounding E[#S_2 - 2^a] from the two moment conditions.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qpl/domain.hpp"

namespace qpl {

struct SelmerShape {
  int a = 0;  ///< number of Z/4 factors
  int b = 0;  ///< number of Z/2 factors
  bool operator==(const SelmerShape&) const = default;
};

struct SelmerSizes {
  BigInt sizeS4;
  BigInt sizeS2;
  BigInt order4count;  ///< elements with sigma^2 != 1
  bool operator==(const SelmerSizes&) const = default;
};

/// (4^a 2^b, 2^{a+b}, (4^a - 2^a) 2^b). Throws InvalidArgument on negatives.
SelmerSizes selmer_sizes(SelmerShape s);

struct PointwiseRow {
  int a = 0;
  BigInt lhs;  ///< 5 * 2^a - 8
  BigInt rhs;  ///< 4^a - 2^a
  bool holds() const { return lhs <= rhs; }
  bool equality() const { return lhs == rhs; }
};

std::vector<PointwiseRow> pointwise_inequality_table(int a_max);

/// 5 * 2^a - 8 <= 4^a - 2^a for a = 1..a_max. Requires a_max >= 1.
bool pointwise_inequality_check(int a_max);

struct MomentConstraints {
  Rational s2_avg = 3;      ///< target E[2^{a+b}]
  Rational order4_avg = 4;  ///< target E[(4^a - 2^a) 2^b]
  int a_max = 6;
  int b_max = 10;
};

struct DistributionEntry {
  SelmerShape shape;
  Rational mass;
};

/// Dual multipliers for the rows (sum q = 1, E[2^{a+b}], E[order-4 count]).
using LpDual = std::array<Rational, 3>;

struct LpResult {
  bool feasible = false;
  Rational optimum;                            ///< valid when feasible
  std::vector<DistributionEntry> distribution; ///< positive masses, sorted by (a, b)
  LpDual dual{};                               ///< optimal dual when feasible
  /// When infeasible: y with y.column(a,b) >= 0 for every shape and
  /// y.(1, s2_avg, order4_avg) < 0.
  std::optional<LpDual> farkas;
};

/// Exact two-phase simplex (Bland's rule) for
///   minimize E[2^{a+b} - 2^a] over masses q(a, b), 0 <= a <= a_max, 0 <= b <= b_max,
/// subject to the moment constraints. Throws InvalidArgument on caps < 1 or
/// negative targets.
LpResult solve_extremal_lp(const MomentConstraints& c);

/// The optimum; throws Infeasible (message carries the certificate) otherwise.
Rational extremal_bound(const MomentConstraints& c);

/// Lower bound y0 + y1 s2_avg + y2 order4_avg certified by a dual vector, or
/// nullopt when y violates a dual constraint on the capped grid.
std::optional<Rational> dual_bound(const LpDual& y, const MomentConstraints& c);

/// True iff y certifies infeasibility of the constraints on the capped grid.
bool is_farkas_certificate(const LpDual& y, const MomentConstraints& c);

}  // namespace qpl
