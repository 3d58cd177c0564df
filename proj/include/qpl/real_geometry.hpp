#pragma once

// Real pairs: classification by the number of complex root pairs of the
// resolvent, simultaneous diagonalisation of class-0 pencils, R-solubility
// and the fundamental representatives L^(0#), L^(1), L^(2).

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "qpl/forms.hpp"

namespace qpl {

/// Numerical tolerances of the real-geometry code, kept in one place.
namespace tolerance {
inline constexpr double degeneracy = 1e-10;  ///< relative, for |27 Delta| vs 4H
inline constexpr double roundtrip = 1e-8;    ///< reconstruction checks
inline constexpr double hull = 1e-12;        ///< angular slack in the hull test
}  // namespace tolerance

/// Pencil diag(a) x + diag(b) y with M (2A) M^t = diag(a), M (2B) M^t = diag(b).
struct DiagonalPencil {
  std::array<double, 4> a{};
  std::array<double, 4> b{};
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();

  /// Points (a_i, b_i) scaled to unit length and sorted by angle in
  /// [-pi, pi); this is the representation used for comparisons.
  DiagonalPencil normalized() const;
};

/// Number of complex-conjugate root pairs (0, 1 or 2) of the resolvent.
/// The pair is converted exactly to rationals; throws Degenerate when
/// |4I^3 - J^2| <= 1e-10 * max(4|I|^3, J^2).
int real_class(const PairOfQuadrics<double>& p);

/// Requires class 0 with distinct roots; throws Degenerate otherwise.
DiagonalPencil simultaneous_diagonalize(const PairOfQuadrics<double>& p);

bool is_R_soluble(const PairOfQuadrics<double>& p);

/// Hull criterion on an explicit diagonal pencil: a real common zero exists
/// iff the origin lies in the convex hull of the points (a_i, b_i). Valid
/// for any regular diagonal pencil, including repeated roots.
bool hull_soluble(const DiagonalPencil& d);
/// Diagonal-coordinate witness y with sum a_i y_i^2 = sum b_i y_i^2 = 0.
std::optional<Eigen::Vector4d> hull_witness(const DiagonalPencil& d);

/// A real common zero of Q_A and Q_B (unit length) when one exists.
std::optional<Eigen::Vector4d> real_common_zero(const PairOfQuadrics<double>& p);

/// For an insoluble class-0 pair: (w_a, w_b) with w_a A + w_b B positive
/// definite, which rules out any real common zero.
std::optional<Eigen::Vector2d> insolubility_certificate(const PairOfQuadrics<double>& p);

enum class RealFamily { ZeroSharp, One, Two };

/// Parameters of the factored quartics: f0 = k y (x + l1 y)(x + l2 y)(x + l3 y),
/// f1 = k y (x + l y)(x^2 + r^2 y^2), f2 = k (x^2 + r1^2 y^2)(x^2 + r2^2 y^2).
struct FamilyParams {
  double kappa = 1.0;
  std::array<double, 3> lambdas{};  ///< l1 > l2 > l3 (family 0#)
  double lambda = 0.0;              ///< family 1
  double r = 1.0;                   ///< family 1
  double r1 = 2.0;                  ///< family 2
  double r2 = 1.0;                  ///< family 2
};

/// kappa^{1/4} times the fixed Gram pair of the family; its resolvent is
/// 16 times the family's factored quartic.
PairOfQuadrics<double> representative_L(RealFamily family, const FamilyParams& params);

/// The factored quartic itself (coefficients a..e), for comparisons.
BinaryQuartic<double> family_quartic(RealFamily family, const FamilyParams& params);

Eigen::Matrix4d doubled_gram(const PairOfQuadrics<double>& p, bool first);

}  // namespace qpl
