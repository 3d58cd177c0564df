#pragma once

// Local arithmetic of pairs: points over F_p, Q_p-solubility by Hensel
// search, stabilizers in G(F_p), and elliptic curves over F_p.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpl/forms.hpp"
#include "qpl/quartic.hpp"

namespace qpl {

/// Point of P^3(F_p) normalised so that the first nonzero coordinate is 1.
struct ProjPoint {
  std::array<std::int64_t, 4> x{};
  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;
};

struct IntersectionPoint {
  ProjPoint point;
  bool smooth = false;  ///< Jacobian of (Q_A, Q_B) has rank 2
};

/// The prime of a pair over F_p (all coordinates must share one modulus).
std::int64_t modulus_of(const PairOfQuadrics<ModInt>& p);

/// Exhaustive scan of P^3(F_p); p must be prime.
std::vector<IntersectionPoint> fp_points_on_intersection(const PairOfQuadrics<ModInt>& p);

/// Affine Weierstrass curve y^2 = x^3 + a2 x^2 + a4 x + a6 over F_p, p odd.
struct FpCurve {
  std::int64_t p = 0;
  std::int64_t a2 = 0;
  std::int64_t a4 = 0;
  std::int64_t a6 = 0;

  /// E^{I,J}: y^2 = x^3 - (I/3) x - J/27, for p > 3.
  static FpCurve from_IJ(const BigInt& I, const BigInt& J, std::int64_t p);
  /// Cubic resolvent model of a quartic (a,b,c,d,e):
  /// y^2 = x^3 + c x^2 + (bd - 4ae) x + (ad^2 + b^2 e - 4ace). Isomorphic to
  /// E^{I,J} by x -> x - c/3 when p > 3, and defined for p = 3 as well.
  static FpCurve from_quartic(const BinaryQuartic<ModInt>& f);

  /// Discriminant of the cubic; nonzero iff the curve is nonsingular.
  std::int64_t cubic_discriminant() const;
  bool nonsingular() const { return cubic_discriminant() != 0; }
};

struct CurvePoint {
  bool infinity = true;
  std::int64_t x = 0;
  std::int64_t y = 0;
  static CurvePoint at_infinity() { return {}; }
  static CurvePoint affine(std::int64_t x, std::int64_t y) { return {false, x, y}; }
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

bool on_curve(const FpCurve& c, const CurvePoint& P);
CurvePoint curve_add(const FpCurve& c, const CurvePoint& P, const CurvePoint& Q);
CurvePoint curve_neg(const FpCurve& c, const CurvePoint& P);
CurvePoint curve_mul(const FpCurve& c, std::int64_t n, const CurvePoint& P);
/// All points including infinity (first element).
std::vector<CurvePoint> curve_points(const FpCurve& c);
/// #{P : 4P = O}; throws Degenerate for a singular curve.
std::int64_t curve_four_torsion(const FpCurve& c);

/// E(F_p)[4] for the curve attached to a pair over F_p (cubic resolvent model).
std::int64_t pair_four_torsion(const PairOfQuadrics<ModInt>& p);

/// True when the resolvent has nonzero discriminant in F_p.
bool nondegenerate_mod_p(const PairOfQuadrics<ModInt>& p);

/// Order of the stabilizer in G(F_p). Enumerates g2 with
/// f((x,y) g2) = det(g2)^2 f, then solves for g4 row by row; raw pairs are
/// divided exactly by p - 1. Throws Degenerate if the discriminant vanishes.
std::int64_t stabilizer_order_fp(const PairOfQuadrics<ModInt>& p);

/// The same count by scanning g4 over GL4(F_p) with row-by-row pruning
/// against the GL2-span of (A, B), solving for g2 at the end. Exhaustive;
/// practical for p = 3.
std::int64_t stabilizer_order_g4_scan(const PairOfQuadrics<ModInt>& p);

enum class Verdict { Soluble, Insoluble, Unknown };

struct SolubilityVerdict {
  Verdict verdict = Verdict::Unknown;
  std::int64_t prime = 0;
  int depth = 0;
  /// For Soluble: integer vector x with Q_A(x), Q_B(x) satisfying the
  /// Hensel bound, so a Q_p point exists near x.
  std::optional<std::array<BigInt, 4>> witness;
  int witness_level = 0;  ///< x was found as a class modulo p^witness_level
  int hensel_exponent = 0;  ///< min valuation of the 2x2 Jacobian minors at x
  std::string reason;

  std::string to_json() const;
};

/// v_p(27 Delta) + 2.
int default_qp_depth(const PairOfQuadrics<BigInt>& p, std::int64_t prime);

struct QpOptions {
  std::optional<int> depth;
  std::size_t branch_budget = 200000;
};

/// Breadth-first Hensel search over primitive residue classes modulo
/// p, p^2, ..., p^depth. Throws Degenerate when Delta = 0.
SolubilityVerdict qp_soluble(const PairOfQuadrics<BigInt>& p, std::int64_t prime, const QpOptions& opts = {});

std::string to_string(Verdict v);

}  // namespace qpl
