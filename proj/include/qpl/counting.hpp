#pragma once

// Exact enumeration harnesses: torus weights of the cusp analysis, invariant
// pair counts N^+-(X), box scans of integral pairs, lattice-point counts
// against volume (Davenport), and height-ordered enumeration of curves.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpl/forms.hpp"
#include "qpl/parallel.hpp"

namespace qpl {

// ---------------------------------------------------------------------------
// Weights

/// Exponents of (s1, s2, s3, s4).
struct WeightVector {
  std::array<int, 4> e{};

  friend WeightVector operator+(WeightVector x, const WeightVector& y) {
    for (int i = 0; i < 4; ++i) x.e[i] += y.e[i];
    return x;
  }
  friend WeightVector operator-(const WeightVector& x) {
    WeightVector r;
    for (int i = 0; i < 4; ++i) r.e[i] = -x.e[i];
    return r;
  }
  friend WeightVector operator-(const WeightVector& x, const WeightVector& y) { return x + (-y); }
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
  /// e.g. "s1^-1 s2^-6 s3^-2 s4^-2"; "1" for the zero vector.
  std::string to_string() const;
};

/// Diagonal torus characters t1..t4 of the SL4 factor, as exponent vectors.
const std::array<WeightVector, 4>& torus_characters();

/// w(a_ij) = s1^-1 t_i t_j, w(b_ij) = s1 t_i t_j. Throws InvalidArgument.
WeightVector coordinate_weight(std::string_view label);
WeightVector coordinate_weight(int index);

/// Sum over positive roots of both factors: the Haar density exponents.
WeightVector haar_exponents();

/// Negated weights of a14, a23, b13, b22: each monomial is O(X^{1/24}).
std::array<WeightVector, 4> lemma_estimates();

struct SiBoundStep {
  std::string description;
  WeightVector product;  ///< monomial bounded by X^{budget/24}
  int budget = 0;        ///< in units of X^{1/24}
  int variable = -1;     ///< 0-based s index bounded by this step
  int exponent = 0;      ///< s_var^exponent <= X^{budget/24} after dropping factors >> 1
};

struct SiBoundDerivation {
  std::vector<SiBoundStep> steps;
  /// Derived bound on each s_i, in units of X^{1/24} (numerator, denominator).
  std::array<std::pair<int, int>, 4> bounds{};
  bool ok = false;
};

/// Replays the deduction chain: (1)(2) -> s1; (3) with s1 -> s2, s4; (1)(4) -> s3.
SiBoundDerivation derive_sibounds();
bool verify_sibound_products();

// ---------------------------------------------------------------------------
// Invariant pairs

enum class Sign { Plus, Minus };

struct IJCounts {
  std::int64_t plus = 0;   ///< 4I^3 - J^2 > 0
  std::int64_t minus = 0;  ///< 4I^3 - J^2 < 0
  std::int64_t zero = 0;   ///< boundary, never folded into N+-
  std::int64_t total() const { return plus + minus + zero; }
  IJCounts& operator+=(const IJCounts& o) {
    plus += o.plus;
    minus += o.minus;
    zero += o.zero;
    return *this;
  }
  friend bool operator==(const IJCounts&, const IJCounts&) = default;
};

struct CountOptions {
  unsigned threads = 1;
  std::uint64_t chunk = 1'000'000;
  std::uint64_t start = 0;  ///< resume cursor
  IJCounts partial{};       ///< totals accumulated before `start`
  CheckpointFn<IJCounts> checkpoint;
};

/// Index space of the (I, J) scan: |I|^3 < X, J^2 < 4X, I-major order.
struct IJGrid {
  std::int64_t imax = 0;
  std::int64_t jmax = 0;
  std::uint64_t size() const {
    return static_cast<std::uint64_t>(2 * imax + 1) * static_cast<std::uint64_t>(2 * jmax + 1);
  }
};
IJGrid ij_grid(std::int64_t X);

/// Exact counts of integer (I, J) with H(I, J) < X, i.e. max(4|I|^3, J^2) < 4X.
IJCounts count_invariant_pairs(std::int64_t X, const CountOptions& opts = {});
std::int64_t count_invariant_pairs(std::int64_t X, Sign sign, const CountOptions& opts = {});

// ---------------------------------------------------------------------------
// Box scans

struct Predicate {
  std::string name;
  std::function<bool(const PairOfQuadrics<BigInt>&)> test;
};

/// Names: disc-nonzero, strongly-irreducible, lemma34-case1..case4,
/// lemma34-any, in-Wp:<p>, in-Wp1:<p>, in-Wp2:<p>. Throws Parse.
Predicate parse_predicate(std::string_view name);

struct ScanOptions {
  std::int64_t M = 1;
  std::uint64_t samples = 0;  ///< 0: exhaustive over the index range
  std::uint64_t seed = 0;
  std::uint64_t range_begin = 0;
  std::optional<std::uint64_t> range_end;  ///< exhaustive mode; default whole box
  unsigned threads = 1;
  std::uint64_t chunk = 100'000;
};

struct PredicateTally {
  std::string name;
  std::uint64_t hits = 0;
  double frequency = 0;
  double ci_low = 0;   ///< Wilson 95% interval
  double ci_high = 0;
};

struct ScanReport {
  std::int64_t M = 0;
  bool exhaustive = false;
  std::uint64_t examined = 0;
  std::vector<PredicateTally> tallies;
  static std::string csv_header();
  std::vector<std::string> csv_rows() const;
};

/// Number of points of [-M, M]^20 (nullopt if it overflows 64 bits).
std::optional<std::uint64_t> box_size(std::int64_t M);
/// Mixed-radix decoding: coordinate k is digit k of the index in base 2M+1, shifted by -M.
PairOfQuadrics<BigInt> box_element(std::int64_t M, std::uint64_t index);
/// Sample i: coordinate k drawn uniformly from [-M, M] on stream k.
PairOfQuadrics<BigInt> sampled_element(std::int64_t M, std::uint64_t seed, std::uint64_t i);

ScanReport scan_box(const ScanOptions& opts, const std::vector<Predicate>& predicates);

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.96);

// ---------------------------------------------------------------------------
// Davenport

struct Monomial {
  Rational coef;
  std::vector<int> exps;
};

struct Inequality {
  enum class Op { LE, LT, GE, GT };
  std::vector<Monomial> terms;
  Op op = Op::LE;
  Rational rhs;
  int degree() const;
  bool linear() const { return degree() <= 1; }
};

/// A bounding box intersected with polynomial inequalities.
struct Region {
  int dim = 0;
  std::vector<std::pair<Rational, Rational>> box;
  std::vector<Inequality> constraints;
};

/// Grammar (one statement per line, '#' starts a comment):
///   dim <n>
///   box <lo> <hi>                 (n lines, one per coordinate)
///   ineq <term> [+ <term>]... <op> <rational>
/// where <term> is <rational>*[e1,...,en] and <op> is one of <= < >= >.
/// Throws Parse; throws Unbounded when the box is missing.
Region parse_region(std::string_view text);

/// {(u, v) : 0 <= u - k v <= N, 0 <= v <= N}, the image of [0,N]^2 under a unimodular shear.
Region sheared_square(std::int64_t N, std::int64_t k);

struct DavenportOptions {
  int grid = 0;  ///< cells per axis for non-exact volumes; 0 picks a default by dimension
};

struct DavenportResult {
  BigInt count;
  double volume = 0;
  double volume_error = 0;  ///< 0 when exact
  bool volume_exact = false;
  std::optional<Rational> exact_volume;
  double max_projection = 0;  ///< greatest coordinate-projection volume, dims 1..n-1
  double discrepancy() const { return count.get_d() - volume; }
};

DavenportResult davenport_check(const Region& region, const DavenportOptions& opts = {});

// ---------------------------------------------------------------------------
// Curves y^2 = x^3 + A x + B ordered by H'(E) = max(|I|^3, J^2/4), I = -3A, J = -27B.

struct Congruence {
  char variable = 'A';  ///< 'A' or 'B'
  std::int64_t residue = 0;
  std::int64_t modulus = 1;
};

struct CurveFamily {
  std::string name = "all";
  std::vector<Congruence> conditions;
  bool contains(std::int64_t A, std::int64_t B) const;
};

/// Lines "A = r mod m" or "B = r mod m"; optional "name <text>"; '#' comments.
CurveFamily parse_family(std::string_view text);

/// No prime p with p^4 | A and p^6 | B.
bool is_minimal_model(std::int64_t A, std::int64_t B);

struct CurveCount {
  std::int64_t X = 0;
  std::int64_t count = 0;
  double ratio = 0;               ///< count / X^{5/6}
  double predicted_constant = 0;  ///< Vol(Inv_inf) * prod_p local densities
  Rational archimedean{8, 81};    ///< area of {108|A|^3 < 4, 729 B^2 < 4}
  std::vector<std::pair<std::int64_t, Rational>> local_densities;  ///< primes touched by the family
};

/// Exact local density at p of minimal models in the family, by counting mod p^k.
Rational local_density(const CurveFamily& family, std::int64_t p);

CurveCount enumerate_curves(std::int64_t X, const CurveFamily& family, unsigned threads = 1);

}  // namespace qpl
