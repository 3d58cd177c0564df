#pragma once

// Squarefree-sieve combinatorics at a prime p > 3: the sets W_p (p^2 | Delta),
// W_p^(1) (p^2 | Delta for mod-p reasons) and W_p^(2) = W_p \ W_p^(1), the
// normalization of W_p^(2) elements, and the discriminant-preserving map
// gamma_p = (diag(1, p), diag(1/p, 1, 1, 1)).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpl/forms.hpp"
#include "qpl/quartic.hpp"

namespace qpl {

/// Delta(pair) = (4I^3 - J^2)/27, exactly.
BigInt discriminant(const PairOfQuadrics<BigInt>& p);

bool in_Wp(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

/// Delta == 0 mod p^2 and every partial derivative of Delta vanishes mod p,
/// the derivative in coordinate t being (Delta(v + p e_t) - Delta(v))/p.
bool in_Wp1(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

/// When in_Wp1 is false: a direction w with Delta(v + p w) != 0 mod p^2
/// (w = 0 if already p^2 does not divide Delta). nullopt when in_Wp1 holds.
std::optional<PairOfQuadrics<BigInt>> wp1_violating_direction(const PairOfQuadrics<BigInt>& pair,
                                                              std::int64_t p);

/// Conditions (1) a12 = a13 = a14 = b11 = 0 mod p and (2) a11 = 0 mod p^2.
bool is_normalized(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

struct Normalization {
  GroupElement<BigInt> element;
  PairOfQuadrics<BigInt> pair;  ///< act(element, input)
};

/// Moves the double root of the resolvent mod p to [1:0] with an SL2(Z)
/// substitution, then puts an isotropic kernel vector of 2A mod p in the
/// first row of an SL4(Z) matrix. Throws NotNormalizable when the pair is
/// not in W_p^(2) or the repeated factor is not rational over F_p.
Normalization normalize_Wp2(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

/// gamma_p . pair. Throws NonIntegral if the image is not integral.
PairOfQuadrics<BigInt> apply_gamma_p(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

struct SievePrimeData {
  std::int64_t p = 0;
  bool inWp = false;
  bool inWp1 = false;
  bool inWp2 = false;
  std::optional<GroupElement<BigInt>> normalizer;
  std::optional<PairOfQuadrics<BigInt>> image;  ///< gamma_p of the normalized pair
};

/// Flags plus, for W_p^(2) elements, the normalizer and gamma_p image.
SievePrimeData sieve_data(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

/// Aggregate over a batch: one CSV row (p, count_Wp, count_Wp1, count_Wp2, gamma_verified).
struct SieveScanRow {
  std::int64_t p = 0;
  std::int64_t count_Wp = 0;
  std::int64_t count_Wp1 = 0;
  std::int64_t count_Wp2 = 0;
  std::int64_t gamma_verified = 0;  ///< W_p^(2) elements whose image is integral, in W_p^(1), same Delta

  SieveScanRow& operator+=(const SieveScanRow& o);
  static std::string csv_header();
  std::string csv_row() const;
};

SieveScanRow sieve_tally(const PairOfQuadrics<BigInt>& pair, std::int64_t p);

}  // namespace qpl
