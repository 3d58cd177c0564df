#pragma once

// Coefficient domains. Generic code in this library only needs +, -, *,
// equality and construction from a machine integer; the few places that
// divide go through exact_div(), which each domain overloads.
//
// Supported domains: BigInt (Z), Rational (Q), ModInt (Z/mZ and F_p),
// Real (double), std::int64_t (fixed-width fast path for bounded scans)
// and Poly<T> (symbolic parameters, see poly.hpp).

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "qpl/error.hpp"

namespace qpl {

using BigInt = mpz_class;
using Rational = mpq_class;
using Real = double;

/// Residue modulo m. A modulus of 0 marks an "unbound" integer literal that
/// adopts the modulus of whatever it is combined with; this lets generic code
/// write T(0), T(1), T(2) without threading a context object around.
class ModInt {
 public:
  ModInt() = default;
  ModInt(std::int64_t value) : v_(value), m_(0) {}  // NOLINT: literal lift
  ModInt(std::int64_t value, std::int64_t modulus);

  std::int64_t value() const { return v_; }
  std::int64_t modulus() const { return m_; }
  bool bound() const { return m_ != 0; }

  bool is_unit() const;
  ModInt inverse() const;
  ModInt pow(std::uint64_t e) const;

  ModInt& operator+=(const ModInt& o);
  ModInt& operator-=(const ModInt& o);
  ModInt& operator*=(const ModInt& o);

  friend ModInt operator+(ModInt a, const ModInt& b) { return a += b; }
  friend ModInt operator-(ModInt a, const ModInt& b) { return a -= b; }
  friend ModInt operator*(ModInt a, const ModInt& b) { return a *= b; }
  friend ModInt operator-(const ModInt& a) { return ModInt(0) - a; }
  friend bool operator==(const ModInt& a, const ModInt& b);
  friend bool operator!=(const ModInt& a, const ModInt& b) { return !(a == b); }

 private:
  static std::int64_t common_modulus(const ModInt& a, const ModInt& b);
  void rebind(std::int64_t modulus);

  std::int64_t v_ = 0;
  std::int64_t m_ = 0;
};

std::string to_string(const ModInt& x);
inline std::string to_string(const BigInt& x) { return x.get_str(); }
inline std::string to_string(const Rational& x) { return x.get_str(); }
std::string to_string(double x);
inline std::string to_string(std::int64_t x) { return std::to_string(x); }

inline bool is_zero(const BigInt& x) { return sgn(x) == 0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const ModInt& x) { return x == ModInt(0); }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(std::int64_t x) { return x == 0; }

/// a / d where the caller asserts the quotient exists in the domain.
BigInt exact_div(const BigInt& a, long d);
Rational exact_div(const Rational& a, long d);
ModInt exact_div(const ModInt& a, long d);
double exact_div(double a, long d);

/// n / d in canonical form (GMP requires canonical operands).
inline Rational frac(const BigInt& n, const BigInt& d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Embed an integer into a bound residue ring.
inline ModInt mod(const BigInt& x, std::int64_t m) {
  BigInt r = x % m;
  if (sgn(r) < 0) r += m;
  return ModInt(r.get_si(), m);
}

/// Smallest non-negative representative lifted back to Z.
inline BigInt lift(const ModInt& x) { return BigInt(static_cast<long>(x.value())); }

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

/// p-adic valuation of a nonzero integer; returns -1 for zero.
int valuation(const BigInt& x, long p);

}  // namespace qpl
