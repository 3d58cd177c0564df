#include "qpl/domain.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qpl {

ModInt::ModInt(std::int64_t value, std::int64_t modulus) : m_(modulus) {
  if (modulus < 0) fail(ErrorKind::InvalidArgument, "negative modulus");
  if (modulus > (std::int64_t{1} << 31))
    fail(ErrorKind::InvalidArgument, "modulus too large for ModInt");
  v_ = modulus == 0 ? value : floor_mod(value, modulus);
}

std::int64_t ModInt::common_modulus(const ModInt& a, const ModInt& b) {
  if (a.m_ == 0) return b.m_;
  if (b.m_ == 0 || a.m_ == b.m_) return a.m_;
  fail(ErrorKind::DomainMismatch, "residues modulo " + std::to_string(a.m_) +
                                      " and " + std::to_string(b.m_) + " mixed");
}

void ModInt::rebind(std::int64_t modulus) {
  if (m_ == modulus) return;
  m_ = modulus;
  if (m_ != 0) v_ = floor_mod(v_, m_);
}

ModInt& ModInt::operator+=(const ModInt& o) {
  const std::int64_t m = common_modulus(*this, o);
  rebind(m);
  if (m == 0) {
    v_ += o.v_;
  } else {
    v_ = floor_mod(v_ + floor_mod(o.v_, m), m);
  }
  return *this;
}

ModInt& ModInt::operator-=(const ModInt& o) {
  const std::int64_t m = common_modulus(*this, o);
  rebind(m);
  if (m == 0) {
    v_ -= o.v_;
  } else {
    v_ = floor_mod(v_ - floor_mod(o.v_, m), m);
  }
  return *this;
}

ModInt& ModInt::operator*=(const ModInt& o) {
  const std::int64_t m = common_modulus(*this, o);
  rebind(m);
  if (m == 0) {
    v_ *= o.v_;
  } else {
    v_ = static_cast<std::int64_t>(static_cast<__int128>(v_) * floor_mod(o.v_, m) % m);
  }
  return *this;
}

bool operator==(const ModInt& a, const ModInt& b) {
  const std::int64_t m = ModInt::common_modulus(a, b);
  if (m == 0) return a.v_ == b.v_;
  return floor_mod(a.v_, m) == floor_mod(b.v_, m);
}

bool ModInt::is_unit() const {
  if (m_ == 0) return v_ == 1 || v_ == -1;
  return std::gcd(v_, m_) == 1;
}

ModInt ModInt::inverse() const {
  if (m_ == 0) {
    if (v_ == 1 || v_ == -1) return *this;
    fail(ErrorKind::DomainMismatch, "inverse of an unbound residue");
  }
  // Extended Euclid on (v, m).
  std::int64_t r0 = m_, r1 = v_, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::int64_t tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 != 1) fail(ErrorKind::InvalidArgument, "residue " + to_string(*this) + " is not a unit");
  return ModInt(t0, m_);
}

ModInt ModInt::pow(std::uint64_t e) const {
  ModInt base = *this;
  ModInt acc(1, m_);
  while (e > 0) {
    if (e & 1U) acc *= base;
    base *= base;
    e >>= 1U;
  }
  return acc;
}

std::string to_string(const ModInt& x) {
  if (!x.bound()) return std::to_string(x.value());
  return std::to_string(x.value()) + " mod " + std::to_string(x.modulus());
}

std::string to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

BigInt exact_div(const BigInt& a, long d) {
  BigInt q;
  BigInt r;
  mpz_tdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(std::labs(d)));
  if (sgn(r) != 0) fail(ErrorKind::NonIntegral, a.get_str() + " is not divisible by " + std::to_string(d));
  return d < 0 ? BigInt(-q) : q;
}

Rational exact_div(const Rational& a, long d) { return Rational(a / Rational(d)); }

ModInt exact_div(const ModInt& a, long d) {
  if (!a.bound()) {
    if (a.value() % d != 0) fail(ErrorKind::NonIntegral, "unbound residue not divisible");
    return ModInt(a.value() / d);
  }
  return a * ModInt(d, a.modulus()).inverse();
}

double exact_div(double a, long d) { return a / static_cast<double>(d); }

int valuation(const BigInt& x, long p) {
  if (sgn(x) == 0) return -1;
  BigInt y = x;
  int v = 0;
  while (mpz_divisible_ui_p(y.get_mpz_t(), static_cast<unsigned long>(p)) != 0) {
    mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

}  // namespace qpl
