#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "qpl/domain.hpp"

namespace qpl {

/// Dense univariate polynomial, coefficients stored low degree first and kept
/// trimmed (no trailing zeros; the zero polynomial is the empty vector).
/// Over a ring it supports the arithmetic forms_core needs, so Poly<Rational>
/// doubles as a coefficient domain for symbolic parameters. Division and gcd
/// require T to be a field.
template <class T>
class Poly {
 public:
  Poly() = default;
  Poly(long c) { if (c != 0) c_.push_back(T(c)); }  // NOLINT: literal lift
  explicit Poly(T c) {
    if (!is_zero(c)) c_.push_back(std::move(c));
  }
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  /// The monomial x.
  static Poly x() { return Poly(std::vector<T>{T(0), T(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : T(0); }
  const T& lead() const { return c_.back(); }

  T operator()(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = T(acc * x + *it);
    return acc;
  }

  Poly derivative() const {
    std::vector<T> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(T(c_[i] * T(static_cast<long>(i))));
    return Poly(std::move(d));
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = T(c_[i] + o.c_[i]);
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = T(c_[i] - o.c_[i]);
    trim();
    return *this;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) { return Poly() - a; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.zero() || b.zero()) return Poly();
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = T(r[i + j] + a.c_[i] * b.c_[j]);
    return Poly(std::move(r));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly scaled(const T& s) const {
    std::vector<T> r = c_;
    for (auto& v : r) v = T(v * s);
    return Poly(std::move(r));
  }

  /// Euclidean division (field coefficients).
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.zero()) fail(ErrorKind::InvalidArgument, "polynomial division by zero");
    Poly q;
    Poly r = *this;
    q.c_.assign(std::max(0, degree() - d.degree() + 1), T(0));
    const T inv_lead = field_inverse(d.lead());
    while (!r.zero() && r.degree() >= d.degree()) {
      const int shift = r.degree() - d.degree();
      const T factor = T(r.lead() * inv_lead);
      q.c_[shift] = factor;
      for (int i = 0; i <= d.degree(); ++i) r.c_[i + shift] = T(r.c_[i + shift] - factor * d.c_[i]);
      r.trim();
    }
    q.trim();
    return {q, r};
  }

  Poly monic() const {
    if (zero()) return *this;
    return scaled(field_inverse(lead()));
  }

  friend Poly gcd(Poly a, Poly b) {
    while (!b.zero()) {
      Poly r = a.divmod(b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

 private:
  static T field_inverse(const T& x);

  void trim() {
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
};

template <>
inline Rational Poly<Rational>::field_inverse(const Rational& x) {
  return Rational(Rational(1) / x);
}
template <>
inline ModInt Poly<ModInt>::field_inverse(const ModInt& x) {
  return x.inverse();
}
template <>
inline double Poly<double>::field_inverse(const double& x) {
  return 1.0 / x;
}

template <class T>
bool is_zero(const Poly<T>& p) {
  return p.zero();
}

template <class T>
Poly<T> exact_div(const Poly<T>& p, long d) {
  std::vector<T> r = p.coeffs();
  for (auto& v : r) v = exact_div(v, d);
  return Poly<T>(std::move(r));
}

template <class T>
std::string to_string(const Poly<T>& p) {
  if (p.zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    if (is_zero(p.coeff(i))) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(p.coeff(i)) + ")";
    if (i > 0) out += "*t^" + std::to_string(i);
  }
  return out;
}

}  // namespace qpl
