#include "qpl/forms.hpp"

#include <cmath>
#include <sstream>

namespace qpl {

const std::array<std::string, 20>& coordinate_labels() {
  static const std::array<std::string, 20> labels = [] {
    std::array<std::string, 20> out;
    int k = 0;
    for (char m : {'a', 'b'})
      for (int i = 1; i <= 4; ++i)
        for (int j = i; j <= 4; ++j) out[k++] = std::string(1, m) + std::to_string(i) + std::to_string(j);
    return out;
  }();
  return labels;
}

std::optional<int> coordinate_index(std::string_view label) {
  const auto& labels = coordinate_labels();
  for (int k = 0; k < 20; ++k)
    if (labels[k] == label) return k;
  return std::nullopt;
}

std::optional<BigInt> canonical_scale(const BigInt& c) {
  if (c == 1) return BigInt(1);
  if (c == -1) return BigInt(-1);
  return std::nullopt;
}

std::optional<Rational> canonical_scale(const Rational& c) {
  if (sgn(c) == 0) return std::nullopt;
  return Rational(Rational(1) / c);
}

std::optional<ModInt> canonical_scale(const ModInt& c) {
  if (!c.bound()) {
    if (c.value() == 1 || c.value() == -1) return ModInt(c.value());
    return std::nullopt;
  }
  if (c.is_unit()) return c.inverse();
  // Non-unit entry: choose the unit u minimising the representative of u*c.
  const std::int64_t m = c.modulus();
  std::optional<ModInt> best;
  std::int64_t best_val = m;
  for (std::int64_t u = 1; u < m; ++u) {
    const ModInt cand(u, m);
    if (!cand.is_unit()) continue;
    const std::int64_t v = (cand * c).value();
    if (v < best_val) {
      best_val = v;
      best = cand;
    }
  }
  return best;
}

std::optional<double> canonical_scale(double c) {
  if (c == 0.0) return std::nullopt;
  return 1.0 / c;
}

bool det_product_is_one(const BigInt& d) { return d == 1; }
bool det_product_is_one(const Rational& d) { return d == 1; }
bool det_product_is_one(const ModInt& d) { return d == ModInt(1); }
bool det_product_is_one(double d) { return std::fabs(d - 1.0) <= 1e-9; }
bool det_product_is_one(std::int64_t d) { return d == 1; }

const std::array<std::vector<int>, 4>& reducibility_patterns() {
  // a11=a12=a13=a14=0; a11=a12=a13=a22=a23=0;
  // a11=a12=a13=b11=b12=b13=0; a11=a12=a22=b11=b12=b22=0.
  static const std::array<std::vector<int>, 4> pats{{
      {0, 1, 2, 3},
      {0, 1, 2, 4, 5},
      {0, 1, 2, 10, 11, 12},
      {0, 1, 4, 10, 11, 14},
  }};
  return pats;
}

namespace {

template <class T>
std::string join20(const PairOfQuadrics<T>& p) {
  std::string out;
  for (int k = 0; k < 20; ++k) {
    if (k) out += ' ';
    out += to_string(p.coord(k));
  }
  return out;
}

std::vector<std::string> tokens(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

template <class T>
T parse_number(const std::string& tok) {
  T v;
  if (v.set_str(tok, 10) != 0) fail(ErrorKind::Parse, "not a number: '" + tok + "'");
  if constexpr (std::is_same_v<T, Rational>) {
    if (sgn(v.get_den()) == 0) fail(ErrorKind::Parse, "zero denominator: '" + tok + "'");
    v.canonicalize();
  }
  return v;
}

}  // namespace

std::string serialize_pair(const PairOfQuadrics<BigInt>& p) { return join20(p); }
std::string serialize_pair(const PairOfQuadrics<Rational>& p) { return join20(p); }

PairOfQuadrics<BigInt> parse_pair(std::string_view text) {
  const auto toks = tokens(text);
  if (toks.size() != 20)
    fail(ErrorKind::Parse, "expected 20 coordinates, got " + std::to_string(toks.size()));
  PairOfQuadrics<BigInt> p;
  for (int k = 0; k < 20; ++k) p.coord(k) = parse_number<BigInt>(toks[k]);
  return p;
}

PairOfQuadrics<Rational> parse_rational_pair(std::string_view text) {
  const auto toks = tokens(text);
  if (toks.size() != 20)
    fail(ErrorKind::Parse, "expected 20 coordinates, got " + std::to_string(toks.size()));
  PairOfQuadrics<Rational> p;
  for (int k = 0; k < 20; ++k) p.coord(k) = parse_number<Rational>(toks[k]);
  return p;
}

std::string serialize_quartic(const BinaryQuartic<BigInt>& f) {
  std::string out;
  for (int k = 0; k < 5; ++k) {
    if (k) out += ' ';
    out += f[k].get_str();
  }
  return out;
}

BinaryQuartic<BigInt> parse_quartic(std::string_view text) {
  const auto toks = tokens(text);
  if (toks.size() != 5) fail(ErrorKind::Parse, "expected 5 coefficients, got " + std::to_string(toks.size()));
  BinaryQuartic<BigInt> f;
  for (int k = 0; k < 5; ++k) f[k] = parse_number<BigInt>(toks[k]);
  return f;
}

}  // namespace qpl
