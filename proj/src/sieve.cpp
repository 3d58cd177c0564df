#include "qpl/sieve.hpp"

#include "qpl/poly.hpp"

namespace qpl {

namespace {

void require_prime_above_3(std::int64_t p) {
  bool prime = p > 3;
  for (std::int64_t d = 2; prime && d * d <= p; ++d) prime = p % d != 0;
  if (!prime) fail(ErrorKind::InvalidArgument, "sieve functions need a prime p > 3");
}

BigInt pow_int(std::int64_t p, int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

bool divides(const BigInt& d, const BigInt& n) { return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0; }

// Partial derivatives of Delta mod p, by the exact difference quotient.
std::array<std::int64_t, 20> taylor_derivatives(const PairOfQuadrics<BigInt>& v, std::int64_t p, const BigInt& d0) {
  std::array<std::int64_t, 20> out{};
  for (int t = 0; t < 20; ++t) {
    PairOfQuadrics<BigInt> w = v;
    w.coord(t) += p;
    const BigInt diff = discriminant(w) - d0;
    out[t] = mod(exact_div(diff, static_cast<long>(p)), p).value();
  }
  return out;
}

// Repeated linear factor of f mod p as a primitive point [r:s] of P^1(F_p).
// Returns nullopt when f has no repeated root over F_p.
std::optional<std::pair<std::int64_t, std::int64_t>> repeated_root(const BinaryQuartic<BigInt>& f, std::int64_t p) {
  const auto fp = reduce_mod(f, p);
  if (fp[0] == ModInt(0, p) && fp[1] == ModInt(0, p)) return std::make_pair<std::int64_t, std::int64_t>(1, 0);
  std::vector<ModInt> c;
  for (int k = 4; k >= 0; --k) c.push_back(fp[k]);  // f(x, 1), low degree first
  const Poly<ModInt> g(c);
  const Poly<ModInt> h = gcd(g, g.derivative());
  if (h.degree() < 1) return std::nullopt;
  for (std::int64_t x = 0; x < p; ++x)
    if (is_zero(h(ModInt(x, p)))) return std::make_pair(x, std::int64_t{1});
  fail(ErrorKind::NotNormalizable, "repeated factor of the resolvent is not rational over F_" + std::to_string(p));
}

}  // namespace

BigInt discriminant(const PairOfQuadrics<BigInt>& p) { return exact_div(invariants(p).scaled_disc, 27); }

bool in_Wp(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  require_prime_above_3(p);
  return divides(pow_int(p, 2), discriminant(pair));
}

bool in_Wp1(const PairOfQuadrics<BigInt>& pair, std::int64_t p) { return !wp1_violating_direction(pair, p); }

std::optional<PairOfQuadrics<BigInt>> wp1_violating_direction(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  require_prime_above_3(p);
  const BigInt d0 = discriminant(pair);
  if (!divides(pow_int(p, 2), d0)) return PairOfQuadrics<BigInt>();
  const auto der = taylor_derivatives(pair, p, d0);
  for (int t = 0; t < 20; ++t) {
    if (der[t] == 0) continue;
    PairOfQuadrics<BigInt> w;
    w.coord(t) = 1;
    return w;
  }
  return std::nullopt;
}

bool is_normalized(const PairOfQuadrics<BigInt>& v, std::int64_t p) {
  const BigInt P = p;
  return divides(P, v.a_at(0, 1)) && divides(P, v.a_at(0, 2)) && divides(P, v.a_at(0, 3)) &&
         divides(P, v.b_at(0, 0)) && divides(P * P, v.a_at(0, 0));
}

Normalization normalize_Wp2(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  if (!in_Wp(pair, p)) fail(ErrorKind::NotNormalizable, "pair is not in W_p");
  if (in_Wp1(pair, p)) fail(ErrorKind::NotNormalizable, "pair is in W_p^(1)");
  if (is_normalized(pair, p)) return {GroupElement<BigInt>::identity(), pair};

  // SL2 move: first row of g2 is the double root, so f((1,0) g2) = f(root).
  const auto root = repeated_root(resolvent_quartic(pair), p);
  if (!root) fail(ErrorKind::NotNormalizable, "resolvent has no repeated root mod p");
  Mat2<BigInt> g2 = identity2<BigInt>();
  if (root->second != 0) g2 = Mat2<BigInt>{{{BigInt(static_cast<long>(root->first)), BigInt(1)}, {BigInt(-1), BigInt(0)}}};
  const PairOfQuadrics<BigInt> moved = act(g2, identity4<BigInt>(), pair);

  // GL4 move: a vector v with 2A v = 0 and Q_B(v) = 0 mod p becomes e_1.
  // Deterministic first-found search over normalised vectors.
  const auto red = reduce_mod(moved, p);
  std::optional<std::array<std::int64_t, 4>> found;
  for (int lead = 0; lead < 4 && !found; ++lead) {
    std::int64_t count = 1;
    for (int j = lead + 1; j < 4; ++j) count *= p;
    for (std::int64_t idx = 0; idx < count && !found; ++idx) {
      std::array<std::int64_t, 4> v{};
      v[lead] = 1;
      std::int64_t r = idx;
      for (int j = 3; j > lead; --j) {
        v[j] = r % p;
        r /= p;
      }
      std::array<ModInt, 4> vm;
      for (int i = 0; i < 4; ++i) vm[i] = ModInt(v[i], p);
      bool kernel = true;
      for (int i = 0; i < 4 && kernel; ++i) {
        ModInt acc(0, p);
        for (int j = 0; j < 4; ++j) acc += red.doubled(true, i, j) * vm[j];
        kernel = is_zero(acc);
      }
      if (kernel && is_zero(red.quadric(false, vm))) found = v;
    }
  }
  if (!found) fail(ErrorKind::NotNormalizable, "no isotropic kernel vector for the GL4 move");
  const auto& v = *found;
  int lead = 0;
  while (v[lead] == 0) ++lead;
  // Rows: v, then the unit vectors e_i (i != lead); det = (-1)^lead.
  Mat4<BigInt> g4;
  for (int j = 0; j < 4; ++j) g4[0][j] = static_cast<long>(v[j]);
  int row = 1;
  for (int i = 0; i < 4; ++i) {
    if (i == lead) continue;
    for (int j = 0; j < 4; ++j) g4[row][j] = i == j ? 1 : 0;
    ++row;
  }
  if (lead % 2 == 1)
    for (int j = 0; j < 4; ++j) g4[1][j] = -g4[1][j];

  GroupElement<BigInt> g(g2, g4);
  PairOfQuadrics<BigInt> out = act(g, pair);
  if (!is_normalized(out, p)) fail(ErrorKind::NotNormalizable, "normalization conditions not reached");
  return {g, out};
}

PairOfQuadrics<BigInt> apply_gamma_p(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  require_prime_above_3(p);
  const Rational P = p;
  Mat2<Rational> g2 = identity2<Rational>();
  g2[1][1] = P;
  Mat4<Rational> g4 = identity4<Rational>();
  g4[0][0] = Rational(1) / P;
  const auto image = act(GroupElement<Rational>(g2, g4), to_rational(pair));
  PairOfQuadrics<BigInt> out;
  for (int k = 0; k < 20; ++k) {
    const Rational& c = image.coord(k);
    if (c.get_den() != 1)
      fail(ErrorKind::NonIntegral, "gamma_p image has non-integral coordinate " + coordinate_labels()[k] + " = " +
                                       c.get_str());
    out.coord(k) = c.get_num();
  }
  return out;
}

SievePrimeData sieve_data(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  SievePrimeData d;
  d.p = p;
  d.inWp = in_Wp(pair, p);
  d.inWp1 = d.inWp && in_Wp1(pair, p);
  d.inWp2 = d.inWp && !d.inWp1;
  if (d.inWp2) {
    try {
      auto n = normalize_Wp2(pair, p);
      d.normalizer = n.element;
      d.image = apply_gamma_p(n.pair, p);
    } catch (const Error&) {
      // Left empty: the W_p^(2) element could not be normalized.
    }
  }
  return d;
}

SieveScanRow& SieveScanRow::operator+=(const SieveScanRow& o) {
  count_Wp += o.count_Wp;
  count_Wp1 += o.count_Wp1;
  count_Wp2 += o.count_Wp2;
  gamma_verified += o.gamma_verified;
  return *this;
}

std::string SieveScanRow::csv_header() { return "p,count_Wp,count_Wp1,count_Wp2,gamma_verified"; }

std::string SieveScanRow::csv_row() const {
  return std::to_string(p) + "," + std::to_string(count_Wp) + "," + std::to_string(count_Wp1) + "," +
         std::to_string(count_Wp2) + "," + std::to_string(gamma_verified);
}

SieveScanRow sieve_tally(const PairOfQuadrics<BigInt>& pair, std::int64_t p) {
  SieveScanRow row;
  row.p = p;
  const SievePrimeData d = sieve_data(pair, p);
  row.count_Wp = d.inWp;
  row.count_Wp1 = d.inWp1;
  row.count_Wp2 = d.inWp2;
  if (d.image && discriminant(*d.image) == discriminant(pair) && in_Wp1(*d.image, p)) row.gamma_verified = 1;
  return row;
}

}  // namespace qpl
