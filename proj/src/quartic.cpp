#include "qpl/quartic.hpp"

#include "qpl/sturm.hpp"

namespace qpl {

InvariantPair InvariantPair::from_IJ(BigInt I, BigInt J) {
  InvariantPair r;
  r.I = std::move(I);
  r.J = std::move(J);
  const BigInt i3 = r.I * r.I * r.I;
  const BigInt j2 = r.J * r.J;
  r.scaled_disc = 4 * i3 - j2;
  const BigInt h1 = 4 * abs(i3);
  r.scaled_height = h1 > j2 ? h1 : j2;
  return r;
}

InvariantPair quartic_invariants(const BinaryQuartic<BigInt>& f) {
  auto [I, J] = quartic_IJ(f);
  return InvariantPair::from_IJ(std::move(I), std::move(J));
}

InvariantPair invariants(const PairOfQuadrics<BigInt>& p) { return quartic_invariants(resolvent_quartic(p)); }

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m[k][k]) == 0) {
      std::size_t r = k + 1;
      while (r < n && sgn(m[r][k]) == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        BigInt t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = t;
      }
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : BigInt(-m[n - 1][n - 1]);
}

BigInt resultant_discriminant(const BinaryQuartic<BigInt>& f_in) {
  if (f_in.is_zero_form()) return 0;
  BinaryQuartic<BigInt> f = f_in;
  // (x, y) -> (x, y + kx) is unimodular; its x^4 coefficient is f(1, k).
  for (long k = 0; sgn(f[0]) == 0; ++k) {
    f = f_in.substituted(Mat2<BigInt>{{{BigInt(1), BigInt(k)}, {BigInt(0), BigInt(1)}}});
  }
  // f(x,1) = a x^4 + b x^3 + c x^2 + d x + e; f' = 4a x^3 + 3b x^2 + 2c x + d.
  const std::vector<BigInt> p{f[0], f[1], f[2], f[3], f[4]};
  const std::vector<BigInt> q{4 * f[0], 3 * f[1], 2 * f[2], f[3]};
  // Sylvester matrix: 3 shifted rows of p, 4 shifted rows of q.
  std::vector<std::vector<BigInt>> s(7, std::vector<BigInt>(7, BigInt(0)));
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 5; ++j) s[r][r + j] = p[j];
  for (int r = 0; r < 4; ++r)
    for (int j = 0; j < 4; ++j) s[3 + r][r + j] = q[j];
  const BigInt res = bareiss_determinant(std::move(s));
  // disc = (-1)^{n(n-1)/2} Res / a with n = 4, so the sign is +.
  BigInt out;
  mpz_divexact(out.get_mpz_t(), res.get_mpz_t(), f[0].get_mpz_t());
  return out;
}

Poly<Rational> dehomogenize(const BinaryQuartic<BigInt>& f) {
  std::vector<Rational> c(5);
  for (int k = 0; k < 5; ++k) c[k] = Rational(f[4 - k]);
  return Poly<Rational>(std::move(c));
}

namespace {

std::pair<BigInt, BigInt> primitive(BigInt r, BigInt s) {
  BigInt g = gcd(r, s);
  if (sgn(g) != 0) {
    r /= g;
    s /= g;
  }
  if (sgn(s) < 0 || (sgn(s) == 0 && sgn(r) < 0)) {
    r = -r;
    s = -s;
  }
  return {r, s};
}

}  // namespace

std::optional<std::pair<BigInt, BigInt>> rational_linear_factor(const BinaryQuartic<BigInt>& f) {
  if (f.is_zero_form()) fail(ErrorKind::ZeroForm, "rational_linear_factor of the zero form");
  if (sgn(f[0]) == 0) return std::make_pair(BigInt(1), BigInt(0));
  if (sgn(f[4]) == 0) return std::make_pair(BigInt(0), BigInt(1));
  // Any root r/s in lowest terms has s | a, so distinct candidates differ by
  // at least 1/a^2: an isolating interval narrower than that contains at most
  // one, and it must be the interval's simplest fraction.
  const SturmSequence sturm(dehomogenize(f));
  const BigInt a = abs(f[0]);
  const Rational width(BigInt(1), BigInt(2 * a * a));
  for (RootInterval iv : sturm.isolate()) {
    iv = sturm.refine(iv, width);
    const Rational cand = simplest_fraction_between(iv.lo, iv.hi);
    if (cand.get_den() > a) continue;
    const BigInt r = cand.get_num();
    const BigInt s = cand.get_den();
    if (sgn(f(r, s)) == 0) return primitive(r, s);
  }
  return std::nullopt;
}

int count_real_projective_roots(const BinaryQuartic<Rational>& f) {
  if (f.is_zero_form()) fail(ErrorKind::ZeroForm, "real roots of the zero form");
  std::vector<Rational> c(5);
  for (int k = 0; k < 5; ++k) c[k] = f[4 - k];
  const Poly<Rational> g(std::move(c));
  const int at_infinity = sgn(f[0]) == 0 ? 1 : 0;
  if (g.degree() < 1) return at_infinity;
  return SturmSequence(g).count_real() + at_infinity;
}

QuarticClassification real_classification(const BinaryQuartic<BigInt>& f) {
  QuarticClassification q;
  q.disc_is_zero = sgn(resultant_discriminant(f)) == 0;
  if (f.is_zero_form()) return q;
  q.has_rational_linear_factor = rational_linear_factor(f).has_value();
  BinaryQuartic<Rational> fr;
  for (int k = 0; k < 5; ++k) fr[k] = Rational(f[k]);
  q.real_roots = count_real_projective_roots(fr);
  if (!q.disc_is_zero) q.real_class = (4 - q.real_roots) / 2;
  return q;
}

std::vector<std::pair<ModInt, ModInt>> roots_mod_p(const BinaryQuartic<ModInt>& f) {
  std::int64_t p = 0;
  for (int k = 0; k < 5; ++k)
    if (f[k].bound()) p = f[k].modulus();
  if (p == 0) fail(ErrorKind::InvalidArgument, "roots_mod_p needs residues with a bound modulus");
  if (f.is_zero_form()) fail(ErrorKind::ZeroForm, "form vanishes identically mod " + std::to_string(p));
  std::vector<std::pair<ModInt, ModInt>> out;
  const ModInt one(1, p);
  for (std::int64_t x = 0; x < p; ++x) {
    const ModInt xv(x, p);
    if (is_zero(f(xv, one))) out.emplace_back(xv, one);
  }
  if (is_zero(f[0])) out.emplace_back(one, ModInt(0, p));
  return out;
}

bool is_strongly_irreducible(const PairOfQuadrics<BigInt>& p) {
  const BinaryQuartic<BigInt> f = resolvent_quartic(p);
  if (f.is_zero_form()) return false;
  if (sgn(quartic_invariants(f).scaled_disc) == 0) return false;
  return !rational_linear_factor(f).has_value();
}

}  // namespace qpl
