#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "qpl/quartic.hpp"
#include "qpl/sturm.hpp"

using namespace qpl;

namespace {

BinaryQuartic<BigInt> Q(long a, long b, long c, long d, long e) { return BinaryQuartic<BigInt>(a, b, c, d, e); }

BinaryQuartic<BigInt> random_quartic(std::mt19937_64& rng, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  return Q(d(rng), d(rng), d(rng), d(rng), d(rng));
}

BinaryQuartic<ModInt> Qp(std::int64_t p, long a, long b, long c, long d, long e) {
  return BinaryQuartic<ModInt>(ModInt(a, p), ModInt(b, p), ModInt(c, p), ModInt(d, p), ModInt(e, p));
}

// Real roots of f(x, 1) by companion-matrix eigenvalues, plus infinity.
int float_real_roots(const BinaryQuartic<BigInt>& f, double& margin) {
  int deg = 4;
  while (deg > 0 && f[4 - deg] == 0) --deg;
  int count = 4 - deg;  // roots at infinity (multiplicity)
  margin = 1.0;
  if (deg == 0) return count;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  const double lead = f[4 - deg].get_d();
  for (int i = 0; i < deg; ++i) comp(0, i) = -f[4 - deg + 1 + i].get_d() / lead;
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  for (int i = 0; i < deg; ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    const double im = std::fabs(z.imag()) / std::max(1.0, std::abs(z));
    margin = std::min(margin, im < 1e-8 ? 1.0 : im);
    if (im < 1e-8) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("invariant formulas") {
  const auto a = quartic_invariants(Q(0, 1, 0, 0, -2));
  CHECK(a.I == 0);
  CHECK(a.J == 54);
  const auto b = quartic_invariants(Q(1, 0, 0, 0, 1));
  CHECK(b.I == 12);
  CHECK(b.J == 0);
  CHECK(b.scaled_disc == 4 * 1728);
  CHECK(b.disc() == 256);
  CHECK(b.height() == 1728);
  const auto z = quartic_invariants(Q(0, 0, 0, 0, 0));
  CHECK(z.I == 0);
  CHECK(z.J == 0);
}

TEST_CASE("resultant discriminant matches (4I^3 - J^2)/27") {
  CHECK(resultant_discriminant(Q(1, 0, 0, 0, 1)) == 256);
  CHECK(resultant_discriminant(Q(0, 0, 0, 0, 0)) == 0);
  // x^2 y^2 has repeated roots.
  CHECK(resultant_discriminant(Q(0, 0, 1, 0, 0)) == 0);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto f = random_quartic(rng, trial < 1000 ? 3 : 50);
    const auto inv = quartic_invariants(f);
    REQUIRE(inv.scaled_disc % 27 == 0);
    REQUIRE(resultant_discriminant(f) == inv.scaled_disc / 27);
  }
}

TEST_CASE("Bareiss determinant against rational elimination") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n));
    oracle::RMat r(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m[i][j] = trial % 5 == 0 && j == 0 ? 0 : d(rng);
        r[i][j] = Rational(m[i][j]);
      }
    CHECK(Rational(bareiss_determinant(m)) == oracle::det_gauss(r));
  }
}

TEST_CASE("unimodular substitution preserves I and J") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = random_quartic(rng, 20);
    const auto g = oracle::random_sl2(rng);
    CHECK(quartic_invariants(f.substituted(g)) == quartic_invariants(f));
  }
}

TEST_CASE("rational linear factor examples") {
  CHECK(rational_linear_factor(Q(0, 1, 0, 0, -2)) == std::make_pair(BigInt(1), BigInt(0)));
  CHECK_FALSE(rational_linear_factor(Q(16, 0, 0, 0, 16)).has_value());
  // (x - 3y)(x^3 + x y^2 + y^3) = x^4 - 3x^3y + x^2y^2 - 2xy^3 - 3y^4
  const auto f = Q(1, -3, 1, -2, -3);
  CHECK(rational_linear_factor(f) == std::make_pair(BigInt(3), BigInt(1)));
  // (2x + 3y)(3x - 5y)(x^2 + y^2) has roots -3/2 and 5/3.
  std::vector<BigInt> q{BigInt(1)};
  q = BinaryQuartic<BigInt>::multiply_linear(q, {BigInt(2), BigInt(3)});
  q = BinaryQuartic<BigInt>::multiply_linear(q, {BigInt(3), BigInt(-5)});
  const BinaryQuartic<BigInt> h(q[0], q[1], q[0] + q[2], q[1], q[2]);  // times (x^2 + y^2)
  const auto r = rational_linear_factor(h);
  REQUIRE(r.has_value());
  CHECK(h(r->first, r->second) == 0);
  CHECK(((r->first == -3 && r->second == 2) || (r->first == 5 && r->second == 3)));
  CHECK_THROWS_AS(rational_linear_factor(Q(0, 0, 0, 0, 0)), Error);
}

TEST_CASE("rational linear factor agrees with divisor search") {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> d(-6, 6);
  for (int trial = 0; trial < 3000; ++trial) {
    BinaryQuartic<BigInt> f;
    if (trial % 2 == 0) {
      f = random_quartic(rng, 12);
    } else {
      // Plant a linear factor (u x + v y) times a random cubic.
      int u = d(rng), v = d(rng);
      if (u == 0 && v == 0) u = 1;
      std::vector<BigInt> c{BigInt(d(rng)), BigInt(d(rng)), BigInt(d(rng)), BigInt(d(rng))};
      const auto prod = BinaryQuartic<BigInt>::multiply_linear(c, {BigInt(u), BigInt(v)});
      f = BinaryQuartic<BigInt>(prod[0], prod[1], prod[2], prod[3], prod[4]);
    }
    if (f.is_zero_form()) continue;
    const auto mine = rational_linear_factor(f);
    const auto ref = oracle::rational_root_by_divisors(f);
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) {
      CHECK(f(mine->first, mine->second) == 0);
      CHECK(gcd(mine->first, mine->second) == 1);
    }
  }
}

TEST_CASE("real classification examples") {
  const auto a = real_classification(Q(16, 0, 0, 0, 16));
  CHECK(a.real_class == 2);
  CHECK_FALSE(a.disc_is_zero);
  // 16 x (x - y)(x + y) y = 16 x^3 y - 16 x y^3
  const auto b = real_classification(Q(0, 16, 0, -16, 0));
  CHECK(b.real_class == 0);
  CHECK(b.has_rational_linear_factor);
  const auto c = real_classification(Q(0, 1, 0, 0, -2));
  CHECK(c.real_class == 1);
  const auto d = real_classification(Q(0, 0, 1, 0, 0));
  CHECK(d.disc_is_zero);
  CHECK_FALSE(d.real_class.has_value());
}

TEST_CASE("real classification agrees with floating-point roots") {
  std::mt19937_64 rng(25);
  int compared = 0;
  while (compared < 1000) {
    const auto f = random_quartic(rng, 30);
    const auto inv = quartic_invariants(f);
    if (abs(inv.scaled_disc) < 1000) continue;
    double margin = 0;
    const int fr = float_real_roots(f, margin);
    if (margin < 1e-6) continue;
    const auto cls = real_classification(f);
    REQUIRE(cls.real_class.has_value());
    CHECK(*cls.real_class == (4 - fr) / 2);
    ++compared;
  }
}

TEST_CASE("Sturm sequence and simplest fractions") {
  // (t - 1)^2 (t + 2)(t^2 + 1): distinct real roots {1, -2}.
  Poly<Rational> p(std::vector<Rational>{1, -2, 1});
  p *= Poly<Rational>(std::vector<Rational>{2, 1});
  p *= Poly<Rational>(std::vector<Rational>{1, 0, 1});
  const SturmSequence s(p);
  CHECK(s.count_real() == 2);
  const auto ivs = s.isolate();
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].lo < -2);
  CHECK(ivs[0].hi >= -2);
  CHECK(simplest_fraction_between(Rational(1, 3), Rational(1, 2)) == Rational(1, 2));
  CHECK(simplest_fraction_between(Rational(3, 10), Rational(2, 5)) == Rational(1, 3));
  CHECK(simplest_fraction_between(Rational(-7, 5), Rational(-6, 5)) == Rational(-4, 3));
  CHECK(simplest_fraction_between(Rational(-1, 5), Rational(3)) == 0);
  CHECK(simplest_fraction_between(Rational(5, 2), Rational(7, 2)) == 3);
  // Brute force over small denominators.
  std::mt19937_64 rng(26);
  std::uniform_int_distribution<int> num(-200, 200), den(1, 60);
  for (int trial = 0; trial < 500; ++trial) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    if (a > b) std::swap(a, b);
    const Rational r = simplest_fraction_between(a, b);
    REQUIRE(r >= a);
    REQUIRE(r <= b);
    for (long q = 1; q < r.get_den().get_si(); ++q) {
      // No fraction with denominator q lies in [a, b].
      BigInt lo_num;
      const Rational aq = a * q;
      mpz_cdiv_q(lo_num.get_mpz_t(), aq.get_num_mpz_t(), aq.get_den_mpz_t());
      REQUIRE(frac(lo_num, q) > b);
    }
  }
}

TEST_CASE("roots mod p") {
  CHECK(roots_mod_p(Qp(11, 16, 0, 0, 0, 16)).empty());
  const auto r7 = roots_mod_p(Qp(7, 0, 1, 0, 0, -2));
  REQUIRE(r7.size() == 1);
  CHECK(r7[0].first == ModInt(1, 7));
  CHECK(r7[0].second == ModInt(0, 7));
  const auto r5 = roots_mod_p(Qp(5, 1, 0, 0, 0, -1));
  CHECK(r5.size() == 4);
  for (const auto& [x, y] : r5) CHECK(y == ModInt(1, 5));
  CHECK_THROWS_AS(roots_mod_p(Qp(5, 5, 10, 0, 0, -5)), Error);
}
