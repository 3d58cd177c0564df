#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qpl/forms.hpp"
#include "qpl/quartic.hpp"

using namespace qpl;

namespace {

using QP = Poly<Rational>;

// 2A = [[0,,,],[,,,1],[,,1,],[,1,,]], 2B = [[-1,,,],[,,1,],[,1,,],[,,,-t]].
PairOfQuadrics<QP> eq14_symbolic() {
  PairOfQuadrics<QP> p;
  const QP t = QP::x();
  p.a_at(1, 3) = QP(Rational(1));
  p.a_at(2, 2) = QP(Rational(1, 2));
  p.b_at(0, 0) = QP(Rational(-1, 2));
  p.b_at(1, 2) = QP(Rational(1));
  p.b_at(3, 3) = t.scaled(Rational(-1, 2));
  return p;
}

PairOfQuadrics<Rational> eq14(const Rational& t) {
  PairOfQuadrics<Rational> p;
  p.a_at(1, 3) = 1;
  p.a_at(2, 2) = Rational(1, 2);
  p.b_at(0, 0) = Rational(-1, 2);
  p.b_at(1, 2) = 1;
  p.b_at(3, 3) = -t / 2;
  return p;
}

// A = I, B with Gram off-diagonals 1, s, 1.
PairOfQuadrics<ModInt> eq13(std::int64_t p, std::int64_t s) {
  PairOfQuadrics<ModInt> q;
  for (int k = 0; k < 20; ++k) q.coord(k) = ModInt(0, p);
  for (int i = 0; i < 4; ++i) q.a_at(i, i) = ModInt(1, p);
  q.b_at(0, 1) = ModInt(2, p);
  q.b_at(1, 2) = ModInt(2 * s, p);
  q.b_at(2, 3) = ModInt(2, p);
  return q;
}

PairOfQuadrics<BigInt> diagonal_pair() {
  PairOfQuadrics<BigInt> p;
  for (int i = 0; i < 4; ++i) {
    p.a_at(i, i) = 1;
    p.b_at(i, i) = i + 1;
  }
  return p;
}

BinaryQuartic<BigInt> product_of_linear(const std::vector<std::pair<long, long>>& ls, long scale) {
  std::vector<BigInt> prod{BigInt(scale)};
  for (auto [u, v] : ls) prod = BinaryQuartic<BigInt>::multiply_linear(prod, {BigInt(u), BigInt(v)});
  return BinaryQuartic<BigInt>(prod[0], prod[1], prod[2], prod[3], prod[4]);
}

}  // namespace

TEST_CASE("coordinate labels and index map") {
  CHECK(coordinate_labels()[0] == "a11");
  CHECK(coordinate_labels()[9] == "a44");
  CHECK(coordinate_labels()[10] == "b11");
  CHECK(coordinate_index("b22") == 14);
  CHECK_FALSE(coordinate_index("c11").has_value());
  CHECK(sym_index(3, 1) == sym_index(1, 3));
}

TEST_CASE("resolvent of the t-parametrised witness is x^3 y - t y^4") {
  const auto f = resolvent_quartic(eq14_symbolic());
  const QP t = QP::x();
  CHECK(f[0] == QP());
  CHECK(f[1] == QP(Rational(1)));
  CHECK(f[2] == QP());
  CHECK(f[3] == QP());
  CHECK(f[4] == -t);
}

TEST_CASE("resolvent of the s^2 = -2 witness is 16(x^4 + y^4)") {
  for (auto [p, s] : std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 1}, {11, 3}, {19, 6}}) {
    CAPTURE(p);
    REQUIRE(ModInt(s * s, p) == ModInt(-2, p));
    const auto f = resolvent_quartic(eq13(p, s));
    CHECK(f[0] == ModInt(16, p));
    CHECK(is_zero(f[1]));
    CHECK(is_zero(f[2]));
    CHECK(is_zero(f[3]));
    CHECK(f[4] == ModInt(16, p));
  }
}

TEST_CASE("diagonal pair resolvent factors as 16 prod (x + i y)") {
  const auto f = resolvent_quartic(diagonal_pair());
  CHECK(f == product_of_linear({{1, 1}, {1, 2}, {1, 3}, {1, 4}}, 16));
  const auto o = oracle::resolvent_by_interpolation(diagonal_pair());
  for (int k = 0; k < 5; ++k) CHECK(f[k] == o[k]);
}

TEST_CASE("resolvent agrees with determinant interpolation on random pairs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = oracle::random_pair(rng, -6, 6);
    const auto f = resolvent_quartic(p);
    const auto o = oracle::resolvent_by_interpolation(p);
    for (int k = 0; k < 5; ++k) REQUIRE(f[k] == o[k]);
  }
}

TEST_CASE("resolvent over Z/mZ, double and int64 agree with the integer one") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_pair(rng, -4, 4);
    const auto f = resolvent_quartic(p);
    const auto fm = resolvent_quartic(reduce_mod(p, 12));
    const auto fd = resolvent_quartic(map_pair<double>(p, [](const BigInt& x) { return x.get_d(); }));
    const auto fi = resolvent_quartic(map_pair<std::int64_t>(p, [](const BigInt& x) { return x.get_si(); }));
    for (int k = 0; k < 5; ++k) {
      CHECK(fm[k] == mod(f[k], 12));
      CHECK(fd[k] == doctest::Approx(f[k].get_d()));
      CHECK(BigInt(static_cast<long>(fi[k])) == f[k]);
    }
  }
}

TEST_CASE("invariants of the witnesses") {
  for (long t = -3; t <= 3; ++t) {
    const auto f = resolvent_quartic(eq14(Rational(t)));
    const auto [I, J] = quartic_IJ(f);
    CHECK(I == 0);
    CHECK(J == 27 * t);
  }
  // x^4 + y^4 -> (12, 0); 16 (x^4 + y^4) -> (12 * 16^2, 0).
  const auto inv = quartic_invariants(BinaryQuartic<BigInt>(1, 0, 0, 0, 1));
  CHECK(inv.I == 12);
  CHECK(inv.J == 0);
  const auto inv16 = quartic_invariants(BinaryQuartic<BigInt>(16, 0, 0, 0, 16));
  CHECK(inv16.I == 12 * 256);
  const auto zero = invariants(PairOfQuadrics<BigInt>());
  CHECK(zero.I == 0);
  CHECK(zero.J == 0);
}

TEST_CASE("invariants have degrees 8 and 12") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = oracle::random_pair(rng, -5, 5);
    const auto base = invariants(p);
    for (long l = -2; l <= 3; ++l) {
      const auto s = invariants(p.scaled(BigInt(l)));
      BigInt l8, l12;
      mpz_pow_ui(l8.get_mpz_t(), BigInt(l).get_mpz_t(), 8);
      mpz_pow_ui(l12.get_mpz_t(), BigInt(l).get_mpz_t(), 12);
      CHECK(s.I == l8 * base.I);
      CHECK(s.J == l12 * base.J);
    }
  }
}

TEST_CASE("act: identity, shear example and scaling elements") {
  const auto p = diagonal_pair();
  CHECK(act(GroupElement<BigInt>::identity(), p) == p);

  const Mat2<BigInt> shear{{{BigInt(1), BigInt(1)}, {BigInt(0), BigInt(1)}}};
  const GroupElement<BigInt> g(shear, identity4<BigInt>());
  const auto f = resolvent_quartic(act(g, p));
  CHECK(f == product_of_linear({{2, 1}, {3, 2}, {4, 3}, {5, 4}}, 16));
  CHECK(twist_identity_check(g, p));

  const auto pr = to_rational(p);
  for (long l : {2L, -3L, 5L}) {
    const auto s = GroupElement<Rational>::scaling(Rational(l), frac(1, l));
    CHECK(act(s, pr) == pr);
  }
  for (std::int64_t l = 1; l < 7; ++l) {
    const ModInt lm(l, 7);
    const auto s = GroupElement<ModInt>::scaling(lm, lm.inverse());
    CHECK(act(s, reduce_mod(p, 7)) == reduce_mod(p, 7));
  }
}

TEST_CASE("act agrees with the Gram-matrix action and is a group action") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_pair(rng, -5, 5);
    const auto g2 = oracle::random_mat2(rng, -3, 3);
    const auto g4 = oracle::random_mat4(rng, -3, 3);
    REQUIRE(act(g2, g4, p) == oracle::act_via_gram(g2, g4, p));

    const GroupElement<BigInt> g(oracle::random_sl2(rng), oracle::random_sl4(rng));
    const GroupElement<BigInt> h(oracle::random_sl2(rng), oracle::random_sl4(rng));
    CHECK(act(g * h, p) == act(g, act(h, p)));
    // g2 and g4 actions commute.
    const auto i2 = identity2<BigInt>();
    const auto i4 = identity4<BigInt>();
    CHECK(act(g2, i4, act(i2, g4, p)) == act(i2, g4, act(g2, i4, p)));
  }
}

TEST_CASE("twist identity on random integral elements") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = oracle::random_pair(rng, -5, 5);
    const auto g2 = oracle::random_mat2(rng, -5, 5);
    const auto g4 = oracle::random_mat4(rng, -5, 5);
    REQUIRE(twist_identity_holds(g2, g4, p));
  }
}

TEST_CASE("twist identity with a symbolic parameter") {
  const auto p = eq14_symbolic();
  const QP t = QP::x();
  Mat2<QP> g2{{{QP(1), QP(2)}, {t, QP(1) + t}}};
  Mat4<QP> g4 = identity4<QP>();
  g4[0][3] = t;
  g4[2][1] = QP(-3);
  CHECK(twist_identity_holds(g2, g4, p));
}

TEST_CASE("GroupElement enforces the determinant condition") {
  auto doubled = identity4<BigInt>();
  doubled[0][0] = 2;
  CHECK_THROWS_AS(GroupElement<BigInt>(identity2<BigInt>(), doubled), Error);
  Mat2<Rational> g2{{{Rational(1, 2), Rational(0)}, {Rational(0), Rational(1)}}};
  Mat4<Rational> g4 = identity4<Rational>();
  g4[3][3] = 2;
  CHECK_NOTHROW(GroupElement<Rational>(g2, g4));
  Mat2<double> d2{{{0.5, 0.0}, {0.0, 1.0}}};
  Mat4<double> d4 = identity4<double>();
  d4[1][1] = 2.0 + 1e-12;
  CHECK_NOTHROW(GroupElement<double>(d2, d4));
  d4[1][1] = 2.1;
  CHECK_THROWS_AS(GroupElement<double>(d2, d4), Error);
}

TEST_CASE("GroupElement equality is modulo scaling") {
  Mat2<Rational> g2{{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}}};
  Mat4<Rational> g4 = identity4<Rational>();
  g4[0][1] = 3;
  const GroupElement<Rational> g(g2, g4);
  const auto s = GroupElement<Rational>::scaling(Rational(3), Rational(1, 3));
  CHECK(g * s == g);
  CHECK(s == GroupElement<Rational>::identity());
  const GroupElement<BigInt> z = GroupElement<BigInt>::identity();
  const auto minus = GroupElement<BigInt>::scaling(BigInt(-1), BigInt(-1));
  CHECK(z == minus);
  // Z/8Z: the scalar 3 is a unit.
  const auto m8 = GroupElement<ModInt>::scaling(ModInt(3, 8), ModInt(3, 8).inverse());
  Mat2<ModInt> i2{{{ModInt(1, 8), ModInt(0, 8)}, {ModInt(0, 8), ModInt(1, 8)}}};
  Mat4<ModInt> i4;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) i4[i][j] = ModInt(i == j ? 1 : 0, 8);
  CHECK(m8 == GroupElement<ModInt>(i2, i4));
  Mat2<ModInt> other = i2;
  other[0][1] = ModInt(1, 8);
  CHECK_FALSE(GroupElement<ModInt>(other, i4) == GroupElement<ModInt>(i2, i4));
}

TEST_CASE("mixed moduli are rejected") {
  PairOfQuadrics<ModInt> p;
  for (int k = 0; k < 20; ++k) p.coord(k) = ModInt(1, 5);
  Mat2<ModInt> g2{{{ModInt(1, 7), ModInt(0, 7)}, {ModInt(0, 7), ModInt(1, 7)}}};
  CHECK_THROWS_AS(act(g2, identity4<ModInt>(), p), Error);
}

TEST_CASE("strong irreducibility") {
  // t = 2 witness scaled to integers: 2A and 2B coordinates give a pair with
  // resolvent divisible by y.
  PairOfQuadrics<BigInt> w;
  w.a_at(1, 3) = 1;
  w.a_at(2, 2) = 1;
  w.b_at(0, 0) = -1;
  w.b_at(1, 2) = 1;
  w.b_at(3, 3) = -2;
  CHECK(resolvent_quartic(w)[0] == 0);
  CHECK_FALSE(is_strongly_irreducible(w));

  // Integral lift of the s = 3 witness: reduces to 16(x^4 + y^4) mod 11.
  PairOfQuadrics<BigInt> q;
  for (int i = 0; i < 4; ++i) q.a_at(i, i) = 1;
  q.b_at(0, 1) = 2;
  q.b_at(1, 2) = 6;
  q.b_at(2, 3) = 2;
  const auto f = resolvent_quartic(q);
  CHECK(reduce_mod(f, 11) == BinaryQuartic<ModInt>(ModInt(16, 11), ModInt(0, 11), ModInt(0, 11), ModInt(0, 11),
                                                   ModInt(16, 11)));
  CHECK(is_strongly_irreducible(q));

  CHECK_FALSE(is_strongly_irreducible(PairOfQuadrics<BigInt>()));
}

TEST_CASE("Lemma-style vanishing patterns force reducibility") {
  std::mt19937_64 rng(16);
  for (int c = 0; c < 4; ++c) {
    for (int trial = 0; trial < 100; ++trial) {
      auto p = oracle::random_pair(rng, -9, 9);
      for (int k : reducibility_patterns()[c]) p.coord(k) = 0;
      const auto label = reducibility_case(p);
      REQUIRE(label.has_value());
      CHECK(*label <= c + 1);
      CHECK_FALSE(is_strongly_irreducible(p));
      if (c == 0) CHECK(resolvent_quartic(p)[0] == 0);
      if (c == 3) CHECK(invariants(p).scaled_disc == 0);
    }
  }
  // Generic pairs (all coordinates nonzero) match no pattern.
  std::uniform_int_distribution<int> d(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    PairOfQuadrics<BigInt> p;
    for (int k = 0; k < 20; ++k) p.coord(k) = d(rng);
    CHECK_FALSE(reducibility_case(p).has_value());
  }
}

TEST_CASE("pair serialization round trip") {
  std::mt19937_64 rng(17);
  const auto p = oracle::random_pair(rng, -100, 100);
  CHECK(parse_pair(serialize_pair(p)) == p);
  CHECK_THROWS_AS(parse_pair("1 2 3"), Error);
  CHECK_THROWS_AS(parse_pair("1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16 17 18 19 x"), Error);
  const auto r = parse_rational_pair("0 0 0 0 0 0 1 1/2 0 0 -1/2 0 0 0 0 1 0 0 0 -1");
  const auto [I, J] = quartic_IJ(resolvent_quartic(r));
  CHECK(I == 0);
  CHECK(J == 54);
  CHECK(parse_quartic(serialize_quartic(BinaryQuartic<BigInt>(1, -2, 3, -4, 5))) ==
        BinaryQuartic<BigInt>(1, -2, 3, -4, 5));
}
