#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qpl/sieve.hpp"

using namespace qpl;

namespace {

BigInt pw(std::int64_t p, int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

int vp(const BigInt& x, std::int64_t p) { return valuation(x, p); }

// Random pair satisfying conditions (1) and (2) with nonzero discriminant.
PairOfQuadrics<BigInt> random_normalized(std::mt19937_64& rng, std::int64_t p) {
  std::uniform_int_distribution<int> d(-6, 6);
  for (;;) {
    auto v = oracle::random_pair(rng, -6, 6);
    v.a_at(0, 0) = d(rng) * pw(p, 2);
    for (int j = 1; j < 4; ++j) v.a_at(0, j) = d(rng) * p;
    v.b_at(0, 0) = d(rng) * p;
    if (discriminant(v) != 0) return v;
  }
}

PairOfQuadrics<BigInt> diagonal(const std::array<long, 4>& a, const std::array<long, 4>& b) {
  PairOfQuadrics<BigInt> v;
  for (int i = 0; i < 4; ++i) {
    v.a_at(i, i) = a[i];
    v.b_at(i, i) = b[i];
  }
  return v;
}

PairOfQuadrics<BigInt> random_direction(std::mt19937_64& rng) { return oracle::random_pair(rng, -50, 50); }

PairOfQuadrics<BigInt> plus_p_times(const PairOfQuadrics<BigInt>& v, const PairOfQuadrics<BigInt>& w, std::int64_t p) {
  PairOfQuadrics<BigInt> r = v;
  for (int k = 0; k < 20; ++k) r.coord(k) += p * w.coord(k);
  return r;
}

}  // namespace

TEST_CASE("discriminant is (4I^3 - J^2)/27") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto v = oracle::random_pair(rng, -5, 5);
    const auto inv = invariants(v);
    CHECK(27 * discriminant(v) == 4 * inv.I * inv.I * inv.I - inv.J * inv.J);
  }
}

TEST_CASE("in_Wp basic examples") {
  std::mt19937_64 rng(2);
  for (std::int64_t p : {5, 7, 11}) {
    const auto v = oracle::random_pair(rng, -5, 5).scaled(BigInt(static_cast<long>(p)));
    CHECK(in_Wp(v, p));
    CHECK(in_Wp1(v, p));
  }
  // s = 3 witness lifted to Z at p = 11.
  PairOfQuadrics<BigInt> q;
  for (int i = 0; i < 4; ++i) q.a_at(i, i) = 1;
  q.b_at(0, 1) = 2;
  q.b_at(1, 2) = 6;
  q.b_at(2, 3) = 2;
  CHECK(vp(discriminant(q), 11) == 0);
  CHECK_FALSE(in_Wp(q, 11));
  CHECK_FALSE(in_Wp1(q, 11));
  CHECK_THROWS_AS(in_Wp(q, 3), Error);
  CHECK_THROWS_AS(in_Wp(q, 9), Error);
}

TEST_CASE("in_Wp against the valuation oracle for near-repeated roots") {
  // Resolvent 16 (x - y)(x - (1 - k p) y)(x + 2y)(x + 3y): one close pair.
  for (std::int64_t p : {5, 7, 13}) {
    for (long k : {1L, 2L, static_cast<long>(p)}) {
      const auto v = diagonal({1, 1, 1, 1}, {-1, -1 + k * static_cast<long>(p), 2, 3});
      const BigInt d = discriminant(v);
      REQUIRE(d != 0);
      CHECK(in_Wp(v, p) == (vp(d, p) >= 2));
    }
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto v = oracle::random_pair(rng, -3, 3);
    const BigInt d = discriminant(v);
    for (std::int64_t p : {5, 7}) CHECK(in_Wp(v, p) == (d == 0 || vp(d, p) >= 2));
  }
}

TEST_CASE("in_Wp1 flags agree with sampled directions; false flags come with a refutation") {
  std::mt19937_64 rng(4);
  int true_flags = 0, false_flags = 0;
  for (std::int64_t p : {5, 7}) {
    for (int i = 0; i < 50; ++i) {
      const auto n = random_normalized(rng, p);
      for (const auto& v : {n, apply_gamma_p(n, p)}) {
        const auto w = wp1_violating_direction(v, p);
        CHECK(in_Wp1(v, p) == !w.has_value());
        if (w) {
          ++false_flags;
          CHECK_FALSE(in_Wp1(v, p));
          CHECK(discriminant(plus_p_times(v, *w, p)) % pw(p, 2) != 0);
        } else {
          ++true_flags;
          CHECK(in_Wp(v, p));
          for (int s = 0; s < 100; ++s)
            CHECK(discriminant(plus_p_times(v, random_direction(rng), p)) % pw(p, 2) == 0);
        }
      }
    }
  }
  CHECK(true_flags > 0);
  CHECK(false_flags > 0);
}

TEST_CASE("in_Wp1 implies in_Wp") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto v = oracle::random_pair(rng, -4, 4);
    for (int k = 0; k < 20; k += 3) v.coord(k) *= 5;
    if (in_Wp1(v, 5)) CHECK(in_Wp(v, 5));
  }
}

TEST_CASE("gamma_p on normalized W_p^(2) pairs") {
  std::mt19937_64 rng(6);
  for (std::int64_t p : {5, 7}) {
    int wp2 = 0;
    while (wp2 < 100) {
      const auto v = random_normalized(rng, p);
      CHECK(is_normalized(v, p));
      CHECK(in_Wp(v, p));
      if (in_Wp1(v, p)) continue;
      ++wp2;
      const auto img = apply_gamma_p(v, p);
      CHECK(discriminant(img) == discriminant(v));
      CHECK(in_Wp1(img, p));
      CHECK(invariants(img) == invariants(v));
    }
  }
}

TEST_CASE("gamma_p acts by the displayed matrix pair") {
  const std::int64_t p = 5;
  std::mt19937_64 rng(7);
  const auto v = random_normalized(rng, p);
  const auto img = apply_gamma_p(v, p);
  CHECK(img.a_at(0, 0) * 25 == v.a_at(0, 0));
  for (int j = 1; j < 4; ++j) {
    CHECK(img.a_at(0, j) * 5 == v.a_at(0, j));
    CHECK(img.b_at(0, j) == v.b_at(0, j));
  }
  CHECK(img.b_at(0, 0) * 5 == v.b_at(0, 0));
  for (int i = 1; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      CHECK(img.a_at(i, j) == v.a_at(i, j));
      CHECK(img.b_at(i, j) == 5 * v.b_at(i, j));
    }

  PairOfQuadrics<BigInt> m;
  m.a_at(0, 0) = 25;
  m.a_at(1, 1) = 1;
  const auto mi = apply_gamma_p(m, p);
  CHECK(mi.a_at(0, 0) == 1);

  PairOfQuadrics<BigInt> bad;
  bad.a_at(0, 0) = 5;  // a11 = p only
  CHECK_THROWS_AS(apply_gamma_p(bad, p), Error);
}

TEST_CASE("normalize_Wp2 recovers conditions after a random integral move") {
  std::mt19937_64 rng(8);
  for (std::int64_t p : {5, 7}) {
    int done = 0;
    while (done < 60) {
      const auto v = random_normalized(rng, p);
      if (in_Wp1(v, p)) continue;
      const GroupElement<BigInt> g0(oracle::random_sl2(rng), oracle::random_sl4(rng));
      const auto moved = act(g0, v);
      const auto n = normalize_Wp2(moved, p);
      CHECK(is_normalized(n.pair, p));
      CHECK(n.pair == act(n.element, moved));
      CHECK(det2(n.element.g2()) * det4(n.element.g4()) == 1);
      CHECK(discriminant(n.pair) == discriminant(moved));
      const auto img = apply_gamma_p(n.pair, p);
      CHECK(in_Wp1(img, p));
      CHECK(discriminant(img) == discriminant(moved));
      ++done;
    }
  }
}

TEST_CASE("normalize_Wp2 edge cases") {
  std::mt19937_64 rng(9);
  const auto v = [&] {
    for (;;) {
      auto c = random_normalized(rng, 5);
      if (!in_Wp1(c, 5)) return c;
    }
  }();
  const auto n = normalize_Wp2(v, 5);
  CHECK(n.element == GroupElement<BigInt>::identity());
  CHECK(n.pair == v);

  CHECK_THROWS_AS(normalize_Wp2(oracle::random_pair(rng, -3, 3).scaled(BigInt(7)), 7), Error);

  // Gram B = [[2,3],[3,-2]] twice: det(x I + y B) = (x^2 + y^2)^2 mod 7, the
  // square of an irreducible quadratic.
  PairOfQuadrics<BigInt> q;
  for (int i = 0; i < 4; ++i) q.a_at(i, i) = 1;
  for (int blk : {0, 2}) {
    q.b_at(blk, blk) = 2;
    q.b_at(blk, blk + 1) = 6;
    q.b_at(blk + 1, blk + 1) = -2;
  }
  q.b_at(0, 0) += 7;
  REQUIRE(in_Wp(q, 7));
  const auto fq = reduce_mod(resolvent_quartic(q), 7);
  CHECK(fq == BinaryQuartic<ModInt>(ModInt(16, 7), ModInt(0, 7), ModInt(32, 7), ModInt(0, 7), ModInt(16, 7)));
  try {
    normalize_Wp2(q, 7);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNormalizable);
  }

  PairOfQuadrics<BigInt> unit;
  for (int i = 0; i < 4; ++i) {
    unit.a_at(i, i) = 1;
    unit.b_at(i, i) = i + 1;
  }
  CHECK_THROWS_AS(normalize_Wp2(unit, 5), Error);
}

TEST_CASE("sieve_data and tallies") {
  std::mt19937_64 rng(10);
  SieveScanRow total;
  total.p = 5;
  for (int i = 0; i < 40; ++i) {
    const auto v = random_normalized(rng, 5);
    const auto d = sieve_data(v, 5);
    CHECK(d.inWp);
    CHECK(d.inWp2 == !d.inWp1);
    if (d.inWp2) {
      REQUIRE(d.image.has_value());
      CHECK(in_Wp1(*d.image, 5));
    }
    total += sieve_tally(v, 5);
  }
  CHECK(total.count_Wp == 40);
  CHECK(total.count_Wp1 + total.count_Wp2 == 40);
  CHECK(total.gamma_verified == total.count_Wp2);
  CHECK(SieveScanRow::csv_header() == "p,count_Wp,count_Wp1,count_Wp2,gamma_verified");
  CHECK(total.csv_row().rfind("5,40,", 0) == 0);
}
