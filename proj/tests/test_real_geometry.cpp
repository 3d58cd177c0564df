#include <doctest.h>

#include <cmath>
#include <random>

#include "qpl/quartic.hpp"
#include "qpl/real_geometry.hpp"

using namespace qpl;

namespace {

PairOfQuadrics<double> diagonal(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  PairOfQuadrics<double> p;
  for (int i = 0; i < 4; ++i) {
    p.a_at(i, i) = a[i];
    p.b_at(i, i) = b[i];
  }
  return p;
}

Eigen::Matrix4d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = n(rng);
  Eigen::HouseholderQR<Eigen::Matrix4d> qr(m);
  Eigen::Matrix4d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

PairOfQuadrics<double> act4(const Eigen::Matrix4d& g, const PairOfQuadrics<double>& p) {
  Mat4<double> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = g(i, j);
  return act(identity2<double>(), m, p);
}

// Oracle: Gauss-Newton from many random starts on the unit sphere.
bool oracle_finds_zero(const PairOfQuadrics<double>& p, std::mt19937_64& rng, int starts) {
  const Eigen::Matrix4d A = doubled_gram(p, true);
  const Eigen::Matrix4d B = doubled_gram(p, false);
  const double s = std::max(A.norm(), B.norm());
  std::normal_distribution<double> n;
  for (int k = 0; k < starts; ++k) {
    Eigen::Vector4d x(n(rng), n(rng), n(rng), n(rng));
    x.normalize();
    for (int it = 0; it < 30; ++it) {
      const Eigen::Vector2d r(0.5 * x.dot(A * x), 0.5 * x.dot(B * x));
      Eigen::Matrix<double, 2, 4> J;
      J.row(0) = (A * x).transpose();
      J.row(1) = (B * x).transpose();
      const Eigen::Matrix2d JJ = J * J.transpose();
      if (std::fabs(JJ.determinant()) < 1e-300) break;
      x -= J.transpose() * JJ.inverse() * r;
      x.normalize();
    }
    if (std::fabs(0.5 * x.dot(A * x)) < 1e-6 * s && std::fabs(0.5 * x.dot(B * x)) < 1e-6 * s) return true;
  }
  return false;
}

bool positive_definite(const Eigen::Matrix4d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  return es.eigenvalues().minCoeff() > 0;
}

}  // namespace

TEST_CASE("representatives have the expected classes and resolvents") {
  FamilyParams z;
  z.lambdas = {1, 0, -1};
  const auto L0 = representative_L(RealFamily::ZeroSharp, z);
  CHECK(real_class(L0) == 0);
  const auto f0 = resolvent_quartic(L0);
  // 16 y x (x^2 - y^2) = 16 x^3 y - 16 x y^3
  CHECK(f0 == BinaryQuartic<double>(0, 16, 0, -16, 0));
  const auto [I, J] = quartic_IJ(f0);
  CHECK(I == doctest::Approx(768));
  CHECK(J == doctest::Approx(0));

  FamilyParams t;
  t.r1 = 2;
  t.r2 = 1;
  const auto L2 = representative_L(RealFamily::Two, t);
  CHECK(real_class(L2) == 2);
  CHECK(resolvent_quartic(L2) == BinaryQuartic<double>(16, 0, 80, 0, 64));
  CHECK(is_R_soluble(L2));

  FamilyParams o;
  o.kappa = 16;
  o.lambda = 0;
  o.r = 1;
  const auto L1 = representative_L(RealFamily::One, o);
  CHECK(real_class(L1) == 1);
  // 256 y x (x^2 + y^2)
  const auto f1 = resolvent_quartic(L1);
  CHECK(f1[0] == doctest::Approx(0));
  CHECK(f1[1] == doctest::Approx(256));
  CHECK(f1[2] == doctest::Approx(0));
  CHECK(f1[3] == doctest::Approx(256));
  CHECK(f1[4] == doctest::Approx(0));
  CHECK(is_R_soluble(L1));

  CHECK_THROWS_AS(representative_L(RealFamily::ZeroSharp, FamilyParams{1, {0, 1, 2}}), Error);
  FamilyParams bad;
  bad.r1 = 1;
  bad.r2 = 2;
  CHECK_THROWS_AS(representative_L(RealFamily::Two, bad), Error);
}

TEST_CASE("representative resolvents factor as prescribed at random parameters") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3, 3), pos(0.1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    FamilyParams q;
    q.kappa = pos(rng);
    std::array<double, 3> l{u(rng), u(rng), u(rng)};
    std::sort(l.begin(), l.end(), std::greater<>());
    if (l[0] - l[1] < 0.05 || l[1] - l[2] < 0.05) continue;
    q.lambdas = l;
    q.lambda = u(rng);
    q.r = pos(rng);
    q.r2 = pos(rng);
    q.r1 = q.r2 + pos(rng);
    for (auto fam : {RealFamily::ZeroSharp, RealFamily::One, RealFamily::Two}) {
      const auto f = resolvent_quartic(representative_L(fam, q));
      const auto g = family_quartic(fam, q);
      for (int k = 0; k < 5; ++k) CHECK(f[k] == doctest::Approx(16 * g[k]).epsilon(1e-10).scale(1));
    }
    const auto L0 = representative_L(RealFamily::ZeroSharp, q);
    CHECK(real_class(L0) == 0);
    CHECK(is_R_soluble(L0));
    const auto w = real_common_zero(L0);
    REQUIRE(w.has_value());
    const auto A = doubled_gram(L0, true), B = doubled_gram(L0, false);
    CHECK(std::fabs(w->dot(A * *w)) < 1e-9 * A.norm());
    CHECK(std::fabs(w->dot(B * *w)) < 1e-9 * B.norm());
  }
}

TEST_CASE("simultaneous diagonalisation") {
  const auto p = diagonal({1, 1, 1, -1}, {1, 2, 3, -4});
  const auto d = simultaneous_diagonalize(p);
  const DiagonalPencil ref = [&] {
    DiagonalPencil r;
    r.a = {2, 2, 2, -2};
    r.b = {2, 4, 6, -8};
    return r.normalized();
  }();
  for (int i = 0; i < 4; ++i) {
    CHECK(d.a[i] == doctest::Approx(ref.a[i]).epsilon(1e-8));
    CHECK(d.b[i] == doctest::Approx(ref.b[i]).epsilon(1e-8));
  }
  // The L^(0#) representative is already diagonal: points (0,1),(-1,-1),(1,0),(-1,1).
  FamilyParams z;
  z.lambdas = {1, 0, -1};
  const auto dz = simultaneous_diagonalize(representative_L(RealFamily::ZeroSharp, z));
  DiagonalPencil rz;
  rz.a = {0, -1, 1, -1};
  rz.b = {1, -1, 0, 1};
  rz = rz.normalized();
  for (int i = 0; i < 4; ++i) {
    CHECK(dz.a[i] == doctest::Approx(rz.a[i]).epsilon(1e-8));
    CHECK(dz.b[i] == doctest::Approx(rz.b[i]).epsilon(1e-8));
  }
  CHECK_THROWS_AS(simultaneous_diagonalize(representative_L(RealFamily::Two, FamilyParams{})), Error);
}

TEST_CASE("diagonalisation round trip under rotations") {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 4> a{}, b{};
    for (int i = 0; i < 4; ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    const auto p = diagonal(a, b);
    PairOfQuadrics<double> q;
    try {
      if (real_class(p) != 0) continue;
    } catch (const Error&) {
      continue;
    }
    const auto base = simultaneous_diagonalize(p);
    const auto g = random_rotation(rng);
    const auto d = simultaneous_diagonalize(act4(g, p));
    for (int i = 0; i < 4; ++i) {
      CHECK(d.a[i] == doctest::Approx(base.a[i]).epsilon(1e-8).scale(1));
      CHECK(d.b[i] == doctest::Approx(base.b[i]).epsilon(1e-8).scale(1));
    }
    // M reproduces the diagonal forms.
    const Eigen::Matrix4d Ad = d.M * doubled_gram(act4(g, p), true) * d.M.transpose();
    for (int i = 0; i < 4; ++i) CHECK(Ad(i, i) == doctest::Approx(d.a[i]).epsilon(1e-8).scale(1));
  }
}

TEST_CASE("R-solubility examples") {
  CHECK(is_R_soluble(representative_L(RealFamily::Two, FamilyParams{})));
  CHECK_FALSE(is_R_soluble(diagonal({1, 1, 1, 1}, {1, 2, 3, 4})));
  const auto cert = insolubility_certificate(diagonal({1, 1, 1, 1}, {1, 2, 3, 4}));
  REQUIRE(cert.has_value());
  const auto p = diagonal({1, 1, 1, 1}, {1, 2, 3, 4});
  CHECK(positive_definite((*cert)(0) * doubled_gram(p, true) + (*cert)(1) * doubled_gram(p, false)));

  // Points (1,1), (1,-1), (-1,1), (-1,-1) surround the origin. The pencil has
  // repeated roots, so the pair-level entry point rejects it, while the hull
  // test on the diagonal pencil applies directly.
  DiagonalPencil d;
  d.a = {1, 1, -1, -1};
  d.b = {1, -1, 1, -1};
  CHECK(hull_soluble(d));
  const auto y = hull_witness(d);
  REQUIRE(y.has_value());
  double qa = 0, qb = 0;
  for (int i = 0; i < 4; ++i) {
    qa += d.a[i] * (*y)(i) * (*y)(i);
    qb += d.b[i] * (*y)(i) * (*y)(i);
  }
  CHECK(std::fabs(qa) < 1e-12);
  CHECK(std::fabs(qb) < 1e-12);
  CHECK(y->norm() > 0.5);
  CHECK_THROWS_AS(is_R_soluble(diagonal({1, 1, -1, -1}, {1, -1, 1, -1})), Error);
  DiagonalPencil h;
  h.a = {1, 1, 1, 1};
  h.b = {1, 2, 3, 4};
  CHECK_FALSE(hull_soluble(h));
  CHECK_THROWS_AS(real_class(diagonal({1, 1, 1, 1}, {1, 1, 3, 4})), Error);
}

TEST_CASE("hull criterion agrees with a numerical search on random pencils") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n;
  int tested = 0, soluble = 0, insoluble = 0;
  while (tested < 100) {
    std::array<double, 4> a{}, b{};
    for (int i = 0; i < 4; ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    // Bias half of the samples into a half-plane so both verdicts occur.
    if (tested % 2 == 0)
      for (int i = 0; i < 4; ++i) a[i] = std::fabs(a[i]) + 0.1;
    const auto p0 = diagonal(a, b);
    const auto p = act4(random_rotation(rng), p0);
    int cls = -1;
    try {
      cls = real_class(p);
    } catch (const Error&) {
      continue;
    }
    if (cls != 0) continue;
    ++tested;
    const bool verdict = is_R_soluble(p);
    if (verdict) {
      ++soluble;
      const auto w = real_common_zero(p);
      REQUIRE(w.has_value());
      const double s = doubled_gram(p, true).norm() + doubled_gram(p, false).norm();
      CHECK(std::fabs(w->dot(doubled_gram(p, true) * *w)) < 1e-8 * s);
      CHECK(std::fabs(w->dot(doubled_gram(p, false) * *w)) < 1e-8 * s);
    } else {
      ++insoluble;
      // The numerical search must not find a point, and the certificate proves none exists.
      CHECK_FALSE(oracle_finds_zero(p, rng, 2000));
      const auto c = insolubility_certificate(p);
      REQUIRE(c.has_value());
      CHECK(positive_definite((*c)(0) * doubled_gram(p, true) + (*c)(1) * doubled_gram(p, false)));
    }
  }
  CHECK(soluble > 10);
  CHECK(insoluble > 10);
}
