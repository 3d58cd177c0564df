#include "qpl/real_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qpl/quartic.hpp"

namespace qpl {

namespace {

PairOfQuadrics<Rational> exact(const PairOfQuadrics<double>& p) {
  return map_pair<Rational>(p, [](double x) {
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "non-finite coordinate");
    return Rational(x);  // exact binary expansion
  });
}

double angle(double a, double b) { return std::atan2(b, a); }

}  // namespace

Eigen::Matrix4d doubled_gram(const PairOfQuadrics<double>& p, bool first) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = p.doubled(first, i, j);
  return m;
}

DiagonalPencil DiagonalPencil::normalized() const {
  std::array<int, 4> idx{0, 1, 2, 3};
  DiagonalPencil out;
  std::array<double, 4> an{}, bn{};
  for (int i = 0; i < 4; ++i) {
    const double n = std::hypot(a[i], b[i]);
    an[i] = a[i] / n;
    bn[i] = b[i] / n;
  }
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return angle(an[x], bn[x]) < angle(an[y], bn[y]); });
  for (int i = 0; i < 4; ++i) {
    out.a[i] = an[idx[i]];
    out.b[i] = bn[idx[i]];
    const double n = std::hypot(a[idx[i]], b[idx[i]]);
    out.M.row(i) = M.row(idx[i]) / std::sqrt(n);
  }
  return out;
}

int real_class(const PairOfQuadrics<double>& p) {
  const PairOfQuadrics<Rational> q = exact(p);
  const BinaryQuartic<Rational> f = resolvent_quartic(q);
  const auto [I, J] = quartic_IJ(f);
  const Rational disc = 4 * I * I * I - J * J;
  const Rational i3 = 4 * abs(Rational(I * I * I));
  const Rational j2 = J * J;
  const Rational h = i3 > j2 ? i3 : j2;
  if (abs(disc) <= Rational(tolerance::degeneracy) * h)
    fail(ErrorKind::Degenerate, "discriminant indistinguishable from zero");
  return (4 - count_real_projective_roots(f)) / 2;
}

DiagonalPencil simultaneous_diagonalize(const PairOfQuadrics<double>& p) {
  if (real_class(p) != 0) fail(ErrorKind::Degenerate, "pencil does not have four real roots");
  const Eigen::Matrix4d A = doubled_gram(p, true);
  const Eigen::Matrix4d B = doubled_gram(p, false);
  const double scale = std::max(A.norm(), B.norm());
  // Deterministic retry schedule: C = A + k B for k = 1, 2, 3, ...
  for (int k = 1; k <= 16; ++k) {
    const Eigen::Matrix4d C = A + k * B;
    if (std::fabs(C.determinant()) <= 1e-8 * std::pow(scale * (1 + k), 4)) continue;
    Eigen::EigenSolver<Eigen::Matrix4d> es(C.inverse() * B);
    if (es.info() != Eigen::Success) continue;
    const auto vals = es.eigenvalues();
    bool real = true;
    for (int i = 0; i < 4; ++i)
      if (std::fabs(vals[i].imag()) > tolerance::roundtrip * (1 + std::abs(vals[i]))) real = false;
    if (!real) continue;
    DiagonalPencil d;
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d v = es.eigenvectors().col(i).real();
      v.normalize();
      d.M.row(i) = v.transpose();
      d.a[i] = v.dot(A * v);
      d.b[i] = v.dot(B * v);
    }
    // Off-diagonal terms must vanish; otherwise eigenvalues were clustered.
    const Eigen::Matrix4d Ad = d.M * A * d.M.transpose();
    const Eigen::Matrix4d Bd = d.M * B * d.M.transpose();
    double off = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) off = std::max({off, std::fabs(Ad(i, j)), std::fabs(Bd(i, j))});
    if (off > tolerance::roundtrip * scale) continue;
    bool regular = true;
    for (int i = 0; i < 4; ++i)
      if (std::hypot(d.a[i], d.b[i]) <= tolerance::roundtrip * scale) regular = false;
    if (!regular) fail(ErrorKind::Degenerate, "singular pencil member");
    return d.normalized();
  }
  fail(ErrorKind::Tolerance, "could not diagonalize pencil within tolerance");
}

namespace {

// Largest cyclic gap between consecutive angles, with the index after which it occurs.
std::pair<double, int> max_gap(const DiagonalPencil& d) {
  double best = -1;
  int at = 0;
  for (int i = 0; i < 4; ++i) {
    const double t0 = angle(d.a[i], d.b[i]);
    double t1 = angle(d.a[(i + 1) % 4], d.b[(i + 1) % 4]);
    if (i == 3) t1 += 2 * std::numbers::pi;
    if (t1 - t0 > best) {
      best = t1 - t0;
      at = i;
    }
  }
  return {best, at};
}

}  // namespace

bool hull_soluble(const DiagonalPencil& d) {
  return max_gap(d.normalized()).first <= std::numbers::pi + tolerance::hull;
}

bool is_R_soluble(const PairOfQuadrics<double>& p) {
  if (real_class(p) != 0) return true;
  return hull_soluble(simultaneous_diagonalize(p));
}

std::optional<Eigen::Vector2d> insolubility_certificate(const PairOfQuadrics<double>& p) {
  if (real_class(p) != 0) return std::nullopt;
  const DiagonalPencil d = simultaneous_diagonalize(p);
  const auto [gap, at] = max_gap(d);
  if (gap <= std::numbers::pi + tolerance::hull) return std::nullopt;
  // The points occupy the arc opposite the gap; aim at its midpoint.
  const double start = angle(d.a[at], d.b[at]);
  const double mid = start + gap / 2 + std::numbers::pi;
  return Eigen::Vector2d(std::cos(mid), std::sin(mid));
}

std::optional<Eigen::Vector4d> hull_witness(const DiagonalPencil& d_in) {
  const DiagonalPencil d = d_in.normalized();
  std::optional<std::array<double, 4>> t;
  // Find t >= 0, not all zero, with sum t_i (a_i, b_i) = 0 among pairs and
  // triples of points (Caratheodory).
  for (int i = 0; i < 4 && !t; ++i)
    for (int j = i + 1; j < 4 && !t; ++j) {
      // Opposite points.
      const double cross = d.a[i] * d.b[j] - d.b[i] * d.a[j];
      const double dot = d.a[i] * d.a[j] + d.b[i] * d.b[j];
      if (std::fabs(cross) < 1e-12 && dot < 0) {
        std::array<double, 4> s{};
        s[i] = 1;
        s[j] = 1;
        t = s;
      }
    }
  for (int skip = 0; skip < 4 && !t; ++skip) {
    int id[3], n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) id[n++] = i;
    // Barycentric weights proportional to the opposite cross products.
    auto cr = [&](int u, int v) { return d.a[u] * d.b[v] - d.b[u] * d.a[v]; };
    const double w0 = cr(id[1], id[2]);
    const double w1 = cr(id[2], id[0]);
    const double w2 = cr(id[0], id[1]);
    const double tot = w0 + w1 + w2;
    if (std::fabs(tot) < 1e-14) continue;
    const double l0 = w0 / tot, l1 = w1 / tot, l2 = w2 / tot;
    if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12) {
      std::array<double, 4> s{};
      s[id[0]] = std::max(0.0, l0);
      s[id[1]] = std::max(0.0, l1);
      s[id[2]] = std::max(0.0, l2);
      t = s;
    }
  }
  if (!t) return std::nullopt;
  // Undo the per-row scaling of normalized(): y_i = sqrt(t_i) in the rows of d.M.
  Eigen::Vector4d y;
  for (int i = 0; i < 4; ++i) y(i) = std::sqrt((*t)[i]);
  // Express in the coordinates of d_in: rows of d.M are rescaled rows of d_in.M.
  const Eigen::Vector4d x = d.M.transpose() * y;
  return Eigen::Vector4d(d_in.M.transpose().fullPivLu().solve(x));
}

std::optional<Eigen::Vector4d> real_common_zero(const PairOfQuadrics<double>& p) {
  const int cls = real_class(p);
  const Eigen::Matrix4d A = doubled_gram(p, true);
  const Eigen::Matrix4d B = doubled_gram(p, false);
  if (cls == 0) {
    const DiagonalPencil d = simultaneous_diagonalize(p);
    const auto y = hull_witness(d);
    if (!y) return std::nullopt;
    Eigen::Vector4d x = d.M.transpose() * *y;
    x.normalize();
    return x;
  }
  // Classes 1 and 2 are always soluble; locate a zero by Newton's method on
  // (Q_A, Q_B) from deterministic starting points.
  for (int start = 0; start < 256; ++start) {
    Eigen::Vector4d x;
    for (int i = 0; i < 4; ++i) x(i) = std::sin(1.0 + 7.3 * start + 2.1 * i * (start + 1));
    x.normalize();
    for (int it = 0; it < 100; ++it) {
      const Eigen::Vector2d r(0.5 * x.dot(A * x), 0.5 * x.dot(B * x));
      if (r.norm() < 1e-14 * (1 + A.norm() + B.norm())) break;
      Eigen::Matrix<double, 2, 4> J;
      J.row(0) = (A * x).transpose();
      J.row(1) = (B * x).transpose();
      const Eigen::Vector4d step = J.transpose() * (J * J.transpose()).ldlt().solve(r);
      x -= step;
      x.normalize();
    }
    const double qa = 0.5 * x.dot(A * x), qb = 0.5 * x.dot(B * x);
    if (std::hypot(qa, qb) < 1e-10 * (1 + A.norm() + B.norm())) return x;
  }
  return std::nullopt;
}

namespace {

void check_params(RealFamily family, const FamilyParams& q) {
  if (!(q.kappa > 0)) fail(ErrorKind::InvalidArgument, "kappa must be positive");
  switch (family) {
    case RealFamily::ZeroSharp:
      if (!(q.lambdas[0] > q.lambdas[1] && q.lambdas[1] > q.lambdas[2]))
        fail(ErrorKind::InvalidArgument, "need lambda1 > lambda2 > lambda3");
      break;
    case RealFamily::One:
      if (!(q.r > 0)) fail(ErrorKind::InvalidArgument, "need r > 0");
      break;
    case RealFamily::Two:
      if (!(q.r1 > q.r2 && q.r2 > 0)) fail(ErrorKind::InvalidArgument, "need r1 > r2 > 0");
      break;
  }
}

}  // namespace

PairOfQuadrics<double> representative_L(RealFamily family, const FamilyParams& q) {
  check_params(family, q);
  PairOfQuadrics<double> p;
  const double k = std::pow(q.kappa, 0.25);
  // Gram entries g on the diagonal are coordinates g; off-diagonal Gram 1 is coordinate 2.
  switch (family) {
    case RealFamily::ZeroSharp:
      p.a_at(1, 1) = -k;
      p.a_at(2, 2) = k;
      p.a_at(3, 3) = -k;
      p.b_at(0, 0) = k;
      p.b_at(1, 1) = -k * q.lambdas[0];
      p.b_at(2, 2) = k * q.lambdas[1];
      p.b_at(3, 3) = -k * q.lambdas[2];
      break;
    case RealFamily::One:
      p.a_at(1, 1) = -k;
      p.a_at(2, 3) = 2 * k;
      p.b_at(0, 0) = k;
      p.b_at(1, 1) = -k * q.lambda;
      p.b_at(2, 2) = k * q.r;
      p.b_at(3, 3) = -k * q.r;
      break;
    case RealFamily::Two:
      p.a_at(0, 1) = 2 * k;
      p.a_at(2, 3) = 2 * k;
      p.b_at(0, 0) = k * q.r1;
      p.b_at(1, 1) = -k * q.r1;
      p.b_at(2, 2) = k * q.r2;
      p.b_at(3, 3) = -k * q.r2;
      break;
  }
  return p;
}

BinaryQuartic<double> family_quartic(RealFamily family, const FamilyParams& q) {
  check_params(family, q);
  std::vector<double> prod{q.kappa};
  auto lin = [&](double u, double v) { prod = BinaryQuartic<double>::multiply_linear(prod, {u, v}); };
  auto quad = [&](double r2) {
    // times (x^2 + r2 y^2)
    std::vector<double> next(prod.size() + 2, 0.0);
    for (std::size_t i = 0; i < prod.size(); ++i) {
      next[i] += prod[i];
      next[i + 2] += r2 * prod[i];
    }
    prod = next;
  };
  switch (family) {
    case RealFamily::ZeroSharp:
      lin(0, 1);
      for (double l : q.lambdas) lin(1, l);
      break;
    case RealFamily::One:
      lin(0, 1);
      lin(1, q.lambda);
      quad(q.r * q.r);
      break;
    case RealFamily::Two:
      quad(q.r1 * q.r1);
      quad(q.r2 * q.r2);
      break;
  }
  return BinaryQuartic<double>(prod[0], prod[1], prod[2], prod[3], prod[4]);
}

}  // namespace qpl
