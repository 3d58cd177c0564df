#include "qpl/local_arith.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace qpl {

namespace {

// Arithmetic in F_p on machine integers (p < 2^31).
struct Fp {
  std::int64_t p;
  std::int64_t norm(std::int64_t a) const { return floor_mod(a, p); }
  std::int64_t add(std::int64_t a, std::int64_t b) const { return norm(a + b); }
  std::int64_t sub(std::int64_t a, std::int64_t b) const { return norm(a - b); }
  std::int64_t mul(std::int64_t a, std::int64_t b) const { return norm(a * b); }
  std::int64_t pow(std::int64_t a, std::int64_t e) const {
    std::int64_t r = 1;
    a = norm(a);
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  std::int64_t inv(std::int64_t a) const {
    if (norm(a) == 0) fail(ErrorKind::InvalidArgument, "division by zero in F_p");
    return pow(a, p - 2);
  }
};

using Vec4 = std::array<std::int64_t, 4>;
using Coords = std::array<std::int64_t, 10>;

struct PairFp {
  Fp F;
  Coords a{};
  Coords b{};
};

PairFp to_fp(const PairOfQuadrics<ModInt>& q) {
  PairFp r{Fp{modulus_of(q)}, {}, {}};
  for (int k = 0; k < 10; ++k) {
    r.a[k] = r.F.norm(q.a[k].value());
    r.b[k] = r.F.norm(q.b[k].value());
  }
  return r;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t quad(const Fp& F, const Coords& c, const Vec4& v) {
  std::int64_t acc = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) acc += c[sym_index(i, j)] * F.mul(v[i], v[j]) % F.p;
  return F.norm(acc);
}

// v^t (2C) w.
std::int64_t bilinear(const Fp& F, const Coords& c, const Vec4& v, const Vec4& w) {
  std::int64_t acc = 0;
  for (int i = 0; i < 4; ++i) {
    acc += 2 * c[sym_index(i, i)] % F.p * F.mul(v[i], w[i]) % F.p;
    for (int j = i + 1; j < 4; ++j) acc += c[sym_index(i, j)] * F.add(F.mul(v[i], w[j]), F.mul(v[j], w[i])) % F.p;
  }
  return F.norm(acc);
}

// (2C) v.
Vec4 gradient(const Fp& F, const Coords& c, const Vec4& v) {
  Vec4 g{};
  for (int k = 0; k < 4; ++k) {
    std::int64_t acc = 0;
    for (int l = 0; l < 4; ++l) {
      const std::int64_t entry = k == l ? 2 * c[sym_index(k, k)] : c[sym_index(std::min(k, l), std::max(k, l))];
      acc += F.mul(entry, v[l]);
    }
    g[k] = F.norm(acc);
  }
  return g;
}

std::int64_t det4_fp(const Fp& F, const std::array<Vec4, 4>& m) {
  Mat4<std::int64_t> mm;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) mm[i][j] = m[i][j];
  // Entries < 2^31: the Laplace expansion in int64 can overflow, so reduce
  // through BigInt.
  Mat4<BigInt> big;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) big[i][j] = static_cast<long>(mm[i][j]);
  return mod(det4(big), F.p).value();
}

Vec4 vec_from_index(std::int64_t idx, std::int64_t p) {
  Vec4 v{};
  for (int i = 3; i >= 0; --i) {
    v[i] = idx % p;
    idx /= p;
  }
  return v;
}

// Normalised representatives of P^3(F_p).
template <class Fn>
void for_each_proj_point(std::int64_t p, Fn&& fn) {
  for (int lead = 0; lead < 4; ++lead) {
    const int free = 3 - lead;
    std::int64_t count = 1;
    for (int i = 0; i < free; ++i) count *= p;
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Vec4 v{};
      v[lead] = 1;
      std::int64_t r = idx;
      for (int j = 3; j > lead; --j) {
        v[j] = r % p;
        r /= p;
      }
      fn(v);
    }
  }
}

}  // namespace

std::int64_t modulus_of(const PairOfQuadrics<ModInt>& p) {
  std::int64_t m = 0;
  for (int k = 0; k < 20; ++k) {
    const ModInt& c = p.coord(k);
    if (!c.bound()) continue;
    if (m != 0 && c.modulus() != m) fail(ErrorKind::DomainMismatch, "pair mixes moduli");
    m = c.modulus();
  }
  if (m == 0) fail(ErrorKind::InvalidArgument, "pair has no bound modulus");
  return m;
}

std::vector<IntersectionPoint> fp_points_on_intersection(const PairOfQuadrics<ModInt>& q) {
  const PairFp P = to_fp(q);
  if (!is_prime(P.F.p)) fail(ErrorKind::InvalidArgument, "need a prime modulus");
  std::vector<IntersectionPoint> out;
  for_each_proj_point(P.F.p, [&](const Vec4& v) {
    if (quad(P.F, P.a, v) != 0 || quad(P.F, P.b, v) != 0) return;
    const Vec4 ga = gradient(P.F, P.a, v);
    const Vec4 gb = gradient(P.F, P.b, v);
    bool smooth = false;
    for (int i = 0; i < 4 && !smooth; ++i)
      for (int j = i + 1; j < 4 && !smooth; ++j)
        smooth = P.F.sub(P.F.mul(ga[i], gb[j]), P.F.mul(ga[j], gb[i])) != 0;
    out.push_back({ProjPoint{v}, smooth});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Elliptic curves over F_p.

FpCurve FpCurve::from_IJ(const BigInt& I, const BigInt& J, std::int64_t p) {
  if (p <= 3 || !is_prime(p)) fail(ErrorKind::InvalidArgument, "E^{I,J} needs a prime p > 3");
  const Fp F{p};
  FpCurve c;
  c.p = p;
  c.a4 = F.norm(-F.mul(mod(I, p).value(), F.inv(3)));
  c.a6 = F.norm(-F.mul(mod(J, p).value(), F.inv(27)));
  return c;
}

FpCurve FpCurve::from_quartic(const BinaryQuartic<ModInt>& f) {
  std::int64_t p = 0;
  for (int k = 0; k < 5; ++k)
    if (f[k].bound()) p = f[k].modulus();
  if (p == 0 || p == 2) fail(ErrorKind::InvalidArgument, "need an odd prime modulus");
  const Fp F{p};
  const std::int64_t a = F.norm(f[0].value()), b = F.norm(f[1].value()), c = F.norm(f[2].value()),
                     d = F.norm(f[3].value()), e = F.norm(f[4].value());
  FpCurve E;
  E.p = p;
  E.a2 = c;
  E.a4 = F.sub(F.mul(b, d), F.mul(4, F.mul(a, e)));
  E.a6 = F.sub(F.add(F.mul(a, F.mul(d, d)), F.mul(F.mul(b, b), e)), F.mul(4, F.mul(a, F.mul(c, e))));
  return E;
}

std::int64_t FpCurve::cubic_discriminant() const {
  const Fp F{p};
  const std::int64_t t1 = F.mul(F.mul(a2, a2), F.mul(a4, a4));
  const std::int64_t t2 = F.mul(4, F.mul(a4, F.mul(a4, a4)));
  const std::int64_t t3 = F.mul(4, F.mul(F.mul(a2, F.mul(a2, a2)), a6));
  const std::int64_t t4 = F.mul(27, F.mul(a6, a6));
  const std::int64_t t5 = F.mul(18, F.mul(a2, F.mul(a4, a6)));
  return F.norm(t1 - t2 - t3 - t4 + t5);
}

namespace {

std::int64_t rhs(const FpCurve& c, std::int64_t x) {
  const Fp F{c.p};
  return F.norm(F.mul(F.mul(x, x), x) + F.mul(c.a2, F.mul(x, x)) + F.mul(c.a4, x) + c.a6);
}

}  // namespace

bool on_curve(const FpCurve& c, const CurvePoint& P) {
  if (P.infinity) return true;
  const Fp F{c.p};
  return F.mul(P.y, P.y) == rhs(c, P.x);
}

CurvePoint curve_neg(const FpCurve& c, const CurvePoint& P) {
  if (P.infinity) return P;
  return CurvePoint::affine(P.x, floor_mod(-P.y, c.p));
}

CurvePoint curve_add(const FpCurve& c, const CurvePoint& P, const CurvePoint& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  const Fp F{c.p};
  std::int64_t lambda;
  if (P.x == Q.x) {
    if (F.add(P.y, Q.y) == 0) return CurvePoint::at_infinity();
    // Doubling (P == Q, y != 0).
    const std::int64_t num = F.norm(3 * F.mul(P.x, P.x) + 2 * F.mul(c.a2, P.x) + c.a4);
    lambda = F.mul(num, F.inv(F.mul(2, P.y)));
  } else {
    lambda = F.mul(F.sub(Q.y, P.y), F.inv(F.sub(Q.x, P.x)));
  }
  const std::int64_t x3 = F.norm(F.mul(lambda, lambda) - c.a2 - P.x - Q.x);
  const std::int64_t y3 = F.sub(F.mul(lambda, F.sub(P.x, x3)), P.y);
  return CurvePoint::affine(x3, y3);
}

CurvePoint curve_mul(const FpCurve& c, std::int64_t n, const CurvePoint& P) {
  CurvePoint acc = CurvePoint::at_infinity();
  CurvePoint base = n < 0 ? curve_neg(c, P) : P;
  n = n < 0 ? -n : n;
  while (n > 0) {
    if (n & 1) acc = curve_add(c, acc, base);
    base = curve_add(c, base, base);
    n >>= 1;
  }
  return acc;
}

std::vector<CurvePoint> curve_points(const FpCurve& c) {
  const Fp F{c.p};
  std::vector<std::vector<std::int64_t>> roots(c.p);
  for (std::int64_t y = 0; y < c.p; ++y) roots[F.mul(y, y)].push_back(y);
  std::vector<CurvePoint> pts{CurvePoint::at_infinity()};
  for (std::int64_t x = 0; x < c.p; ++x)
    for (std::int64_t y : roots[rhs(c, x)]) pts.push_back(CurvePoint::affine(x, y));
  return pts;
}

std::int64_t curve_four_torsion(const FpCurve& c) {
  if (!c.nonsingular()) fail(ErrorKind::Degenerate, "singular curve");
  std::int64_t n = 0;
  for (const auto& P : curve_points(c))
    if (curve_mul(c, 4, P).infinity) ++n;
  return n;
}

bool nondegenerate_mod_p(const PairOfQuadrics<ModInt>& q) {
  const std::int64_t p = modulus_of(q);
  const auto f = resolvent_quartic(q);
  BinaryQuartic<BigInt> lift;
  for (int k = 0; k < 5; ++k) lift[k] = static_cast<long>(floor_mod(f[k].value(), p));
  return mod(resultant_discriminant(lift), p).value() != 0;
}

std::int64_t pair_four_torsion(const PairOfQuadrics<ModInt>& q) {
  return curve_four_torsion(FpCurve::from_quartic(resolvent_quartic(q)));
}

// ---------------------------------------------------------------------------
// Stabilizers.

namespace {

// Coefficients of f((x, y) g2) = f(r x + t y, s x + u y) mod p.
std::array<std::int64_t, 5> substitute(const Fp& F, const std::array<std::int64_t, 5>& f, std::int64_t r,
                                       std::int64_t s, std::int64_t t, std::int64_t u) {
  // Powers of X = r x + t y and Y = s x + u y as coefficient arrays in (x^n, x^{n-1} y, ...).
  std::array<std::array<std::int64_t, 5>, 5> xp{}, yp{};
  xp[0][0] = yp[0][0] = 1;
  for (int n = 1; n <= 4; ++n)
    for (int i = 0; i <= n; ++i) {
      const std::int64_t px = i < n ? xp[n - 1][i] : 0;
      const std::int64_t qx = i > 0 ? xp[n - 1][i - 1] : 0;
      xp[n][i] = F.norm(px * r + qx * t);
      const std::int64_t py = i < n ? yp[n - 1][i] : 0;
      const std::int64_t qy = i > 0 ? yp[n - 1][i - 1] : 0;
      yp[n][i] = F.norm(py * s + qy * u);
    }
  std::array<std::int64_t, 5> out{};
  for (int k = 0; k < 5; ++k) {
    if (f[k] == 0) continue;
    // f[k] X^{4-k} Y^k
    const auto& X = xp[4 - k];
    const auto& Y = yp[k];
    for (int i = 0; i <= 4 - k; ++i)
      for (int j = 0; j <= k; ++j) out[i + j] = F.add(out[i + j], F.mul(f[k], F.mul(X[i], Y[j])));
  }
  return out;
}

// Affine solution space of M w = rhs over F_p (M has up to 6 rows, 4 columns).
struct AffineSpace {
  bool consistent = false;
  Vec4 particular{};
  std::vector<Vec4> basis;
};

AffineSpace solve_linear(const Fp& F, std::vector<std::array<std::int64_t, 5>> rows) {
  AffineSpace out;
  int rank = 0;
  std::array<int, 4> pivot_col_of_row{};
  std::array<bool, 4> is_pivot{};
  for (int col = 0; col < 4 && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    const std::int64_t inv = F.inv(rows[rank][col]);
    for (auto& v : rows[rank]) v = F.mul(v, inv);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const std::int64_t f = rows[r][col];
      for (int k = 0; k < 5; ++k) rows[r][k] = F.sub(rows[r][k], F.mul(f, rows[rank][k]));
    }
    pivot_col_of_row[rank] = col;
    is_pivot[col] = true;
    ++rank;
  }
  for (int r = rank; r < static_cast<int>(rows.size()); ++r)
    if (rows[r][4] != 0) return out;
  out.consistent = true;
  for (int r = 0; r < rank; ++r) out.particular[pivot_col_of_row[r]] = rows[r][4];
  for (int fcol = 0; fcol < 4; ++fcol) {
    if (is_pivot[fcol]) continue;
    Vec4 v{};
    v[fcol] = 1;
    for (int r = 0; r < rank; ++r) v[pivot_col_of_row[r]] = F.norm(-rows[r][fcol]);
    out.basis.push_back(v);
  }
  return out;
}

template <class Fn>
void for_each_in_space(const Fp& F, const AffineSpace& s, Fn&& fn) {
  const int dim = static_cast<int>(s.basis.size());
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= F.p;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Vec4 w = s.particular;
    std::int64_t r = idx;
    for (int i = 0; i < dim; ++i) {
      const std::int64_t c = r % F.p;
      r /= F.p;
      if (c == 0) continue;
      for (int k = 0; k < 4; ++k) w[k] = F.add(w[k], F.mul(c, s.basis[i][k]));
    }
    fn(w);
  }
}

struct G4Counter {
  const PairFp& P;
  const std::vector<std::vector<std::int64_t>>& buckets;  // (Q_A, Q_B) -> vector indices
  Coords ta{}, tb{};                                     // target coordinates
  std::int64_t det_target = 0;
  std::array<Vec4, 4> rows{};
  std::int64_t count = 0;

  void run() {
    const auto& cand = buckets[ta[sym_index(0, 0)] * P.F.p + tb[sym_index(0, 0)]];
    for (std::int64_t idx : cand) {
      rows[0] = vec_from_index(idx, P.F.p);
      extend(1);
    }
  }

  void extend(int j) {
    if (j == 4) {
      if (det4_fp(P.F, rows) == det_target) ++count;
      return;
    }
    std::vector<std::array<std::int64_t, 5>> eqs;
    for (int k = 0; k < j; ++k) {
      const Vec4 ga = gradient(P.F, P.a, rows[k]);
      const Vec4 gb = gradient(P.F, P.b, rows[k]);
      eqs.push_back({ga[0], ga[1], ga[2], ga[3], ta[sym_index(k, j)]});
      eqs.push_back({gb[0], gb[1], gb[2], gb[3], tb[sym_index(k, j)]});
    }
    const AffineSpace s = solve_linear(P.F, eqs);
    if (!s.consistent) return;
    const std::int64_t qa = ta[sym_index(j, j)], qb = tb[sym_index(j, j)];
    for_each_in_space(P.F, s, [&](const Vec4& w) {
      if (quad(P.F, P.a, w) != qa || quad(P.F, P.b, w) != qb) return;
      rows[j] = w;
      extend(j + 1);
    });
  }
};

void require_nondegenerate(const PairOfQuadrics<ModInt>& q) {
  const std::int64_t p = modulus_of(q);
  if (p == 2 || !is_prime(p)) fail(ErrorKind::InvalidArgument, "need an odd prime modulus");
  if (!nondegenerate_mod_p(q)) fail(ErrorKind::Degenerate, "discriminant vanishes mod " + std::to_string(p));
}

std::int64_t divide_by_scalings(std::int64_t raw, std::int64_t p) {
  if (raw % (p - 1) != 0)
    fail(ErrorKind::NonIntegral, "raw stabilizer count " + std::to_string(raw) + " not divisible by p - 1");
  return raw / (p - 1);
}

}  // namespace

std::int64_t stabilizer_order_fp(const PairOfQuadrics<ModInt>& q) {
  require_nondegenerate(q);
  const PairFp P = to_fp(q);
  const Fp& F = P.F;
  const std::int64_t p = F.p;

  std::array<std::int64_t, 5> f{};
  {
    const auto fr = resolvent_quartic(q);
    for (int k = 0; k < 5; ++k) f[k] = F.norm(fr[k].value());
  }

  std::int64_t n = p * p * p * p;
  std::vector<std::vector<std::int64_t>> buckets(p * p);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const Vec4 v = vec_from_index(idx, p);
    buckets[quad(F, P.a, v) * p + quad(F, P.b, v)].push_back(idx);
  }

  std::int64_t raw = 0;
  for (std::int64_t r = 0; r < p; ++r)
    for (std::int64_t s = 0; s < p; ++s)
      for (std::int64_t t = 0; t < p; ++t)
        for (std::int64_t u = 0; u < p; ++u) {
          const std::int64_t d = F.sub(F.mul(r, u), F.mul(s, t));
          if (d == 0) continue;
          // Stabilizer elements satisfy f((x,y) g2) = det(g2)^2 f.
          const auto g = substitute(F, f, r, s, t, u);
          const std::int64_t d2 = F.mul(d, d);
          bool ok = true;
          for (int k = 0; k < 5 && ok; ++k) ok = g[k] == F.mul(d2, f[k]);
          if (!ok) continue;
          // g4 . (A, B) must equal g2^{-1} . (A, B), with det(g4) = det(g2)^{-1}.
          const std::int64_t di = F.inv(d);
          const std::int64_t al = F.mul(u, di), be = F.mul(F.norm(-s), di);
          const std::int64_t ga = F.mul(F.norm(-t), di), de = F.mul(r, di);
          G4Counter c{P, buckets};
          for (int k = 0; k < 10; ++k) {
            c.ta[k] = F.add(F.mul(al, P.a[k]), F.mul(be, P.b[k]));
            c.tb[k] = F.add(F.mul(ga, P.a[k]), F.mul(de, P.b[k]));
          }
          c.det_target = di;
          c.run();
          raw += c.count;
        }
  return divide_by_scalings(raw, p);
}

namespace {

struct G4Scan {
  const PairFp& P;
  std::vector<Vec4> vectors;  // all nonzero vectors
  std::array<Vec4, 4> rows{};
  std::int64_t raw = 0;

  // (alpha, beta) candidates with A' = alpha A + beta B on the chosen block,
  // and (gamma, delta) with B' = gamma A + delta B.
  void extend(int k, const std::vector<std::pair<std::int64_t, std::int64_t>>& sa,
              const std::vector<std::pair<std::int64_t, std::int64_t>>& sb) {
    const Fp& F = P.F;
    if (k == 4) {
      const std::int64_t d4 = det4_fp(F, rows);
      if (d4 == 0) return;
      for (auto [al, be] : sa)
        for (auto [ga, de] : sb) {
          const std::int64_t dm = F.sub(F.mul(al, de), F.mul(be, ga));
          // g2 = M^{-1}, so det(g2) det(g4) = 1 iff det(g4) = det(M).
          if (dm != 0 && dm == d4) ++raw;
        }
      return;
    }
    for (const Vec4& v : vectors) {
      rows[k] = v;
      // New coordinates (i, k) for i <= k.
      std::array<std::int64_t, 4> na{}, nb{};
      for (int i = 0; i < k; ++i) {
        na[i] = bilinear(F, P.a, rows[i], v);
        nb[i] = bilinear(F, P.b, rows[i], v);
      }
      na[k] = quad(F, P.a, v);
      nb[k] = quad(F, P.b, v);
      auto keep = [&](const std::vector<std::pair<std::int64_t, std::int64_t>>& s,
                      const std::array<std::int64_t, 4>& target) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        for (auto [x, y] : s) {
          bool ok = true;
          for (int i = 0; i <= k && ok; ++i) {
            const int idx = sym_index(i, k);
            ok = F.add(F.mul(x, P.a[idx]), F.mul(y, P.b[idx])) == target[i];
          }
          if (ok) out.emplace_back(x, y);
        }
        return out;
      };
      const auto sa2 = keep(sa, na);
      if (sa2.empty()) continue;
      const auto sb2 = keep(sb, nb);
      if (sb2.empty()) continue;
      extend(k + 1, sa2, sb2);
    }
  }
};

}  // namespace

std::int64_t stabilizer_order_g4_scan(const PairOfQuadrics<ModInt>& q) {
  require_nondegenerate(q);
  const PairFp P = to_fp(q);
  const std::int64_t p = P.F.p;
  G4Scan scan{P, {}};
  for (std::int64_t idx = 1; idx < p * p * p * p; ++idx) scan.vectors.push_back(vec_from_index(idx, p));
  std::vector<std::pair<std::int64_t, std::int64_t>> all;
  for (std::int64_t x = 0; x < p; ++x)
    for (std::int64_t y = 0; y < p; ++y) all.emplace_back(x, y);
  scan.extend(0, all, all);
  return divide_by_scalings(scan.raw, p);
}

// ---------------------------------------------------------------------------
// Q_p solubility.

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Soluble:
      return "soluble";
    case Verdict::Insoluble:
      return "insoluble";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::string SolubilityVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["prime"] = prime;
  j["depth"] = depth;
  j["verdict"] = qpl::to_string(verdict);
  if (witness) {
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (const auto& c : *witness) w.push_back(c.get_str());
    j["witness"] = w;
    j["witness_level"] = witness_level;
    j["hensel_exponent"] = hensel_exponent;
  }
  if (!reason.empty()) j["reason"] = reason;
  return j.dump();
}

int default_qp_depth(const PairOfQuadrics<BigInt>& p, std::int64_t prime) {
  const BigInt d = invariants(p).scaled_disc;
  if (sgn(d) == 0) fail(ErrorKind::Degenerate, "zero discriminant");
  return valuation(d, prime) + 2;
}

namespace {

struct Branch {
  std::array<BigInt, 4> x;
  int lead = 0;
};

BigInt quad_big(const std::array<BigInt, 10>& c, const std::array<BigInt, 4>& x) {
  BigInt acc = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) acc += c[sym_index(i, j)] * x[i] * x[j];
  return acc;
}

std::array<BigInt, 4> grad_big(const std::array<BigInt, 10>& c, const std::array<BigInt, 4>& x) {
  std::array<BigInt, 4> g;
  for (int k = 0; k < 4; ++k) {
    BigInt acc = 0;
    for (int l = 0; l < 4; ++l)
      acc += (k == l ? BigInt(2 * c[sym_index(k, k)]) : c[sym_index(std::min(k, l), std::max(k, l))]) * x[l];
    g[k] = acc;
  }
  return g;
}

// v_p with +infinity represented by INT_MAX.
int val(const BigInt& x, std::int64_t p) {
  const int v = valuation(x, static_cast<long>(p));
  return v < 0 ? std::numeric_limits<int>::max() : v;
}

}  // namespace

SolubilityVerdict qp_soluble(const PairOfQuadrics<BigInt>& pair, std::int64_t p, const QpOptions& opts) {
  if (p < 2 || !is_prime(p)) fail(ErrorKind::InvalidArgument, "qp_soluble needs a prime");
  SolubilityVerdict out;
  out.prime = p;
  out.depth = opts.depth ? *opts.depth : default_qp_depth(pair, p);
  if (sgn(invariants(pair).scaled_disc) == 0) fail(ErrorKind::Degenerate, "zero discriminant");
  if (out.depth < 1) fail(ErrorKind::InvalidArgument, "depth must be positive");

  // Level 1: normalised points of P^3(F_p) on both quadrics.
  std::vector<Branch> live;
  {
    const PairOfQuadrics<ModInt> red = reduce_mod(pair, p);
    for (const auto& ip : fp_points_on_intersection(red)) {
      Branch b;
      for (int i = 0; i < 4; ++i) b.x[i] = static_cast<long>(ip.point.x[i]);
      while (ip.point.x[b.lead] == 0) ++b.lead;
      live.push_back(std::move(b));
    }
  }

  BigInt pk = p;  // current modulus p^k
  for (int k = 1;; ++k) {
    if (live.empty()) {
      out.verdict = Verdict::Insoluble;
      out.reason = "no primitive solutions modulo p^" + std::to_string(k);
      return out;
    }
    std::vector<std::pair<BigInt, BigInt>> values;
    values.reserve(live.size());
    for (const Branch& b : live) {
      const BigInt qa = quad_big(pair.a, b.x);
      const BigInt qb = quad_big(pair.b, b.x);
      values.emplace_back(qa, qb);
      const auto ga = grad_big(pair.a, b.x);
      const auto gb = grad_big(pair.b, b.x);
      int e = std::numeric_limits<int>::max();
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) e = std::min(e, val(BigInt(ga[i] * gb[j] - ga[j] * gb[i]), p));
      const int va = val(qa, p), vb = val(qb, p);
      const bool exact_zero = va == std::numeric_limits<int>::max() && vb == std::numeric_limits<int>::max();
      if (exact_zero || (e != std::numeric_limits<int>::max() && va >= 2 * e + 1 && vb >= 2 * e + 1)) {
        out.verdict = Verdict::Soluble;
        out.witness = b.x;
        out.witness_level = k;
        out.hensel_exponent = exact_zero && e == std::numeric_limits<int>::max() ? -1 : e;
        out.reason = exact_zero ? "exact rational common zero" : "Hensel lift from a point modulo p^" + std::to_string(k);
        return out;
      }
    }
    if (k >= out.depth) {
      out.verdict = Verdict::Unknown;
      out.reason = std::to_string(live.size()) + " singular branches alive at depth " + std::to_string(k);
      return out;
    }
    // Lift x -> x + p^k t. Modulo p^{k+1}, Q(x + p^k t) = Q(x) + p^k grad Q(x) . t,
    // so surviving t solve two linear equations mod p.
    std::vector<Branch> next;
    for (std::size_t bi = 0; bi < live.size(); ++bi) {
      const Branch& b = live[bi];
      const std::int64_t ca = mod(BigInt(values[bi].first / pk), p).value();
      const std::int64_t cb = mod(BigInt(values[bi].second / pk), p).value();
      const auto ga = grad_big(pair.a, b.x);
      const auto gb = grad_big(pair.b, b.x);
      std::array<std::int64_t, 4> la{}, lb{};
      for (int i = 0; i < 4; ++i) {
        la[i] = mod(ga[i], p).value();
        lb[i] = mod(gb[i], p).value();
      }
      std::array<int, 3> free_idx{};
      int nf = 0;
      for (int i = 0; i < 4; ++i)
        if (i != b.lead) free_idx[nf++] = i;
      for (std::int64_t t0 = 0; t0 < p; ++t0)
        for (std::int64_t t1 = 0; t1 < p; ++t1)
          for (std::int64_t t2 = 0; t2 < p; ++t2) {
            const std::array<std::int64_t, 3> t{t0, t1, t2};
            std::int64_t ea = ca, eb = cb;
            for (int i = 0; i < 3; ++i) {
              ea += la[free_idx[i]] * t[i];
              eb += lb[free_idx[i]] * t[i];
            }
            if (floor_mod(ea, p) != 0 || floor_mod(eb, p) != 0) continue;
            Branch nb = b;
            for (int i = 0; i < 3; ++i) nb.x[free_idx[i]] += pk * static_cast<long>(t[i]);
            next.push_back(std::move(nb));
            if (next.size() > opts.branch_budget) {
              out.verdict = Verdict::Unknown;
              out.reason = "branch budget exhausted at level " + std::to_string(k + 1);
              return out;
            }
          }
    }
    live = std::move(next);
    pk *= p;
  }
}

}  // namespace qpl
