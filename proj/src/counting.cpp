#include "qpl/counting.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "qpl/quartic.hpp"
#include "qpl/rng.hpp"
#include "qpl/sieve.hpp"

namespace qpl {

// ===========================================================================
// Weights

std::string WeightVector::to_string() const {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += ' ';
    out += "s" + std::to_string(i + 1);
    if (e[i] != 1) out += "^" + std::to_string(e[i]);
  }
  return out.empty() ? "1" : out;
}

const std::array<WeightVector, 4>& torus_characters() {
  static const std::array<WeightVector, 4> t{{
      {{0, -3, -1, -1}},
      {{0, 1, -1, -1}},
      {{0, 1, 1, -1}},
      {{0, 1, 1, 3}},
  }};
  return t;
}

WeightVector coordinate_weight(int index) {
  if (index < 0 || index >= 20) fail(ErrorKind::InvalidArgument, "coordinate index out of range");
  const auto& t = torus_characters();
  const int k = index % 10;
  int i = 0, j = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      if (sym_index(a, b) == k) {
        i = a;
        j = b;
      }
  WeightVector w = t[i] + t[j];
  w.e[0] += index < 10 ? -1 : 1;
  return w;
}

WeightVector coordinate_weight(std::string_view label) {
  const auto idx = coordinate_index(label);
  if (!idx) fail(ErrorKind::InvalidArgument, "unknown coordinate label '" + std::string(label) + "'");
  return coordinate_weight(*idx);
}

WeightVector haar_exponents() {
  // GL2 factor: the s1 torus acts on (A, B) with characters s1^-1, s1^+1.
  WeightVector h{{-1 - 1, 0, 0, 0}};
  const auto& t = torus_characters();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) h = h + (t[i] - t[j]);
  return h;
}

std::array<WeightVector, 4> lemma_estimates() {
  return {-coordinate_weight("a14"), -coordinate_weight("a23"), -coordinate_weight("b13"),
          -coordinate_weight("b22")};
}

SiBoundDerivation derive_sibounds() {
  SiBoundDerivation d;
  const auto E = lemma_estimates();

  auto record = [&](std::string desc, const WeightVector& product, int budget, int var) {
    SiBoundStep s;
    s.description = std::move(desc);
    s.product = product;
    s.budget = budget;
    s.variable = var;
    s.exponent = product.e[var];
    d.steps.push_back(s);
    const int g = std::gcd(budget, s.exponent);
    d.bounds[var] = {budget / g, s.exponent / g};
  };

  // (1)(2): s1^2 <= X^{2/24}.
  const WeightVector p12 = E[0] + E[1];
  const bool pure12 = p12 == WeightVector{{2, 0, 0, 0}};
  record("estimates (1)*(2)", p12, 2, 0);

  // (3) times the s1 bound: s2^2 s4^2 <= X^{1/24} s1 <= X^{2/24}; each factor is >> 1.
  const WeightVector p3 = E[2] + WeightVector{{1, 0, 0, 0}};
  const bool shape3 = p3 == WeightVector{{0, 2, 0, 2}};
  for (int var : {1, 3}) {
    WeightVector only;
    only.e[var] = p3.e[var];
    record("estimate (3) with the s1 bound, other factor >> 1", only, 2, var);
  }

  // (1)(4): s3^2 <= X^{2/24}.
  const WeightVector p14 = E[0] + E[3];
  const bool pure14 = p14 == WeightVector{{0, 0, 2, 0}};
  record("estimates (1)*(4)", p14, 2, 2);

  bool all_one = true;
  for (const auto& b : d.bounds) all_one = all_one && b == std::make_pair(1, 1);
  d.ok = pure12 && shape3 && pure14 && all_one &&
         E[0] == WeightVector{{1, 2, 0, -2}} && E[1] == WeightVector{{1, -2, 0, 2}} &&
         E[2] == WeightVector{{-1, 2, 0, 2}} && E[3] == WeightVector{{-1, -2, 2, 2}};
  return d;
}

bool verify_sibound_products() { return derive_sibounds().ok; }

// ===========================================================================
// Invariant pairs

IJGrid ij_grid(std::int64_t X) {
  if (X < 1) fail(ErrorKind::InvalidArgument, "X must be at least 1");
  IJGrid g;
  while ((g.imax + 1) * (g.imax + 1) * (g.imax + 1) < X) ++g.imax;
  BigInt r;
  const BigInt four_x = BigInt(4) * static_cast<long>(X);
  mpz_sqrt(r.get_mpz_t(), four_x.get_mpz_t());
  g.jmax = r.get_si();
  if (BigInt(g.jmax) * g.jmax == four_x) --g.jmax;  // strict J^2 < 4X
  return g;
}

IJCounts count_invariant_pairs(std::int64_t X, const CountOptions& opts) {
  const IJGrid g = ij_grid(X);
  const std::int64_t width = 2 * g.jmax + 1;
  ChunkPlan plan{opts.start, g.size(), opts.chunk, opts.threads};
  auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
    IJCounts c;
    std::int64_t i = static_cast<std::int64_t>(lo / width) - g.imax;
    std::int64_t j = static_cast<std::int64_t>(lo % width) - g.jmax;
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const std::int64_t ai = i < 0 ? -i : i;
      // Both strict height constraints hold on the grid by construction.
      if (4 * ai * ai * ai < 4 * X && j * j < 4 * X) {
        const std::int64_t d = 4 * i * i * i - j * j;
        if (d > 0) ++c.plus;
        else if (d < 0) ++c.minus;
        else ++c.zero;
      }
      if (++j > g.jmax) {
        j = -g.jmax;
        ++i;
      }
    }
    return c;
  };
  return run_chunked<IJCounts>(
      plan, opts.partial, chunk, [](IJCounts& a, const IJCounts& b) { a += b; }, opts.checkpoint);
}

std::int64_t count_invariant_pairs(std::int64_t X, Sign sign, const CountOptions& opts) {
  const IJCounts c = count_invariant_pairs(X, opts);
  return sign == Sign::Plus ? c.plus : c.minus;
}

// ===========================================================================
// Box scans

Predicate parse_predicate(std::string_view name) {
  const std::string n(name);
  if (n == "disc-nonzero")
    return {n, [](const PairOfQuadrics<BigInt>& v) { return sgn(invariants(v).scaled_disc) != 0; }};
  if (n == "strongly-irreducible") return {n, [](const PairOfQuadrics<BigInt>& v) { return is_strongly_irreducible(v); }};
  if (n == "lemma34-any") return {n, [](const PairOfQuadrics<BigInt>& v) { return reducibility_case(v).has_value(); }};
  if (n.rfind("lemma34-case", 0) == 0 && n.size() == 13 && n[12] >= '1' && n[12] <= '4') {
    const int c = n[12] - '1';
    return {n, [c](const PairOfQuadrics<BigInt>& v) {
              for (int k : reducibility_patterns()[c])
                if (sgn(v.coord(k)) != 0) return false;
              return true;
            }};
  }
  for (const std::string prefix : {"in-Wp:", "in-Wp1:", "in-Wp2:"}) {
    if (n.rfind(prefix, 0) != 0) continue;
    std::int64_t p = 0;
    try {
      std::size_t used = 0;
      p = std::stoll(n.substr(prefix.size()), &used);
      if (used != n.size() - prefix.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad prime in predicate '" + n + "'");
    }
    in_Wp(PairOfQuadrics<BigInt>(), p);  // validates p
    if (prefix == "in-Wp:") return {n, [p](const PairOfQuadrics<BigInt>& v) { return in_Wp(v, p); }};
    if (prefix == "in-Wp1:") return {n, [p](const PairOfQuadrics<BigInt>& v) { return in_Wp(v, p) && in_Wp1(v, p); }};
    return {n, [p](const PairOfQuadrics<BigInt>& v) { return in_Wp(v, p) && !in_Wp1(v, p); }};
  }
  fail(ErrorKind::Parse, "unknown predicate '" + n + "'");
}

std::optional<std::uint64_t> box_size(std::int64_t M) {
  if (M < 0) return std::nullopt;
  const unsigned __int128 base = static_cast<unsigned __int128>(2 * M + 1);
  unsigned __int128 n = 1;
  for (int k = 0; k < 20; ++k) {
    n *= base;
    if (n > UINT64_MAX) return std::nullopt;
  }
  return static_cast<std::uint64_t>(n);
}

PairOfQuadrics<BigInt> box_element(std::int64_t M, std::uint64_t index) {
  const std::uint64_t base = static_cast<std::uint64_t>(2 * M + 1);
  PairOfQuadrics<BigInt> v;
  for (int k = 0; k < 20; ++k) {
    v.coord(k) = static_cast<long>(static_cast<std::int64_t>(index % base) - M);
    index /= base;
  }
  return v;
}

PairOfQuadrics<BigInt> sampled_element(std::int64_t M, std::uint64_t seed, std::uint64_t i) {
  const CounterRng rng(seed);
  PairOfQuadrics<BigInt> v;
  for (int k = 0; k < 20; ++k) v.coord(k) = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(k), i, -M, M));
  return v;
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double ph = static_cast<double>(hits) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double denom = 1 + z * z / nn;
  const double centre = (ph + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::string ScanReport::csv_header() { return "predicate,M,mode,examined,hits,frequency,ci_low,ci_high"; }

std::vector<std::string> ScanReport::csv_rows() const {
  std::vector<std::string> rows;
  for (const auto& t : tallies) {
    std::ostringstream os;
    os.precision(10);
    os << t.name << ',' << M << ',' << (exhaustive ? "exhaustive" : "sampled") << ',' << examined << ',' << t.hits
       << ',' << t.frequency << ',' << t.ci_low << ',' << t.ci_high;
    rows.push_back(os.str());
  }
  return rows;
}

ScanReport scan_box(const ScanOptions& opts, const std::vector<Predicate>& predicates) {
  if (opts.M < 1) fail(ErrorKind::InvalidArgument, "M must be at least 1");
  ScanReport rep;
  rep.M = opts.M;
  rep.exhaustive = opts.samples == 0;
  ChunkPlan plan;
  plan.chunk = opts.chunk;
  plan.threads = opts.threads;
  if (rep.exhaustive) {
    const auto size = box_size(opts.M);
    if (!size && !opts.range_end) fail(ErrorKind::InvalidArgument, "box too large for exhaustive scan; give a range");
    plan.begin = opts.range_begin;
    plan.end = opts.range_end ? *opts.range_end : *size;
    if (size && plan.end > *size) fail(ErrorKind::InvalidArgument, "range exceeds the box");
  } else {
    plan.begin = 0;
    plan.end = opts.samples;
  }
  using Hits = std::vector<std::uint64_t>;
  const bool exhaustive = rep.exhaustive;
  auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
    Hits h(predicates.size(), 0);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto v = exhaustive ? box_element(opts.M, i) : sampled_element(opts.M, opts.seed, i);
      for (std::size_t k = 0; k < predicates.size(); ++k)
        if (predicates[k].test(v)) ++h[k];
    }
    return h;
  };
  const Hits total = run_chunked<Hits>(plan, Hits(predicates.size(), 0), chunk, [](Hits& a, const Hits& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  });
  rep.examined = plan.end - plan.begin;
  for (std::size_t k = 0; k < predicates.size(); ++k) {
    PredicateTally t;
    t.name = predicates[k].name;
    t.hits = total[k];
    t.frequency = rep.examined ? static_cast<double>(t.hits) / static_cast<double>(rep.examined) : 0.0;
    std::tie(t.ci_low, t.ci_high) = wilson_interval(t.hits, rep.examined);
    rep.tallies.push_back(t);
  }
  return rep;
}

// ===========================================================================
// Davenport

int Inequality::degree() const {
  int d = 0;
  for (const auto& m : terms) {
    if (sgn(m.coef) == 0) continue;
    d = std::max(d, std::accumulate(m.exps.begin(), m.exps.end(), 0));
  }
  return d;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

Rational parse_rational_token(const std::string& s) {
  // Accepts integers, a/b, and finite decimals such as 10.5 or -0.25.
  try {
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
      Rational r(s);
      r.canonicalize();
      if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
      return r;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t places = s.size() - dot - 1;
    if (places == 0 || digits.empty() || digits == "-" || digits.find_first_not_of("+-0123456789") != std::string::npos)
      throw std::invalid_argument("bad decimal");
    BigInt num(digits);
    BigInt den = 1;
    for (std::size_t i = 0; i < places; ++i) den *= 10;
    return frac(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "bad number '" + s + "'");
  }
}

Monomial parse_term(const std::string& tok, int dim) {
  const auto lb = tok.find('[');
  if (lb == std::string::npos || tok.back() != ']') fail(ErrorKind::Parse, "bad term '" + tok + "'");
  Monomial m;
  if (lb == 0) {
    m.coef = 1;
  } else {
    if (tok[lb - 1] != '*') fail(ErrorKind::Parse, "expected '*' in term '" + tok + "'");
    const std::string c = tok.substr(0, lb - 1);
    m.coef = c == "-" ? Rational(-1) : parse_rational_token(c);
  }
  std::string inner = tok.substr(lb + 1, tok.size() - lb - 2);
  std::istringstream is(inner);
  std::string e;
  while (std::getline(is, e, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(e, &used);
      if (used != e.size() || v < 0) throw std::invalid_argument("exp");
      m.exps.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad exponent '" + e + "' in term '" + tok + "'");
    }
  }
  if (static_cast<int>(m.exps.size()) != dim)
    fail(ErrorKind::Parse, "term '" + tok + "' needs " + std::to_string(dim) + " exponents");
  return m;
}

}  // namespace

Region parse_region(std::string_view text) {
  Region r;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (tok[0] == "dim") {
      if (tok.size() != 2 || r.dim != 0) fail(ErrorKind::Parse, "bad dim statement" + where);
      try {
        r.dim = std::stoi(tok[1]);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, "bad dim" + where);
      }
      if (r.dim < 1 || r.dim > 4) fail(ErrorKind::Parse, "dim must be 1..4" + where);
    } else if (tok[0] == "box") {
      if (r.dim == 0) fail(ErrorKind::Parse, "box before dim" + where);
      if (tok.size() != 3) fail(ErrorKind::Parse, "box needs lo and hi" + where);
      const Rational lo = parse_rational_token(tok[1]), hi = parse_rational_token(tok[2]);
      if (lo > hi) fail(ErrorKind::Parse, "box lo > hi" + where);
      r.box.emplace_back(lo, hi);
    } else if (tok[0] == "ineq") {
      if (r.dim == 0) fail(ErrorKind::Parse, "ineq before dim" + where);
      Inequality q;
      std::size_t i = 1;
      bool have_op = false;
      for (; i < tok.size(); ++i) {
        const std::string& t = tok[i];
        if (t == "<=" || t == "<" || t == ">=" || t == ">") {
          q.op = t == "<=" ? Inequality::Op::LE : t == "<" ? Inequality::Op::LT : t == ">=" ? Inequality::Op::GE
                                                                                            : Inequality::Op::GT;
          have_op = true;
          ++i;
          break;
        }
        if (t == "+") continue;
        q.terms.push_back(parse_term(t, r.dim));
      }
      if (!have_op || i + 1 != tok.size() || q.terms.empty()) fail(ErrorKind::Parse, "bad inequality" + where);
      q.rhs = parse_rational_token(tok[i]);
      r.constraints.push_back(std::move(q));
    } else {
      fail(ErrorKind::Parse, "unknown statement '" + tok[0] + "'" + where);
    }
  }
  if (r.dim == 0) fail(ErrorKind::Parse, "missing dim");
  if (static_cast<int>(r.box.size()) != r.dim)
    fail(ErrorKind::Unbounded, "region needs a bounding box line per coordinate");
  return r;
}

Region sheared_square(std::int64_t N, std::int64_t k) {
  if (N < 1) fail(ErrorKind::InvalidArgument, "N must be positive");
  Region r;
  r.dim = 2;
  const long n = static_cast<long>(N), kk = static_cast<long>(k);
  r.box = {{Rational(std::min(0L, kk * n)), Rational(n + std::max(0L, kk * n))}, {Rational(0), Rational(n)}};
  // 0 <= u - k v <= N
  Inequality lo{{{Rational(1), {1, 0}}, {Rational(-kk), {0, 1}}}, Inequality::Op::GE, Rational(0)};
  Inequality hi{{{Rational(1), {1, 0}}, {Rational(-kk), {0, 1}}}, Inequality::Op::LE, Rational(n)};
  r.constraints = {lo, hi};
  return r;
}

namespace {

// Inequality as g(x) <= 0 (or < 0) with integer coefficients.
struct IntConstraint {
  std::vector<BigInt> coef;
  std::vector<std::vector<int>> exps;
  BigInt constant;  // g = sum coef * x^exps + constant
  bool strict = false;
  bool fits_int128 = false;
};

IntConstraint to_integer(const Inequality& q, const Region& r) {
  // g = +-(sum - rhs), sign chosen so the region is g <= 0.
  const bool flip = q.op == Inequality::Op::GE || q.op == Inequality::Op::GT;
  BigInt l = q.rhs.get_den();
  for (const auto& m : q.terms) l = lcm(l, BigInt(m.coef.get_den()));
  IntConstraint c;
  c.strict = q.op == Inequality::Op::LT || q.op == Inequality::Op::GT;
  for (const auto& m : q.terms) {
    BigInt v = m.coef.get_num() * (l / m.coef.get_den());
    c.coef.push_back(flip ? BigInt(-v) : v);
    c.exps.push_back(m.exps);
  }
  BigInt k = q.rhs.get_num() * (l / q.rhs.get_den());
  c.constant = flip ? k : BigInt(-k);
  // Overflow guard for the fast path.
  BigInt bound = 1;
  for (const auto& [lo, hi] : r.box) {
    const BigInt a = abs(BigInt(lo.get_num() / lo.get_den())) + 1, b = abs(BigInt(hi.get_num() / hi.get_den())) + 1;
    bound = std::max(bound, std::max(a, b));
  }
  BigInt total = abs(c.constant);
  for (std::size_t t = 0; t < c.coef.size(); ++t) {
    BigInt term = abs(c.coef[t]);
    for (int e : c.exps[t])
      for (int i = 0; i < e; ++i) term *= bound;
    total += term;
  }
  BigInt limit = 1;
  limit <<= 120;
  c.fits_int128 = total < limit;
  return c;
}

bool satisfies(const IntConstraint& c, const std::vector<long>& x) {
  if (c.fits_int128) {
    __int128 acc = static_cast<__int128>(c.constant.get_si());
    if (!c.constant.fits_slong_p()) goto slow;
    for (std::size_t t = 0; t < c.coef.size(); ++t) {
      if (!c.coef[t].fits_slong_p()) goto slow;
      __int128 term = c.coef[t].get_si();
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int e = 0; e < c.exps[t][i]; ++e) term *= x[i];
      acc += term;
    }
    return c.strict ? acc < 0 : acc <= 0;
  }
slow:
  BigInt acc = c.constant;
  for (std::size_t t = 0; t < c.coef.size(); ++t) {
    BigInt term = c.coef[t];
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int e = 0; e < c.exps[t][i]; ++e) term *= x[i];
    acc += term;
  }
  return c.strict ? acc < 0 : acc <= 0;
}

BigInt lattice_count(const Region& r) {
  std::vector<IntConstraint> cons;
  for (const auto& q : r.constraints) cons.push_back(to_integer(q, r));
  std::vector<long> lo(r.dim), hi(r.dim);
  for (int i = 0; i < r.dim; ++i) {
    BigInt l, h;
    mpz_cdiv_q(l.get_mpz_t(), r.box[i].first.get_num_mpz_t(), r.box[i].first.get_den_mpz_t());
    mpz_fdiv_q(h.get_mpz_t(), r.box[i].second.get_num_mpz_t(), r.box[i].second.get_den_mpz_t());
    if (!l.fits_slong_p() || !h.fits_slong_p()) fail(ErrorKind::InvalidArgument, "box too large");
    lo[i] = l.get_si();
    hi[i] = h.get_si();
    if (lo[i] > hi[i]) return 0;
  }
  BigInt count = 0;
  std::vector<long> x = lo;
  for (;;) {
    bool ok = true;
    for (const auto& c : cons)
      if (!satisfies(c, x)) {
        ok = false;
        break;
      }
    if (ok) ++count;
    int i = r.dim - 1;
    while (i >= 0 && x[i] == hi[i]) {
      x[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++x[i];
  }
  return count;
}

using Pt = std::pair<Rational, Rational>;

// Clip a convex polygon by a*x + b*y + c <= 0.
std::vector<Pt> clip(const std::vector<Pt>& poly, const Rational& a, const Rational& b, const Rational& c) {
  std::vector<Pt> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& P = poly[i];
    const Pt& Q = poly[(i + 1) % n];
    const Rational fp = a * P.first + b * P.second + c;
    const Rational fq = a * Q.first + b * Q.second + c;
    if (fp <= 0) out.push_back(P);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const Rational t = fp / (fp - fq);
      out.emplace_back(Rational(P.first + t * (Q.first - P.first)), Rational(P.second + t * (Q.second - P.second)));
    }
  }
  return out;
}

// Linear form of an inequality as (coefficient vector, constant) of g <= 0.
std::pair<std::vector<Rational>, Rational> linear_form(const Inequality& q, int dim) {
  std::vector<Rational> a(dim, Rational(0));
  Rational c = -q.rhs;
  for (const auto& m : q.terms) {
    const int deg = std::accumulate(m.exps.begin(), m.exps.end(), 0);
    if (deg == 0) {
      c += m.coef;
    } else {
      for (int i = 0; i < dim; ++i)
        if (m.exps[i] == 1) a[i] += m.coef;
    }
  }
  if (q.op == Inequality::Op::GE || q.op == Inequality::Op::GT) {
    for (auto& v : a) v = -v;
    c = -c;
  }
  return {a, c};
}

struct Interval {
  double lo, hi;
};

Interval ipow(Interval x, int e) {
  if (e == 0) return {1, 1};
  const double a = std::pow(x.lo, e), b = std::pow(x.hi, e);
  if (e % 2 == 1) return {a, b};
  if (x.lo >= 0) return {a, b};
  if (x.hi <= 0) return {b, a};
  return {0, std::max(a, b)};
}

Interval imul(Interval x, Interval y) {
  const double p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

struct RealConstraint {
  std::vector<double> coef;
  std::vector<std::vector<int>> exps;
  double constant;
};

RealConstraint to_real(const Inequality& q) {
  RealConstraint c;
  const double s = (q.op == Inequality::Op::GE || q.op == Inequality::Op::GT) ? -1.0 : 1.0;
  for (const auto& m : q.terms) {
    c.coef.push_back(s * m.coef.get_d());
    c.exps.push_back(m.exps);
  }
  c.constant = -s * q.rhs.get_d();
  return c;
}

Interval eval_interval(const RealConstraint& c, const std::vector<Interval>& box) {
  Interval acc{c.constant, c.constant};
  for (std::size_t t = 0; t < c.coef.size(); ++t) {
    Interval term{c.coef[t], c.coef[t]};
    for (std::size_t i = 0; i < box.size(); ++i) term = imul(term, ipow(box[i], c.exps[t][i]));
    acc.lo += term.lo;
    acc.hi += term.hi;
  }
  const double slack = 1e-12 * (std::abs(acc.lo) + std::abs(acc.hi) + 1);
  return {acc.lo - slack, acc.hi + slack};
}

double eval_point(const RealConstraint& c, const std::vector<double>& x) {
  double acc = c.constant;
  for (std::size_t t = 0; t < c.coef.size(); ++t) {
    double term = c.coef[t];
    for (std::size_t i = 0; i < x.size(); ++i) term *= std::pow(x[i], c.exps[t][i]);
    acc += term;
  }
  return acc;
}

void grid_volume(const Region& r, int grid, DavenportResult& out) {
  std::vector<RealConstraint> cons;
  for (const auto& q : r.constraints) cons.push_back(to_real(q));
  const int n = r.dim;
  std::vector<double> lo(n), width(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = r.box[i].first.get_d();
    width[i] = (r.box[i].second.get_d() - lo[i]) / grid;
  }
  double cell = 1;
  for (double w : width) cell *= w;

  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(grid);
  std::uint64_t inside = 0, unknown = 0, mid_in = 0;
  // Projections onto every coordinate subspace of dimension 1..n-1.
  std::vector<unsigned> masks;
  for (unsigned m = 1; m + 1 < (1U << n); ++m) masks.push_back(m);
  std::vector<std::unordered_set<std::uint64_t>> proj(masks.size());

  std::vector<int> idx(n, 0);
  std::vector<Interval> box(n);
  std::vector<double> mid(n);
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t rem = c;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % grid);
      rem /= grid;
      box[i] = {lo[i] + idx[i] * width[i], lo[i] + (idx[i] + 1) * width[i]};
      mid[i] = lo[i] + (idx[i] + 0.5) * width[i];
    }
    bool all_in = true, any_out = false;
    for (const auto& k : cons) {
      const Interval v = eval_interval(k, box);
      if (v.lo > 0) {
        any_out = true;
        break;
      }
      if (v.hi >= 0) all_in = false;
    }
    if (any_out) continue;
    bool counted = all_in;
    if (all_in) {
      ++inside;
    } else {
      ++unknown;
      counted = true;
      for (const auto& k : cons)
        if (eval_point(k, mid) > 0) {
          counted = false;
          break;
        }
      if (counted) ++mid_in;
    }
    if (!counted) continue;
    for (std::size_t m = 0; m < masks.size(); ++m) {
      std::uint64_t key = 0;
      for (int i = 0; i < n; ++i)
        if (masks[m] & (1U << i)) key = key * static_cast<std::uint64_t>(grid) + static_cast<std::uint64_t>(idx[i]);
      proj[m].insert(key);
    }
  }
  out.volume = (static_cast<double>(inside) + static_cast<double>(mid_in)) * cell;
  out.volume_error = static_cast<double>(unknown) * cell;
  out.volume_exact = false;
  out.max_projection = 0;
  for (std::size_t m = 0; m < masks.size(); ++m) {
    double w = 1;
    for (int i = 0; i < n; ++i)
      if (masks[m] & (1U << i)) w *= width[i];
    out.max_projection = std::max(out.max_projection, static_cast<double>(proj[m].size()) * w);
  }
}

}  // namespace

DavenportResult davenport_check(const Region& region, const DavenportOptions& opts) {
  if (static_cast<int>(region.box.size()) != region.dim || region.dim < 1)
    fail(ErrorKind::Unbounded, "region needs a bounding box");
  DavenportResult out;
  out.count = lattice_count(region);

  bool linear = true;
  for (const auto& q : region.constraints) linear = linear && q.linear();
  if (linear && region.dim <= 2) {
    if (region.dim == 1) {
      Rational lo = region.box[0].first, hi = region.box[0].second;
      for (const auto& q : region.constraints) {
        const auto [a, c] = linear_form(q, 1);
        if (sgn(a[0]) > 0) hi = std::min(hi, Rational(-c / a[0]));
        else if (sgn(a[0]) < 0) lo = std::max(lo, Rational(-c / a[0]));
        else if (c > 0) hi = lo - 1;
      }
      out.exact_volume = hi > lo ? Rational(hi - lo) : Rational(0);
      out.max_projection = 0;
    } else {
      const auto& [bx, by] = std::tie(region.box[0], region.box[1]);
      std::vector<Pt> poly{{bx.first, by.first}, {bx.second, by.first}, {bx.second, by.second}, {bx.first, by.second}};
      for (const auto& q : region.constraints) {
        if (poly.empty()) break;
        const auto [a, c] = linear_form(q, 2);
        poly = clip(poly, a[0], a[1], c);
      }
      Rational area = 0;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Pt& P = poly[i];
        const Pt& Q = poly[(i + 1) % poly.size()];
        area += P.first * Q.second - Q.first * P.second;
      }
      area = abs(area) / 2;
      out.exact_volume = area;
      if (!poly.empty()) {
        Rational xmin = poly[0].first, xmax = xmin, ymin = poly[0].second, ymax = ymin;
        for (const auto& P : poly) {
          xmin = std::min(xmin, P.first);
          xmax = std::max(xmax, P.first);
          ymin = std::min(ymin, P.second);
          ymax = std::max(ymax, P.second);
        }
        out.max_projection = std::max(Rational(xmax - xmin), Rational(ymax - ymin)).get_d();
      }
    }
    out.volume = out.exact_volume->get_d();
    out.volume_exact = true;
    return out;
  }
  const int grid = opts.grid > 0 ? opts.grid : (region.dim == 1 ? 1 << 20 : region.dim == 2 ? 2048 : region.dim == 3 ? 160 : 48);
  grid_volume(region, grid, out);
  return out;
}

// ===========================================================================
// Curves

bool CurveFamily::contains(std::int64_t A, std::int64_t B) const {
  for (const auto& c : conditions) {
    const std::int64_t v = c.variable == 'A' ? A : B;
    if (floor_mod(v - c.residue, c.modulus) != 0) return false;
  }
  return true;
}

CurveFamily parse_family(std::string_view text) {
  CurveFamily f;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (tok[0] == "name") {
      f.name.clear();
      for (std::size_t i = 1; i < tok.size(); ++i) f.name += (i > 1 ? " " : "") + tok[i];
      continue;
    }
    // A = r mod m
    if (tok.size() != 5 || (tok[0] != "A" && tok[0] != "B") || tok[1] != "=" || tok[3] != "mod")
      fail(ErrorKind::Parse, "expected 'A = r mod m' or 'B = r mod m'" + where);
    Congruence c;
    c.variable = tok[0][0];
    try {
      c.residue = std::stoll(tok[2]);
      c.modulus = std::stoll(tok[4]);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad integer" + where);
    }
    if (c.modulus < 1) fail(ErrorKind::Parse, "modulus must be positive" + where);
    f.conditions.push_back(c);
  }
  return f;
}

namespace {

bool divisible_by_power(std::int64_t v, std::int64_t p, int e) {
  std::int64_t q = 1;
  for (int i = 0; i < e; ++i) {
    if (q > INT64_MAX / p) return v == 0;
    q *= p;
  }
  return v % q == 0;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
  std::vector<std::int64_t> out;
  std::vector<bool> sieve(static_cast<std::size_t>(n + 1), true);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) sieve[j] = false;
  }
  return out;
}

}  // namespace

bool is_minimal_model(std::int64_t A, std::int64_t B) {
  if (A == 0 && B == 0) return false;
  // A prime with p^4 | A and p^6 | B divides gcd(A, B) and has p^4 <= |A| (or p^6 <= |B| if A = 0).
  const std::int64_t a = A < 0 ? -A : A, b = B < 0 ? -B : B;
  for (std::int64_t p = 2;; ++p) {
    const bool a_ok = a == 0 || (p * p <= a && p * p * p * p <= a);
    const bool b_ok = b == 0 || (p * p * p <= b && p * p * p * p * p * p <= b);
    if (!a_ok || !b_ok) break;
    bool prime = true;
    for (std::int64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
    if (prime && divisible_by_power(A, p, 4) && divisible_by_power(B, p, 6)) return false;
  }
  return true;
}

Rational local_density(const CurveFamily& family, std::int64_t p) {
  // The p-parts of the congruences on one variable combine to v = R mod p^E
  // (or are inconsistent). Then density(v) = p^-E and density(v, p^k | v) is
  // p^-max(E,k) when R = 0 mod p^min(E,k), else 0.
  auto densities = [&](char var, int k) -> std::pair<Rational, Rational> {
    int E = 0;
    BigInt R = 0;
    std::vector<std::pair<int, BigInt>> conds;
    for (const auto& c : family.conditions) {
      if (c.variable != var) continue;
      const int vp = valuation(BigInt(static_cast<long>(c.modulus)), static_cast<long>(p));
      if (vp <= 0) continue;
      conds.emplace_back(vp, BigInt(static_cast<long>(c.residue)));
      if (vp > E) {
        E = vp;
        R = static_cast<long>(c.residue);
      }
    }
    BigInt pE = 1;
    for (int i = 0; i < E; ++i) pE *= p;
    R %= pE;
    if (R < 0) R += pE;
    for (const auto& [vp, r] : conds) {
      BigInt q = 1;
      for (int i = 0; i < vp; ++i) q *= p;
      if (BigInt(R - r) % q != 0) return {Rational(0), Rational(0)};
    }
    auto inv_pow = [&](int e) {
      BigInt q = 1;
      for (int i = 0; i < e; ++i) q *= p;
      return frac(1, q);
    };
    BigInt pm = 1;
    for (int i = 0; i < std::min(E, k); ++i) pm *= p;
    const Rational deep = R % pm == 0 ? inv_pow(std::max(E, k)) : Rational(0);
    return {inv_pow(E), deep};
  };
  const auto [da, da4] = densities('A', 4);
  const auto [db, db6] = densities('B', 6);
  return Rational(da * db - da4 * db6);
}

CurveCount enumerate_curves(std::int64_t X, const CurveFamily& family, unsigned threads) {
  if (X < 1) fail(ErrorKind::InvalidArgument, "X must be at least 1");
  CurveCount out;
  out.X = X;
  // 108 |A|^3 < 4X and 729 B^2 < 4X.
  std::int64_t amax = 0;
  while (108 * (amax + 1) * (amax + 1) * (amax + 1) < 4 * X) ++amax;
  std::int64_t bmax = 0;
  while (729 * (bmax + 1) * (bmax + 1) < 4 * X) ++bmax;

  ChunkPlan plan{0, static_cast<std::uint64_t>(2 * amax + 1), 8, threads};
  auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
    std::int64_t c = 0;
    for (std::uint64_t ia = lo; ia < hi; ++ia) {
      const std::int64_t A = static_cast<std::int64_t>(ia) - amax;
      for (std::int64_t B = -bmax; B <= bmax; ++B) {
        if (4 * A * A * A + 27 * B * B == 0) continue;
        if (!family.contains(A, B) || !is_minimal_model(A, B)) continue;
        ++c;
      }
    }
    return c;
  };
  out.count = run_chunked<std::int64_t>(plan, 0, chunk, [](std::int64_t& a, std::int64_t b) { a += b; });
  out.ratio = static_cast<double>(out.count) / std::pow(static_cast<double>(X), 5.0 / 6.0);

  std::set<std::int64_t> touched;
  for (const auto& c : family.conditions) {
    std::int64_t m = c.modulus;
    for (std::int64_t p = 2; p * p <= m; ++p)
      while (m % p == 0) {
        touched.insert(p);
        m /= p;
      }
    if (m > 1) touched.insert(m);
  }
  double constant = out.archimedean.get_d();
  for (std::int64_t p : primes_up_to(10000)) {
    if (touched.count(p)) {
      const Rational d = local_density(family, p);
      out.local_densities.emplace_back(p, d);
      constant *= d.get_d();
    } else {
      constant *= 1.0 - std::pow(static_cast<double>(p), -10.0);
    }
  }
  for (std::int64_t p : touched)
    if (p > 10000) {
      const Rational d = local_density(family, p);
      out.local_densities.emplace_back(p, d);
      constant *= d.get_d();
    }
  out.predicted_constant = constant;
  return out;
}

}  // namespace qpl
