#include "qpl/sturm.hpp"

namespace qpl {

namespace {

int sign_of(const Rational& x) { return sgn(x); }

int count_variations(const std::vector<int>& signs) {
  int v = 0;
  int prev = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

}  // namespace

SturmSequence::SturmSequence(const QPoly& p) {
  if (p.zero()) fail(ErrorKind::ZeroForm, "Sturm sequence of the zero polynomial");
  const QPoly g = gcd(p, p.derivative());
  QPoly sf = p.divmod(g).first;
  seq_.push_back(sf);
  if (sf.degree() < 1) return;
  seq_.push_back(sf.derivative());
  while (true) {
    const QPoly r = seq_[seq_.size() - 2].divmod(seq_.back()).second;
    if (r.zero()) break;
    seq_.push_back(-r);
  }
}

int SturmSequence::variations_at(const Rational& x) const {
  std::vector<int> s;
  s.reserve(seq_.size());
  for (const auto& q : seq_) s.push_back(sign_of(q(x)));
  return count_variations(s);
}

int SturmSequence::variations_at_plus_infinity() const {
  std::vector<int> s;
  for (const auto& q : seq_) s.push_back(q.zero() ? 0 : sign_of(q.lead()));
  return count_variations(s);
}

int SturmSequence::variations_at_minus_infinity() const {
  std::vector<int> s;
  for (const auto& q : seq_) {
    if (q.zero()) {
      s.push_back(0);
      continue;
    }
    const int l = sign_of(q.lead());
    s.push_back(q.degree() % 2 == 0 ? l : -l);
  }
  return count_variations(s);
}

int SturmSequence::count_in(const Rational& lo, const Rational& hi) const {
  return variations_at(lo) - variations_at(hi);
}

int SturmSequence::count_real() const {
  return variations_at_minus_infinity() - variations_at_plus_infinity();
}

std::vector<RootInterval> SturmSequence::isolate() const {
  std::vector<RootInterval> out;
  if (squarefree().degree() < 1) return out;
  const Rational b = cauchy_root_bound(squarefree());
  const Rational lo(-b);
  isolate_rec(lo, b, variations_at(lo), variations_at(b), out);
  return out;
}

void SturmSequence::isolate_rec(const Rational& lo, const Rational& hi, int vlo, int vhi,
                                std::vector<RootInterval>& out) const {
  const int n = vlo - vhi;
  if (n == 0) return;
  if (n == 1) {
    out.push_back({lo, hi});
    return;
  }
  const Rational mid = (lo + hi) / 2;
  const int vmid = variations_at(mid);
  isolate_rec(lo, mid, vlo, vmid, out);
  isolate_rec(mid, hi, vmid, vhi, out);
}

RootInterval SturmSequence::refine(RootInterval iv, const Rational& width) const {
  const QPoly& p = squarefree();
  if (p(iv.hi) == 0) return {iv.hi, iv.hi};
  while (!iv.exact() && iv.hi - iv.lo >= width) {
    const Rational mid = (iv.lo + iv.hi) / 2;
    if (p(mid) == 0) return {mid, mid};
    if (count_in(iv.lo, mid) == 1) {
      iv.hi = mid;
    } else {
      iv.lo = mid;
    }
  }
  return iv;
}

Rational cauchy_root_bound(const QPoly& p) {
  if (p.degree() < 1) return Rational(1);
  Rational m(0);
  const Rational lead = abs(p.lead());
  for (int i = 0; i < p.degree(); ++i) {
    const Rational r = abs(p.coeff(i)) / lead;
    if (r > m) m = r;
  }
  return Rational(1 + m);
}

Rational simplest_fraction_between(const Rational& lo_in, const Rational& hi_in) {
  if (lo_in > hi_in) fail(ErrorKind::InvalidArgument, "empty interval");
  // Reduce to 0 < lo <= hi by symmetry / integer shifts.
  if (lo_in <= 0 && hi_in >= 0) return Rational(0);
  if (hi_in < 0) return Rational(-simplest_fraction_between(Rational(-hi_in), Rational(-lo_in)));
  Rational lo = lo_in;
  Rational hi = hi_in;
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (Rational(fl) == lo) return lo;
  // An integer in (lo, hi] wins if present.
  const BigInt next = fl + 1;
  if (Rational(next) <= hi) return Rational(next);
  // lo, hi share the integer part fl: recurse on reciprocals of the
  // fractional parts.
  const Rational flo = lo - Rational(fl);
  const Rational fhi = hi - Rational(fl);
  const Rational inner = simplest_fraction_between(Rational(1 / fhi), Rational(1 / flo));
  return Rational(Rational(fl) + 1 / inner);
}

}  // namespace qpl
