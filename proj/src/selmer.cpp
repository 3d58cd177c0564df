#include "qpl/selmer.hpp"

#include <algorithm>
#include <sstream>

#include "qpl/error.hpp"

namespace qpl {

namespace {

BigInt pow2(int k) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return r;
}

void validate(const MomentConstraints& c) {
  if (c.a_max < 1 || c.b_max < 1) fail(ErrorKind::InvalidArgument, "caps must be >= 1");
  if (c.s2_avg < 0 || c.order4_avg < 0)
    fail(ErrorKind::InvalidArgument, "moment targets must be nonnegative");
}

struct Column {
  SelmerShape shape;
  std::array<Rational, 3> a;  // (1, 2^{a+b}, order-4 count)
  Rational cost;              // 2^{a+b} - 2^a
};

std::vector<Column> columns(const MomentConstraints& c) {
  std::vector<Column> cols;
  for (int a = 0; a <= c.a_max; ++a)
    for (int b = 0; b <= c.b_max; ++b) {
      const SelmerSizes s = selmer_sizes({a, b});
      cols.push_back({{a, b}, {Rational(1), Rational(s.sizeS2), Rational(s.order4count)},
                      Rational(s.sizeS2 - pow2(a))});
    }
  return cols;
}

// Dense tableau over m rows; columns are structural, then m artificials, then rhs.
class Tableau {
 public:
  Tableau(const std::vector<Column>& cols, const std::array<Rational, 3>& rhs)
      : n_(static_cast<int>(cols.size())), t_(kRows, std::vector<Rational>(n_ + kRows + 1)) {
    for (int i = 0; i < kRows; ++i) {
      for (int j = 0; j < n_; ++j) t_[i][j] = cols[j].a[i];
      t_[i][n_ + i] = 1;
      t_[i][n_ + kRows] = rhs[i];
      basis_.push_back(n_ + i);
    }
  }

  // Minimises cost over columns [0, allowed); Bland's rule throughout.
  void optimise(const std::vector<Rational>& cost, int allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < allowed && enter < 0; ++j)
        if (is_basic(j) == false && reduced_cost(cost, j) < 0) enter = j;
      if (enter < 0) return;
      int leave = -1;
      Rational best;
      for (int i = 0; i < kRows; ++i) {
        if (t_[i][enter] <= 0) continue;
        const Rational ratio = t_[i][rhs_col()] / t_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) fail(ErrorKind::Unbounded, "extremal LP unbounded");
      pivot(leave, enter);
    }
  }

  // Replaces zero-valued basic artificials by structural columns where possible.
  void evict_artificials() {
    for (int i = 0; i < kRows; ++i) {
      if (basis_[i] < n_) continue;
      for (int j = 0; j < n_; ++j)
        if (!is_basic(j) && t_[i][j] != 0) {
          pivot(i, j);
          break;
        }
    }
  }

  Rational objective(const std::vector<Rational>& cost) const {
    Rational v = 0;
    for (int i = 0; i < kRows; ++i) v += cost[basis_[i]] * t_[i][rhs_col()];
    return v;
  }

  // y_k = c_B . B^{-1} e_k; B^{-1} sits in the artificial columns.
  LpDual dual(const std::vector<Rational>& cost) const {
    LpDual y;
    for (int k = 0; k < kRows; ++k) {
      y[k] = 0;
      for (int i = 0; i < kRows; ++i) y[k] += cost[basis_[i]] * t_[i][n_ + k];
    }
    return y;
  }

  Rational value_of(int j) const {
    for (int i = 0; i < kRows; ++i)
      if (basis_[i] == j) return t_[i][rhs_col()];
    return 0;
  }

 private:
  static constexpr int kRows = 3;
  int n_;
  std::vector<std::vector<Rational>> t_;
  std::vector<int> basis_;

  int rhs_col() const { return n_ + kRows; }

  bool is_basic(int j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  Rational reduced_cost(const std::vector<Rational>& cost, int j) const {
    Rational r = cost[j];
    for (int i = 0; i < kRows; ++i) r -= cost[basis_[i]] * t_[i][j];
    return r;
  }

  void pivot(int row, int col) {
    const Rational piv = t_[row][col];
    for (auto& x : t_[row]) x /= piv;
    for (int i = 0; i < kRows; ++i) {
      if (i == row || t_[i][col] == 0) continue;
      const Rational f = t_[i][col];
      for (std::size_t j = 0; j < t_[i].size(); ++j) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }
};

std::string format_dual(const LpDual& y) {
  std::ostringstream os;
  os << "(" << y[0].get_str() << ", " << y[1].get_str() << ", " << y[2].get_str() << ")";
  return os.str();
}

}  // namespace

SelmerSizes selmer_sizes(SelmerShape s) {
  if (s.a < 0 || s.b < 0) fail(ErrorKind::InvalidArgument, "Selmer shape needs a, b >= 0");
  const BigInt two_a = pow2(s.a), two_b = pow2(s.b);
  return {two_a * two_a * two_b, two_a * two_b, (two_a * two_a - two_a) * two_b};
}

std::vector<PointwiseRow> pointwise_inequality_table(int a_max) {
  if (a_max < 1) fail(ErrorKind::InvalidArgument, "a_max must be >= 1");
  std::vector<PointwiseRow> rows;
  for (int a = 1; a <= a_max; ++a) {
    const BigInt t = pow2(a);
    rows.push_back({a, 5 * t - 8, t * t - t});
  }
  return rows;
}

bool pointwise_inequality_check(int a_max) {
  const auto rows = pointwise_inequality_table(a_max);
  return std::all_of(rows.begin(), rows.end(), [](const PointwiseRow& r) { return r.holds(); });
}

LpResult solve_extremal_lp(const MomentConstraints& c) {
  validate(c);
  const auto cols = columns(c);
  const int n = static_cast<int>(cols.size());
  Tableau tab(cols, {Rational(1), c.s2_avg, c.order4_avg});

  std::vector<Rational> phase1(n + 3, Rational(0));
  for (int k = 0; k < 3; ++k) phase1[n + k] = 1;
  tab.optimise(phase1, n);

  LpResult res;
  if (tab.objective(phase1) > 0) {
    LpDual y = tab.dual(phase1);
    for (auto& v : y) v = -v;
    res.farkas = y;
    return res;
  }

  tab.evict_artificials();
  std::vector<Rational> phase2(n + 3, Rational(0));
  for (int j = 0; j < n; ++j) phase2[j] = cols[j].cost;
  tab.optimise(phase2, n);

  res.feasible = true;
  res.optimum = tab.objective(phase2);
  res.dual = tab.dual(phase2);
  for (int j = 0; j < n; ++j) {
    const Rational q = tab.value_of(j);
    if (q != 0) res.distribution.push_back({cols[j].shape, q});
  }
  return res;
}

Rational extremal_bound(const MomentConstraints& c) {
  const LpResult r = solve_extremal_lp(c);
  if (!r.feasible)
    fail(ErrorKind::Infeasible,
         "moment constraints infeasible; Farkas certificate y = " + format_dual(*r.farkas));
  return r.optimum;
}

std::optional<Rational> dual_bound(const LpDual& y, const MomentConstraints& c) {
  validate(c);
  for (const Column& col : columns(c))
    if (y[0] * col.a[0] + y[1] * col.a[1] + y[2] * col.a[2] > col.cost) return std::nullopt;
  return y[0] + y[1] * c.s2_avg + y[2] * c.order4_avg;
}

bool is_farkas_certificate(const LpDual& y, const MomentConstraints& c) {
  validate(c);
  for (const Column& col : columns(c))
    if (y[0] * col.a[0] + y[1] * col.a[1] + y[2] * col.a[2] < 0) return false;
  return y[0] + y[1] * c.s2_avg + y[2] * c.order4_avg < 0;
}

}  // namespace qpl
