#include "subgrad/lp.hpp"

#include <limits>

namespace subgrad {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Tableau rows: constraint rows followed by the objective row. The last column
// is the right-hand side. basis[i] is the variable basic in row i.
struct Tableau {
  std::vector<std::vector<Rational>> t;
  std::vector<std::size_t> basis;
  std::size_t cols = 0;  // number of variables (excluding rhs)

  std::size_t rows() const { return basis.size(); }
  Rational& rhs(std::size_t r) { return t[r][cols]; }

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / t[r][c];
    for (auto& x : t[r]) {
      if (sgn(x) != 0) x *= inv;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || sgn(t[i][c]) == 0) continue;
      Rational f = t[i][c];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (sgn(t[r][j]) != 0) t[i][j] -= f * t[r][j];
      }
    }
    basis[r] = c;
  }

  // Minimizes the objective stored in the last row (as reduced costs). The
  // columns in `allowed` may enter the basis. Returns false when unbounded.
  bool run(const std::vector<bool>& allowed) {
    auto& obj = t.back();
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < cols; ++j) {
        if (allowed[j] && sgn(obj[j]) < 0) {
          enter = j;
          break;
        }
      }
      if (enter == kNone) return true;
      std::size_t leave = kNone;
      Rational best;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (sgn(t[i][enter]) <= 0) continue;
        Rational ratio = t[i][cols] / t[i][enter];
        if (leave == kNone || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == kNone) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  std::vector<bool> nonneg = lp.nonnegative;
  if (nonneg.empty()) nonneg.assign(n, false);
  require_same_dim(nonneg.size(), n, "lp nonnegativity flags");
  if (lp.objective.dim() != 0) require_same_dim(lp.objective.dim(), n, "lp objective");

  // Column layout: for each original variable a "+" column, plus a "-" column
  // when it is free; then one slack per inequality; then one artificial per row.
  std::vector<std::size_t> plus_col(n), minus_col(n, kNone);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    plus_col[j] = cols++;
    if (!nonneg[j]) minus_col[j] = cols++;
  }
  const std::size_t m = lp.constraints.size();
  std::vector<std::size_t> slack_col(m, kNone);
  for (std::size_t i = 0; i < m; ++i) {
    require_same_dim(lp.constraints[i].coeffs.dim(), n, "lp constraint");
    if (lp.constraints[i].relation != Relation::Equal) slack_col[i] = cols++;
  }
  const std::size_t first_artificial = cols;
  cols += m;

  Tableau tab;
  tab.cols = cols;
  tab.t.assign(m + 1, std::vector<Rational>(cols + 1));
  tab.basis.assign(m, kNone);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    auto& row = tab.t[i];
    for (std::size_t j = 0; j < n; ++j) {
      row[plus_col[j]] = c.coeffs[j];
      if (minus_col[j] != kNone) row[minus_col[j]] = -c.coeffs[j];
    }
    if (c.relation == Relation::LessEqual) row[slack_col[i]] = 1;
    if (c.relation == Relation::GreaterEqual) row[slack_col[i]] = -1;
    row[cols] = c.rhs;
    if (sgn(row[cols]) < 0) {
      for (auto& x : row) x = -x;
    }
    row[first_artificial + i] = 1;
    tab.basis[i] = first_artificial + i;
  }

  // Phase I: minimize the sum of artificials, expressed in reduced-cost form.
  auto& obj = tab.t[m];
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= cols; ++j) {
      if (j >= first_artificial && j < cols) continue;
      obj[j] -= tab.t[i][j];
    }
  }
  std::vector<bool> allowed(cols, true);
  tab.run(allowed);
  LpSolution sol;
  if (sgn(obj[cols]) != 0) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tab.rows();) {
    if (tab.basis[i] < first_artificial) {
      ++i;
      continue;
    }
    std::size_t c = kNone;
    for (std::size_t j = 0; j < first_artificial; ++j) {
      if (sgn(tab.t[i][j]) != 0) {
        c = j;
        break;
      }
    }
    if (c != kNone) {
      tab.pivot(i, c);
      ++i;
    } else {
      tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
      tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;

  // Phase II objective in reduced-cost form.
  auto& obj2 = tab.t.back();
  for (auto& x : obj2) x = 0;
  if (lp.objective.dim() == n) {
    for (std::size_t j = 0; j < n; ++j) {
      obj2[plus_col[j]] = lp.objective[j];
      if (minus_col[j] != kNone) obj2[minus_col[j]] = -lp.objective[j];
    }
  }
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    const Rational f = obj2[tab.basis[i]];
    if (sgn(f) == 0) continue;
    for (std::size_t j = 0; j <= cols; ++j) {
      if (sgn(tab.t[i][j]) != 0) obj2[j] -= f * tab.t[i][j];
    }
  }
  if (!tab.run(allowed)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<Rational> value(cols);
  for (std::size_t i = 0; i < tab.rows(); ++i) value[tab.basis[i]] = tab.t[i][cols];
  sol.status = LpStatus::Optimal;
  sol.x = RationalVector(n);
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = value[plus_col[j]];
    if (minus_col[j] != kNone) sol.x[j] -= value[minus_col[j]];
  }
  sol.value = lp.objective.dim() == n ? dot(lp.objective, sol.x) : Rational(0);
  return sol;
}

}  // namespace subgrad
