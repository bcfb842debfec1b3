#include "subgrad/linalg.hpp"

#include <utility>

namespace subgrad::linalg {

RowEchelon rref(const RationalMatrix& m, std::size_t cols) {
  RationalMatrix a = m;
  for (const auto& row : a) require_same_dim(row.dim(), cols, "rref");
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && sgn(a[piv][c]) == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    Rational inv = 1 / a[r][c];
    a[r] *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || sgn(a[i][c]) == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) {
        if (sgn(a[r][j]) != 0) a[i][j] -= f * a[r][j];
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  out.rows = std::move(a);
  return out;
}

std::size_t rank(const RationalMatrix& m, std::size_t cols) { return rref(m, cols).rows.size(); }

RationalMatrix nullspace(const RationalMatrix& m, std::size_t cols) {
  RowEchelon e = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  RationalMatrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < e.rows.size(); ++r) v[e.pivots[r]] = -e.rows[r][free];
    basis.push_back(std::move(v));
  }
  RationalMatrix canonical = rref(basis, cols).rows;
  for (auto& v : canonical) v = primitive_direction(v);
  return canonical;
}

RationalMatrix row_space(const RationalMatrix& m, std::size_t cols) {
  RationalMatrix rows = rref(m, cols).rows;
  for (auto& v : rows) v = primitive_direction(v);
  return rows;
}

std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b) {
  const std::size_t n = a.size();
  require_same_dim(n, b.dim(), "solve");
  RationalMatrix aug;
  aug.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    require_same_dim(a[i].dim(), n, "solve");
    RationalVector row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = a[i][j];
    row[n] = b[i];
    aug.push_back(std::move(row));
  }
  RowEchelon e = rref(aug, n + 1);
  if (e.rows.size() != n || e.pivots.back() != n - 1) return std::nullopt;
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = e.rows[i][n];
  return x;
}

std::vector<std::size_t> independent_rows(const RationalMatrix& m, std::size_t cols) {
  std::vector<std::size_t> chosen;
  RationalMatrix basis;  // kept in partially reduced form
  std::vector<std::size_t> basis_pivots;
  for (std::size_t i = 0; i < m.size(); ++i) {
    RationalVector v = m[i];
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const auto p = basis_pivots[k];
      if (sgn(v[p]) == 0) continue;
      Rational f = v[p] / basis[k][p];
      for (std::size_t j = 0; j < cols; ++j) {
        if (sgn(basis[k][j]) != 0) v[j] -= f * basis[k][j];
      }
    }
    std::size_t p = 0;
    while (p < cols && sgn(v[p]) == 0) ++p;
    if (p == cols) continue;
    chosen.push_back(i);
    basis.push_back(std::move(v));
    basis_pivots.push_back(p);
  }
  return chosen;
}

RationalVector orthogonal_coefficients(const RationalVector& v, const RationalMatrix& basis) {
  const std::size_t k = basis.size();
  RationalMatrix gram(k, RationalVector(k));
  RationalVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram[i][j] = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  if (k == 0) return RationalVector();
  auto lambda = solve(gram, rhs);
  if (!lambda) throw Error(ErrorCode::InternalError, "dependent basis in orthogonal projection");
  return *lambda;
}

RationalVector orthogonal_residual(const RationalVector& v, const RationalMatrix& basis) {
  RationalVector lambda = orthogonal_coefficients(v, basis);
  RationalVector r = v;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (sgn(lambda[i]) != 0) r -= lambda[i] * basis[i];
  }
  return r;
}

RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v) {
  RationalVector out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

RationalVector mat_t_vec(const RationalMatrix& m, const RationalVector& v, std::size_t cols) {
  require_same_dim(m.size(), v.dim(), "transpose product");
  RationalVector out(cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    for (std::size_t j = 0; j < cols; ++j) out[j] += m[i][j] * v[i];
  }
  return out;
}

RationalMatrix identity(std::size_t n) {
  RationalMatrix m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(RationalVector::unit(n, i));
  return m;
}

}  // namespace subgrad::linalg
