#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "subgrad/rational.hpp"

// Exact dense linear algebra over Q for the small systems the polyhedral
// kernel needs (dimension <= a few dozen).
namespace subgrad::linalg {

struct RowEchelon {
  RationalMatrix rows;             // nonzero rows of the reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Reduced row echelon form of `m` whose rows all have length `cols`.
RowEchelon rref(const RationalMatrix& m, std::size_t cols);

std::size_t rank(const RationalMatrix& m, std::size_t cols);

/// Canonical basis of {y : m y = 0}: RREF of the null space, each row scaled to
/// a primitive integer vector.
RationalMatrix nullspace(const RationalMatrix& m, std::size_t cols);

/// Canonical basis of the row space (RREF rows, primitive scaling).
RationalMatrix row_space(const RationalMatrix& m, std::size_t cols);

/// Solves the square system a x = b; nullopt when singular.
std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b);

/// Indices of a maximal linearly independent subset of the rows, chosen
/// greedily in order.
std::vector<std::size_t> independent_rows(const RationalMatrix& m, std::size_t cols);

/// Component of v orthogonal to span(basis); basis rows must be independent.
RationalVector orthogonal_residual(const RationalVector& v, const RationalMatrix& basis);

/// Coefficients lambda with v - sum lambda_k basis_k orthogonal to span(basis).
RationalVector orthogonal_coefficients(const RationalVector& v, const RationalMatrix& basis);

RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v);
RationalVector mat_t_vec(const RationalMatrix& m, const RationalVector& v, std::size_t cols);
RationalMatrix identity(std::size_t n);

}  // namespace subgrad::linalg
