#pragma once

#include <cstddef>
#include <vector>

#include "subgrad/rational.hpp"

namespace subgrad {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpConstraint {
  RationalVector coeffs;
  Relation relation = Relation::LessEqual;
  Rational rhs;
};

/// minimize <objective, x> subject to the constraints. Variables are free
/// unless listed in `nonnegative`.
struct LinearProgram {
  std::size_t num_vars = 0;
  RationalVector objective;  // empty means pure feasibility
  std::vector<LpConstraint> constraints;
  std::vector<bool> nonnegative;  // empty means all free

  void add(RationalVector coeffs, Relation rel, Rational rhs) {
    constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  RationalVector x;
};

/// Two-phase dense tableau simplex over Q with Bland's rule, so it
/// terminates on degenerate problems and the answer is exact.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace subgrad
