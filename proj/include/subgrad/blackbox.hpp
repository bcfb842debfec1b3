#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "subgrad/pa_function.hpp"
#include "subgrad/rational.hpp"

namespace subgrad {

enum class ExprKind { Constant, Coordinate, Add, Sub, Mul, Neg, Abs, Max, Min, SqrtAbs, RemarkSeven };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  Rational constant;      // Constant
  std::size_t index = 0;  // Coordinate
  std::vector<Expr> args;
};

namespace expr {
Expr constant(Rational value);
Expr coord(std::size_t index);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr neg(Expr a);
Expr abs(Expr a);
Expr max(std::vector<Expr> args);
Expr min(std::vector<Expr> args);
Expr sqrt_abs(Expr a);
/// The even function of Remark 7: 0 at 0, x/(2n) on [1/(2n), 1/(2n-1)),
/// (x - 1/(2n))/(2n+1) + 1/(4n^2) on [1/(2n+1), 1/(2n)], +infinity for |x| >= 1.
Expr remark_seven(Expr a);
}  // namespace expr

const char* to_string(ExprKind kind);
ExprKind parse_expr_kind(const std::string& name);

/// The Remark 7 function at a double.
double remark_seven_value(double x);

/// Breakpoints of coordinate `index` at +-1/m for every integer m >= 1.
struct ReciprocalBreakpoints {
  std::size_t index = 0;
  friend bool operator==(const ReciprocalBreakpoints&, const ReciprocalBreakpoints&) = default;
};

/// Expression evaluated in double precision on a box (infinite bounds
/// allowed) intersected with optional extra halfspaces; +infinity outside.
class BlackBoxFunction {
 public:
  BlackBoxFunction(std::size_t dim, Expr root);
  BlackBoxFunction(std::size_t dim, Expr root, std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const noexcept { return dim_; }
  const Expr& root() const noexcept { return root_; }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }

  /// Extra domain constraint <normal, x> <= offset.
  void add_constraint(std::vector<double> normal, double offset);
  const std::vector<std::pair<std::vector<double>, double>>& constraints() const noexcept { return constraints_; }

  bool in_domain(const std::vector<double>& x) const;
  /// +infinity outside the domain; throws EvaluationFailure on NaN.
  double operator()(const std::vector<double>& x) const;

  /// Built from constants, coordinates, sums, negation, abs, max, min and
  /// products with a constant factor, and hence locally Lipschitz.
  bool is_piecewise_affine() const;
  std::vector<ReciprocalBreakpoints> breakpoint_hints() const;

 private:
  std::size_t dim_;
  Expr root_;
  std::vector<double> lo_, hi_;
  std::vector<std::pair<std::vector<double>, double>> constraints_;
};

BlackBoxFunction to_blackbox(const PAConvexFunction& f);
BlackBoxFunction to_blackbox(const DCFunction& f);

}  // namespace subgrad
