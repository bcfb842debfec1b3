#include "subgrad/blackbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subgrad/errors.hpp"

namespace subgrad {

namespace expr {

namespace {
Expr node(ExprKind kind, std::vector<Expr> args) {
  for (const auto& a : args) {
    if (!a) throw Error(ErrorCode::InvalidArgument, "null subexpression");
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}
}  // namespace

Expr constant(Rational value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Constant;
  n->constant = std::move(value);
  return n;
}

Expr coord(std::size_t index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Coordinate;
  n->index = index;
  return n;
}

Expr add(Expr a, Expr b) { return node(ExprKind::Add, {std::move(a), std::move(b)}); }
Expr sub(Expr a, Expr b) { return node(ExprKind::Sub, {std::move(a), std::move(b)}); }
Expr mul(Expr a, Expr b) { return node(ExprKind::Mul, {std::move(a), std::move(b)}); }
Expr neg(Expr a) { return node(ExprKind::Neg, {std::move(a)}); }
Expr abs(Expr a) { return node(ExprKind::Abs, {std::move(a)}); }
Expr max(std::vector<Expr> args) {
  if (args.empty()) throw Error(ErrorCode::InvalidArgument, "max of nothing");
  return node(ExprKind::Max, std::move(args));
}
Expr min(std::vector<Expr> args) {
  if (args.empty()) throw Error(ErrorCode::InvalidArgument, "min of nothing");
  return node(ExprKind::Min, std::move(args));
}
Expr sqrt_abs(Expr a) { return node(ExprKind::SqrtAbs, {std::move(a)}); }
Expr remark_seven(Expr a) { return node(ExprKind::RemarkSeven, {std::move(a)}); }

}  // namespace expr

const char* to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::Constant: return "const";
    case ExprKind::Coordinate: return "x";
    case ExprKind::Add: return "add";
    case ExprKind::Sub: return "sub";
    case ExprKind::Mul: return "mul";
    case ExprKind::Neg: return "neg";
    case ExprKind::Abs: return "abs";
    case ExprKind::Max: return "max";
    case ExprKind::Min: return "min";
    case ExprKind::SqrtAbs: return "sqrt_abs";
    case ExprKind::RemarkSeven: return "remark7";
  }
  return "?";
}

ExprKind parse_expr_kind(const std::string& name) {
  for (auto k : {ExprKind::Constant, ExprKind::Coordinate, ExprKind::Add, ExprKind::Sub, ExprKind::Mul,
                 ExprKind::Neg, ExprKind::Abs, ExprKind::Max, ExprKind::Min, ExprKind::SqrtAbs,
                 ExprKind::RemarkSeven}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown expression operator '" + name + "'");
}

double remark_seven_value(double x) {
  const double y = std::fabs(x);
  if (y == 0.0) return 0.0;
  if (y >= 1.0) return std::numeric_limits<double>::infinity();
  const double r = 1.0 / y;
  const double m = std::floor(r);
  const bool odd = std::fmod(m, 2.0) == 1.0;
  if (!odd || r == m) {
    // y in [1/(2n+1), 1/(2n)]
    const double n = odd ? (m - 1.0) / 2.0 : m / 2.0;
    return (y - 1.0 / (2.0 * n)) / (2.0 * n + 1.0) + 1.0 / (4.0 * n * n);
  }
  // y in (1/(2n), 1/(2n-1))
  const double n = (m + 1.0) / 2.0;
  return y / (2.0 * n);
}

namespace {

double eval(const ExprNode& e, const std::vector<double>& x) {
  switch (e.kind) {
    case ExprKind::Constant: return e.constant.get_d();
    case ExprKind::Coordinate: return x[e.index];
    case ExprKind::Add: return eval(*e.args[0], x) + eval(*e.args[1], x);
    case ExprKind::Sub: return eval(*e.args[0], x) - eval(*e.args[1], x);
    case ExprKind::Mul: return eval(*e.args[0], x) * eval(*e.args[1], x);
    case ExprKind::Neg: return -eval(*e.args[0], x);
    case ExprKind::Abs: return std::fabs(eval(*e.args[0], x));
    case ExprKind::Max: {
      double best = eval(*e.args[0], x);
      for (std::size_t i = 1; i < e.args.size(); ++i) best = std::max(best, eval(*e.args[i], x));
      return best;
    }
    case ExprKind::Min: {
      double best = eval(*e.args[0], x);
      for (std::size_t i = 1; i < e.args.size(); ++i) best = std::min(best, eval(*e.args[i], x));
      return best;
    }
    case ExprKind::SqrtAbs: return std::sqrt(std::fabs(eval(*e.args[0], x)));
    case ExprKind::RemarkSeven: return remark_seven_value(eval(*e.args[0], x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool depends_on_x(const ExprNode& e) {
  if (e.kind == ExprKind::Coordinate) return true;
  for (const auto& a : e.args) {
    if (depends_on_x(*a)) return true;
  }
  return false;
}

bool piecewise_affine(const ExprNode& e) {
  switch (e.kind) {
    case ExprKind::Constant:
    case ExprKind::Coordinate: return true;
    case ExprKind::SqrtAbs:
    case ExprKind::RemarkSeven: return !depends_on_x(e);
    case ExprKind::Mul:
      if (depends_on_x(*e.args[0]) && depends_on_x(*e.args[1])) return false;
      break;
    default: break;
  }
  for (const auto& a : e.args) {
    if (!piecewise_affine(*a)) return false;
  }
  return true;
}

void collect_hints(const ExprNode& e, std::vector<ReciprocalBreakpoints>& out) {
  if (e.kind == ExprKind::RemarkSeven && e.args[0]->kind == ExprKind::Coordinate) {
    ReciprocalBreakpoints hint{e.args[0]->index};
    if (std::find(out.begin(), out.end(), hint) == out.end()) out.push_back(hint);
  }
  for (const auto& a : e.args) collect_hints(*a, out);
}

void check_indices(const ExprNode& e, std::size_t dim) {
  if (e.kind == ExprKind::Coordinate && e.index >= dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "coordinate x" + std::to_string(e.index) + " in a function of dimension " + std::to_string(dim));
  }
  for (const auto& a : e.args) check_indices(*a, dim);
}

Expr affine_expr(const AffinePiece& p) {
  Expr acc = expr::constant(p.intercept);
  for (std::size_t i = 0; i < p.slope.dim(); ++i) {
    if (sgn(p.slope[i]) == 0) continue;
    acc = expr::add(acc, expr::mul(expr::constant(p.slope[i]), expr::coord(i)));
  }
  return acc;
}

Expr pa_expr(const PAConvexFunction& f) {
  std::vector<Expr> pieces;
  for (const auto& p : f.pieces()) pieces.push_back(affine_expr(p));
  return pieces.size() == 1 ? pieces.front() : expr::max(std::move(pieces));
}

void add_domain(BlackBoxFunction& bb, const PAConvexFunction& f) {
  for (const auto& h : f.domain().hrep()) {
    bb.add_constraint(h.normal.to_doubles(), h.offset.get_d());
  }
}

}  // namespace

BlackBoxFunction::BlackBoxFunction(std::size_t dim, Expr root)
    : BlackBoxFunction(dim, std::move(root), std::vector<double>(dim, -std::numeric_limits<double>::infinity()),
                       std::vector<double>(dim, std::numeric_limits<double>::infinity())) {}

BlackBoxFunction::BlackBoxFunction(std::size_t dim, Expr root, std::vector<double> lo, std::vector<double> hi)
    : dim_(dim), root_(std::move(root)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "black-box dimension must be positive");
  if (!root_) throw Error(ErrorCode::InvalidArgument, "empty expression");
  require_same_dim(lo_.size(), dim_, "black-box box");
  require_same_dim(hi_.size(), dim_, "black-box box");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!(lo_[i] <= hi_[i])) throw Error(ErrorCode::InvalidArgument, "black-box box has lo > hi");
  }
  check_indices(*root_, dim_);
}

void BlackBoxFunction::add_constraint(std::vector<double> normal, double offset) {
  require_same_dim(normal.size(), dim_, "black-box constraint");
  constraints_.emplace_back(std::move(normal), offset);
}

bool BlackBoxFunction::in_domain(const std::vector<double>& x) const {
  require_same_dim(x.size(), dim_, "black-box evaluation");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
  }
  for (const auto& [normal, offset] : constraints_) {
    double s = 0;
    for (std::size_t i = 0; i < dim_; ++i) s += normal[i] * x[i];
    if (s > offset) return false;
  }
  return true;
}

double BlackBoxFunction::operator()(const std::vector<double>& x) const {
  if (!in_domain(x)) return std::numeric_limits<double>::infinity();
  const double v = eval(*root_, x);
  if (std::isnan(v)) throw Error(ErrorCode::EvaluationFailure, "expression evaluated to NaN");
  return v;
}

bool BlackBoxFunction::is_piecewise_affine() const { return piecewise_affine(*root_); }

std::vector<ReciprocalBreakpoints> BlackBoxFunction::breakpoint_hints() const {
  std::vector<ReciprocalBreakpoints> out;
  collect_hints(*root_, out);
  return out;
}

BlackBoxFunction to_blackbox(const PAConvexFunction& f) {
  BlackBoxFunction bb(f.dim(), pa_expr(f));
  add_domain(bb, f);
  return bb;
}

BlackBoxFunction to_blackbox(const DCFunction& f) {
  BlackBoxFunction bb(f.dim(), expr::sub(pa_expr(f.g()), pa_expr(f.h())));
  add_domain(bb, f.g());
  return bb;
}

}  // namespace subgrad
