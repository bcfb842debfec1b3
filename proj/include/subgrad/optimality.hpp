#pragma once

#include <optional>
#include <string>

#include "subgrad/oracle.hpp"
#include "subgrad/pa_function.hpp"
#include "subgrad/polyhedron.hpp"

namespace subgrad {

/// A = {x in C : M x + c in -K} with K a polyhedral cone.
class ConstraintSystem {
 public:
  /// K defaults to the nonnegative orthant.
  ConstraintSystem(Polyhedron c_set, RationalMatrix m, RationalVector c, std::optional<Polyhedron> k = std::nullopt);
  /// C = whole space, k = 0 into R^1, K = {0}.
  static ConstraintSystem unconstrained(std::size_t dim);

  std::size_t dim() const noexcept { return c_set_.dim(); }
  std::size_t codim() const noexcept { return offset_.dim(); }
  const Polyhedron& c_set() const noexcept { return c_set_; }
  const RationalMatrix& matrix() const noexcept { return matrix_; }
  const RationalVector& offset() const noexcept { return offset_; }
  const Polyhedron& cone() const noexcept { return cone_; }
  RationalVector k(const RationalVector& x) const;

  friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;

 private:
  Polyhedron c_set_;
  RationalMatrix matrix_;
  RationalVector offset_;
  Polyhedron cone_;
};

struct ProblemInstance {
  DCFunction objective;
  ConstraintSystem constraints;

  ProblemInstance(DCFunction objective, ConstraintSystem constraints);
  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

Polyhedron feasible_set(const ConstraintSystem& cs);

enum class QualificationStatus { Holds, Fails, NotEvaluated };
const char* to_string(QualificationStatus status);

struct QualificationResult {
  QualificationStatus status = QualificationStatus::NotEvaluated;
  /// Closed conic hull of k(C) + K.
  std::optional<Polyhedron> cone;
  std::string description;
};

/// Whether the union of lambda (k(C) + K) over lambda > 0 is a linear
/// subspace. Needs a bounded C unless k is constant.
QualificationResult qualification_check(const ConstraintSystem& cs);

struct NormalConeRoutes {
  Polyhedron direct;    // N(A, x)
  Polyhedron lagrange;  // cone{M^T z : z in K*, <z, k(x)> = 0} + N(C, x)
  bool agree = false;
};

NormalConeRoutes normal_cone_feasible(const ConstraintSystem& cs, const RationalVector& x);

struct InclusionResult {
  bool holds = true;
  std::optional<RationalVector> witness;  // first vertex of dh(x) outside the right-hand side
};

/// Each vertex of dh(x), in lexicographic order, tested for membership in
/// dg(x) + N(A, x).
InclusionResult check_inclusion_28(const ProblemInstance& p, const RationalVector& x);
/// dh(x) inside the subdifferential of g restricted to A.
InclusionResult check_inclusion_30(const ProblemInstance& p, const RationalVector& x);

enum class BluntVerdict { BluntMinimizerAllEps, NotBluntMinimizer, Inconclusive };
const char* to_string(BluntVerdict verdict);

/// Feasible direction along which g - h decreases linearly: for the step t,
/// f(x + t d) = f(x) + rate * t with x + t d in A.
struct DescentWitness {
  RationalVector direction;
  Rational rate;  // negative
  Rational step;
  RationalVector failing_vertex;
};

struct OptimalityCertificate {
  bool feasible_at = true;
  QualificationResult qualification;
  Polyhedron normal_cone_direct = Polyhedron::empty(1);
  std::optional<Polyhedron> normal_cone_lagrange;
  bool routes_agree = false;
  InclusionResult inclusion28;
  InclusionResult inclusion30;
  /// The multiplier form of the normal cone is backed by the qualification.
  bool lagrange_validated = false;
  BluntVerdict verdict = BluntVerdict::Inconclusive;
  std::optional<DescentWitness> descent;
  HypothesisReport hypotheses;
};

/// Decides blunt minimality for every eps > 0 through dh(x) inside
/// d(g + indicator of A)(x); reports the multiplier route alongside.
OptimalityCertificate certify_blunt_minimizer(const ProblemInstance& p, const RationalVector& x);

/// f(x + t d) < f(x) - eps * t * ||d|| at the witness step, in exact arithmetic.
bool replay_descent_witness(const ProblemInstance& p, const RationalVector& x, const DescentWitness& w,
                            const Rational& eps, const NormSpec& norm = NormSpec::l1());

/// Searches for feasible y near x with f(y) < f(x) - eps ||y - x||, evaluated
/// exactly. Witness field "offset" holds y - x.
ProbeVerdict blunt_min_probe(const ProblemInstance& p, const RationalVector& x, const Rational& eps,
                             const SamplingPlan& plan, const NormSpec& norm = NormSpec::l1());
bool replay_blunt_witness(const ProblemInstance& p, const RationalVector& x, const Rational& eps,
                          const NormSpec& norm, const Witness& w);

}  // namespace subgrad
