#include "subgrad/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subgrad/errors.hpp"
#include "subgrad/linalg.hpp"

namespace subgrad {

namespace {

constexpr std::uint64_t kTagBlunt = 0x424c554e;

bool is_cone(const Polyhedron& k) {
  const Polyhedron c = canonical(k);
  if (c.is_empty()) return false;
  const auto& v = c.vrep().vertices;
  return v.size() == 1 && v.front().is_zero();
}

void require_feasible(const ConstraintSystem& cs, const RationalVector& x) {
  require_same_dim(cs.dim(), x.dim(), "point");
  if (!contains_point(feasible_set(cs), x)) {
    throw Error(ErrorCode::InfeasiblePoint, format_vector(x) + " is not feasible");
  }
}

void require_interior_dom_g(const ProblemInstance& p, const RationalVector& x) {
  if (!in_domain(p.objective.g(), x) || !in_domain_interior(p.objective.g(), x)) {
    throw Error(ErrorCode::PointNotInteriorDomG, format_vector(x) + " is not interior to dom g");
  }
}

InclusionResult first_vertex_outside(const Polyhedron& inner, const Polyhedron& outer_vrep) {
  InclusionResult r;
  const Polyhedron c = canonical(inner);
  for (const auto& v : c.vrep().vertices) {
    if (!contains_point(outer_vrep, v)) {
      r.holds = false;
      r.witness = v;
      return r;
    }
  }
  return r;
}

Polyhedron inclusion28_rhs(const ProblemInstance& p, const RationalVector& x) {
  const Polyhedron dg = subdifferential_at(p.objective.g(), x);
  const Polyhedron n = normal_cone_at(feasible_set(p.constraints), x);
  std::vector<RationalVector> rays = dg.vrep().rays;
  rays.insert(rays.end(), n.vrep().rays.begin(), n.vrep().rays.end());
  // Generators only: membership is decided by LP.
  return Polyhedron::from_vrep(x.dim(), dg.vrep().vertices, std::move(rays));
}

// Exact comparison of `drop` > eps * ||d|| (drop = f(x) - f(y)).
bool exceeds_scaled_norm(const Rational& drop, const Rational& eps, const RationalVector& d, const NormSpec& norm) {
  if (norm.kind != NormKind::L2Approx) return drop > eps * norm_value(norm, d);
  if (sgn(drop) <= 0) return false;
  Rational sq = 0;
  for (const auto& c : d) sq += c * c;
  return drop * drop > eps * eps * sq;
}

double scaled_norm_double(const Rational& eps, const RationalVector& d, const NormSpec& norm) {
  if (norm.kind != NormKind::L2Approx) return Rational(eps * norm_value(norm, d)).get_d();
  double sq = 0;
  for (const auto& c : d) sq += c.get_d() * c.get_d();
  return eps.get_d() * std::sqrt(sq);
}

}  // namespace

ConstraintSystem::ConstraintSystem(Polyhedron c_set, RationalMatrix m, RationalVector c, std::optional<Polyhedron> k)
    : c_set_(canonical(c_set)), matrix_(std::move(m)), offset_(std::move(c)), cone_(Polyhedron::empty(1)) {
  if (offset_.dim() == 0) throw Error(ErrorCode::InvalidArgument, "k must map into a space of positive dimension");
  require_same_dim(matrix_.size(), offset_.dim(), "k matrix rows");
  for (const auto& row : matrix_) require_same_dim(row.dim(), c_set_.dim(), "k matrix columns");
  if (k) {
    require_same_dim(k->dim(), offset_.dim(), "cone K");
    cone_ = canonical(*k);
  } else {
    std::vector<RationalVector> rays;
    for (std::size_t i = 0; i < offset_.dim(); ++i) rays.push_back(RationalVector::unit(offset_.dim(), i));
    cone_ = Polyhedron::cone(offset_.dim(), std::move(rays));
  }
  if (!is_cone(cone_)) throw Error(ErrorCode::NotACone, "K must be a cone with apex 0");
}

ConstraintSystem ConstraintSystem::unconstrained(std::size_t dim) {
  return ConstraintSystem(Polyhedron::whole_space(dim), {RationalVector(dim)}, RationalVector(1),
                          Polyhedron::point(RationalVector(1)));
}

RationalVector ConstraintSystem::k(const RationalVector& x) const {
  return linalg::mat_vec(matrix_, x) + offset_;
}

ProblemInstance::ProblemInstance(DCFunction obj, ConstraintSystem cs)
    : objective(std::move(obj)), constraints(std::move(cs)) {
  require_same_dim(objective.dim(), constraints.dim(), "problem");
}

Polyhedron feasible_set(const ConstraintSystem& cs) {
  if (cs.c_set().is_empty()) return Polyhedron::empty(cs.dim());
  std::vector<Halfspace> hs = cs.c_set().hrep();
  // k(x) in -K  <=>  <a, -(M x + c)> <= beta for each facet (a, beta) of K.
  for (const auto& h : cs.cone().hrep()) {
    RationalVector normal = -linalg::mat_t_vec(cs.matrix(), h.normal, cs.dim());
    Rational offset = h.offset + dot(h.normal, cs.offset());
    if (normal.is_zero()) {
      if (sgn(offset) < 0) return Polyhedron::empty(cs.dim());
      continue;
    }
    hs.push_back({std::move(normal), std::move(offset)});
  }
  return dual_description(Polyhedron::from_hrep(cs.dim(), std::move(hs)));
}

const char* to_string(QualificationStatus status) {
  switch (status) {
    case QualificationStatus::Holds: return "holds";
    case QualificationStatus::Fails: return "fails";
    case QualificationStatus::NotEvaluated: return "not_evaluated";
  }
  return "?";
}

QualificationResult qualification_check(const ConstraintSystem& cs) {
  const bool constant_k =
      std::all_of(cs.matrix().begin(), cs.matrix().end(), [](const RationalVector& row) { return row.is_zero(); });
  if (!constant_k && !cs.c_set().is_bounded()) {
    throw Error(ErrorCode::UnboundedC, "qualification check needs a bounded C");
  }
  QualificationResult r;
  if (cs.c_set().is_empty()) {
    r.status = QualificationStatus::Fails;
    r.description = "C is empty";
    return r;
  }
  // A constant k maps any nonempty C to {c}.
  const Polyhedron image = constant_k ? Polyhedron::point(cs.offset())
                                      : affine_image(cs.c_set(), cs.matrix(), cs.offset());
  const Polyhedron s = minkowski_sum(image, cs.cone());
  if (s.is_empty()) {
    r.status = QualificationStatus::Fails;
    r.description = "k(C) + K is empty";
    return r;
  }
  std::vector<RationalVector> gens = s.vrep().vertices;
  gens.insert(gens.end(), s.vrep().rays.begin(), s.vrep().rays.end());
  r.cone = Polyhedron::cone(cs.codim(), gens);
  const bool zero_in = contains_point(s, RationalVector(cs.codim()));
  const bool subspace = cone_is_linear_subspace(*r.cone);
  std::string rays;
  for (const auto& ray : r.cone->vrep().rays) rays += (rays.empty() ? "" : ", ") + format_vector(ray);
  r.description = "conic hull of k(C) + K generated by {" + rays + "}";
  if (zero_in && subspace) {
    r.status = QualificationStatus::Holds;
    r.description += "; a linear subspace";
  } else {
    r.status = QualificationStatus::Fails;
    r.description += zero_in ? "; not a linear subspace" : "; 0 is not in k(C) + K";
  }
  return r;
}

NormalConeRoutes normal_cone_feasible(const ConstraintSystem& cs, const RationalVector& x) {
  require_feasible(cs, x);
  const std::size_t m = cs.codim();
  NormalConeRoutes out{normal_cone_at(feasible_set(cs), x), Polyhedron::empty(cs.dim()), false};

  // K* = {z : <z, r> >= 0 for every ray r of K}, cut down to <z, k(x)> = 0.
  std::vector<Halfspace> dual;
  for (const auto& r : cs.cone().vrep().rays) dual.push_back({-r, Rational(0)});
  const RationalVector kx = cs.k(x);
  if (!kx.is_zero()) {
    dual.push_back({kx, Rational(0)});
    dual.push_back({-kx, Rational(0)});
  }
  const Polyhedron face = dual_description(Polyhedron::from_hrep(m, std::move(dual)));
  std::vector<RationalVector> images;
  for (const auto& z : face.vrep().rays) images.push_back(linalg::mat_t_vec(cs.matrix(), z, cs.dim()));
  out.lagrange = minkowski_sum(Polyhedron::cone(cs.dim(), std::move(images)), normal_cone_at(cs.c_set(), x));
  out.agree = set_equal(out.direct, out.lagrange);
  return out;
}

InclusionResult check_inclusion_28(const ProblemInstance& p, const RationalVector& x) {
  require_feasible(p.constraints, x);
  require_interior_dom_g(p, x);
  return first_vertex_outside(subdifferential_at(p.objective.h(), x), inclusion28_rhs(p, x));
}

InclusionResult check_inclusion_30(const ProblemInstance& p, const RationalVector& x) {
  require_feasible(p.constraints, x);
  require_interior_dom_g(p, x);
  const Polyhedron rhs = subdifferential_at(restrict(p.objective.g(), feasible_set(p.constraints)), x);
  const auto r = contains_polyhedron(rhs, subdifferential_at(p.objective.h(), x));
  return {r.contained, r.witness};
}

const char* to_string(BluntVerdict verdict) {
  switch (verdict) {
    case BluntVerdict::BluntMinimizerAllEps: return "blunt_minimizer_all_eps";
    case BluntVerdict::NotBluntMinimizer: return "not_blunt_minimizer";
    case BluntVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

OptimalityCertificate certify_blunt_minimizer(const ProblemInstance& p, const RationalVector& x) {
  require_feasible(p.constraints, x);
  require_interior_dom_g(p, x);
  OptimalityCertificate cert;
  cert.feasible_at = true;

  try {
    cert.qualification = qualification_check(p.constraints);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnboundedC) throw;
    cert.qualification.status = QualificationStatus::NotEvaluated;
    cert.qualification.description = "C is unbounded; the conic hull of k(C) + K is not computed";
  }
  const NormalConeRoutes routes = normal_cone_feasible(p.constraints, x);
  cert.normal_cone_direct = routes.direct;
  cert.normal_cone_lagrange = routes.lagrange;
  cert.routes_agree = routes.agree;
  cert.lagrange_validated = cert.qualification.status == QualificationStatus::Holds && routes.agree;

  cert.inclusion28 = check_inclusion_28(p, x);
  cert.inclusion30 = check_inclusion_30(p, x);

  cert.hypotheses = {
      {"g lower semicontinuous and approximately convex", HypothesisStatus::Holds, Provenance::ExactByConvexity,
       "g is convex and polyhedral"},
      {"h directionally approximately starshaped", HypothesisStatus::Holds, Provenance::ExactByConvexity,
       "h is convex"},
      {"f calm at x", HypothesisStatus::Holds, Provenance::ExactByConvexity, "g - h is piecewise affine"},
      {"subdifferential of h gap-continuous at x", HypothesisStatus::Holds, Provenance::ExactByConvexity,
       "x is interior to dom g, hence to dom h"},
      {"qualification", cert.qualification.status == QualificationStatus::Holds ? HypothesisStatus::Holds
                        : cert.qualification.status == QualificationStatus::Fails ? HypothesisStatus::Fails
                                                                                  : HypothesisStatus::Unknown,
       Provenance::ExactByConvexity, cert.qualification.description},
  };

  if (cert.inclusion30.holds) {
    cert.verdict = BluntVerdict::BluntMinimizerAllEps;
    return cert;
  }

  // Separate a vertex of dh(x) from S = dg(x) + N(A, x) by the facet of S
  // it violates most; the facet normal is a feasible descent direction.
  const Polyhedron s = canonical(inclusion28_rhs(p, x));
  const Polyhedron dh = subdifferential_at(p.objective.h(), x);
  std::optional<Rational> best;
  const Halfspace* facet = nullptr;
  RationalVector vertex;
  for (const auto& v : dh.vrep().vertices) {
    for (const auto& h : s.hrep()) {
      Rational excess = dot(h.normal, v) - h.offset;
      if (sgn(excess) > 0 && (!best || excess > *best)) {
        best = excess;
        facet = &h;
        vertex = v;
      }
    }
  }
  if (!facet) {
    cert.verdict = BluntVerdict::Inconclusive;
    return cert;
  }
  DescentWitness w;
  w.direction = facet->normal;
  w.failing_vertex = vertex;
  w.rate = support_function(s, w.direction).value() - support_function(dh, w.direction).value();

  const Polyhedron a = feasible_set(p.constraints);
  const Rational f0 = evaluate(p.objective, x).value();
  Rational t = 1;
  bool found = false;
  for (int i = 0; i < 256 && !found; ++i, t /= 2) {
    const RationalVector y = x + t * w.direction;
    if (!contains_point(a, y)) continue;
    const Extended fy = evaluate(p.objective, y);
    if (fy.is_finite() && fy.value() - f0 == w.rate * t) {
      found = true;
      w.step = t;
    }
  }
  if (!found) {
    cert.verdict = BluntVerdict::Inconclusive;
    return cert;
  }
  cert.verdict = BluntVerdict::NotBluntMinimizer;
  cert.descent = std::move(w);
  return cert;
}

bool replay_descent_witness(const ProblemInstance& p, const RationalVector& x, const DescentWitness& w,
                            const Rational& eps, const NormSpec& norm) {
  const RationalVector d = w.step * w.direction;
  const RationalVector y = x + d;
  if (!contains_point(feasible_set(p.constraints), y)) return false;
  const Extended fy = evaluate(p.objective, y), fx = evaluate(p.objective, x);
  if (fy.is_infinite() || fx.is_infinite()) return false;
  return exceeds_scaled_norm(fx.value() - fy.value(), eps, d, norm);
}

ProbeVerdict blunt_min_probe(const ProblemInstance& p, const RationalVector& x, const Rational& eps,
                             const SamplingPlan& plan, const NormSpec& norm) {
  if (sgn(eps) <= 0) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  require_feasible(p.constraints, x);
  plan.validate();
  const Polyhedron a = feasible_set(p.constraints);
  const Rational f0 = evaluate(p.objective, x).value();
  const std::size_t n = x.dim();

  // Tangent directions of A at x: the polar of the normal cone.
  std::vector<Halfspace> polar;
  const Polyhedron normals = normal_cone_at(a, x);
  for (const auto& r : normals.vrep().rays) polar.push_back({r, Rational(0)});
  const Polyhedron tangent = dual_description(Polyhedron::from_hrep(n, std::move(polar)));
  std::vector<std::vector<double>> tangent_rays;
  for (const auto& r : tangent.vrep().rays) tangent_rays.push_back(r.to_doubles());

  struct Outcome {
    bool evaluated = false;
    double slack = std::numeric_limits<double>::infinity();
    bool violation = false;
    std::vector<double> offset;
  };

  ProbeVerdict verdict;
  std::vector<std::optional<Outcome>> best(plan.shell_radii.size());
  for (std::size_t k = 0; k < plan.shell_radii.size(); ++k) {
    const double delta = plan.shell_radii[k];
    auto outcomes = sampling::parallel_map<Outcome>(plan.samples_per_shell, plan.threads, [&](std::size_t j) {
      sampling::Stream s(plan.seed, kTagBlunt, j);
      std::vector<double> offset = s.in_unit_ball(n);
      const double tau = s.uniform(), pick = s.uniform(), pick2 = s.uniform(), mix = s.uniform();
      if (j % 2 == 1 && !tangent_rays.empty()) {
        // Along one tangent generator, or a mix of two.
        const auto& r1 = tangent_rays[static_cast<std::size_t>(pick * tangent_rays.size())];
        const auto& r2 = tangent_rays[static_cast<std::size_t>(pick2 * tangent_rays.size())];
        const double lambda = (j % 4 == 1) ? 1.0 : mix;
        double len = 0;
        for (std::size_t i = 0; i < n; ++i) {
          offset[i] = lambda * r1[i] + (1.0 - lambda) * r2[i];
          len += offset[i] * offset[i];
        }
        if (len == 0) return Outcome{};
        const double scale = delta * std::max(tau, 1.0 / 16.0) / std::sqrt(len);
        for (auto& c : offset) c *= scale;
      } else {
        for (auto& c : offset) c *= delta;
      }
      RationalVector d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = rational_from_double(offset[i]);
      const RationalVector y = x + d;
      Outcome o;
      if (!contains_point(a, y)) return o;
      const Extended fy = evaluate(p.objective, y);
      if (fy.is_infinite()) return o;
      o.evaluated = true;
      const Rational drop = f0 - fy.value();
      o.slack = scaled_norm_double(eps, d, norm) - drop.get_d();
      o.violation = exceeds_scaled_norm(drop, eps, d, norm);
      o.offset = std::move(offset);
      return o;
    });
    ShellStat stat{delta, std::numeric_limits<double>::infinity(), 0, 0};
    for (auto& o : outcomes) {
      if (!o.evaluated) continue;
      ++stat.samples;
      stat.inf = std::min(stat.inf, o.slack);
      if (!o.violation) continue;
      ++stat.violations;
      if (!best[k] || o.offset < best[k]->offset) best[k] = std::move(o);
    }
    verdict.shells.push_back(stat);
  }
  verdict.status = sampling::tail_verdict(verdict.shells, plan.stabilization_window);
  if (verdict.status == VerdictStatus::FailsWithWitness) {
    Witness w;
    w.fields = {{"offset", best.back()->offset}};
    w.margin = -best.back()->slack;
    verdict.witness = std::move(w);
    verdict.reason = "feasible points below f(x) - eps*||y - x|| in each of the last shells";
  } else if (verdict.status == VerdictStatus::Holds) {
    verdict.reason = "no feasible violation in the last shells";
  } else {
    verdict.reason = "violations in some but not all of the last shells";
  }
  return verdict;
}

bool replay_blunt_witness(const ProblemInstance& p, const RationalVector& x, const Rational& eps,
                          const NormSpec& norm, const Witness& w) {
  const auto& offset = w.get("offset");
  RationalVector d(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) d[i] = rational_from_double(offset.at(i));
  const RationalVector y = x + d;
  if (!contains_point(feasible_set(p.constraints), y)) return false;
  const Extended fy = evaluate(p.objective, y), fx = evaluate(p.objective, x);
  if (fy.is_infinite() || fx.is_infinite()) return false;
  return exceeds_scaled_norm(fx.value() - fy.value(), eps, d, norm);
}

}  // namespace subgrad
