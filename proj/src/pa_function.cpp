#include "subgrad/pa_function.hpp"

#include <algorithm>

#include "subgrad/errors.hpp"

namespace subgrad {

namespace {

void normalize_pieces(std::vector<AffinePiece>& pieces) {
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
}

void require_in_domain(const PAConvexFunction& f, const RationalVector& x, const char* what) {
  require_same_dim(f.dim(), x.dim(), what);
  if (!in_domain(f, x)) {
    throw Error(ErrorCode::PointOutsideDomain, std::string(what) + ": " + format_vector(x) + " outside the domain");
  }
}

}  // namespace

PAConvexFunction::PAConvexFunction(std::vector<AffinePiece> pieces)
    : PAConvexFunction(pieces, Polyhedron::whole_space(pieces.empty() ? 1 : pieces.front().slope.dim())) {}

PAConvexFunction::PAConvexFunction(std::vector<AffinePiece> pieces, Polyhedron domain)
    : dim_(domain.dim()), pieces_(std::move(pieces)), domain_(canonical(domain)) {
  if (pieces_.empty()) throw Error(ErrorCode::InvalidArgument, "a PA function needs at least one piece");
  for (const auto& p : pieces_) require_same_dim(p.slope.dim(), dim_, "affine piece");
  if (domain_.is_empty()) throw Error(ErrorCode::EmptyDomain, "PA function with empty domain");
  normalize_pieces(pieces_);
}

PAConvexFunction PAConvexFunction::affine(RationalVector slope, Rational intercept) {
  return PAConvexFunction({AffinePiece{std::move(slope), std::move(intercept)}});
}

PAConvexFunction PAConvexFunction::indicator(const Polyhedron& c) {
  return PAConvexFunction({AffinePiece{RationalVector(c.dim()), 0}}, c);
}

bool in_domain(const PAConvexFunction& f, const RationalVector& x) {
  require_same_dim(f.dim(), x.dim(), "in_domain");
  return contains_point(f.domain(), x);
}

bool in_domain_interior(const PAConvexFunction& f, const RationalVector& x) {
  require_same_dim(f.dim(), x.dim(), "in_domain_interior");
  return f.domain().hrep().empty() || is_interior_point(f.domain(), x);
}

Extended evaluate(const PAConvexFunction& f, const RationalVector& x) {
  if (!in_domain(f, x)) return Extended::infinity();
  Rational best = f.pieces().front().value_at(x);
  for (std::size_t i = 1; i < f.pieces().size(); ++i) {
    Rational v = f.pieces()[i].value_at(x);
    if (v > best) best = v;
  }
  return Extended(best);
}

std::vector<std::size_t> active_pieces(const PAConvexFunction& f, const RationalVector& x) {
  require_same_dim(f.dim(), x.dim(), "active_pieces");
  std::vector<Rational> values;
  values.reserve(f.pieces().size());
  for (const auto& p : f.pieces()) values.push_back(p.value_at(x));
  const Rational best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == best) active.push_back(i);
  }
  return active;
}

Polyhedron subdifferential_at(const PAConvexFunction& f, const RationalVector& x) {
  require_in_domain(f, x, "subdifferential_at");
  std::vector<RationalVector> slopes;
  for (auto i : active_pieces(f, x)) slopes.push_back(f.pieces()[i].slope);
  Polyhedron hull = dual_description(Polyhedron::from_vrep(f.dim(), std::move(slopes)));
  if (!f.has_proper_domain()) return hull;
  return minkowski_sum(hull, normal_cone_at(f.domain(), x));
}

Polyhedron eps_subdifferential_at(const PAConvexFunction& f, const RationalVector& x, const Rational& eps,
                                  const NormSpec& norm) {
  if (sgn(eps) < 0) throw Error(ErrorCode::NegativeEps, "eps = " + format_rational(eps));
  Polyhedron sub = subdifferential_at(f, x);
  if (sgn(eps) == 0) return sub;
  return minkowski_sum(sub, dual_norm_ball(norm, eps, f.dim()));
}

Rational directional_derivative(const PAConvexFunction& f, const RationalVector& x, const RationalVector& h) {
  require_in_domain(f, x, "directional_derivative");
  require_same_dim(f.dim(), h.dim(), "directional_derivative");
  if (!in_domain_interior(f, x)) {
    throw Error(ErrorCode::PointOutsideDomainInterior, "directional_derivative at " + format_vector(x));
  }
  const auto active = active_pieces(f, x);
  Rational best = dot(f.pieces()[active.front()].slope, h);
  for (auto i : active) {
    Rational v = dot(f.pieces()[i].slope, h);
    if (v > best) best = v;
  }
  return best;
}

PAConvexFunction restrict(const PAConvexFunction& f, const Polyhedron& a) {
  require_same_dim(f.dim(), a.dim(), "restrict");
  Polyhedron dom = intersect(f.domain(), a);
  if (dom.is_empty()) throw Error(ErrorCode::EmptyDomain, "restriction has an empty domain");
  return PAConvexFunction(f.pieces(), std::move(dom));
}

PAConvexFunction operator+(const PAConvexFunction& f, const PAConvexFunction& g) {
  require_same_dim(f.dim(), g.dim(), "function sum");
  std::vector<AffinePiece> pieces;
  for (const auto& p : f.pieces()) {
    for (const auto& q : g.pieces()) pieces.push_back({p.slope + q.slope, Rational(p.intercept + q.intercept)});
  }
  Polyhedron dom = intersect(f.domain(), g.domain());
  if (dom.is_empty()) throw Error(ErrorCode::EmptyDomain, "sum has an empty domain");
  return PAConvexFunction(std::move(pieces), std::move(dom));
}

PAConvexFunction f_eps_expand(const PAConvexFunction& f, const RationalVector& x, const Rational& eps,
                              const NormSpec& norm) {
  require_same_dim(f.dim(), x.dim(), "f_eps_expand");
  if (norm.kind != NormKind::L1) throw Error(ErrorCode::InvalidArgument, "f_eps_expand supports the l1 norm only");
  if (sgn(eps) < 0) throw Error(ErrorCode::NegativeEps, "eps = " + format_rational(eps));
  if (sgn(eps) == 0) return f;
  const std::size_t n = f.dim();
  if (n > kernel_limits().max_dim ||
      f.pieces().size() * (std::size_t{1} << n) > kernel_limits().max_generators) {
    throw Error(ErrorCode::CapExceeded, "f_eps_expand would create too many pieces");
  }
  std::vector<AffinePiece> pieces;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RationalVector sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = (mask >> i & 1U) ? -eps : eps;
    const Rational shift = dot(sigma, x);
    for (const auto& p : f.pieces()) pieces.push_back({p.slope + sigma, Rational(p.intercept - shift)});
  }
  return PAConvexFunction(std::move(pieces), f.domain());
}

// ---------------------------------------------------------------------------

DCFunction::DCFunction(PAConvexFunction g, PAConvexFunction h) : g_(std::move(g)), h_(std::move(h)) {
  require_same_dim(g_.dim(), h_.dim(), "DC pair");
  const auto inclusion = contains_polyhedron(h_.domain(), g_.domain());
  if (!inclusion.contained) {
    throw Error(ErrorCode::InvalidArgument,
                "dom g is not contained in dom h (witness " + format_vector(*inclusion.witness) + ")");
  }
}

Extended evaluate(const DCFunction& f, const RationalVector& x) {
  Extended g = evaluate(f.g(), x);
  if (g.is_infinite()) return g;
  return Extended(Rational(g.value() - evaluate(f.h(), x).value()));
}

Extended dini_derivative(const DCFunction& f, const RationalVector& x, const RationalVector& d) {
  require_in_domain(f.g(), x, "dini_derivative");
  require_same_dim(f.dim(), d.dim(), "dini_derivative");
  if (f.g().has_proper_domain()) {
    const Polyhedron tangent_polar = normal_cone_at(f.g().domain(), x);
    for (const auto& r : tangent_polar.vrep().rays) {
      if (sgn(dot(r, d)) > 0) return Extended::infinity();
    }
  }
  auto max_slope = [&](const PAConvexFunction& fn) {
    const auto active = active_pieces(fn, x);
    Rational best = dot(fn.pieces()[active.front()].slope, d);
    for (auto i : active) {
      Rational v = dot(fn.pieces()[i].slope, d);
      if (v > best) best = v;
    }
    return best;
  };
  return Extended(Rational(max_slope(f.g()) - max_slope(f.h())));
}

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Holds: return "holds";
    case HypothesisStatus::Fails: return "fails";
    case HypothesisStatus::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::ExactByConvexity: return "exact-by-convexity";
    case Provenance::Probe: return "probe";
  }
  return "?";
}

HypothesisReport dc_hypotheses(const DCFunction& f, const RationalVector& x) {
  require_in_domain(f.g(), x, "dc_hypotheses");
  HypothesisReport report;
  report.push_back({"g directionally approximately starshaped", HypothesisStatus::Holds,
                    Provenance::ExactByConvexity, "g is convex"});
  report.push_back({"h directionally approximately starshaped", HypothesisStatus::Holds,
                    Provenance::ExactByConvexity, "h is convex"});
  report.push_back({"f calm at x", HypothesisStatus::Holds, Provenance::ExactByConvexity,
                    "g - h is piecewise affine, hence Lipschitz on dom g"});
  if (in_domain_interior(f.h(), x)) {
    report.push_back({"subdifferential of h gap-continuous at x", HypothesisStatus::Holds,
                      Provenance::ExactByConvexity,
                      "x is interior to dom h, so nearby subdifferentials of the PA function h are faces of dh(x)"});
  } else {
    report.push_back({"subdifferential of h gap-continuous at x", HypothesisStatus::Fails,
                      Provenance::ExactByConvexity,
                      "x is on the boundary of dom h; points just outside have an empty subdifferential"});
  }
  return report;
}

bool all_green(const HypothesisReport& report) {
  return std::all_of(report.begin(), report.end(),
                     [](const HypothesisEntry& e) { return e.status == HypothesisStatus::Holds; });
}

DcSubdifferential dc_dini_subdifferential(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                          const Rational& eta, const NormSpec& norm) {
  require_in_domain(f.g(), x, "dc_dini_subdifferential");
  if (sgn(eps) < 0 || sgn(eta) < 0) throw Error(ErrorCode::NegativeEps, "eps and eta must be nonnegative");
  Polyhedron gs = eps_subdifferential_at(f.g(), x, Rational(eps + eta), norm);
  Polyhedron hs = eps_subdifferential_at(f.h(), x, eta, norm);
  return {star_difference(gs, hs), dc_hypotheses(f, x)};
}

Polyhedron dc_definitional_subdifferential(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                           const NormSpec& norm) {
  require_in_domain(f.g(), x, "dc_definitional_subdifferential");
  if (sgn(eps) < 0) throw Error(ErrorCode::NegativeEps, "eps = " + format_rational(eps));
  const std::size_t n = f.dim();

  // G = conv{a_i} + N(dom g, x) + eps * dual ball, as generators.
  std::vector<RationalVector> g_vertices, g_rays;
  for (auto i : active_pieces(f.g(), x)) g_vertices.push_back(f.g().pieces()[i].slope);
  if (f.g().has_proper_domain()) g_rays = normal_cone_at(f.g().domain(), x).vrep().rays;
  if (sgn(eps) > 0) {
    const Polyhedron ball = dual_norm_ball(norm, eps, n);
    std::vector<RationalVector> sums;
    for (const auto& a : g_vertices) {
      for (const auto& b : ball.vrep().vertices) sums.push_back(a + b);
    }
    g_vertices = std::move(sums);
  }

  std::vector<RationalVector> h_slopes;
  for (auto j : active_pieces(f.h(), x)) h_slopes.push_back(f.h().pieces()[j].slope);

  Polyhedron result = Polyhedron::whole_space(n);
  for (const auto& bj : h_slopes) {
    std::vector<RationalVector> vertices, rays = g_rays;
    for (const auto& v : g_vertices) vertices.push_back(v - bj);
    for (const auto& bl : h_slopes) {
      if (!(bl == bj)) rays.push_back(bl - bj);
    }
    result = intersect(result, dual_description(Polyhedron::from_vrep(n, std::move(vertices), std::move(rays))));
    if (result.is_empty()) break;
  }
  return result;
}

}  // namespace subgrad
