#include "subgrad/polyhedron.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "subgrad/linalg.hpp"
#include "subgrad/lp.hpp"

namespace subgrad {

namespace {

KernelLimits initial_limits() {
  KernelLimits limits;
  if (const char* env = std::getenv("SUBGRAD_MAX_FACETS")) {
    try {
      limits.max_generators = static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, std::string("SUBGRAD_MAX_FACETS='") + env + "'");
    }
  }
  return limits;
}

KernelLimits& mutable_limits() {
  static KernelLimits limits = initial_limits();
  return limits;
}

// ---------------------------------------------------------------------------
// Double description on homogeneous cones {y : row . y <= 0}.

class Bitset {
 public:
  explicit Bitset(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool subset_of(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    }
    return true;
  }
  friend Bitset operator&(const Bitset& a, const Bitset& b) {
    Bitset r = a;
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= b.words_[i];
    return r;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct DdRay {
  RationalVector v;
  Bitset zeros;
};

void check_generator_cap(std::size_t count) {
  if (count > kernel_limits().max_generators) {
    throw Error(ErrorCode::CapExceeded, "double description produced " + std::to_string(count) +
                                            " generators (cap " +
                                            std::to_string(kernel_limits().max_generators) + ")");
  }
}

// Extreme rays of the pointed cone {z in Q^k : h z <= 0}; h has rank k.
RationalMatrix pointed_extreme_rays(const RationalMatrix& h, std::size_t k) {
  const std::size_t m = h.size();
  const auto basis_rows = linalg::independent_rows(h, k);
  if (basis_rows.size() != k) throw Error(ErrorCode::InternalError, "cone is not pointed");

  RationalMatrix b;
  for (auto i : basis_rows) b.push_back(h[i]);
  std::vector<bool> processed(m, false);
  for (auto i : basis_rows) processed[i] = true;

  std::vector<DdRay> rays;
  for (std::size_t j = 0; j < k; ++j) {
    RationalVector rhs(k);
    rhs[j] = -1;
    auto r = linalg::solve(b, rhs);
    if (!r) throw Error(ErrorCode::InternalError, "singular initial basis");
    DdRay ray{primitive_direction(*r), Bitset(m)};
    for (std::size_t i = 0; i < k; ++i) {
      if (i != j) ray.zeros.set(basis_rows[i]);
    }
    rays.push_back(std::move(ray));
  }

  for (std::size_t row = 0; row < m; ++row) {
    if (processed[row]) continue;
    processed[row] = true;
    std::vector<Rational> s(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      s[i] = dot(h[row], rays[i].v);
      if (sgn(s[i]) > 0) pos.push_back(i);
      if (sgn(s[i]) < 0) neg.push_back(i);
    }
    std::vector<DdRay> next;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      if (sgn(s[i]) > 0) continue;
      DdRay r = rays[i];
      if (sgn(s[i]) == 0) r.zeros.set(row);
      next.push_back(std::move(r));
    }
    for (auto p : pos) {
      for (auto n : neg) {
        Bitset common = rays[p].zeros & rays[n].zeros;
        if (k >= 2 && common.count() + 2 < k) continue;
        bool adjacent = true;
        for (std::size_t o = 0; o < rays.size() && adjacent; ++o) {
          if (o == p || o == n) continue;
          if (common.subset_of(rays[o].zeros)) adjacent = false;
        }
        if (!adjacent) continue;
        RationalVector combo = s[p] * rays[n].v - s[n] * rays[p].v;
        common.set(row);
        next.push_back({primitive_direction(combo), std::move(common)});
      }
    }
    rays = std::move(next);
    check_generator_cap(rays.size());
  }

  RationalMatrix out;
  for (auto& r : rays) out.push_back(std::move(r.v));
  return out;
}

struct ConeGenerators {
  RationalMatrix lineality;  // canonical basis, primitive rows
  RationalMatrix rays;       // extreme rays of the part orthogonal to the lineality space
};

ConeGenerators cone_generators(const RationalMatrix& rows, std::size_t d) {
  ConeGenerators out;
  out.lineality = linalg::nullspace(rows, d);
  RationalMatrix w = linalg::row_space(rows, d);
  const std::size_t k = w.size();
  if (k == 0) return out;
  RationalMatrix h;
  for (const auto& row : rows) {
    RationalVector hr(k);
    for (std::size_t j = 0; j < k; ++j) hr[j] = dot(row, w[j]);
    if (!hr.is_zero()) h.push_back(std::move(hr));
  }
  for (const auto& z : pointed_extreme_rays(h, k)) {
    RationalVector y(d);
    for (std::size_t j = 0; j < k; ++j) {
      if (sgn(z[j]) != 0) y += z[j] * w[j];
    }
    out.rays.push_back(primitive_direction(y));
  }
  return out;
}

void sort_unique(std::vector<RationalVector>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<Halfspace>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Halfspace> canonical_empty_hrep(std::size_t dim) {
  std::vector<Halfspace> hs;
  hs.push_back({RationalVector::unit(dim, 0), Rational(0)});
  hs.push_back({-RationalVector::unit(dim, 0), Rational(-1)});
  std::sort(hs.begin(), hs.end());
  return hs;
}

RationalVector drop_last(const RationalVector& v) {
  return RationalVector(std::vector<Rational>(v.coords().begin(), v.coords().end() - 1));
}

// Generators of {x : a_i x <= b_i}; nullopt when empty.
std::optional<Generators> halfspaces_to_generators(std::size_t n, const std::vector<Halfspace>& hs) {
  RationalMatrix rows;
  for (const auto& h : hs) {
    RationalVector row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = h.normal[j];
    row[n] = -h.offset;
    rows.push_back(std::move(row));
  }
  RationalVector t_row(n + 1);
  t_row[n] = -1;
  rows.push_back(std::move(t_row));

  ConeGenerators cg = cone_generators(rows, n + 1);
  Generators g;
  for (const auto& l : cg.lineality) {
    RationalVector line = primitive_direction(drop_last(l));
    g.rays.push_back(line);
    g.rays.push_back(-line);
  }
  for (const auto& r : cg.rays) {
    const Rational& t = r[n];
    if (sgn(t) > 0) {
      RationalVector v = drop_last(r);
      v *= Rational(1 / t);
      g.vertices.push_back(std::move(v));
    } else {
      g.rays.push_back(primitive_direction(drop_last(r)));
    }
  }
  if (g.vertices.empty()) return std::nullopt;
  sort_unique(g.vertices);
  sort_unique(g.rays);
  check_generator_cap(g.vertices.size() + g.rays.size());
  return g;
}

// Canonical halfspaces of conv(vertices) + cone(rays); vertices nonempty.
std::vector<Halfspace> generators_to_halfspaces(std::size_t n, const Generators& g) {
  RationalMatrix rows;
  for (const auto& v : g.vertices) {
    RationalVector row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = v[j];
    row[n] = 1;
    rows.push_back(std::move(row));
  }
  for (const auto& r : g.rays) {
    RationalVector row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = r[j];
    rows.push_back(std::move(row));
  }
  ConeGenerators cg = cone_generators(rows, n + 1);

  std::vector<Halfspace> hs;
  RationalMatrix eq_normals;
  std::vector<Rational> eq_offsets;
  for (const auto& l : cg.lineality) {
    RationalVector a = drop_last(l);
    Rational b = -l[n];
    eq_normals.push_back(a);
    eq_offsets.push_back(b);
    Rational s = primitive_scale(a);
    hs.push_back({s * a, Rational(s * b)});
    hs.push_back({-(s * a), Rational(-(s * b))});
  }
  for (const auto& r : cg.rays) {
    RationalVector a = drop_last(r);
    Rational b = -r[n];
    if (!eq_normals.empty()) {
      RationalVector lambda = linalg::orthogonal_coefficients(a, eq_normals);
      for (std::size_t k = 0; k < eq_normals.size(); ++k) {
        if (sgn(lambda[k]) == 0) continue;
        a -= lambda[k] * eq_normals[k];
        b -= lambda[k] * eq_offsets[k];
      }
    }
    if (a.is_zero()) continue;  // 0 <= b, implied by the other constraints
    Rational s = primitive_scale(a);
    hs.push_back({s * a, Rational(s * b)});
  }
  sort_unique(hs);
  check_generator_cap(hs.size());
  return hs;
}

void check_dim(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "polyhedron dimension must be positive");
  if (dim > kernel_limits().max_dim) {
    throw Error(ErrorCode::CapExceeded, "dimension " + std::to_string(dim) + " exceeds cap " +
                                            std::to_string(kernel_limits().max_dim));
  }
}

bool lp_contains(const Generators& g, const RationalVector& x) {
  const std::size_t nv = g.vertices.size(), nr = g.rays.size();
  if (nv == 0) return false;
  LinearProgram lp;
  lp.num_vars = nv + nr;
  lp.nonnegative.assign(lp.num_vars, true);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    RationalVector row(lp.num_vars);
    for (std::size_t j = 0; j < nv; ++j) row[j] = g.vertices[j][i];
    for (std::size_t j = 0; j < nr; ++j) row[nv + j] = g.rays[j][i];
    lp.add(std::move(row), Relation::Equal, x[i]);
  }
  RationalVector convex(lp.num_vars);
  for (std::size_t j = 0; j < nv; ++j) convex[j] = 1;
  lp.add(std::move(convex), Relation::Equal, 1);
  return solve_lp(lp).status == LpStatus::Optimal;
}

}  // namespace

const KernelLimits& kernel_limits() { return mutable_limits(); }
void set_kernel_limits(const KernelLimits& limits) { mutable_limits() = limits; }

// ---------------------------------------------------------------------------

Polyhedron Polyhedron::from_hrep(std::size_t dim, std::vector<Halfspace> halfspaces) {
  check_dim(dim);
  for (const auto& h : halfspaces) {
    require_same_dim(h.normal.dim(), dim, "halfspace");
    if (h.normal.is_zero() && sgn(h.offset) < 0) return empty(dim);
  }
  std::erase_if(halfspaces, [](const Halfspace& h) { return h.normal.is_zero(); });
  Polyhedron p;
  p.dim_ = dim;
  p.hrep_ = std::move(halfspaces);
  return p;
}

Polyhedron Polyhedron::from_vrep(std::size_t dim, std::vector<RationalVector> vertices,
                                 std::vector<RationalVector> rays) {
  check_dim(dim);
  for (const auto& v : vertices) require_same_dim(v.dim(), dim, "vertex");
  for (const auto& r : rays) require_same_dim(r.dim(), dim, "ray");
  if (vertices.empty()) return empty(dim);
  std::erase_if(rays, [](const RationalVector& r) { return r.is_zero(); });
  Polyhedron p;
  p.dim_ = dim;
  p.vrep_ = Generators{std::move(vertices), std::move(rays)};
  p.emptiness_ = Emptiness::Nonempty;
  return p;
}

Polyhedron Polyhedron::whole_space(std::size_t dim) {
  check_dim(dim);
  Polyhedron p;
  p.dim_ = dim;
  p.hrep_ = std::vector<Halfspace>{};
  Generators g;
  g.vertices.push_back(RationalVector(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    g.rays.push_back(RationalVector::unit(dim, i));
    g.rays.push_back(-RationalVector::unit(dim, i));
  }
  sort_unique(g.rays);
  p.vrep_ = std::move(g);
  p.emptiness_ = Emptiness::Nonempty;
  p.canonical_ = true;
  return p;
}

Polyhedron Polyhedron::empty(std::size_t dim) {
  check_dim(dim);
  Polyhedron p;
  p.dim_ = dim;
  p.hrep_ = canonical_empty_hrep(dim);
  p.vrep_ = Generators{};
  p.emptiness_ = Emptiness::Empty;
  p.canonical_ = true;
  return p;
}

Polyhedron Polyhedron::point(const RationalVector& x) {
  return dual_description(from_vrep(x.dim(), {x}));
}

Polyhedron Polyhedron::box(const RationalVector& lo, const RationalVector& hi) {
  require_same_dim(lo.dim(), hi.dim(), "box");
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    hs.push_back({RationalVector::unit(lo.dim(), i), hi[i]});
    hs.push_back({-RationalVector::unit(lo.dim(), i), Rational(-lo[i])});
  }
  return dual_description(from_hrep(lo.dim(), std::move(hs)));
}

Polyhedron Polyhedron::cone(std::size_t dim, std::vector<RationalVector> rays) {
  return dual_description(from_vrep(dim, {RationalVector(dim)}, std::move(rays)));
}

Polyhedron Polyhedron::from_descriptions(std::size_t dim, std::vector<Halfspace> halfspaces, Generators generators) {
  const Polyhedron h = from_hrep(dim, halfspaces);
  const Polyhedron v = from_vrep(dim, generators.vertices, generators.rays);
  const Polyhedron ch = canonical(h);
  if (!(ch == canonical(v))) {
    throw Error(ErrorCode::InvalidArgument, "halfspace and generator descriptions differ");
  }
  if (ch.hrep() == halfspaces && ch.vrep() == generators) return ch;
  Polyhedron p;
  p.dim_ = dim;
  p.hrep_ = std::move(halfspaces);
  p.vrep_ = std::move(generators);
  p.emptiness_ = ch.emptiness_;
  return p;
}

const std::vector<Halfspace>& Polyhedron::hrep() const {
  if (!hrep_) throw Error(ErrorCode::InvalidArgument, "polyhedron has no halfspace description");
  return *hrep_;
}

const Generators& Polyhedron::vrep() const {
  if (!vrep_) throw Error(ErrorCode::InvalidArgument, "polyhedron has no generator description");
  return *vrep_;
}

bool Polyhedron::is_empty() const {
  if (emptiness_ != Emptiness::Unknown) return emptiness_ == Emptiness::Empty;
  return canonical(*this).emptiness_ == Emptiness::Empty;
}

bool Polyhedron::is_whole_space() const {
  const Polyhedron c = canonical(*this);
  return c.emptiness_ == Emptiness::Nonempty && c.hrep_->empty();
}

bool Polyhedron::is_bounded() const {
  const Polyhedron c = canonical(*this);
  return c.vrep_->rays.empty();
}

bool operator==(const Polyhedron& a, const Polyhedron& b) {
  return a.dim_ == b.dim_ && a.hrep_ == b.hrep_ && a.vrep_ == b.vrep_;
}

Polyhedron dual_description(const Polyhedron& p) {
  if (p.canonical_) return p;
  const std::size_t n = p.dim_;
  check_dim(n);
  if (p.emptiness_ == Emptiness::Empty) return Polyhedron::empty(n);

  std::optional<Generators> gens;
  if (p.vrep_) {
    // Canonical halfspaces first, then canonical generators from them.
    if (p.vrep_->vertices.empty()) return Polyhedron::empty(n);
    auto hs = generators_to_halfspaces(n, *p.vrep_);
    gens = halfspaces_to_generators(n, hs);
  } else {
    gens = halfspaces_to_generators(n, *p.hrep_);
  }
  if (!gens) return Polyhedron::empty(n);

  Polyhedron out;
  out.dim_ = n;
  out.hrep_ = generators_to_halfspaces(n, *gens);
  out.vrep_ = std::move(gens);
  out.emptiness_ = Emptiness::Nonempty;
  out.canonical_ = true;
  return out;
}

// ---------------------------------------------------------------------------

Extended support_function(const Polyhedron& p, const RationalVector& d) {
  require_same_dim(p.dim(), d.dim(), "support_function");
  const Polyhedron c = p.has_vrep() ? p : canonical(p);
  const Generators& g = c.vrep();
  if (g.vertices.empty()) throw Error(ErrorCode::EmptySet, "support function of the empty set");
  for (const auto& r : g.rays) {
    if (sgn(dot(d, r)) > 0) return Extended::infinity();
  }
  Rational best = dot(d, g.vertices.front());
  for (std::size_t i = 1; i < g.vertices.size(); ++i) {
    Rational v = dot(d, g.vertices[i]);
    if (v > best) best = v;
  }
  return Extended(best);
}

bool contains_point(const Polyhedron& p, const RationalVector& x) {
  require_same_dim(p.dim(), x.dim(), "contains_point");
  if (p.emptiness() == Emptiness::Empty) return false;
  if (p.has_hrep()) {
    return std::all_of(p.hrep().begin(), p.hrep().end(), [&](const Halfspace& h) { return h.contains(x); });
  }
  return lp_contains(p.vrep(), x);
}

ContainmentResult contains_polyhedron(const Polyhedron& outer, const Polyhedron& inner) {
  require_same_dim(outer.dim(), inner.dim(), "contains_polyhedron");
  const Polyhedron q = canonical(inner);
  ContainmentResult result;
  if (q.is_empty()) return result;
  const Polyhedron p = canonical(outer);
  const Generators& g = q.vrep();
  if (p.is_empty()) {
    result.contained = false;
    result.witness = g.vertices.back();
    return result;
  }
  // Vertex with the largest violation over all facets; ties go to the
  // lexicographically greatest vertex.
  std::optional<Rational> worst;
  for (const auto& v : g.vertices) {
    for (const auto& h : p.hrep()) {
      Rational excess = dot(h.normal, v) - h.offset;
      if (sgn(excess) > 0 && (!worst || excess >= *worst)) {
        worst = excess;
        result.witness = v;
      }
    }
  }
  if (worst) {
    result.contained = false;
    return result;
  }
  for (const auto& r : g.rays) {
    for (const auto& h : p.hrep()) {
      Rational slope = dot(h.normal, r);
      if (sgn(slope) <= 0) continue;
      const auto& v = g.vertices.front();
      Rational t = (h.offset - dot(h.normal, v)) / slope + 1;
      result.contained = false;
      result.witness = v + t * r;
      return result;
    }
  }
  return result;
}

bool set_equal(const Polyhedron& a, const Polyhedron& b) {
  return contains_polyhedron(a, b).contained && contains_polyhedron(b, a).contained;
}

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q) {
  require_same_dim(p.dim(), q.dim(), "intersect");
  if (p.emptiness() == Emptiness::Empty || q.emptiness() == Emptiness::Empty) return Polyhedron::empty(p.dim());
  const Polyhedron a = p.has_hrep() ? p : canonical(p);
  const Polyhedron b = q.has_hrep() ? q : canonical(q);
  std::vector<Halfspace> all = a.hrep();
  all.insert(all.end(), b.hrep().begin(), b.hrep().end());
  return dual_description(Polyhedron::from_hrep(p.dim(), std::move(all)));
}

Polyhedron minkowski_sum(const Polyhedron& p, const Polyhedron& q) {
  require_same_dim(p.dim(), q.dim(), "minkowski_sum");
  const Polyhedron a = canonical(p), b = canonical(q);
  if (a.is_empty() || b.is_empty()) return Polyhedron::empty(p.dim());
  std::vector<RationalVector> vertices;
  for (const auto& u : a.vrep().vertices) {
    for (const auto& v : b.vrep().vertices) vertices.push_back(u + v);
  }
  check_generator_cap(vertices.size());
  std::vector<RationalVector> rays = a.vrep().rays;
  rays.insert(rays.end(), b.vrep().rays.begin(), b.vrep().rays.end());
  return dual_description(Polyhedron::from_vrep(p.dim(), std::move(vertices), std::move(rays)));
}

Polyhedron star_difference(const Polyhedron& a, const Polyhedron& b) {
  require_same_dim(a.dim(), b.dim(), "star_difference");
  const std::size_t n = a.dim();
  const Polyhedron bc = canonical(b);
  if (bc.is_empty()) return Polyhedron::whole_space(n);
  const Polyhedron ac = canonical(a);
  if (ac.is_empty()) return Polyhedron::empty(n);
  std::vector<Halfspace> eroded;
  for (const auto& h : ac.hrep()) {
    Extended s = support_function(bc, h.normal);
    if (s.is_infinite()) return Polyhedron::empty(n);
    eroded.push_back({h.normal, Rational(h.offset - s.value())});
  }
  return dual_description(Polyhedron::from_hrep(n, std::move(eroded)));
}

Polyhedron affine_image(const Polyhedron& p, const RationalMatrix& m, const RationalVector& c) {
  require_same_dim(m.size(), c.dim(), "affine_image offset");
  for (const auto& row : m) require_same_dim(row.dim(), p.dim(), "affine_image matrix");
  const Polyhedron src = canonical(p);
  if (src.is_empty()) return Polyhedron::empty(c.dim());
  std::vector<RationalVector> vertices, rays;
  for (const auto& v : src.vrep().vertices) vertices.push_back(linalg::mat_vec(m, v) + c);
  for (const auto& r : src.vrep().rays) rays.push_back(linalg::mat_vec(m, r));
  return dual_description(Polyhedron::from_vrep(c.dim(), std::move(vertices), std::move(rays)));
}

Polyhedron negate(const Polyhedron& p) {
  RationalMatrix m = linalg::identity(p.dim());
  for (auto& row : m) row = -row;
  return affine_image(p, m, RationalVector(p.dim()));
}

Polyhedron translate(const Polyhedron& p, const RationalVector& shift) {
  return affine_image(p, linalg::identity(p.dim()), shift);
}

Polyhedron normal_cone_at(const Polyhedron& p, const RationalVector& x) {
  require_same_dim(p.dim(), x.dim(), "normal_cone_at");
  const Polyhedron c = canonical(p);
  if (!contains_point(c, x)) throw Error(ErrorCode::PointNotInSet, "normal cone at " + format_vector(x));
  std::vector<RationalVector> normals;
  for (const auto& h : c.hrep()) {
    if (dot(h.normal, x) == h.offset) normals.push_back(h.normal);
  }
  return Polyhedron::cone(p.dim(), std::move(normals));
}

bool cone_is_linear_subspace(const Polyhedron& cone) {
  const Polyhedron c = canonical(cone);
  if (c.is_empty()) throw Error(ErrorCode::NotACone, "empty set");
  const auto& v = c.vrep().vertices;
  if (v.size() != 1 || !v.front().is_zero()) throw Error(ErrorCode::NotACone, "apex is not the origin");
  return set_equal(c, negate(c));
}

bool is_interior_point(const Polyhedron& p, const RationalVector& x) {
  require_same_dim(p.dim(), x.dim(), "is_interior_point");
  const Polyhedron c = canonical(p);
  if (c.is_empty()) return false;
  return std::all_of(c.hrep().begin(), c.hrep().end(),
                     [&](const Halfspace& h) { return dot(h.normal, x) < h.offset; });
}

// ---------------------------------------------------------------------------
// Norms.

NormSpec NormSpec::l2approx(unsigned k) {
  if (k < 4 || k % 2 != 0) throw Error(ErrorCode::InvalidArgument, "l2approx needs an even facet count >= 4");
  return {NormKind::L2Approx, k};
}

NormSpec parse_norm(std::string_view text) {
  if (text == "l1" || text == "L1") return NormSpec::l1();
  if (text == "linf" || text == "Linf") return NormSpec::linf();
  constexpr std::string_view prefix = "l2approx:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string count(text.substr(prefix.size()));
    try {
      std::size_t used = 0;
      unsigned long k = std::stoul(count, &used);
      if (used != count.size()) throw std::invalid_argument(count);
      return NormSpec::l2approx(static_cast<unsigned>(k));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "bad norm '" + std::string(text) + "'");
    }
  }
  throw Error(ErrorCode::ParseError, "unknown norm '" + std::string(text) + "'");
}

std::string format_norm(const NormSpec& norm) {
  switch (norm.kind) {
    case NormKind::L1: return "l1";
    case NormKind::Linf: return "linf";
    case NormKind::L2Approx: return "l2approx:" + std::to_string(norm.facets);
  }
  return "?";
}

std::vector<std::pair<Rational, Rational>> rational_circle_directions(unsigned k) {
  // Rational points on the unit circle via t -> ((1-t^2)/(1+t^2), 2t/(1+t^2)),
  // with t = tan(theta/2) rounded to a multiple of 2^-10.
  std::vector<std::pair<Rational, Rational>> dirs;
  for (unsigned j = 0; j < k; ++j) {
    double theta = 2.0 * std::numbers::pi * j / k;
    if (theta > std::numbers::pi) theta -= 2.0 * std::numbers::pi;
    bool flip = false;
    if (theta > std::numbers::pi / 2 + 1e-12) {
      theta -= std::numbers::pi;
      flip = true;
    } else if (theta < -std::numbers::pi / 2 - 1e-12) {
      theta += std::numbers::pi;
      flip = true;
    }
    Rational t(static_cast<long>(std::lround(std::tan(theta / 2) * 1024.0)), 1024);
    t.canonicalize();
    Rational den = 1 + t * t;
    Rational c = (1 - t * t) / den, s = 2 * t / den;
    if (flip) {
      c = -c;
      s = -s;
    }
    dirs.emplace_back(c, s);
  }
  return dirs;
}

namespace {

// Unit vectors of the L2Approx construction embedded in every coordinate plane.
std::vector<RationalVector> l2approx_directions(unsigned k, std::size_t dim) {
  std::vector<RationalVector> out;
  if (dim == 1) {
    out.push_back(RationalVector::unit(1, 0));
    out.push_back(-RationalVector::unit(1, 0));
    return out;
  }
  const auto dirs = rational_circle_directions(k);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      for (const auto& [c, s] : dirs) {
        RationalVector u(dim);
        u[i] = c;
        u[j] = s;
        out.push_back(std::move(u));
      }
    }
  }
  sort_unique(out);
  return out;
}

}  // namespace

Polyhedron dual_norm_ball(const NormSpec& norm, const Rational& eps, std::size_t dim) {
  if (sgn(eps) < 0) throw Error(ErrorCode::NegativeEps, "dual norm ball radius " + format_rational(eps));
  check_dim(dim);
  if (sgn(eps) == 0) return Polyhedron::point(RationalVector(dim));
  switch (norm.kind) {
    case NormKind::L1: {
      RationalVector lo(dim), hi(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        lo[i] = -eps;
        hi[i] = eps;
      }
      return Polyhedron::box(lo, hi);
    }
    case NormKind::Linf: {
      std::vector<RationalVector> vertices;
      for (std::size_t i = 0; i < dim; ++i) {
        vertices.push_back(eps * RationalVector::unit(dim, i));
        vertices.push_back(-(eps * RationalVector::unit(dim, i)));
      }
      return dual_description(Polyhedron::from_vrep(dim, std::move(vertices)));
    }
    case NormKind::L2Approx: {
      std::vector<Halfspace> hs;
      for (auto& u : l2approx_directions(norm.facets, dim)) hs.push_back({std::move(u), eps});
      return dual_description(Polyhedron::from_hrep(dim, std::move(hs)));
    }
  }
  throw Error(ErrorCode::InternalError, "unknown norm kind");
}

double l2approx_hausdorff_bound(unsigned facets, std::size_t dim, double eps) {
  if (dim == 1) return 0.0;
  const auto dirs = rational_circle_directions(facets);
  std::vector<double> angles;
  for (const auto& [c, s] : dirs) angles.push_back(std::atan2(s.get_d(), c.get_d()));
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  const double planar = 1.0 / std::cos(max_gap / 2.0);
  const double pairs = std::ceil(static_cast<double>(dim) / 2.0);
  return eps * (std::sqrt(pairs) * planar - 1.0);
}

Rational norm_value(const NormSpec& norm, const RationalVector& v) {
  Rational acc = 0;
  switch (norm.kind) {
    case NormKind::L1:
      for (const auto& x : v) acc += abs(x);
      return acc;
    case NormKind::Linf:
      for (const auto& x : v) {
        if (abs(x) > acc) acc = abs(x);
      }
      return acc;
    case NormKind::L2Approx: {
      if (v.dim() == 1) return abs(v[0]);
      const auto dirs = l2approx_directions(norm.facets, v.dim());
      LinearProgram lp;
      lp.num_vars = dirs.size();
      lp.nonnegative.assign(lp.num_vars, true);
      lp.objective = RationalVector(lp.num_vars);
      for (std::size_t j = 0; j < lp.num_vars; ++j) lp.objective[j] = 1;
      for (std::size_t i = 0; i < v.dim(); ++i) {
        RationalVector row(lp.num_vars);
        for (std::size_t j = 0; j < lp.num_vars; ++j) row[j] = dirs[j][i];
        lp.add(std::move(row), Relation::Equal, v[i]);
      }
      return solve_lp(lp).value;
    }
  }
  throw Error(ErrorCode::InternalError, "unknown norm kind");
}

Extended gap(const Polyhedron& a, const Polyhedron& b, const NormSpec& norm) {
  require_same_dim(a.dim(), b.dim(), "gap");
  const Polyhedron pa = canonical(a), pb = canonical(b);
  if (pa.is_empty() || pb.is_empty()) return Extended::infinity();
  const std::size_t n = a.dim();

  // Variables: x (n), y (n), then the norm epigraph variables.
  std::vector<RationalVector> dirs;
  std::size_t extra = 0;
  switch (norm.kind) {
    case NormKind::L1: extra = n; break;
    case NormKind::Linf: extra = 1; break;
    case NormKind::L2Approx:
      dirs = l2approx_directions(norm.facets, n);
      extra = dirs.size();
      break;
  }
  LinearProgram lp;
  lp.num_vars = 2 * n + extra;
  lp.nonnegative.assign(lp.num_vars, false);
  for (std::size_t j = 2 * n; j < lp.num_vars; ++j) lp.nonnegative[j] = true;
  lp.objective = RationalVector(lp.num_vars);
  for (std::size_t j = 2 * n; j < lp.num_vars; ++j) lp.objective[j] = 1;

  for (const auto& h : pa.hrep()) {
    RationalVector row(lp.num_vars);
    for (std::size_t i = 0; i < n; ++i) row[i] = h.normal[i];
    lp.add(std::move(row), Relation::LessEqual, h.offset);
  }
  for (const auto& h : pb.hrep()) {
    RationalVector row(lp.num_vars);
    for (std::size_t i = 0; i < n; ++i) row[n + i] = h.normal[i];
    lp.add(std::move(row), Relation::LessEqual, h.offset);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (norm.kind == NormKind::L2Approx) {
      RationalVector row(lp.num_vars);
      row[i] = 1;
      row[n + i] = -1;
      for (std::size_t j = 0; j < dirs.size(); ++j) row[2 * n + j] = -dirs[j][i];
      lp.add(std::move(row), Relation::Equal, 0);
      continue;
    }
    const std::size_t s = norm.kind == NormKind::L1 ? 2 * n + i : 2 * n;
    for (int sign : {1, -1}) {
      RationalVector row(lp.num_vars);
      row[i] = sign;
      row[n + i] = -sign;
      row[s] = -1;
      lp.add(std::move(row), Relation::LessEqual, 0);
    }
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) throw Error(ErrorCode::InternalError, "gap LP did not solve");
  return Extended(sol.value);
}

}  // namespace subgrad
