// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/generators.hpp"
#include "subgrad/blackbox.hpp"
#include "subgrad/calculus.hpp"
#include "subgrad/json_io.hpp"
#include "subgrad/optimality.hpp"
#include "subgrad/oracle.hpp"
#include "subgrad/scenario.hpp"

using namespace subgrad;
using namespace subgrad::testgen;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SUBGRAD_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Rational q(long p, long d = 1) { return make_rational(p, d); }

// ---------------------------------------------------------------------------
// 1. Star difference against translate-and-test on a lattice.

using IVec = std::vector<std::int64_t>;

struct IntFacet {
  IVec normal;
  std::int64_t offset;
};

std::int64_t idot(const IVec& a, const IVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

IVec isub(const IVec& a, const IVec& b) {
  IVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// Inequalities n.x <= max_v n.v for every normal of a hyperplane through a
// dim-tuple of points. Each is valid for the hull, and together they contain
// every facet when the hull is full-dimensional. Empty result: the hull is flat.
std::vector<IntFacet> brute_force_facets(const std::vector<IVec>& pts) {
  const std::size_t n = pts.front().size();
  const std::size_t m = pts.size();
  std::vector<IVec> normals;
  if (n == 1) {
    normals = {{1}};
  } else if (n == 2) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const IVec d = isub(pts[j], pts[i]);
        normals.push_back({-d[1], d[0]});
      }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
          const IVec u = isub(pts[j], pts[i]), v = isub(pts[k], pts[i]);
          normals.push_back({u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]});
        }
  }
  std::vector<IntFacet> out;
  for (const IVec& nrm : normals) {
    std::int64_t lo = idot(nrm, pts[0]), hi = lo;
    for (const IVec& p : pts) {
      lo = std::min(lo, idot(nrm, p));
      hi = std::max(hi, idot(nrm, p));
    }
    if (lo == hi) continue;  // all points on the hyperplane, or a zero normal
    IVec neg(nrm.size());
    for (std::size_t i = 0; i < nrm.size(); ++i) neg[i] = -nrm[i];
    out.push_back({nrm, hi});
    out.push_back({neg, -lo});
  }
  // A flat hull in dim 2 or 3 still yields inequalities from non-spanning
  // tuples; detect it by asking for a tuple whose plane misses some point.
  if (n > 1) {
    bool full = false;
    if (n == 2) {
      for (std::size_t i = 0; i < m && !full; ++i)
        for (std::size_t j = i + 1; j < m && !full; ++j)
          for (std::size_t k = j + 1; k < m && !full; ++k) {
            const IVec u = isub(pts[j], pts[i]), v = isub(pts[k], pts[i]);
            full = u[0] * v[1] - u[1] * v[0] != 0;
          }
    } else {
      for (std::size_t i = 0; i < m && !full; ++i)
        for (std::size_t j = i + 1; j < m && !full; ++j)
          for (std::size_t k = j + 1; k < m && !full; ++k)
            for (std::size_t l = k + 1; l < m && !full; ++l) {
              const IVec u = isub(pts[j], pts[i]), v = isub(pts[k], pts[i]), w = isub(pts[l], pts[i]);
              full = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
                         u[2] * (v[0] * w[1] - v[1] * w[0]) != 0;
            }
    }
    if (!full) return {};
  }
  return out;
}

std::vector<IVec> scaled_vertices(const std::vector<RationalVector>& vs, long scale) {
  std::vector<IVec> out;
  for (const auto& v : vs) {
    IVec p(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
      const Rational s = v[i] * scale;
      p[i] = s.get_num().get_si();
    }
    out.push_back(p);
  }
  return out;
}

std::vector<RationalVector> random_points(std::mt19937& rng, std::size_t dim, std::size_t max_count, int half_range) {
  std::uniform_int_distribution<std::size_t> count(1, max_count);
  std::uniform_int_distribution<int> coord(-half_range, half_range);
  std::vector<RationalVector> out(count(rng), RationalVector(dim));
  for (auto& v : out)
    for (std::size_t i = 0; i < dim; ++i) v[i] = make_rational(coord(rng), 2);
  return out;
}

Outcome criterion1() {
  std::mt19937 rng(1001);
  constexpr long kScale = 40;  // vertices are halves, lattice steps are twentieths of half-integers
  std::size_t pairs = 0, nonempty = 0, lattice_points = 0, inside = 0;
  while (pairs < 200) {
    const std::size_t dim = 1 + pairs % 3;
    const auto va = random_points(rng, dim, 8, 8);   // [-4, 4]
    const auto vb = random_points(rng, dim, 8, 3);   // [-3/2, 3/2]
    const auto ia = scaled_vertices(va, kScale);
    const std::vector<IntFacet> facets = brute_force_facets(ia);
    if (facets.empty()) continue;  // flat A: draw again
    ++pairs;
    const Polyhedron a = Polyhedron::from_vrep(dim, va);
    const Polyhedron b = Polyhedron::from_vrep(dim, vb);
    const Polyhedron d = canonical(star_difference(a, b));
    if (!d.is_empty()) ++nonempty;

    // Bounding box of A - B.
    RationalVector lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      Rational amin = va[0][i], amax = va[0][i], bmin = vb[0][i], bmax = vb[0][i];
      for (const auto& v : va) amin = std::min(amin, v[i]), amax = std::max(amax, v[i]);
      for (const auto& v : vb) bmin = std::min(bmin, v[i]), bmax = std::max(bmax, v[i]);
      lo[i] = amin - bmax;
      hi[i] = amax - bmin;
    }
    const auto ib = scaled_vertices(vb, kScale);
    const std::size_t total = static_cast<std::size_t>(std::pow(21, dim));
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      RationalVector x(dim);
      IVec ix(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const long k = static_cast<long>(rest % 21);
        rest /= 21;
        x[i] = lo[i] + Rational(hi[i] - lo[i]) * make_rational(k, 20);
        ix[i] = Rational(x[i] * kScale).get_num().get_si();
      }
      bool fits = true;
      for (const auto& v : ib) {
        IVec p(dim);
        for (std::size_t i = 0; i < dim; ++i) p[i] = ix[i] + v[i];
        for (const auto& f : facets) {
          if (idot(f.normal, p) > f.offset) {
            fits = false;
            break;
          }
        }
        if (!fits) break;
      }
      ++lattice_points;
      if (fits) ++inside;
      if (contains_point(d, x) != fits) {
        return {false, "mismatch at " + format_vector(x) + " for A = conv" + std::to_string(va.size()) +
                           " points in dim " + std::to_string(dim)};
      }
    }
  }
  std::ostringstream os;
  os << pairs << " pairs, " << nonempty << " nonempty differences, " << lattice_points << " lattice points ("
     << inside << " inside), exact";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// Shared helpers for piecewise affine data.

std::vector<RationalVector> active_slopes(const PAConvexFunction& f, const RationalVector& x) {
  Rational best;
  bool have = false;
  for (const auto& p : f.pieces()) {
    const Rational v = dot(p.slope, x) + p.intercept;
    if (!have || v > best) best = v, have = true;
  }
  std::vector<RationalVector> out;
  for (const auto& p : f.pieces()) {
    if (dot(p.slope, x) + p.intercept == best) out.push_back(p.slope);
  }
  return out;
}

Rational max_dot(const std::vector<RationalVector>& slopes, const RationalVector& d) {
  Rational best = dot(slopes.front(), d);
  for (const auto& s : slopes) best = std::max(best, Rational(dot(s, d)));
  return best;
}

Polyhedron linf_box(std::size_t dim, const Rational& r) {
  RationalVector lo(dim), hi(dim);
  for (std::size_t i = 0; i < dim; ++i) lo[i] = -r, hi[i] = r;
  return Polyhedron::box(lo, hi);
}

// ---------------------------------------------------------------------------
// 2. eps-subdifferential through the expanded function.

Outcome criterion2() {
  std::mt19937 rng(1002);
  std::size_t checks = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector x = small_vector(rng, dim, 2, 2);
    const PAConvexFunction f = i % 2 ? random_pa(rng, dim, 6) : random_pa_kinked_at(rng, x, 6);
    const auto act = active_slopes(f, x);
    const Polyhedron df = Polyhedron::from_vrep(dim, act);
    for (const Rational e : {q(0), q(1, 2), q(1), q(3)}) {
      // Slopes of f + e||. - x||_1 active at x: a + e s over sign vectors s.
      std::vector<RationalVector> slopes;
      for (const auto& a : act) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
          RationalVector s = a;
          for (std::size_t k = 0; k < dim; ++k) s[k] += (mask >> k & 1) ? e : Rational(-e);
          slopes.push_back(s);
        }
      }
      const Polyhedron expected = canonical(Polyhedron::from_vrep(dim, slopes));
      const Polyhedron via_expand = canonical(subdifferential_at(f_eps_expand(f, x, e, NormSpec::l1()), x));
      const Polyhedron via_sum = canonical(minkowski_sum(df, linf_box(dim, e)));
      const Polyhedron direct = canonical(eps_subdifferential_at(f, x, e, NormSpec::l1()));
      if (!(via_expand == expected && via_sum == expected && direct == expected)) {
        return {false, "function " + std::to_string(i) + " at " + format_vector(x) + ", eps " + format_rational(e)};
      }
      ++checks;
    }
  }
  return {true, std::to_string(checks) + " exact comparisons on 100 functions"};
}

// ---------------------------------------------------------------------------
// 3. Difference formula equality at interior points.

// Lower eps-subdifferential of g - h from the polar of each region where a
// piece b_j of h is maximal: x* + b_j in dg + eps B + cone{b_l - b_j}.
Polyhedron polar_reduction(const PAConvexFunction& g, const PAConvexFunction& h, const RationalVector& x,
                           const Rational& eps) {
  const std::size_t dim = x.dim();
  const Polyhedron enlarged = minkowski_sum(Polyhedron::from_vrep(dim, active_slopes(g, x)), linf_box(dim, eps));
  const auto bs = active_slopes(h, x);
  Polyhedron acc = Polyhedron::whole_space(dim);
  for (const auto& bj : bs) {
    std::vector<RationalVector> rays;
    for (const auto& bl : bs) {
      if (bl != bj) rays.push_back(bl - bj);
    }
    Polyhedron piece = enlarged;
    if (!rays.empty()) piece = minkowski_sum(piece, Polyhedron::cone(dim, rays));
    acc = intersect(acc, minkowski_sum(piece, Polyhedron::point(-bj)));
  }
  return acc;
}

// Pair kinked at x. With `wide`, g also gets pieces b + s for every piece b
// of h and s in {-1, 1}^n, so that dg contains dh + [-1, 1]^n.
std::pair<PAConvexFunction, PAConvexFunction> random_dc_pair(std::mt19937& rng, const RationalVector& x, bool wide) {
  const std::size_t dim = x.dim();
  const PAConvexFunction h = random_pa_kinked_at(rng, x, 5);
  PAConvexFunction g = random_pa_kinked_at(rng, x, 5);
  if (wide) {
    std::vector<AffinePiece> pieces = g.pieces();
    for (const auto& b : h.pieces()) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        RationalVector s = b.slope;
        for (std::size_t k = 0; k < dim; ++k) s[k] += (mask >> k & 1) ? 1 : -1;
        pieces.push_back({s, -dot(s, x)});
      }
    }
    g = PAConvexFunction(std::move(pieces));
  }
  return {g, h};
}

Outcome criterion3() {
  std::mt19937 rng(1003);
  std::size_t checks = 0, empty = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector x = small_vector(rng, dim, 2, 2);
    const auto [g, h] = random_dc_pair(rng, x, i % 2 == 1);
    const DCFunction f(g, h);
    for (const Rational e : {q(0), q(1, 2), q(1)}) {
      const Polyhedron lhs = canonical(polar_reduction(g, h, x, e));
      for (const Rational n : {q(0), q(1, 2), q(1)}) {
        const Certificate c = check_difference_formula(f, x, e, n);
        if (c.verdict != CertVerdict::Equal || !(canonical(c.lhs) == lhs) || !c.theorem_certified()) {
          return {false, "pair " + std::to_string(i) + " at " + format_vector(x) + ", eps " + format_rational(e) +
                             ", eta " + format_rational(n) + ": verdict " + to_string(c.verdict)};
        }
        if (lhs.is_empty()) ++empty;
        ++checks;
      }
    }
  }
  return {true, std::to_string(checks) + " certificates Equal (" + std::to_string(empty) + " with both sides empty)"};
}

// ---------------------------------------------------------------------------
// 4. Inclusion at interior and boundary points.

Outcome criterion4() {
  std::mt19937 rng(1004);
  std::size_t checks = 0, boundary = 0, strict = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector centre = small_vector(rng, dim, 1, 2);
    const auto [g0, h0] = random_dc_pair(rng, centre, i % 2 == 1);
    const Polyhedron dom = linf_box(dim, 1);
    const PAConvexFunction g(g0.pieces(), dom);
    const PAConvexFunction h = i % 4 < 2 ? PAConvexFunction(h0.pieces(), dom) : h0;
    const DCFunction f(g, h);
    std::vector<RationalVector> points;
    if (contains_point(dom, centre)) points.push_back(centre);
    RationalVector corner(dim), face(dim);
    for (std::size_t k = 0; k < dim; ++k) corner[k] = k % 2 ? 1 : -1;
    face[0] = 1;
    points.push_back(corner);
    points.push_back(face);
    for (const auto& x : points) {
      const bool on_boundary = !(x == centre);
      for (const Rational e : {q(0), q(1, 2), q(1)}) {
        for (const Rational n : {q(0), q(1, 2), q(1)}) {
          const Certificate c = check_inclusion13(f, x, e, n);
          if (c.verdict == CertVerdict::Fails) {
            return {false, "pair " + std::to_string(i) + " at " + format_vector(x) + ", eps " + format_rational(e) +
                               ", eta " + format_rational(n) + ": witness " + format_vector(*c.witness)};
          }
          if (c.verdict == CertVerdict::StrictInclusion) ++strict;
          if (on_boundary) ++boundary;
          ++checks;
        }
      }
    }
  }
  std::ostringstream os;
  os << checks << " inclusions hold (" << boundary << " at boundary points, " << strict << " strict)";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 5. Sampled Dini derivatives against exact ones; calmness.

Outcome criterion5() {
  std::mt19937 rng(1005);
  const SamplingPlan plan;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector x = small_vector(rng, dim, 2, 2);
    const PAConvexFunction g = random_pa_kinked_at(rng, x, 4);
    const PAConvexFunction h = random_pa_kinked_at(rng, x, 4);
    const RationalVector dir = small_vector(rng, dim, 2, 2);
    const double exact = Rational(max_dot(active_slopes(g, x), dir) - max_dot(active_slopes(h, x), dir)).get_d();
    const BlackBoxFunction bb = to_blackbox(DCFunction(g, h));
    const DiniEstimate est = dini_directional_estimate(bb, x.to_doubles(), dir.to_doubles(), plan);
    const double rel = std::abs(est.estimate - exact) / std::max(1.0, std::abs(exact));
    worst = std::max(worst, rel);
    if (!(rel <= 1e-6)) {
      std::ostringstream os;
      os << "triple " << i << ": estimate " << est.estimate << " vs exact " << exact;
      return {false, os.str()};
    }
    if (calmness_probe(bb, x.to_doubles(), plan).status != VerdictStatus::Holds) {
      return {false, "calmness not confirmed for PA instance " + std::to_string(i)};
    }
  }
  using namespace subgrad::expr;
  const BlackBoxFunction root(1, neg(sqrt_abs(coord(0))));
  const ProbeVerdict calm = calmness_probe(root, {0.0}, plan);
  if (calm.status != VerdictStatus::FailsWithWitness || !calm.witness ||
      !replay_calmness_witness(root, {0.0}, *calm.witness, plan.divergence_threshold)) {
    return {false, "-sqrt|x| at 0 not reported as non-calm"};
  }
  std::ostringstream os;
  os << "100 triples, worst relative error " << worst << "; -sqrt|x| not calm, PA instances calm";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Approximate convexity and starshapedness probes.

std::size_t total_violations(const ProbeVerdict& v) {
  std::size_t n = 0;
  for (const auto& s : v.shells) n += s.violations;
  return n;
}

Outcome criterion6() {
  using namespace subgrad::expr;
  SamplingPlan plan;
  plan.shell_radii = SamplingPlan::dyadic_radii(5, 20);
  const BlackBoxFunction r6(1, sub(abs(coord(0)), mul(coord(0), coord(0))));
  const BlackBoxFunction r7(1, remark_seven(coord(0)));
  std::size_t samples = 0;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const ProbeVerdict v = approx_regularity_probe(r6, {x}, 0.1, RegularityMode::Convex, plan);
    if (v.status != VerdictStatus::Holds || total_violations(v) != 0) {
      return {false, "|x| - x^2 violates approximate convexity near " + std::to_string(x)};
    }
    for (const auto& s : v.shells) samples += s.samples;
  }
  const ProbeVerdict star = approx_regularity_probe(r7, {0.0}, 0.1, RegularityMode::Starshaped, plan);
  if (star.status != VerdictStatus::Holds || total_violations(star) != 0) {
    return {false, "Remark 7 function violates approximate starshapedness at 0"};
  }
  const ProbeVerdict conv = approx_regularity_probe(r7, {0.0}, 0.01, RegularityMode::Convex, plan);
  if (conv.status != VerdictStatus::FailsWithWitness || !conv.witness ||
      !replay_regularity_witness(r7, {0.0}, 0.01, RegularityMode::Convex, NormSpec::l1(), *conv.witness)) {
    return {false, std::string("Remark 7 convexity probe: ") + to_string(conv.status)};
  }
  std::ostringstream os;
  os << "no violation in " << samples << " samples for |x| - x^2 or " << total_violations(star)
     << " for starshapedness; convexity witness at eps 0.01 replays (margin " << conv.witness->margin << ")";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Blunt minimizer certificates.

Outcome criterion7() {
  const ProblemInstance pos = problem_from_json(load_json_file(kSource / "data" / "cone_dc.json"));
  const ProblemInstance neg = problem_from_json(load_json_file(kSource / "tests" / "data" / "descent_dc.json"));
  const RationalVector x(2);
  const OptimalityCertificate a = certify_blunt_minimizer(pos, x);
  if (a.verdict != BluntVerdict::BluntMinimizerAllEps || !a.routes_agree ||
      a.qualification.status != QualificationStatus::Holds) {
    return {false, std::string("positive instance: ") + to_string(a.verdict)};
  }
  const OptimalityCertificate b = certify_blunt_minimizer(neg, x);
  if (b.verdict != BluntVerdict::NotBluntMinimizer || !b.descent) {
    return {false, std::string("negative instance: ") + to_string(b.verdict)};
  }
  SamplingPlan plan;
  plan.shell_radii = SamplingPlan::dyadic_radii(1, 16);
  plan.samples_per_shell = 128;
  for (const Rational e : {q(1, 4), q(1, 2), q(1)}) {
    if (!replay_descent_witness(neg, x, *b.descent, e)) return {false, "descent witness does not replay"};
    const ProbeVerdict v = blunt_min_probe(neg, x, e, plan);
    if (v.status != VerdictStatus::FailsWithWitness || !v.witness ||
        !replay_blunt_witness(neg, x, e, NormSpec::l1(), *v.witness)) {
      return {false, "probe found no replaying violation at eps " + format_rational(e)};
    }
    if (blunt_min_probe(pos, x, e, plan).status != VerdictStatus::Holds) {
      return {false, "probe reports a violation for the positive instance at eps " + format_rational(e)};
    }
  }
  return {true, "positive instance certified with agreeing routes; descent along " +
                    format_vector(b.descent->direction) + " at rate " + format_rational(b.descent->rate) +
                    "; probe violations for eps 1/4, 1/2, 1"};
}

// ---------------------------------------------------------------------------
// 8. Corpus determinism.

Outcome criterion8() {
  const fs::path dir = kSource / "corpus";
  const CorpusResult a = corpus_run(dir, "*", 1, {});
  const CorpusResult b = corpus_run(dir, "*", 4, {});
  const CorpusResult c = corpus_run(dir, "*", 1, {});
  const std::string ja = a.report.dump(2), jb = b.report.dump(2), jc = c.report.dump(2);
  if (ja != jb || ja != jc) return {false, "corpus reports differ between runs"};
  if (a.exit_code != kExitHolds) return {false, "corpus exit code " + std::to_string(a.exit_code)};
  return {true, std::to_string(a.rows.size()) + " scenarios, " + std::to_string(ja.size()) +
                    " report bytes identical for 1 and 4 jobs"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "star difference vs lattice translate test", 60, criterion1},
      {2, "eps-subdifferential via expansion", 60, criterion2},
      {3, "difference formula equality", 120, criterion3},
      {4, "inclusion at boundary points", 60, criterion4},
      {5, "Dini oracle convergence and calmness", 120, criterion5},
      {6, "approximate convexity and starshapedness probes", 60, criterion6},
      {7, "blunt minimizer certificates", 30, criterion7},
      {8, "corpus determinism", 120, criterion8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && secs > c.budget_seconds) {
      out.pass = false;
      out.detail += "; over time budget";
    }
    if (!out.pass) ++failed;
    std::printf("criterion %d %s: %s (%.1f s of %.0f s) %s\n", c.id, out.pass ? "PASS" : "FAIL", c.name, secs,
                c.budget_seconds, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
