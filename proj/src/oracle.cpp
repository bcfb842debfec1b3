#include "subgrad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "subgrad/errors.hpp"

namespace subgrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

enum : std::uint64_t {
  kTagDini = 0x44494e49,
  kTagMembership = 0x4d454d42,
  kTagConvex = 0x434f4e56,
  kTagStar = 0x53544152,
  kTagDirectional = 0x44495245,
  kTagGap = 0x47415053,
};

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

double dot_d(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// A violation must exceed the rounding noise of the terms involved.
bool violates(double slack, double magnitude) { return slack < -kRoundoff * magnitude; }

struct SampleOutcome {
  bool evaluated = false;
  double value = kInf;  // slack of the tested inequality (negative on violation)
  bool violation = false;
  std::vector<double> key;  // lexicographic tie-break among witnesses
  Witness witness;
};

using SampleFn = std::function<SampleOutcome(double radius, std::size_t index, sampling::Stream& stream)>;

struct ShellRun {
  std::vector<ShellStat> shells;
  std::vector<std::optional<SampleOutcome>> best_violation;  // per shell
};

ShellRun run_shells(const SamplingPlan& plan, std::uint64_t tag, const SampleFn& fn) {
  plan.validate();
  ShellRun run;
  for (double radius : plan.shell_radii) {
    auto outcomes = sampling::parallel_map<SampleOutcome>(
        plan.samples_per_shell, plan.threads, [&](std::size_t j) {
          sampling::Stream stream(plan.seed, tag, j);
          return fn(radius, j, stream);
        });
    ShellStat stat{radius, kInf, 0, 0};
    std::optional<SampleOutcome> best;
    for (auto& o : outcomes) {
      if (!o.evaluated) continue;
      ++stat.samples;
      stat.inf = std::min(stat.inf, o.value);
      if (!o.violation) continue;
      ++stat.violations;
      if (!best || o.key < best->key) best = std::move(o);
    }
    run.shells.push_back(stat);
    run.best_violation.push_back(std::move(best));
  }
  return run;
}

ProbeVerdict verdict_from(const ShellRun& run, const SamplingPlan& plan) {
  ProbeVerdict v;
  v.shells = run.shells;
  v.status = sampling::tail_verdict(run.shells, plan.stabilization_window);
  if (v.status == VerdictStatus::FailsWithWitness) {
    v.witness = run.best_violation.back()->witness;
    v.reason = "violations in each of the last " +
               std::to_string(std::min(plan.stabilization_window, run.shells.size())) + " shells";
  } else if (v.status == VerdictStatus::Holds) {
    v.reason = "no violation in the last " +
               std::to_string(std::min(plan.stabilization_window, run.shells.size())) + " shells";
  } else {
    v.reason = "violations in some but not all of the last shells";
  }
  return v;
}

double eval_at(const BlackBoxFunction& f, const std::vector<double>& x) {
  const double v = f(x);
  if (std::isinf(v) && v < 0) throw Error(ErrorCode::EvaluationFailure, "function value -infinity");
  return v;
}

double base_value(const BlackBoxFunction& f, const std::vector<double>& x) {
  require_same_dim(x.size(), f.dim(), "probe point");
  const double v = eval_at(f, x);
  if (!std::isfinite(v)) throw Error(ErrorCode::PointOutsideDomain, "probe point outside the domain");
  return v;
}

// Difference quotient sample of the lower Dini derivative.
struct Quotient {
  bool evaluated = false;
  double t = 0, q = kInf;
  std::vector<double> u;
};

Quotient dini_sample(const BlackBoxFunction& f, const std::vector<double>& x, double fx, double scale,
                     const std::vector<double>& h, double delta, std::size_t j, sampling::Stream& s,
                     const SamplingPlan& plan) {
  Quotient out;
  const auto w = s.in_unit_ball(x.size());
  const double tau = s.uniform(), sigma = s.uniform();
  out.u = axpy(h, delta, w);
  // Even samples use t comparable to delta; odd ones reach down to delta^4.
  out.t = (j % 2 == 0) ? delta * std::max(tau, 1.0 / 16.0) : std::pow(delta, 1.0 + 3.0 * sigma);
  if (scale > 0 && out.t * inf_norm(out.u) < plan.min_relative_step * scale) return out;
  out.evaluated = true;
  const double fy = eval_at(f, axpy(x, out.t, out.u));
  out.q = std::isinf(fy) ? kInf : (fy - fx) / out.t;
  return out;
}

std::vector<double> breakpoint_near(double center, double delta, std::size_t sign_hint, double draw) {
  // Breakpoints 1/m (either sign) inside (center - 0.9 delta, center + 0.9 delta).
  const double lo = center - 0.9 * delta, hi = center + 0.9 * delta;
  double side = (sign_hint % 2 == 0) ? 1.0 : -1.0;
  if (lo > 0) side = 1.0;
  if (hi < 0) side = -1.0;
  const double a = side > 0 ? std::max(lo, 0.0) : std::max(-hi, 0.0);  // |p| range [a, b]
  const double b = side > 0 ? hi : -lo;
  if (b <= 0 || b > 1e300) return {};
  const double m_lo = std::ceil(1.0 / b);
  const double m_hi = a > 0 ? std::floor(1.0 / a) : m_lo + 4.0 * m_lo;
  if (m_lo > m_hi || m_lo > 1e15) return {};
  const double span = std::min(m_hi - m_lo, 4.0 * m_lo);
  const double m = std::max(m_lo, 2.0) + std::floor(draw * (span + 1.0));
  if (m > m_hi && a > 0) return {};
  return {side, 1.0 / m};
}

struct RegularityTerms {
  double lhs = 0, rhs = 0, magnitude = 0;
};

RegularityTerms regularity_terms(const BlackBoxFunction& f, const std::vector<double>& x,
                                 const std::vector<double>& y, double t, double eps, const NormSpec& norm) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - t) * y[i] + t * x[i];
  const double fx = eval_at(f, x), fy = eval_at(f, y), fz = eval_at(f, z);
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  const double slack_term = eps * t * (1.0 - t) * norm_value_double(norm, diff);
  RegularityTerms r;
  r.lhs = fz;
  r.rhs = (1.0 - t) * fy + t * fx + slack_term;
  r.magnitude = std::fabs(fz) + std::fabs((1.0 - t) * fy) + std::fabs(t * fx) + slack_term;
  return r;
}

SampleOutcome regularity_outcome(const RegularityTerms& r, Witness w, std::vector<double> key) {
  SampleOutcome o;
  if (std::isinf(r.rhs)) return o;  // +infinity on the right: nothing to test
  o.evaluated = true;
  o.value = std::isinf(r.lhs) ? -kInf : r.rhs - r.lhs;
  o.violation = std::isinf(r.lhs) || violates(o.value, r.magnitude);
  if (o.violation) {
    w.margin = -o.value;
    o.witness = std::move(w);
    o.key = std::move(key);
  }
  return o;
}

std::vector<double> concat(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

struct MembershipTerms {
  double slack = 0, magnitude = 0;
  bool finite = false;
};

MembershipTerms membership_terms(const BlackBoxFunction& f, const std::vector<double>& x, double fx,
                                 const std::vector<double>& xstar, double eps, double alpha,
                                 const NormSpec& norm, const std::vector<double>& y) {
  MembershipTerms m;
  const double fy = eval_at(f, y);
  if (std::isinf(fy)) return m;
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = y[i] - x[i];
  const double lin = dot_d(xstar, d), pen = (alpha + eps) * norm_value_double(norm, d);
  m.finite = true;
  m.slack = (fy - fx) - (lin - pen);
  m.magnitude = std::fabs(fy) + std::fabs(fx) + std::fabs(lin) + pen;
  return m;
}

// Exact set-valued map sampled by the gap probe; the signature identifies
// points with the same value of the map.
struct ExactMap {
  std::function<std::optional<Polyhedron>(const RationalVector&)> value;  // nullopt: empty by domain
  std::function<std::vector<std::size_t>(const RationalVector&)> signature;
};

std::vector<std::size_t> pa_signature(const PAConvexFunction& f, const RationalVector& x) {
  std::vector<std::size_t> sig = active_pieces(f, x);
  sig.push_back(static_cast<std::size_t>(-1));
  const auto& hs = f.domain().hrep();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Rational lhs = dot(hs[i].normal, x);
    if (lhs > hs[i].offset) return {static_cast<std::size_t>(-2)};  // outside the domain
    if (lhs == hs[i].offset) sig.push_back(i);
  }
  return sig;
}

ExactMap pa_map(const PAConvexFunction& h) {
  return {[h](const RationalVector& x) -> std::optional<Polyhedron> {
            if (!in_domain(h, x)) return std::nullopt;
            return subdifferential_at(h, x);
          },
          [h](const RationalVector& x) { return pa_signature(h, x); }};
}

ExactMap dc_map(const DCFunction& f) {
  return {[f](const RationalVector& x) -> std::optional<Polyhedron> {
            if (!in_domain(f.g(), x)) return std::nullopt;
            return dc_dini_subdifferential(f, x, 0, 0, NormSpec::l1()).set;
          },
          [f](const RationalVector& x) {
            auto sig = pa_signature(f.g(), x);
            sig.push_back(static_cast<std::size_t>(-3));
            auto sh = pa_signature(f.h(), x);
            sig.insert(sig.end(), sh.begin(), sh.end());
            return sig;
          }};
}

Extended gap_or_infinity(const std::optional<Polyhedron>& a, const std::optional<Polyhedron>& b,
                         const NormSpec& norm) {
  if (!a || !b) return Extended::infinity();
  return gap(*a, *b, norm);
}

RationalVector shifted(const RationalVector& x, const std::vector<double>& offset) {
  RationalVector y = x;
  for (std::size_t i = 0; i < y.dim(); ++i) y[i] += rational_from_double(offset[i]);
  return y;
}

ProbeVerdict gap_probe(const ExactMap& map, const RationalVector& x, const Rational& eps, const SamplingPlan& plan,
                       const NormSpec& norm) {
  if (sgn(eps) <= 0) throw Error(ErrorCode::InvalidArgument, "gap probe needs eps > 0");
  plan.validate();
  const auto base = map.value(x);
  if (!base) throw Error(ErrorCode::PointOutsideDomain, "gap probe base point outside the domain");
  const double eps_d = eps.get_d();

  // Exact gaps are computed sequentially and cached by signature; the random
  // draws are the same as in the parallel probes.
  std::map<std::vector<std::size_t>, Extended> cache;
  ShellRun run;
  for (double radius : plan.shell_radii) {
    ShellStat stat{radius, kInf, 0, 0};
    std::optional<SampleOutcome> best;
    for (std::size_t j = 0; j < plan.samples_per_shell; ++j) {
      sampling::Stream s(plan.seed, kTagGap, j);
      auto w = s.in_unit_ball(x.dim());
      for (auto& c : w) c *= radius;
      const RationalVector y = shifted(x, w);
      const auto sig = map.signature(y);
      auto it = cache.find(sig);
      if (it == cache.end()) it = cache.emplace(sig, gap_or_infinity(base, map.value(y), norm)).first;
      const Extended& g = it->second;
      ++stat.samples;
      const double gd = g.is_infinite() ? kInf : g.value().get_d();
      stat.inf = std::min(stat.inf, gd);
      if (!(g.is_infinite() || eps <= g.value())) continue;
      ++stat.violations;
      SampleOutcome o;
      o.evaluated = o.violation = true;
      o.key = w;
      o.witness.fields = {{"offset", w}, {"gap", {gd}}};
      o.witness.margin = g.is_infinite() ? kInf : gd - eps_d;
      if (!best || o.key < best->key) best = std::move(o);
    }
    run.shells.push_back(stat);
    run.best_violation.push_back(std::move(best));
  }
  return verdict_from(run, plan);
}

bool replay_gap(const ExactMap& map, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                const Witness& w) {
  const auto base = map.value(x);
  if (!base) return false;
  const Extended g = gap_or_infinity(base, map.value(shifted(x, w.get("offset"))), norm);
  return g.is_infinite() || eps <= g.value();
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> SamplingPlan::dyadic_radii(int first, int last) {
  std::vector<double> r;
  for (int k = first; k <= last; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

void SamplingPlan::validate() const {
  if (shell_radii.empty()) throw Error(ErrorCode::InvalidArgument, "sampling plan has no shells");
  for (std::size_t i = 0; i < shell_radii.size(); ++i) {
    if (!(shell_radii[i] > 0) || (i > 0 && !(shell_radii[i] < shell_radii[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "shell radii must be positive and strictly decreasing");
    }
  }
  if (samples_per_shell == 0) throw Error(ErrorCode::InvalidArgument, "samples_per_shell must be positive");
  if (stabilization_window == 0) throw Error(ErrorCode::InvalidArgument, "stabilization_window must be positive");
  if (!(stabilization_tol > 0)) throw Error(ErrorCode::InvalidArgument, "stabilization_tol must be positive");
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Holds: return "holds";
    case VerdictStatus::FailsWithWitness: return "fails_with_witness";
    case VerdictStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(RegularityMode mode) {
  switch (mode) {
    case RegularityMode::Convex: return "convex";
    case RegularityMode::Starshaped: return "starshaped";
    case RegularityMode::Directional: return "directional";
  }
  return "?";
}

RegularityMode parse_regularity_mode(const std::string& text) {
  for (auto m : {RegularityMode::Convex, RegularityMode::Starshaped, RegularityMode::Directional}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::ParseError, "unknown regularity mode '" + text + "'");
}

const std::vector<double>& Witness::get(const std::string& name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::InvalidArgument, "witness has no field '" + name + "'");
}

double norm_value_double(const NormSpec& norm, const std::vector<double>& v) {
  double acc = 0;
  switch (norm.kind) {
    case NormKind::L1:
      for (double x : v) acc += std::fabs(x);
      return acc;
    case NormKind::Linf: return inf_norm(v);
    case NormKind::L2Approx:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
  }
  return acc;
}

namespace sampling {

Stream::Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index)
    : state_(seed ^ (tag * 0x9e3779b97f4a7c15ULL) ^ (index * 0xd1b54a32d192ed03ULL)) {
  next();
}

std::uint64_t Stream::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Stream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<double> Stream::in_unit_ball(std::size_t n) {
  if (n == 1) return {2.0 * uniform() - 1.0};
  std::vector<double> g(n);
  double norm2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = 1.0 - uniform(), u2 = uniform();
    g[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    norm2 += g[i] * g[i];
  }
  const double scale = norm2 > 0 ? std::pow(uniform(), 1.0 / static_cast<double>(n)) / std::sqrt(norm2) : 0.0;
  for (auto& x : g) x *= scale;
  return g;
}

VerdictStatus tail_verdict(const std::vector<ShellStat>& shells, std::size_t window) {
  const std::size_t k = std::min(window, shells.size());
  std::size_t clean = 0, dirty = 0;
  for (std::size_t i = shells.size() - k; i < shells.size(); ++i) {
    (shells[i].violations == 0 ? clean : dirty)++;
  }
  if (k > 0 && clean == k) return VerdictStatus::Holds;
  if (k > 0 && dirty == k) return VerdictStatus::FailsWithWitness;
  return VerdictStatus::Inconclusive;
}

}  // namespace sampling

// ---------------------------------------------------------------------------

DiniEstimate dini_directional_estimate(const BlackBoxFunction& f, const std::vector<double>& x,
                                       const std::vector<double>& h, const SamplingPlan& plan) {
  plan.validate();
  require_same_dim(h.size(), f.dim(), "direction");
  const double fx = base_value(f, x);
  const double scale = std::max(inf_norm(x), std::fabs(fx));

  DiniEstimate est;
  std::optional<std::pair<std::vector<double>, Witness>> witness;  // (key, witness) from the latest diverging shell
  for (double delta : plan.shell_radii) {
    auto samples = sampling::parallel_map<Quotient>(plan.samples_per_shell, plan.threads, [&](std::size_t j) {
      sampling::Stream s(plan.seed, kTagDini, j);
      return dini_sample(f, x, fx, scale, h, delta, j, s, plan);
    });
    ShellStat stat{delta, kInf, 0, 0};
    std::optional<std::pair<std::vector<double>, Witness>> shell_witness;
    for (const auto& q : samples) {
      if (!q.evaluated) continue;
      ++stat.samples;
      stat.inf = std::min(stat.inf, q.q);
      if (q.q < plan.divergence_threshold) {
        ++stat.violations;
        std::vector<double> key = concat({{q.t}, q.u});
        if (!shell_witness || key < shell_witness->first) {
          Witness w;
          w.fields = {{"t", {q.t}}, {"u", q.u}, {"quotient", {q.q}}};
          w.margin = plan.divergence_threshold - q.q;
          shell_witness.emplace(std::move(key), std::move(w));
        }
      }
    }
    if (shell_witness) witness = std::move(shell_witness);
    est.shells.push_back(stat);
  }

  // Largest minorant of the raw infima that is non-decreasing as delta
  // shrinks, matching the sup over delta of the inf over each shell.
  est.envelope.assign(est.shells.size(), kInf);
  for (std::size_t k = est.shells.size(); k-- > 0;) {
    est.envelope[k] = k + 1 == est.shells.size() ? est.shells[k].inf
                                                  : std::min(est.shells[k].inf, est.envelope[k + 1]);
  }
  for (std::size_t k = 0; k < est.shells.size(); ++k) {
    const double e = est.envelope[k];
    double r = e;
    if (k > 0 && std::isfinite(e) && std::isfinite(est.envelope[k - 1])) {
      const double d0 = plan.shell_radii[k - 1], d1 = plan.shell_radii[k];
      r = e + (e - est.envelope[k - 1]) * d1 / (d0 - d1);
    }
    est.extrapolated.push_back(r);
  }

  if (witness) {
    est.diverged = true;
    est.estimate = -kInf;
    est.divergence_witness = std::move(witness->second);
    return est;
  }

  const std::size_t w = plan.stabilization_window;
  for (std::size_t k = 0; k < est.extrapolated.size(); ++k) {
    if (k + 1 < w) continue;
    double lo = kInf, hi = -kInf;
    for (std::size_t i = k + 1 - w; i <= k; ++i) {
      lo = std::min(lo, est.extrapolated[i]);
      hi = std::max(hi, est.extrapolated[i]);
    }
    const double r = est.extrapolated[k];
    if (std::isinf(r) && lo == hi) {
      est.stable = true;
      est.estimate = r;
      return est;
    }
    if (std::isfinite(r) && hi - lo <= plan.stabilization_tol * std::max(1.0, std::fabs(r))) {
      est.stable = true;
      est.estimate = r;
      return est;
    }
  }
  est.estimate = est.extrapolated.back();
  return est;
}

ProbeVerdict calmness_probe(const BlackBoxFunction& f, const std::vector<double>& x, const SamplingPlan& plan) {
  ProbeVerdict v;
  if (f.is_piecewise_affine()) {
    base_value(f, x);
    v.status = VerdictStatus::Holds;
    v.reason = "locally Lipschitz";
    return v;
  }
  const DiniEstimate est = dini_directional_estimate(f, x, std::vector<double>(f.dim(), 0.0), plan);
  v.shells = est.shells;
  if (est.diverged) {
    v.status = VerdictStatus::FailsWithWitness;
    v.witness = est.divergence_witness;
    v.reason = "difference quotient along 0 below the divergence threshold";
  } else if (est.stable && std::fabs(est.estimate) <= std::sqrt(plan.stabilization_tol)) {
    v.status = VerdictStatus::Holds;
    v.reason = "lower derivative along 0 stabilized at 0";
  } else {
    v.status = VerdictStatus::Inconclusive;
    v.reason = "lower derivative along 0 did not stabilize near 0";
  }
  return v;
}

ProbeVerdict eps_subgradient_membership_probe(const BlackBoxFunction& f, const std::vector<double>& x,
                                              const std::vector<double>& xstar, double eps, double alpha,
                                              const SamplingPlan& plan, const NormSpec& norm) {
  if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (eps < 0) throw Error(ErrorCode::NegativeEps, "eps must be nonnegative");
  require_same_dim(xstar.size(), f.dim(), "subgradient");
  const double fx = base_value(f, x);
  const ShellRun run = run_shells(plan, kTagMembership, [&](double delta, std::size_t, sampling::Stream& s) {
    const auto w = s.in_unit_ball(x.size());
    const auto y = axpy(x, delta, w);
    const MembershipTerms m = membership_terms(f, x, fx, xstar, eps, alpha, norm, y);
    SampleOutcome o;
    if (!m.finite) return o;
    o.evaluated = true;
    o.value = m.slack;
    o.violation = violates(m.slack, m.magnitude);
    if (o.violation) {
      o.key = y;
      o.witness.fields = {{"x", y}};
      o.witness.margin = -m.slack;
    }
    return o;
  });
  ProbeVerdict v = verdict_from(run, plan);
  if (v.status == VerdictStatus::Holds) {
    const ProbeVerdict calm = calmness_probe(f, x, plan);
    if (calm.status != VerdictStatus::Holds) {
      v.status = VerdictStatus::Inconclusive;
      v.reason = "no violation found, but calmness is not established";
    }
  }
  return v;
}

ProbeVerdict approx_regularity_probe(const BlackBoxFunction& f, const std::vector<double>& x, double eps,
                                     RegularityMode mode, const SamplingPlan& plan, const NormSpec& norm,
                                     const std::vector<double>& u) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  base_value(f, x);
  const std::size_t n = x.size();
  if (mode == RegularityMode::Directional) {
    require_same_dim(u.size(), n, "direction");
    if (std::fabs(norm_value_double(norm, u) - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "direction must lie on the unit sphere");
    }
  }
  const auto hints = f.breakpoint_hints();

  std::uint64_t tag = kTagConvex;
  if (mode == RegularityMode::Starshaped) tag = kTagStar;
  if (mode == RegularityMode::Directional) tag = kTagDirectional;

  const ShellRun run = run_shells(plan, tag, [&](double delta, std::size_t j, sampling::Stream& s) {
    const auto w1 = s.in_unit_ball(n);
    const auto w2 = s.in_unit_ball(n);
    const double tau = s.uniform(), tau2 = s.uniform(), draw = s.uniform(), draw2 = s.uniform();
    std::vector<double> xs = axpy(x, delta, w1), ys = axpy(x, delta, w2);
    double t = tau;

    // Every fourth sample straddles a known breakpoint of the expression.
    if (mode != RegularityMode::Directional && !hints.empty() && j % 4 == 3) {
      const auto& hint = hints[(j / 4) % hints.size()];
      const std::size_t i = hint.index;
      const auto bp = breakpoint_near(x[i], delta, j / 8, draw);
      if (!bp.empty()) {
        const double side = bp[0], p = bp[1];
        const double gamma = p * std::ldexp(1.0, -10 - static_cast<int>(40.0 * draw2));
        xs = x;
        ys = x;
        if (mode == RegularityMode::Convex) {
          ys[i] = side * (p - gamma);
          xs[i] = side * (p + gamma);
          t = 0.5 + 0.25 * tau;
        } else {
          xs[i] = side * (p - gamma);
        }
      }
    }

    if (mode == RegularityMode::Convex) {
      const RegularityTerms r = regularity_terms(f, xs, ys, t, eps, norm);
      Witness w;
      w.fields = {{"x", xs}, {"y", ys}, {"t", {t}}};
      return regularity_outcome(r, std::move(w), concat({xs, ys, {t}}));
    }
    if (mode == RegularityMode::Starshaped) {
      const RegularityTerms r = regularity_terms(f, xs, x, t, eps, norm);
      Witness w;
      w.fields = {{"x", xs}, {"t", {t}}};
      return regularity_outcome(r, std::move(w), concat({xs, {t}}));
    }
    const double sdist = delta * std::max(tau2, 0x1.0p-53);
    const auto v = axpy(u, delta, w1);
    const auto xd = axpy(x, sdist, v);
    const RegularityTerms r = regularity_terms(f, xd, x, t, eps, norm);
    Witness w;
    w.fields = {{"s", {sdist}}, {"v", v}, {"t", {t}}};
    return regularity_outcome(r, std::move(w), concat({{sdist}, v, {t}}));
  });
  return verdict_from(run, plan);
}

ProbeVerdict gap_continuity_probe(const PAConvexFunction& h, const RationalVector& x, const Rational& eps,
                                  const SamplingPlan& plan, const NormSpec& norm) {
  return gap_probe(pa_map(h), x, eps, plan, norm);
}

ProbeVerdict gap_continuity_probe(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                  const SamplingPlan& plan, const NormSpec& norm) {
  return gap_probe(dc_map(f), x, eps, plan, norm);
}

// ---------------------------------------------------------------------------

bool replay_calmness_witness(const BlackBoxFunction& f, const std::vector<double>& x, const Witness& w,
                             double threshold) {
  const double t = w.get("t").at(0);
  const double fx = base_value(f, x);
  const double fy = eval_at(f, axpy(x, t, w.get("u")));
  return std::isfinite(fy) && (fy - fx) / t < threshold;
}

bool replay_membership_witness(const BlackBoxFunction& f, const std::vector<double>& x,
                               const std::vector<double>& xstar, double eps, double alpha, const NormSpec& norm,
                               const Witness& w) {
  const double fx = base_value(f, x);
  const MembershipTerms m = membership_terms(f, x, fx, xstar, eps, alpha, norm, w.get("x"));
  return m.finite && violates(m.slack, m.magnitude);
}

bool replay_regularity_witness(const BlackBoxFunction& f, const std::vector<double>& x, double eps,
                               RegularityMode mode, const NormSpec& norm, const Witness& w) {
  RegularityTerms r;
  const double t = w.get("t").at(0);
  switch (mode) {
    case RegularityMode::Convex: r = regularity_terms(f, w.get("x"), w.get("y"), t, eps, norm); break;
    case RegularityMode::Starshaped: r = regularity_terms(f, w.get("x"), x, t, eps, norm); break;
    case RegularityMode::Directional:
      r = regularity_terms(f, axpy(x, w.get("s").at(0), w.get("v")), x, t, eps, norm);
      break;
  }
  if (std::isinf(r.rhs)) return false;
  return std::isinf(r.lhs) || violates(r.rhs - r.lhs, r.magnitude);
}

bool replay_gap_witness(const PAConvexFunction& h, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                        const Witness& w) {
  return replay_gap(pa_map(h), x, eps, norm, w);
}

bool replay_gap_witness(const DCFunction& f, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                        const Witness& w) {
  return replay_gap(dc_map(f), x, eps, norm, w);
}

}  // namespace subgrad
