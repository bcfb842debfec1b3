#include "subgrad/scenario.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "subgrad/calculus.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/optimality.hpp"
#include "subgrad/oracle.hpp"
#include "subgrad/pa_function.hpp"

namespace subgrad {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const std::set<std::string> kCommonKeys = {"kind", "name", "description", "seed", "norm", "plan"};

const std::map<std::string, std::set<std::string>> kKindKeys = {
    {"check", {"claim", "dc", "f", "g", "point", "eps", "eta", "mu", "eta_list", "variant"}},
    {"certify", {"problem", "point", "probe_eps"}},
    {"stardiff", {"A", "B"}},
    {"subdiff", {"function", "point", "eps", "eta"}},
    {"probe", {"probe", "function", "problem", "point", "direction", "xstar", "eps", "alpha", "mode", "u"}},
};

struct Context {
  const Json& s;
  fs::path base;
  const Overrides& ov;

  bool has(const char* key) const { return s.contains(key) && !s.at(key).is_null(); }

  Json input(const char* key) const {
    if (!has(key)) parse_fail(std::string("scenario needs '") + key + "'");
    const Json& v = s.at(key);
    if (v.is_object()) return v;
    if (v.is_string()) return load_json_file(base / v.get<std::string>());
    parse_fail(std::string("'") + key + "' must be a file name or an inline object");
  }

  Rational rational(const char* key, const std::optional<Rational>& over, const Rational& fallback) const {
    Rational r = over ? *over : has(key) ? rational_from_json(s.at(key)) : fallback;
    if (r < 0) throw Error(ErrorCode::NegativeEps, std::string("'") + key + "' must be non-negative");
    return r;
  }
  Rational eps() const { return rational("eps", ov.eps, Rational(0)); }
  Rational eta() const { return rational("eta", ov.eta, Rational(0)); }

  NormSpec norm() const {
    if (ov.norm) return *ov.norm;
    if (!has("norm")) return NormSpec::l1();
    if (!s.at("norm").is_string()) parse_fail("'norm' must be a string");
    return parse_norm(s.at("norm").get<std::string>());
  }

  RationalVector point(std::size_t dim) const {
    RationalVector x;
    if (ov.point) {
      x = *ov.point;
    } else {
      if (!has("point")) parse_fail("scenario needs 'point'");
      x = vector_from_json(s.at("point"));
    }
    if (x.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "point has dimension " + std::to_string(x.dim()) + ", expected " + std::to_string(dim));
    }
    return x;
  }

  std::vector<double> doubles(const char* key, std::size_t dim) const {
    if (!has(key)) parse_fail(std::string("scenario needs '") + key + "'");
    auto v = vector_from_json(s.at(key)).to_doubles();
    if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, std::string("'") + key + "' has the wrong dimension");
    return v;
  }

  std::vector<Rational> rational_list(const char* key) const {
    return vector_from_json(s.at(key)).coords();
  }

  SamplingPlan plan() const {
    SamplingPlan p;
    auto read_seed = [](const Json& j) -> std::uint64_t {
      if (j.is_number_unsigned()) return j.get<std::uint64_t>();
      if (j.is_string()) {
        try {
          return std::stoull(j.get<std::string>(), nullptr, 0);
        } catch (const std::exception&) {
        }
      }
      parse_fail("bad seed " + j.dump());
    };
    if (has("plan")) {
      const Json& pj = s.at("plan");
      if (!pj.is_object()) parse_fail("'plan' must be an object");
      static const std::set<std::string> keys = {"radii",      "samples", "seed",    "window",
                                                 "tol",        "divergence", "min_relative_step", "threads"};
      for (const auto& [k, v] : pj.items()) {
        if (!keys.count(k)) parse_fail("unknown plan key '" + k + "'");
      }
      if (pj.contains("radii")) {
        const Json& r = pj.at("radii");
        if (r.is_object()) {
          p.shell_radii = SamplingPlan::dyadic_radii(r.at("first").get<int>(), r.at("last").get<int>());
        } else {
          p.shell_radii = doubles_from_json(r);
        }
      }
      if (pj.contains("samples")) p.samples_per_shell = pj.at("samples").get<std::size_t>();
      if (pj.contains("seed")) p.seed = read_seed(pj.at("seed"));
      if (pj.contains("window")) p.stabilization_window = pj.at("window").get<std::size_t>();
      if (pj.contains("tol")) p.stabilization_tol = double_from_json(pj.at("tol"));
      if (pj.contains("divergence")) p.divergence_threshold = double_from_json(pj.at("divergence"));
      if (pj.contains("min_relative_step")) p.min_relative_step = double_from_json(pj.at("min_relative_step"));
      if (pj.contains("threads")) p.threads = pj.at("threads").get<unsigned>();
    }
    if (has("seed")) p.seed = read_seed(s.at("seed"));
    if (ov.seed) p.seed = *ov.seed;
    p.validate();
    return p;
  }
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string hypothesis_text(const HypothesisReport& report) {
  std::ostringstream os;
  os << "hypotheses:\n";
  if (report.empty()) os << "  (none)\n";
  for (const auto& h : report) {
    os << "  " << h.name << ": " << to_string(h.status) << " [" << to_string(h.provenance) << "]";
    if (!h.detail.empty()) os << " " << h.detail;
    os << "\n";
  }
  return os.str();
}

std::string relation(CertVerdict v) {
  switch (v) {
    case CertVerdict::Equal: return "=";
    case CertVerdict::StrictInclusion: return "strictly inside";
    case CertVerdict::Fails: return "not inside";
  }
  return "?";
}

std::string witness_text(const std::optional<Witness>& w) {
  if (!w) return "none";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [name, values] : w->fields) {
    if (!first) os << " ";
    first = false;
    os << name << "=(";
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
    os << ")";
  }
  os << " margin=" << w->margin;
  return os.str();
}

std::string shells_text(const std::vector<ShellStat>& shells) {
  std::ostringstream os;
  os.precision(10);
  for (const auto& sh : shells) {
    os << "  radius " << sh.radius << ": inf " << sh.inf << ", " << sh.violations << "/" << sh.samples
       << " violations\n";
  }
  return os.str();
}

ScenarioResult run_check(const Context& c) {
  std::string claim_text = c.s.at("claim").is_string() ? c.s.at("claim").get<std::string>() : "";
  if (claim_text == "cor12" || claim_text == "Cor12") {
    const std::string v = c.has("variant") ? c.s.at("variant").get<std::string>() : "a";
    if (v != "a" && v != "b") parse_fail("'variant' must be \"a\" or \"b\"");
    claim_text += v;
  }
  const ClaimId claim = parse_claim_id(claim_text);
  const NormSpec norm = c.norm();
  Certificate cert;
  if (claim == ClaimId::SumRule12) {
    PAConvexFunction f = pa_function_from_json(c.input("f"));
    PAConvexFunction g = pa_function_from_json(c.input("g"));
    if (f.dim() != g.dim()) throw Error(ErrorCode::DimensionMismatch, "f and g differ in dimension");
    cert = check_sum_rule(f, g, c.point(f.dim()), c.eps(), c.eta(), norm);
  } else {
    DCFunction f = dc_function_from_json(c.input("dc"));
    const RationalVector x = c.point(f.dim());
    switch (claim) {
      case ClaimId::Equality22:
      case ClaimId::Equality26: cert = check_difference_formula(f, x, c.eps(), c.eta(), norm); break;
      case ClaimId::Inclusion13: cert = check_inclusion13(f, x, c.eps(), c.eta(), norm); break;
      case ClaimId::Intersection27: {
        if (!c.has("mu")) parse_fail("intersection27 needs 'mu'");
        cert = check_intersection_formula(f, x, c.eps(), c.rational_list("mu"), norm);
        break;
      }
      case ClaimId::Cor11: {
        std::vector<Rational> etas = {Rational(0), Rational(1, 2), Rational(1)};
        if (c.has("eta_list")) etas = c.rational_list("eta_list");
        cert = check_corollary11(f, x, etas, norm);
        break;
      }
      case ClaimId::Cor12a:
      case ClaimId::Cor12b: cert = check_corollary12(f, x, c.eps(), norm, claim == ClaimId::Cor12a ? Cor12Variant::A : Cor12Variant::B); break;
      case ClaimId::LocalMinNecessary: cert = local_min_necessary(f, x); break;
      case ClaimId::SumRule12: break;
    }
  }
  ScenarioResult r;
  r.kind = "check";
  r.claim = to_string(cert.claim);
  r.verdict = to_string(cert.verdict);
  if (cert.claim == ClaimId::Cor11) {
    // The claim is the equivalence of the statements, not the inclusion itself.
    const bool all_true = std::all_of(cert.statements.begin(), cert.statements.end(), [](const Statement& st) { return st.value; });
    r.verdict = !cert.claim_holds() ? "not_equivalent" : all_true ? "equivalent_all_true" : "equivalent_all_false";
  }
  if (cert.claim_holds()) {
    r.exit_code = kExitHolds;
  } else if (cert.is_equality_claim() && !all_green(cert.hypotheses)) {
    r.exit_code = kExitInconclusive;
  } else {
    r.exit_code = kExitFails;
  }
  r.report = certificate_to_json(cert);

  std::ostringstream os;
  os << "claim: " << to_string(cert.claim) << "\n";
  os << "parameters:";
  for (const auto& [k, v] : cert.parameters) os << " " << k << "=" << v;
  os << "\n";
  const std::string lhs = describe_set(cert.lhs), rhs = describe_set(cert.rhs);
  os << "lhs: " << lhs << "\n";
  os << "rhs: " << rhs << "\n";
  os << "verdict: " << to_string(cert.verdict) << " (" << lhs << " " << relation(cert.verdict) << " " << rhs << ")\n";
  os << "witness: " << (cert.witness ? format_vector(*cert.witness) : std::string("none")) << "\n";
  for (const auto& st : cert.statements) os << "statement " << st.name << ": " << (st.value ? "true" : "false") << "\n";
  os << "claim holds: " << yes_no(cert.claim_holds()) << "\n";
  os << "theorem-certified: " << yes_no(cert.theorem_certified()) << "\n";
  os << hypothesis_text(cert.hypotheses);
  if (!cert.provenance.empty()) {
    os << "provenance:\n";
    for (const auto& [k, v] : cert.provenance) os << "  " << k << ": " << v << "\n";
  }
  r.text = os.str();
  return r;
}

ScenarioResult run_certify(const Context& c) {
  ProblemInstance p = problem_from_json(c.input("problem"));
  const RationalVector x = c.point(p.objective.dim());
  const OptimalityCertificate cert = certify_blunt_minimizer(p, x);
  ScenarioResult r;
  r.kind = "certify";
  r.claim = "blunt_minimizer";
  r.verdict = to_string(cert.verdict);
  r.exit_code = cert.verdict == BluntVerdict::BluntMinimizerAllEps ? kExitHolds
                : cert.verdict == BluntVerdict::NotBluntMinimizer  ? kExitFails
                                                                   : kExitInconclusive;
  r.report = optimality_certificate_to_json(cert);
  const NormSpec norm = c.norm();
  if (cert.descent) {
    r.report["descent_replays"] = replay_descent_witness(p, x, *cert.descent, Rational(1, 2), norm);
  }

  std::ostringstream os;
  os << "claim: blunt_minimizer at " << format_vector(x) << "\n";
  os << "verdict: " << to_string(cert.verdict) << "\n";
  os << "feasible: " << yes_no(cert.feasible_at) << "\n";
  os << "qualification: " << to_string(cert.qualification.status) << " " << cert.qualification.description << "\n";
  os << "normal cone (direct): " << describe_set(cert.normal_cone_direct) << "\n";
  if (cert.normal_cone_lagrange) os << "normal cone (multipliers): " << describe_set(*cert.normal_cone_lagrange) << "\n";
  os << "routes agree: " << yes_no(cert.routes_agree) << "\n";
  os << "dh inside dg + N(A): " << yes_no(cert.inclusion28.holds);
  if (cert.inclusion28.witness) os << " (vertex " << format_vector(*cert.inclusion28.witness) << " outside)";
  os << "\n";
  os << "dh inside d(g + indicator A): " << yes_no(cert.inclusion30.holds);
  if (cert.inclusion30.witness) os << " (vertex " << format_vector(*cert.inclusion30.witness) << " outside)";
  os << "\n";
  if (cert.descent) {
    os << "descent: direction " << format_vector(cert.descent->direction) << " rate "
       << format_rational(cert.descent->rate) << " step " << format_rational(cert.descent->step) << "\n";
  }
  os << hypothesis_text(cert.hypotheses);

  if (c.has("probe_eps")) {
    const SamplingPlan plan = c.plan();
    Json probes = Json::array();
    for (const auto& e : c.rational_list("probe_eps")) {
      const ProbeVerdict v = blunt_min_probe(p, x, e, plan, norm);
      Json pj = probe_verdict_to_json(v);
      pj["eps"] = rational_to_json(e);
      if (v.witness) pj["witness_replays"] = replay_blunt_witness(p, x, e, norm, *v.witness);
      probes.push_back(pj);
      os << "probe eps=" << format_rational(e) << ": " << to_string(v.status) << "\n";
    }
    r.report["probes"] = probes;
  }
  r.text = os.str();
  return r;
}

ScenarioResult run_stardiff(const Context& c) {
  const Polyhedron a = polyhedron_from_json(c.input("A"));
  const Polyhedron b = polyhedron_from_json(c.input("B"));
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "A and B differ in dimension");
  const Polyhedron d = canonical(star_difference(a, b));
  ScenarioResult r;
  r.kind = "stardiff";
  r.claim = "stardiff";
  r.verdict = "computed";
  r.exit_code = kExitHolds;
  r.report = polyhedron_to_json(d);
  r.text = r.report.dump(2) + "\n";
  return r;
}

ScenarioResult run_subdiff(const Context& c) {
  const AnyFunction any = function_from_json(c.input("function"));
  const NormSpec norm = c.norm();
  const Rational eps = c.eps();
  ScenarioResult r;
  r.kind = "subdiff";
  r.claim = "subdiff";
  r.verdict = "computed";
  r.exit_code = kExitHolds;
  std::ostringstream os;
  if (const auto* f = std::get_if<PAConvexFunction>(&any)) {
    const RationalVector x = c.point(f->dim());
    const Polyhedron s = canonical(eps_subdifferential_at(*f, x, eps, norm));
    r.report = {{"function", "pa_convex"}, {"eps", rational_to_json(eps)}, {"set", polyhedron_to_json(s)}};
    os << "eps-subdifferential at " << format_vector(x) << " (eps=" << format_rational(eps) << ", "
       << format_norm(norm) << "): " << describe_set(s) << "\n";
  } else if (const auto* f = std::get_if<DCFunction>(&any)) {
    const RationalVector x = c.point(f->dim());
    const Rational eta = c.eta();
    const DcSubdifferential d = dc_dini_subdifferential(*f, x, eps, eta, norm);
    const Polyhedron s = canonical(d.set);
    r.report = {{"function", "dc"},
                {"eps", rational_to_json(eps)},
                {"eta", rational_to_json(eta)},
                {"set", polyhedron_to_json(s)},
                {"hypothesis_report", hypotheses_to_json(d.hypotheses)}};
    os << "lower eps-subdifferential at " << format_vector(x) << " (eps=" << format_rational(eps)
       << ", eta=" << format_rational(eta) << ", " << format_norm(norm) << "): " << describe_set(s) << "\n";
    if (eta == 0) {
      const Polyhedron def = canonical(dc_definitional_subdifferential(*f, x, eps, norm));
      r.report["definitional"] = polyhedron_to_json(def);
      r.report["routes_agree"] = def == s;
      os << "definitional route: " << describe_set(def) << " (agree: " << yes_no(def == s) << ")\n";
    }
    os << hypothesis_text(d.hypotheses);
  } else {
    parse_fail("subdiff needs a pa_convex or dc function");
  }
  r.text = os.str();
  return r;
}

int probe_exit(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Holds: return kExitHolds;
    case VerdictStatus::FailsWithWitness: return kExitFails;
    case VerdictStatus::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

ScenarioResult probe_result(const std::string& name, const ProbeVerdict& v, std::optional<bool> replays) {
  ScenarioResult r;
  r.kind = "probe";
  r.claim = name;
  r.verdict = to_string(v.status);
  r.exit_code = probe_exit(v.status);
  r.report = probe_verdict_to_json(v);
  r.report["probe"] = name;
  if (replays) r.report["witness_replays"] = *replays;
  std::ostringstream os;
  os << "probe: " << name << "\n";
  os << "verdict: " << to_string(v.status) << "\n";
  if (!v.reason.empty()) os << "reason: " << v.reason << "\n";
  os << "witness: " << witness_text(v.witness) << "\n";
  if (replays) os << "witness replays: " << yes_no(*replays) << "\n";
  os << shells_text(v.shells);
  os << "hypotheses: sampled evidence, not a proof\n";
  r.text = os.str();
  return r;
}

ScenarioResult run_probe(const Context& c) {
  if (!c.has("probe") || !c.s.at("probe").is_string()) parse_fail("probe scenario needs 'probe'");
  const std::string name = c.s.at("probe").get<std::string>();
  const SamplingPlan plan = c.plan();
  const NormSpec norm = c.norm();

  if (name == "blunt") {
    ProblemInstance p = problem_from_json(c.input("problem"));
    const RationalVector x = c.point(p.objective.dim());
    const Rational eps = c.eps();
    const ProbeVerdict v = blunt_min_probe(p, x, eps, plan, norm);
    std::optional<bool> replays;
    if (v.witness) replays = replay_blunt_witness(p, x, eps, norm, *v.witness);
    return probe_result(name, v, replays);
  }

  const AnyFunction any = function_from_json(c.input("function"));
  if (name == "gap") {
    const Rational eps = c.eps();
    if (const auto* f = std::get_if<PAConvexFunction>(&any)) {
      const RationalVector x = c.point(f->dim());
      const ProbeVerdict v = gap_continuity_probe(*f, x, eps, plan, norm);
      std::optional<bool> replays;
      if (v.witness) replays = replay_gap_witness(*f, x, eps, norm, *v.witness);
      return probe_result(name, v, replays);
    }
    if (const auto* f = std::get_if<DCFunction>(&any)) {
      const RationalVector x = c.point(f->dim());
      const ProbeVerdict v = gap_continuity_probe(*f, x, eps, plan, norm);
      std::optional<bool> replays;
      if (v.witness) replays = replay_gap_witness(*f, x, eps, norm, *v.witness);
      return probe_result(name, v, replays);
    }
    parse_fail("gap probe needs a pa_convex or dc function");
  }

  const BlackBoxFunction f = as_blackbox(any);
  const RationalVector xr = c.point(f.dim());
  const std::vector<double> x = xr.to_doubles();

  if (name == "dini") {
    const std::vector<double> h = c.doubles("direction", f.dim());
    const DiniEstimate e = dini_directional_estimate(f, x, h, plan);
    ScenarioResult r;
    r.kind = "probe";
    r.claim = name;
    r.verdict = e.diverged ? "diverged" : e.stable ? "stable" : "unstable";
    r.exit_code = (e.diverged || e.stable) ? kExitHolds : kExitInconclusive;
    r.report = dini_estimate_to_json(e);
    r.report["probe"] = name;
    std::ostringstream os;
    os.precision(12);
    os << "probe: dini\nestimate: " << e.estimate << " (" << r.verdict << ")\n";
    // Exact value for comparison when the function is piecewise affine.
    const RationalVector hr = vector_from_json(c.s.at("direction"));
    std::optional<Extended> exact;
    if (const auto* pa = std::get_if<PAConvexFunction>(&any)) {
      if (in_domain_interior(*pa, xr)) exact = Extended(directional_derivative(*pa, xr, hr));
    } else if (const auto* dc = std::get_if<DCFunction>(&any)) {
      if (in_domain_interior(dc->g(), xr)) exact = dini_derivative(*dc, xr, hr);
    }
    if (exact) {
      r.report["exact"] = format_extended(*exact);
      os << "exact: " << format_extended(*exact) << "\n";
    }
    if (e.divergence_witness) os << "divergence witness: " << witness_text(e.divergence_witness) << "\n";
    os << shells_text(e.shells);
    r.text = os.str();
    return r;
  }
  if (name == "calmness") {
    const ProbeVerdict v = calmness_probe(f, x, plan);
    std::optional<bool> replays;
    if (v.witness) replays = replay_calmness_witness(f, x, *v.witness, plan.divergence_threshold);
    return probe_result(name, v, replays);
  }
  if (name == "membership") {
    const std::vector<double> xstar = c.doubles("xstar", f.dim());
    const double eps = c.eps().get_d();
    const double alpha = c.has("alpha") ? rational_from_json(c.s.at("alpha")).get_d() : 0.0;
    const ProbeVerdict v = eps_subgradient_membership_probe(f, x, xstar, eps, alpha, plan, norm);
    std::optional<bool> replays;
    if (v.witness) replays = replay_membership_witness(f, x, xstar, eps, alpha, norm, *v.witness);
    return probe_result(name, v, replays);
  }
  if (name == "regularity") {
    const RegularityMode mode =
        c.has("mode") ? parse_regularity_mode(c.s.at("mode").get<std::string>()) : RegularityMode::Convex;
    std::vector<double> u;
    if (mode == RegularityMode::Directional) u = c.doubles("u", f.dim());
    const double eps = c.eps().get_d();
    const ProbeVerdict v = approx_regularity_probe(f, x, eps, mode, plan, norm, u);
    std::optional<bool> replays;
    if (v.witness) replays = replay_regularity_witness(f, x, eps, mode, norm, *v.witness);
    ScenarioResult r = probe_result(name + ":" + to_string(mode), v, replays);
    return r;
  }
  parse_fail("unknown probe '" + name + "'");
}

Json error_report(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

ScenarioResult error_result(ErrorCode code, const std::string& message) {
  ScenarioResult r;
  r.exit_code = kExitInputError;
  r.kind = "error";
  r.claim = "-";
  r.verdict = "error";
  r.report = error_report(code, message);
  r.text = std::string("error: ") + message + "\n";
  return r;
}

}  // namespace

std::string describe_set(const Polyhedron& p0) {
  const Polyhedron p = canonical(p0);
  if (p.is_empty()) return "empty";
  if (p.dim() == 1) {
    const Extended hi = support_function(p, RationalVector{Rational(1)});
    const Extended lo = support_function(p, RationalVector{Rational(-1)});
    if (hi.is_finite() && lo.is_finite() && hi.value() == -lo.value()) return "{" + format_rational(hi.value()) + "}";
    const std::string l = lo.is_infinite() ? "(-inf" : "[" + format_rational(-lo.value());
    const std::string h = hi.is_infinite() ? "+inf)" : format_rational(hi.value()) + "]";
    return l + ", " + h;
  }
  if (p.is_whole_space()) return "R^" + std::to_string(p.dim());
  const Generators& g = p.vrep();
  std::string s = "conv{";
  for (std::size_t i = 0; i < g.vertices.size(); ++i) s += (i ? ", " : "") + format_vector(g.vertices[i]);
  s += "}";
  if (!g.rays.empty()) {
    s += " + cone{";
    for (std::size_t i = 0; i < g.rays.size(); ++i) s += (i ? ", " : "") + format_vector(g.rays[i]);
    s += "}";
  }
  return s;
}

ScenarioResult run_scenario(const Json& scenario, const fs::path& base_dir, const Overrides& overrides) {
  if (!scenario.is_object()) parse_fail("scenario must be a JSON object");
  if (!scenario.contains("kind") || !scenario.at("kind").is_string()) parse_fail("scenario needs a string 'kind'");
  const std::string kind = scenario.at("kind").get<std::string>();
  const auto allowed = kKindKeys.find(kind);
  if (allowed == kKindKeys.end()) parse_fail("unknown scenario kind '" + kind + "'");
  for (const auto& [key, value] : scenario.items()) {
    if (!kCommonKeys.count(key) && !allowed->second.count(key)) {
      parse_fail("key '" + key + "' is not valid for kind '" + kind + "'");
    }
  }
  const Context c{scenario, base_dir, overrides};
  if (kind == "check") {
    if (!c.has("claim")) parse_fail("check scenario needs 'claim'");
    return run_check(c);
  }
  if (kind == "certify") return run_certify(c);
  if (kind == "stardiff") return run_stardiff(c);
  if (kind == "subdiff") return run_subdiff(c);
  return run_probe(c);
}

ScenarioResult run_scenario_guarded(const Json& scenario, const fs::path& base_dir, const Overrides& overrides) {
  try {
    return run_scenario(scenario, base_dir, overrides);
  } catch (const Error& e) {
    return error_result(e.code(), e.what());
  } catch (const Json::exception& e) {
    return error_result(ErrorCode::ParseError, std::string("ParseError: ") + e.what());
  } catch (const std::exception& e) {
    return error_result(ErrorCode::InternalError, std::string("InternalError: ") + e.what());
  }
}

ScenarioResult run_scenario_file(const fs::path& path, const Overrides& overrides) {
  Json scenario;
  try {
    scenario = load_json_file(path);
  } catch (const Error& e) {
    return error_result(e.code(), e.what());
  }
  return run_scenario_guarded(scenario, path.parent_path(), overrides);
}

CorpusResult corpus_run(const fs::path& dir, const std::string& filter, unsigned jobs, const Overrides& overrides) {
  CorpusResult out;
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
      const std::string name = entry.path().filename().string();
      if (fnmatch(filter.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) {
    out.exit_code = kExitInputError;
    out.report = {{"filter", filter}, {"scenarios", Json::array()}, {"error", "no scenario files selected"}};
    out.text = "error: no scenario files in '" + dir.string() + "' match '" + filter + "'\n";
    return out;
  }

  const auto rows = sampling::parallel_map<CorpusRow>(files.size(), jobs == 0 ? 1 : jobs, [&](std::size_t i) {
    CorpusRow row;
    row.name = files[i].filename().string();
    const auto start = std::chrono::steady_clock::now();
    row.result = run_scenario_file(files[i], overrides);
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  });
  out.rows = rows;

  std::size_t passed = 0, failed = 0, inconclusive = 0, errors = 0;
  Json scenarios = Json::array();
  for (const auto& row : out.rows) {
    switch (row.result.exit_code) {
      case kExitHolds: ++passed; break;
      case kExitFails: ++failed; break;
      case kExitInconclusive: ++inconclusive; break;
      default: ++errors; break;
    }
    scenarios.push_back({{"name", row.name},
                         {"kind", row.result.kind},
                         {"claim", row.result.claim},
                         {"verdict", row.result.verdict},
                         {"exit_code", row.result.exit_code},
                         {"passed", row.passed()},
                         {"report", row.result.report}});
  }
  out.exit_code = errors ? kExitInputError : failed ? kExitFails : inconclusive ? kExitInconclusive : kExitHolds;
  out.report = {{"filter", filter},
                {"seed", overrides.seed ? Json(*overrides.seed) : Json(nullptr)},
                {"scenarios", scenarios},
                {"summary",
                 {{"total", out.rows.size()},
                  {"passed", passed},
                  {"failed", failed},
                  {"inconclusive", inconclusive},
                  {"errors", errors},
                  {"exit_code", out.exit_code}}}};

  std::size_t wn = 4, wc = 5, wv = 7;
  for (const auto& row : out.rows) {
    wn = std::max(wn, row.name.size());
    wc = std::max(wc, row.result.claim.size());
    wv = std::max(wv, row.result.verdict.size());
  }
  std::ostringstream os;
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  os << pad("name", wn) << "  " << pad("claim", wc) << "  " << pad("verdict", wv) << "  exit  wall\n";
  for (const auto& row : out.rows) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3fs", row.wall_seconds);
    os << pad(row.name, wn) << "  " << pad(row.result.claim, wc) << "  " << pad(row.result.verdict, wv) << "  "
       << pad(std::to_string(row.result.exit_code), 4) << "  " << wall << (row.passed() ? "" : "  <-- FAILED") << "\n";
  }
  os << out.rows.size() << " scenarios: " << passed << " passed, " << failed << " failed, " << inconclusive
     << " inconclusive, " << errors << " errors\n";
  out.text = os.str();
  return out;
}

}  // namespace subgrad
