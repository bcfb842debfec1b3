#include "subgrad/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "subgrad/errors.hpp"

namespace subgrad {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) parse_fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
  Json out = Json::array();
  for (const auto& [k, v] : pairs) out.push_back({{"name", k}, {"value", v}});
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("expected an array of name/value pairs");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : j) out.emplace_back(string_field(e, "name"), string_field(e, "value"));
  return out;
}

std::size_t dim_of(const Json& j) {
  const Json& d = field(j, "dim");
  if (!d.is_number_unsigned() && !(d.is_number_integer() && d.get<long long>() > 0))
    parse_fail("'dim' must be a positive integer");
  const auto n = d.get<std::size_t>();
  if (n == 0) parse_fail("'dim' must be a positive integer");
  return n;
}

RationalVector sized_vector(const Json& j, std::size_t dim, const char* what) {
  RationalVector v = vector_from_json(j);
  if (v.dim() != dim) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(v.dim()) +
                                                  ", expected " + std::to_string(dim));
  }
  return v;
}

HypothesisStatus parse_status(const std::string& s) {
  for (auto st : {HypothesisStatus::Holds, HypothesisStatus::Fails, HypothesisStatus::Unknown}) {
    if (s == to_string(st)) return st;
  }
  parse_fail("unknown hypothesis status '" + s + "'");
}

Provenance parse_provenance(const std::string& s) {
  for (auto p : {Provenance::ExactByConvexity, Provenance::Probe}) {
    if (s == to_string(p)) return p;
  }
  parse_fail("unknown provenance '" + s + "'");
}

CertVerdict parse_cert_verdict(const std::string& s) {
  for (auto v : {CertVerdict::Equal, CertVerdict::StrictInclusion, CertVerdict::Fails}) {
    if (s == to_string(v)) return v;
  }
  parse_fail("unknown verdict '" + s + "'");
}

VerdictStatus parse_verdict_status(const std::string& s) {
  for (auto v : {VerdictStatus::Holds, VerdictStatus::FailsWithWitness, VerdictStatus::Inconclusive}) {
    if (s == to_string(v)) return v;
  }
  parse_fail("unknown probe status '" + s + "'");
}

Json optional_vector(const std::optional<RationalVector>& v) { return v ? vector_to_json(*v) : Json(nullptr); }

Json inclusion_to_json(const InclusionResult& r) {
  return {{"holds", r.holds}, {"witness", optional_vector(r.witness)}};
}

Json shells_to_json(const std::vector<ShellStat>& shells) {
  Json out = Json::array();
  for (const auto& s : shells) {
    out.push_back({{"radius", double_to_json(s.radius)},
                   {"inf", double_to_json(s.inf)},
                   {"samples", s.samples},
                   {"violations", s.violations}});
  }
  return out;
}

}  // namespace

Json rational_to_json(const Rational& r) { return format_rational(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return parse_rational(j.dump());
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!std::isfinite(d)) parse_fail("non-finite rational");
    const std::string text = j.dump();
    // Short decimal literals are read as written, so 0.1 means 1/10.
    if (text.find_first_of("eE") == std::string::npos) return parse_rational(text);
    return rational_from_double(d);
  }
  parse_fail("expected a rational, got " + j.dump());
}

Json vector_to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& c : v.coords()) out.push_back(rational_to_json(c));
  return out;
}

RationalVector vector_from_json(const Json& j) {
  if (j.is_string()) return parse_rational_list(j.get<std::string>());
  if (!j.is_array()) parse_fail("expected an array of rationals, got " + j.dump());
  RationalVector v;
  for (const auto& e : j) v.coords().push_back(rational_from_json(e));
  return v;
}

Json matrix_to_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (const auto& row : m) out.push_back(vector_to_json(row));
  return out;
}

RationalMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("expected a matrix (array of rows)");
  RationalMatrix m;
  for (const auto& row : j) m.push_back(vector_from_json(row));
  for (const auto& row : m) {
    if (row.dim() != m.front().dim()) throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
  }
  return m;
}

Json double_to_json(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "+inf" : "-inf";
  return d;
}

double double_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_rational(s).get_d();
  }
  parse_fail("expected a number, got " + j.dump());
}

Json doubles_to_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double d : v) out.push_back(double_to_json(d));
  return out;
}

std::vector<double> doubles_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(double_from_json(e));
  return out;
}

Json polyhedron_to_json(const Polyhedron& p) {
  Json out = {{"dim", p.dim()}};
  if (p.has_hrep()) {
    Json rows = Json::array();
    for (const auto& h : p.hrep()) rows.push_back({{"normal", vector_to_json(h.normal)}, {"offset", rational_to_json(h.offset)}});
    out["hrep"] = rows;
  }
  if (p.has_vrep()) {
    Json verts = Json::array();
    Json rays = Json::array();
    for (const auto& v : p.vrep().vertices) verts.push_back(vector_to_json(v));
    for (const auto& r : p.vrep().rays) rays.push_back(vector_to_json(r));
    out["vrep"] = {{"vertices", verts}, {"rays", rays}};
  }
  return out;
}

Polyhedron polyhedron_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("polyhedron must be an object");
  const std::size_t dim = dim_of(j);
  const bool has_h = j.contains("hrep") && !j.at("hrep").is_null();
  const bool has_v = j.contains("vrep") && !j.at("vrep").is_null();
  if (!has_h && !has_v) parse_fail("polyhedron needs 'hrep' or 'vrep'");
  std::vector<Halfspace> hs;
  if (has_h) {
    const Json& rows = j.at("hrep");
    if (!rows.is_array()) parse_fail("'hrep' must be an array");
    for (const auto& row : rows) {
      hs.push_back({sized_vector(field(row, "normal"), dim, "halfspace normal"), rational_from_json(field(row, "offset"))});
    }
  }
  Generators gens;
  if (has_v) {
    const Json& v = j.at("vrep");
    if (!v.is_object()) parse_fail("'vrep' must be an object");
    if (v.contains("vertices")) {
      for (const auto& e : v.at("vertices")) gens.vertices.push_back(sized_vector(e, dim, "vertex"));
    }
    if (v.contains("rays")) {
      for (const auto& e : v.at("rays")) gens.rays.push_back(sized_vector(e, dim, "ray"));
    }
  }
  if (has_h && has_v) return Polyhedron::from_descriptions(dim, std::move(hs), std::move(gens));
  if (has_h) return Polyhedron::from_hrep(dim, std::move(hs));
  return Polyhedron::from_vrep(dim, std::move(gens.vertices), std::move(gens.rays));
}

Json expr_to_json(const Expr& e) {
  switch (e->kind) {
    case ExprKind::Constant: return Json::array({"const", rational_to_json(e->constant)});
    case ExprKind::Coordinate: return Json::array({"x", e->index});
    default: break;
  }
  Json out = Json::array({to_string(e->kind)});
  for (const auto& a : e->args) out.push_back(expr_to_json(a));
  return out;
}

Expr expr_from_json(const Json& j) {
  if (j.is_number() || j.is_string()) return expr::constant(rational_from_json(j));
  if (!j.is_array() || j.empty() || !j.front().is_string()) parse_fail("bad expression node " + j.dump());
  const ExprKind kind = parse_expr_kind(j.front().get<std::string>());
  const std::size_t nargs = j.size() - 1;
  auto arity = [&](std::size_t n) {
    if (nargs != n) parse_fail(std::string("'") + to_string(kind) + "' takes " + std::to_string(n) + " argument(s)");
  };
  auto arg = [&](std::size_t i) { return expr_from_json(j.at(i + 1)); };
  switch (kind) {
    case ExprKind::Constant: arity(1); return expr::constant(rational_from_json(j.at(1)));
    case ExprKind::Coordinate: {
      arity(1);
      if (!j.at(1).is_number_unsigned()) parse_fail("coordinate index must be a non-negative integer");
      return expr::coord(j.at(1).get<std::size_t>());
    }
    case ExprKind::Add: arity(2); return expr::add(arg(0), arg(1));
    case ExprKind::Sub: arity(2); return expr::sub(arg(0), arg(1));
    case ExprKind::Mul: arity(2); return expr::mul(arg(0), arg(1));
    case ExprKind::Neg: arity(1); return expr::neg(arg(0));
    case ExprKind::Abs: arity(1); return expr::abs(arg(0));
    case ExprKind::SqrtAbs: arity(1); return expr::sqrt_abs(arg(0));
    case ExprKind::RemarkSeven: arity(1); return expr::remark_seven(arg(0));
    case ExprKind::Max:
    case ExprKind::Min: {
      if (nargs == 0) parse_fail("max/min need at least one argument");
      std::vector<Expr> args;
      for (std::size_t i = 0; i < nargs; ++i) args.push_back(arg(i));
      return kind == ExprKind::Max ? expr::max(std::move(args)) : expr::min(std::move(args));
    }
  }
  parse_fail("bad expression node " + j.dump());
}

Json function_to_json(const PAConvexFunction& f) {
  Json pieces = Json::array();
  for (const auto& p : f.pieces()) pieces.push_back({{"slope", vector_to_json(p.slope)}, {"intercept", rational_to_json(p.intercept)}});
  Json domain = f.has_proper_domain() ? polyhedron_to_json(canonical(f.domain())) : Json(nullptr);
  return {{"type", "pa_convex"}, {"pieces", pieces}, {"domain", domain}};
}

Json function_to_json(const DCFunction& f) {
  return {{"type", "dc"}, {"g", function_to_json(f.g())}, {"h", function_to_json(f.h())}};
}

Json function_to_json(const BlackBoxFunction& f) {
  Json out = {{"type", "blackbox"}, {"dim", f.dim()}, {"expr", expr_to_json(f.root())}};
  out["box"] = {{"lo", doubles_to_json(f.lo())}, {"hi", doubles_to_json(f.hi())}};
  if (!f.constraints().empty()) {
    Json cons = Json::array();
    for (const auto& [n, b] : f.constraints()) cons.push_back({{"normal", doubles_to_json(n)}, {"offset", double_to_json(b)}});
    out["constraints"] = cons;
  }
  return out;
}

PAConvexFunction pa_function_from_json(const Json& j) {
  if (string_field(j, "type") != "pa_convex") parse_fail("expected a pa_convex function");
  const Json& pieces = field(j, "pieces");
  if (!pieces.is_array() || pieces.empty()) parse_fail("'pieces' must be a non-empty array");
  std::vector<AffinePiece> out;
  for (const auto& p : pieces) out.push_back({vector_from_json(field(p, "slope")), rational_from_json(field(p, "intercept"))});
  for (const auto& p : out) {
    if (p.slope.dim() != out.front().slope.dim()) throw Error(ErrorCode::DimensionMismatch, "pieces of different dimension");
  }
  if (j.contains("domain") && !j.at("domain").is_null()) {
    Polyhedron dom = polyhedron_from_json(j.at("domain"));
    if (dom.dim() != out.front().slope.dim()) throw Error(ErrorCode::DimensionMismatch, "domain dimension differs from slopes");
    return PAConvexFunction(std::move(out), std::move(dom));
  }
  return PAConvexFunction(std::move(out));
}

DCFunction dc_function_from_json(const Json& j) {
  if (string_field(j, "type") != "dc") parse_fail("expected a dc function");
  PAConvexFunction g = pa_function_from_json(field(j, "g"));
  PAConvexFunction h = pa_function_from_json(field(j, "h"));
  if (g.dim() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "g and h differ in dimension");
  return DCFunction(std::move(g), std::move(h));
}

BlackBoxFunction blackbox_from_json(const Json& j) {
  if (string_field(j, "type") != "blackbox") parse_fail("expected a blackbox function");
  const std::size_t dim = dim_of(j);
  Expr root = expr_from_json(field(j, "expr"));
  std::vector<double> lo(dim, -std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, std::numeric_limits<double>::infinity());
  if (j.contains("box") && !j.at("box").is_null()) {
    lo = doubles_from_json(field(j.at("box"), "lo"));
    hi = doubles_from_json(field(j.at("box"), "hi"));
    if (lo.size() != dim || hi.size() != dim) throw Error(ErrorCode::DimensionMismatch, "box bounds differ from 'dim'");
  }
  BlackBoxFunction f(dim, std::move(root), std::move(lo), std::move(hi));
  if (j.contains("constraints")) {
    for (const auto& c : j.at("constraints")) {
      auto n = doubles_from_json(field(c, "normal"));
      if (n.size() != dim) throw Error(ErrorCode::DimensionMismatch, "constraint normal differs from 'dim'");
      f.add_constraint(std::move(n), double_from_json(field(c, "offset")));
    }
  }
  return f;
}

AnyFunction function_from_json(const Json& j) {
  const std::string type = string_field(j, "type");
  if (type == "pa_convex") return pa_function_from_json(j);
  if (type == "dc") return dc_function_from_json(j);
  if (type == "blackbox") return blackbox_from_json(j);
  parse_fail("unknown function type '" + type + "'");
}

BlackBoxFunction as_blackbox(const AnyFunction& f) {
  return std::visit(
      [](const auto& g) -> BlackBoxFunction {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, BlackBoxFunction>) {
          return g;
        } else {
          return to_blackbox(g);
        }
      },
      f);
}

Json problem_to_json(const ProblemInstance& p) {
  const auto& cs = p.constraints;
  return {{"objective", function_to_json(p.objective)},
          {"C", polyhedron_to_json(canonical(cs.c_set()))},
          {"k", {{"M", matrix_to_json(cs.matrix())}, {"c", vector_to_json(cs.offset())}}},
          {"K", polyhedron_to_json(canonical(cs.cone()))}};
}

ProblemInstance problem_from_json(const Json& j) {
  DCFunction objective = dc_function_from_json(field(j, "objective"));
  const std::size_t n = objective.dim();
  Polyhedron c = j.contains("C") && !j.at("C").is_null() ? polyhedron_from_json(j.at("C")) : Polyhedron::whole_space(n);
  if (c.dim() != n) throw Error(ErrorCode::DimensionMismatch, "C differs in dimension from the objective");
  if (!j.contains("k") || j.at("k").is_null()) {
    ConstraintSystem cs = ConstraintSystem::unconstrained(n);
    return ProblemInstance(std::move(objective), ConstraintSystem(std::move(c), cs.matrix(), cs.offset(), cs.cone()));
  }
  const Json& k = j.at("k");
  RationalMatrix m = matrix_from_json(field(k, "M"));
  RationalVector off = vector_from_json(field(k, "c"));
  for (const auto& row : m) {
    if (row.dim() != n) throw Error(ErrorCode::DimensionMismatch, "rows of M must have the objective's dimension");
  }
  if (m.size() != off.dim()) throw Error(ErrorCode::DimensionMismatch, "M and c disagree in row count");
  std::optional<Polyhedron> cone;
  if (j.contains("K") && !j.at("K").is_null()) cone = polyhedron_from_json(j.at("K"));
  return ProblemInstance(std::move(objective), ConstraintSystem(std::move(c), std::move(m), std::move(off), std::move(cone)));
}

Json hypotheses_to_json(const HypothesisReport& report) {
  Json out = Json::array();
  for (const auto& h : report) {
    out.push_back({{"name", h.name},
                   {"status", to_string(h.status)},
                   {"provenance", to_string(h.provenance)},
                   {"detail", h.detail}});
  }
  return out;
}

HypothesisReport hypotheses_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("hypothesis report must be an array");
  HypothesisReport out;
  for (const auto& e : j) {
    out.push_back({string_field(e, "name"), parse_status(string_field(e, "status")),
                   parse_provenance(string_field(e, "provenance")), string_field(e, "detail")});
  }
  return out;
}

Json certificate_to_json(const Certificate& c) {
  Json statements = Json::array();
  for (const auto& s : c.statements) statements.push_back({{"name", s.name}, {"value", s.value}});
  return {{"claim_id", to_string(c.claim)},
          {"parameters", pairs_to_json(c.parameters)},
          {"lhs", polyhedron_to_json(c.lhs)},
          {"rhs", polyhedron_to_json(c.rhs)},
          {"verdict", to_string(c.verdict)},
          {"witness", optional_vector(c.witness)},
          {"hypothesis_report", hypotheses_to_json(c.hypotheses)},
          {"provenance", pairs_to_json(c.provenance)},
          {"statements", statements},
          {"claim_holds", c.claim_holds()},
          {"theorem_certified", c.theorem_certified()}};
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.claim = parse_claim_id(string_field(j, "claim_id"));
  c.parameters = pairs_from_json(field(j, "parameters"));
  c.lhs = polyhedron_from_json(field(j, "lhs"));
  c.rhs = polyhedron_from_json(field(j, "rhs"));
  c.verdict = parse_cert_verdict(string_field(j, "verdict"));
  if (!field(j, "witness").is_null()) c.witness = vector_from_json(j.at("witness"));
  c.hypotheses = hypotheses_from_json(field(j, "hypothesis_report"));
  c.provenance = pairs_from_json(field(j, "provenance"));
  for (const auto& s : field(j, "statements")) {
    const Json& v = field(s, "value");
    if (!v.is_boolean()) parse_fail("statement value must be a boolean");
    c.statements.push_back({string_field(s, "name"), v.get<bool>()});
  }
  return c;
}

Json optimality_certificate_to_json(const OptimalityCertificate& c) {
  Json qual = {{"status", to_string(c.qualification.status)}, {"description", c.qualification.description}};
  qual["cone"] = c.qualification.cone ? polyhedron_to_json(*c.qualification.cone) : Json(nullptr);
  Json descent = nullptr;
  if (c.descent) {
    descent = {{"direction", vector_to_json(c.descent->direction)},
               {"rate", rational_to_json(c.descent->rate)},
               {"step", rational_to_json(c.descent->step)},
               {"failing_vertex", vector_to_json(c.descent->failing_vertex)}};
  }
  return {{"verdict", to_string(c.verdict)},
          {"feasible_at", c.feasible_at},
          {"qualification", qual},
          {"normal_cone_direct", polyhedron_to_json(c.normal_cone_direct)},
          {"normal_cone_lagrange",
           c.normal_cone_lagrange ? polyhedron_to_json(*c.normal_cone_lagrange) : Json(nullptr)},
          {"routes_agree", c.routes_agree},
          {"inclusion28", inclusion_to_json(c.inclusion28)},
          {"inclusion30", inclusion_to_json(c.inclusion30)},
          {"lagrange_validated", c.lagrange_validated},
          {"descent", descent},
          {"hypothesis_report", hypotheses_to_json(c.hypotheses)}};
}

Json witness_to_json(const Witness& w) {
  Json fields = Json::object();
  for (const auto& [name, values] : w.fields) fields[name] = doubles_to_json(values);
  return {{"fields", fields}, {"margin", double_to_json(w.margin)}};
}

Witness witness_from_json(const Json& j) {
  Witness w;
  const Json& fields = field(j, "fields");
  if (!fields.is_object()) parse_fail("witness fields must be an object");
  for (const auto& [name, values] : fields.items()) w.fields.emplace_back(name, doubles_from_json(values));
  w.margin = double_from_json(field(j, "margin"));
  return w;
}

Json probe_verdict_to_json(const ProbeVerdict& v) {
  return {{"status", to_string(v.status)},
          {"witness", v.witness ? witness_to_json(*v.witness) : Json(nullptr)},
          {"shells", shells_to_json(v.shells)},
          {"reason", v.reason}};
}

ProbeVerdict probe_verdict_from_json(const Json& j) {
  ProbeVerdict v;
  v.status = parse_verdict_status(string_field(j, "status"));
  if (!field(j, "witness").is_null()) v.witness = witness_from_json(j.at("witness"));
  for (const auto& s : field(j, "shells")) {
    v.shells.push_back({double_from_json(field(s, "radius")), double_from_json(field(s, "inf")),
                        field(s, "samples").get<std::size_t>(), field(s, "violations").get<std::size_t>()});
  }
  if (j.contains("reason")) v.reason = j.at("reason").get<std::string>();
  return v;
}

Json dini_estimate_to_json(const DiniEstimate& e) {
  return {{"estimate", double_to_json(e.estimate)},
          {"diverged", e.diverged},
          {"stable", e.stable},
          {"shells", shells_to_json(e.shells)},
          {"envelope", doubles_to_json(e.envelope)},
          {"extrapolated", doubles_to_json(e.extrapolated)},
          {"divergence_witness", e.divergence_witness ? witness_to_json(*e.divergence_witness) : Json(nullptr)}};
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::exception& e) {
    parse_fail("'" + path.string() + "': " + e.what());
  }
}

}  // namespace subgrad
