#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "subgrad/blackbox.hpp"
#include "subgrad/calculus.hpp"
#include "subgrad/optimality.hpp"
#include "subgrad/oracle.hpp"
#include "subgrad/pa_function.hpp"
#include "subgrad/polyhedron.hpp"
#include "subgrad/rational.hpp"

namespace subgrad {

using Json = nlohmann::json;

// Rationals are written as "p/q" strings ("p" for integers). Readers also
// accept JSON integers and decimal literals such as "0.25" or 0.25.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);
Json vector_to_json(const RationalVector& v);
RationalVector vector_from_json(const Json& j);
Json matrix_to_json(const RationalMatrix& m);
RationalMatrix matrix_from_json(const Json& j);
/// Doubles as JSON numbers; non-finite values as "+inf", "-inf", "nan".
Json double_to_json(double d);
double double_from_json(const Json& j);
Json doubles_to_json(const std::vector<double>& v);
std::vector<double> doubles_from_json(const Json& j);

/// {"dim", "hrep": [{"normal", "offset"}], "vrep": {"vertices", "rays"}};
/// only the stored descriptions are written.
Json polyhedron_to_json(const Polyhedron& p);
Polyhedron polyhedron_from_json(const Json& j);

/// Prefix arrays: ["x", i], ["const", "p/q"], [op, args...]. A bare number
/// or string is read as a constant.
Json expr_to_json(const Expr& e);
Expr expr_from_json(const Json& j);

Json function_to_json(const PAConvexFunction& f);
Json function_to_json(const DCFunction& f);
Json function_to_json(const BlackBoxFunction& f);

using AnyFunction = std::variant<PAConvexFunction, DCFunction, BlackBoxFunction>;
AnyFunction function_from_json(const Json& j);
PAConvexFunction pa_function_from_json(const Json& j);
DCFunction dc_function_from_json(const Json& j);
BlackBoxFunction blackbox_from_json(const Json& j);
/// Any function type as a black box (PA and DC functions are converted).
BlackBoxFunction as_blackbox(const AnyFunction& f);

Json problem_to_json(const ProblemInstance& p);
ProblemInstance problem_from_json(const Json& j);

Json hypotheses_to_json(const HypothesisReport& report);
HypothesisReport hypotheses_from_json(const Json& j);

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

Json optimality_certificate_to_json(const OptimalityCertificate& c);

Json witness_to_json(const Witness& w);
Witness witness_from_json(const Json& j);
Json probe_verdict_to_json(const ProbeVerdict& v);
ProbeVerdict probe_verdict_from_json(const Json& j);
Json dini_estimate_to_json(const DiniEstimate& e);

/// Reads a file and parses it; failures raise ParseError naming the path.
Json load_json_file(const std::filesystem::path& path);

}  // namespace subgrad
