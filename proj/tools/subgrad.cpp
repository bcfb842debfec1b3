// subgrad: command-line front end for the subdifferential calculus checkers.
//
//   subgrad check --claim equality22 --dc abs_minus_x.json --point 0
//   subgrad certify --problem cone_dc.json --point 0,0
//   subgrad stardiff --A box.json --B seg.json
//   subgrad corpus corpus/ --jobs 4 --json report.json
//
// Exit status: 0 holds, 1 fails with witness, 2 inconclusive, 3 input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/json_io.hpp"
#include "subgrad/polyhedron.hpp"
#include "subgrad/scenario.hpp"

namespace {

using subgrad::Json;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string json_path;
  std::string norm;
  std::string eps;
  std::string eta;
  std::string point;
  std::optional<std::size_t> max_dim;
};

subgrad::Overrides to_overrides(const GlobalFlags& g) {
  subgrad::Overrides ov;
  ov.seed = g.seed;
  if (!g.norm.empty()) ov.norm = subgrad::parse_norm(g.norm);
  if (!g.eps.empty()) ov.eps = subgrad::parse_rational(g.eps);
  if (!g.eta.empty()) ov.eta = subgrad::parse_rational(g.eta);
  if (!g.point.empty()) ov.point = subgrad::parse_rational_list(g.point);
  return ov;
}

void write_json(const std::string& path, const Json& report) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw subgrad::Error(subgrad::ErrorCode::ParseError, "cannot write '" + path + "'");
  out << report.dump(2) << "\n";
}

int emit(const subgrad::ScenarioResult& r, const GlobalFlags& g) {
  (r.exit_code == subgrad::kExitInputError ? std::cerr : std::cout) << r.text;
  write_json(g.json_path, r.report);
  if (r.exit_code != subgrad::kExitInputError && r.kind != "stardiff") std::cout << "exit: " << r.exit_code << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact epsilon-subdifferential calculus for piecewise affine DC functions"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Seed for every sampling probe");
  app.add_option("--json", g.json_path, "Also write the JSON report to this path");
  app.add_option("--norm", g.norm, "l1 | linf | l2approx:<k>");
  app.add_option("--eps", g.eps, "epsilon as p/q");
  app.add_option("--eta", g.eta, "eta as p/q");
  app.add_option("--point", g.point, "Point as comma separated rationals");
  app.add_option("--max-dim", g.max_dim, "Largest dimension accepted by the polyhedral kernel");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();

  std::string corpus_dir, filter = "*";
  unsigned jobs = 1;
  auto* corpus = app.add_subcommand("corpus", "Run every scenario in a directory");
  corpus->add_option("dir", corpus_dir, "Directory of scenario files")->required();
  corpus->add_option("--filter", filter, "Glob on file names");
  corpus->add_option("--jobs", jobs, "Scenarios run in parallel");

  std::string claim, dc_file, f_file, g_file, mu, eta_list, variant;
  auto* check = app.add_subcommand("check", "Check one calculus rule at a point");
  check->add_option("--claim", claim, "Claim id, e.g. equality22")->required();
  check->add_option("--dc", dc_file, "DC function file");
  check->add_option("--f", f_file, "First convex function (sum_rule12)");
  check->add_option("--g", g_file, "Second convex function (sum_rule12)");
  check->add_option("--mu", mu, "Comma separated mu values (intersection27)");
  check->add_option("--eta-list", eta_list, "Comma separated eta values (cor11)");
  check->add_option("--variant", variant, "a | b, with --claim cor12");

  std::string problem_file, probe_eps;
  auto* certify = app.add_subcommand("certify", "Decide blunt minimality of a constrained DC problem");
  certify->add_option("--problem", problem_file, "Problem file")->required();
  certify->add_option("--probe-eps", probe_eps, "Also run the sampling probe for these comma separated eps");

  std::string a_file, b_file;
  auto* stardiff = app.add_subcommand("stardiff", "Star difference A -* B as polyhedron JSON");
  stardiff->add_option("--A", a_file, "Polyhedron file")->required();
  stardiff->add_option("--B", b_file, "Polyhedron file")->required();

  std::string function_file;
  auto* subdiff = app.add_subcommand("subdiff", "Exact (lower) eps-subdifferential at a point");
  subdiff->add_option("--function", function_file, "pa_convex or dc function file")->required();

  std::string probe_kind, direction, xstar, alpha, mode, u;
  std::optional<std::size_t> samples;
  std::optional<int> radius_first, radius_last;
  auto* probe = app.add_subcommand("probe", "Sampling probe on a function or problem");
  probe->add_option("--kind", probe_kind, "dini | calmness | membership | regularity | gap | blunt")->required();
  probe->add_option("--function", function_file, "Function file");
  probe->add_option("--problem", problem_file, "Problem file (blunt)");
  probe->add_option("--direction", direction, "Direction (dini)");
  probe->add_option("--xstar", xstar, "Candidate subgradient (membership)");
  probe->add_option("--alpha", alpha, "Extra slack (membership)");
  probe->add_option("--mode", mode, "convex | starshaped | directional (regularity)");
  probe->add_option("--u", u, "Direction of the tube (directional regularity)");
  probe->add_option("--samples", samples, "Samples per shell");
  probe->add_option("--first-shell", radius_first, "Largest shell radius is 2^-first");
  probe->add_option("--last-shell", radius_last, "Smallest shell radius is 2^-last");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return subgrad::kExitInputError;
  }

  try {
    if (g.max_dim) {
      if (*g.max_dim == 0) throw subgrad::Error(subgrad::ErrorCode::InvalidArgument, "--max-dim must be positive");
      subgrad::KernelLimits limits = subgrad::kernel_limits();
      limits.max_dim = *g.max_dim;
      subgrad::set_kernel_limits(limits);
    }
    const subgrad::Overrides ov = to_overrides(g);

    if (*run) return emit(subgrad::run_scenario_file(scenario_path, ov), g);

    if (*corpus) {
      const subgrad::CorpusResult r = subgrad::corpus_run(corpus_dir, filter, jobs, ov);
      (r.exit_code == subgrad::kExitInputError && r.rows.empty() ? std::cerr : std::cout) << r.text;
      write_json(g.json_path, r.report);
      return r.exit_code;
    }

    Json s = Json::object();
    if (*check) {
      s["kind"] = "check";
      std::string id = claim;
      if (id == "cor12" || id == "Cor12") id += variant.empty() ? "a" : variant;
      s["claim"] = id;
      if (!dc_file.empty()) s["dc"] = dc_file;
      if (!f_file.empty()) s["f"] = f_file;
      if (!g_file.empty()) s["g"] = g_file;
      if (!mu.empty()) s["mu"] = mu;
      if (!eta_list.empty()) s["eta_list"] = eta_list;
    } else if (*certify) {
      s["kind"] = "certify";
      s["problem"] = problem_file;
      if (!probe_eps.empty()) s["probe_eps"] = probe_eps;
    } else if (*stardiff) {
      s["kind"] = "stardiff";
      s["A"] = a_file;
      s["B"] = b_file;
    } else if (*subdiff) {
      s["kind"] = "subdiff";
      s["function"] = function_file;
    } else if (*probe) {
      s["kind"] = "probe";
      s["probe"] = probe_kind;
      if (!function_file.empty()) s["function"] = function_file;
      if (!problem_file.empty()) s["problem"] = problem_file;
      if (!direction.empty()) s["direction"] = direction;
      if (!xstar.empty()) s["xstar"] = xstar;
      if (!alpha.empty()) s["alpha"] = alpha;
      if (!mode.empty()) s["mode"] = mode;
      if (!u.empty()) s["u"] = u;
      Json plan = Json::object();
      if (samples) plan["samples"] = *samples;
      if (radius_first || radius_last) plan["radii"] = {{"first", radius_first.value_or(1)}, {"last", radius_last.value_or(20)}};
      if (!plan.empty()) s["plan"] = plan;
    }
    return emit(subgrad::run_scenario_guarded(s, "", ov), g);
  } catch (const subgrad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return subgrad::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return subgrad::kExitInputError;
  }
}
