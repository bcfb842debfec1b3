#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "subgrad/json_io.hpp"
#include "subgrad/scenario.hpp"

using namespace subgrad;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SUBGRAD_SOURCE_DIR;

ScenarioResult run(const std::string& text, const Overrides& ov = {}) {
  return run_scenario_guarded(Json::parse(text), kSource / "corpus", ov);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("subgrad_scenario_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("set descriptions") {
  CHECK(describe_set(Polyhedron::box({Rational(-2)}, {Rational(0)})) == "[-2, 0]");
  CHECK(describe_set(Polyhedron::point(RationalVector{Rational(0)})) == "{0}");
  CHECK(describe_set(Polyhedron::empty(1)) == "empty");
  CHECK(describe_set(Polyhedron::whole_space(2)) == "R^2");
  CHECK(describe_set(Polyhedron::from_hrep(1, {{RationalVector{Rational(1)}, Rational(1)}})) == "(-inf, 1]");
}

TEST_CASE("check scenarios") {
  const ScenarioResult eq =
      run(R"({"kind": "check", "claim": "equality22", "dc": "../data/abs_minus_x.json", "point": "0"})");
  CHECK(eq.exit_code == kExitHolds);
  CHECK(eq.verdict == "equal");
  CHECK(eq.report.at("claim_holds") == true);
  const ScenarioResult fails =
      run(R"({"kind": "check", "claim": "local_min_necessary", "dc": "../data/abs_minus_2abs.json", "point": "0"})");
  CHECK(fails.exit_code == kExitFails);
}

TEST_CASE("overrides replace scenario values") {
  Overrides ov;
  ov.eps = Rational(1);
  ov.eta = Rational(1);
  const ScenarioResult r =
      run(R"({"kind": "check", "claim": "equality26", "dc": "../data/abs_minus_abs.json", "point": "0", "eps": "0"})", ov);
  CHECK(r.exit_code == kExitHolds);
  const Json& params = r.report.at("parameters");
  bool saw_eps = false;
  for (const auto& p : params) {
    if (p.at("name") == "eps") {
      CHECK(p.at("value") == "1");
      saw_eps = true;
    }
  }
  CHECK(saw_eps);
}

TEST_CASE("unstable Dini estimates are inconclusive") {
  const ScenarioResult r = run(R"({"kind": "probe", "probe": "dini", "function": "../data/abs_minus_sq.json",
      "point": "0", "direction": "1", "plan": {"radii": {"first": 1, "last": 3}}})");
  CHECK(r.exit_code == kExitInconclusive);
}

TEST_CASE("input errors") {
  CHECK(run(R"({"kind": "check", "claim": "equality22", "dc": "../data/abs_minus_x.json", "point": "0", "bogus": 1})")
            .exit_code == kExitInputError);
  CHECK(run(R"({"kind": "frobnicate"})").exit_code == kExitInputError);
  CHECK(run(R"({"kind": "check", "claim": "equality22", "dc": "../data/missing.json", "point": "0"})").exit_code ==
        kExitInputError);
  const ScenarioResult wrong_dim =
      run(R"({"kind": "check", "claim": "equality22", "dc": "../data/abs_minus_x.json", "point": "0, 0"})");
  CHECK(wrong_dim.exit_code == kExitInputError);
  CHECK(wrong_dim.report.contains("error"));
}

TEST_CASE("bundled corpus passes and is independent of the job count") {
  const CorpusResult one = corpus_run(kSource / "corpus", "*", 1, {});
  CHECK(one.exit_code == kExitHolds);
  CHECK(one.rows.size() >= 20);
  for (const auto& row : one.rows) CHECK_MESSAGE(row.passed(), row.name);
  for (std::size_t i = 1; i < one.rows.size(); ++i) CHECK(one.rows[i - 1].name < one.rows[i].name);
  const CorpusResult three = corpus_run(kSource / "corpus", "*", 3, {});
  CHECK(one.report.dump(2) == three.report.dump(2));
}

TEST_CASE("corpus filter and failing rows") {
  const fs::path dir = kSource / "tests" / "data" / "failing_corpus";
  const CorpusResult all = corpus_run(dir, "*", 1, {});
  CHECK(all.exit_code == kExitFails);
  CHECK(all.text.find("<-- FAILED") != std::string::npos);
  const CorpusResult only_a = corpus_run(dir, "a_*", 1, {});
  CHECK(only_a.exit_code == kExitHolds);
  CHECK(only_a.rows.size() == 1);
  CHECK(corpus_run(dir, "nothing_*", 1, {}).exit_code == kExitInputError);
}

TEST_CASE("input errors dominate the corpus exit code") {
  const fs::path dir = scratch_dir("mixed");
  fs::copy_file(kSource / "tests" / "data" / "failing_corpus" / "b_localmin_abs_minus_2abs.json", dir / "b.json");
  std::ofstream(dir / "c.json") << "{ not json";
  // The copied scenario refers to data by a relative path that no longer resolves here.
  const CorpusResult r = corpus_run(dir, "*", 1, {});
  CHECK(r.exit_code == kExitInputError);
  std::ofstream(dir / "b.json") << R"({"kind": "stardiff", "A": {"dim": 1, "vrep": {"vertices": [["0"], ["1"]], "rays": []}},
                                       "B": {"dim": 1, "vrep": {"vertices": [["0"]], "rays": []}}})";
  fs::remove(dir / "c.json");
  CHECK(corpus_run(dir, "*", 1, {}).exit_code == kExitHolds);
  fs::remove_all(dir);
}
