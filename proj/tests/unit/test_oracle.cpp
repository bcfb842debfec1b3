#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "subgrad/blackbox.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/oracle.hpp"

using namespace subgrad;
using namespace subgrad::expr;

namespace {

BlackBoxFunction abs_fn() { return BlackBoxFunction(1, abs(coord(0))); }
BlackBoxFunction abs_minus_sq() { return BlackBoxFunction(1, sub(abs(coord(0)), mul(coord(0), coord(0)))); }
BlackBoxFunction neg_sqrt() { return BlackBoxFunction(1, neg(sqrt_abs(coord(0)))); }
BlackBoxFunction remark7() { return BlackBoxFunction(1, remark_seven(coord(0))); }

SamplingPlan small_plan(int first, int last, std::size_t samples) {
  SamplingPlan p;
  p.shell_radii = SamplingPlan::dyadic_radii(first, last);
  p.samples_per_shell = samples;
  return p;
}

RationalVector iv(std::initializer_list<long> v) { return RationalVector::from_ints(v); }
PAConvexFunction abs_pa() { return PAConvexFunction({{iv({1}), 0}, {iv({-1}), 0}}); }

}  // namespace

TEST_CASE("sampling plan validation") {
  SamplingPlan p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.shell_radii.size() == 20);
  CHECK(p.shell_radii.front() == 0.5);
  p.shell_radii = {0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), Error);
  p.shell_radii = {0.5, -0.1};
  CHECK_THROWS_AS(p.validate(), Error);
  p = SamplingPlan{};
  p.samples_per_shell = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("sample streams are reproducible") {
  sampling::Stream a(7, 1, 3), b(7, 1, 3), c(7, 2, 3);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  sampling::Stream d(1, 0, 0);
  for (int i = 0; i < 200; ++i) {
    const auto v = d.in_unit_ball(3);
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0);
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("tail verdict") {
  const auto shells = [](std::initializer_list<std::size_t> v) {
    std::vector<ShellStat> out;
    for (auto k : v) out.push_back({0.1, 0, 10, k});
    return out;
  };
  CHECK(sampling::tail_verdict(shells({3, 0, 0, 0, 0}), 4) == VerdictStatus::Holds);
  CHECK(sampling::tail_verdict(shells({0, 1, 1, 1, 1}), 4) == VerdictStatus::FailsWithWitness);
  CHECK(sampling::tail_verdict(shells({0, 1, 0, 1, 1}), 4) == VerdictStatus::Inconclusive);
  CHECK(sampling::tail_verdict(shells({0, 0}), 4) == VerdictStatus::Holds);
  CHECK(sampling::tail_verdict({}, 4) == VerdictStatus::Inconclusive);
}

TEST_CASE("Dini estimate of -|x| along 1") {
  const BlackBoxFunction f(1, neg(abs(coord(0))));
  const DiniEstimate d = dini_directional_estimate(f, {0.0}, {1.0}, SamplingPlan{});
  CHECK_FALSE(d.diverged);
  CHECK(d.stable);
  CHECK(std::abs(d.estimate + 1.0) <= 1e-6);
  CHECK(d.envelope.size() == d.shells.size());
  for (std::size_t i = 1; i < d.envelope.size(); ++i) CHECK(d.envelope[i] >= d.envelope[i - 1]);
}

TEST_CASE("Dini estimate of |x| - x^2 along 1") {
  const DiniEstimate d = dini_directional_estimate(abs_minus_sq(), {0.0}, {1.0}, SamplingPlan{});
  CHECK(std::abs(d.estimate - 1.0) <= 1e-6);
}

TEST_CASE("Dini estimate of -sqrt|x| along 0 diverges") {
  const DiniEstimate d = dini_directional_estimate(neg_sqrt(), {0.0}, {0.0}, SamplingPlan{});
  CHECK(d.diverged);
  CHECK(d.estimate == -INFINITY);
  REQUIRE(d.divergence_witness);
  CHECK(d.divergence_witness->get("quotient")[0] < -1e6);
}

TEST_CASE("calmness") {
  const SamplingPlan plan;
  const ProbeVerdict pa = calmness_probe(abs_fn(), {0.0}, plan);
  CHECK(pa.status == VerdictStatus::Holds);
  CHECK(pa.reason == "locally Lipschitz");
  CHECK(calmness_probe(BlackBoxFunction(1, constant(0)), {0.0}, plan).status == VerdictStatus::Holds);
  CHECK(calmness_probe(abs_minus_sq(), {0.0}, plan).status == VerdictStatus::Holds);
  const ProbeVerdict s = calmness_probe(neg_sqrt(), {0.0}, plan);
  REQUIRE(s.status == VerdictStatus::FailsWithWitness);
  REQUIRE(s.witness);
  CHECK(replay_calmness_witness(neg_sqrt(), {0.0}, *s.witness, plan.divergence_threshold));
}

TEST_CASE("eps-subgradient membership") {
  const SamplingPlan plan = small_plan(1, 16, 128);
  CHECK(eps_subgradient_membership_probe(abs_fn(), {0.0}, {0.0}, 0.0, 0.01, plan).status == VerdictStatus::Holds);
  const ProbeVerdict out = eps_subgradient_membership_probe(abs_fn(), {0.0}, {2.0}, 0.0, 0.01, plan);
  REQUIRE(out.status == VerdictStatus::FailsWithWitness);
  REQUIRE(out.witness);
  CHECK(out.witness->get("x")[0] > 0.0);
  CHECK(replay_membership_witness(abs_fn(), {0.0}, {2.0}, 0.0, 0.01, NormSpec::l1(), *out.witness));
  CHECK(eps_subgradient_membership_probe(abs_fn(), {0.0}, {2.0}, 1.5, 0.01, plan).status == VerdictStatus::Holds);
  // Not calm, so no verdict of membership is possible.
  CHECK(eps_subgradient_membership_probe(neg_sqrt(), {0.0}, {0.0}, 0.0, 0.01, plan).status !=
        VerdictStatus::Holds);
}

TEST_CASE("approximate regularity of |x| - x^2") {
  const SamplingPlan plan = small_plan(1, 16, 128);
  for (double x : {-1.0, -0.5, 0.0, 0.25, 1.0}) {
    CHECK(approx_regularity_probe(abs_minus_sq(), {x}, 0.1, RegularityMode::Convex, plan).status ==
          VerdictStatus::Holds);
  }
  CHECK(approx_regularity_probe(abs_minus_sq(), {0.0}, 0.1, RegularityMode::Directional, plan, NormSpec::l1(), {1.0})
            .status == VerdictStatus::Holds);
}

TEST_CASE("Remark 7 function is starshaped but not approximately convex at 0") {
  const SamplingPlan plan = small_plan(5, 20, 256);
  CHECK(approx_regularity_probe(remark7(), {0.0}, 0.1, RegularityMode::Starshaped, plan).status ==
        VerdictStatus::Holds);
  const ProbeVerdict c = approx_regularity_probe(remark7(), {0.0}, 0.01, RegularityMode::Convex, plan);
  REQUIRE(c.status == VerdictStatus::FailsWithWitness);
  REQUIRE(c.witness);
  CHECK(c.witness->margin > 0);
  CHECK(replay_regularity_witness(remark7(), {0.0}, 0.01, RegularityMode::Convex, NormSpec::l1(), *c.witness));
}

TEST_CASE("-|x| is not approximately convex at 0") {
  const BlackBoxFunction f(1, neg(abs(coord(0))));
  const SamplingPlan plan = small_plan(1, 12, 64);
  const ProbeVerdict c = approx_regularity_probe(f, {0.0}, 0.1, RegularityMode::Convex, plan);
  REQUIRE(c.status == VerdictStatus::FailsWithWitness);
  CHECK(replay_regularity_witness(f, {0.0}, 0.1, RegularityMode::Convex, NormSpec::l1(), *c.witness));
}

TEST_CASE("gap continuity") {
  const SamplingPlan plan = small_plan(1, 8, 16);
  CHECK(gap_continuity_probe(abs_pa(), iv({0}), make_rational(1, 10), plan).status == VerdictStatus::Holds);
  CHECK(gap_continuity_probe(PAConvexFunction::affine(iv({0})), iv({0}), make_rational(1, 10), plan).status ==
        VerdictStatus::Holds);
  const PAConvexFunction two_abs({{iv({2}), 0}, {iv({-2}), 0}});
  const DCFunction f(abs_pa(), two_abs);
  const ProbeVerdict g = gap_continuity_probe(f, iv({0}), make_rational(1, 10), plan);
  REQUIRE(g.status == VerdictStatus::FailsWithWitness);
  REQUIRE(g.witness);
  CHECK(g.witness->margin == INFINITY);
  CHECK(replay_gap_witness(f, iv({0}), make_rational(1, 10), NormSpec::l1(), *g.witness));
}

TEST_CASE("results do not depend on the number of threads") {
  SamplingPlan plan = small_plan(1, 12, 64);
  const ProbeVerdict one = approx_regularity_probe(remark7(), {0.0}, 0.01, RegularityMode::Convex, plan);
  plan.threads = 3;
  CHECK(approx_regularity_probe(remark7(), {0.0}, 0.01, RegularityMode::Convex, plan) == one);
  const DiniEstimate a = dini_directional_estimate(abs_minus_sq(), {0.3}, {-1.0}, plan);
  plan.threads = 1;
  const DiniEstimate b = dini_directional_estimate(abs_minus_sq(), {0.3}, {-1.0}, plan);
  CHECK(a.estimate == b.estimate);
  CHECK(a.shells == b.shells);
}

TEST_CASE("Dini estimates match exact PA directional derivatives") {
  std::mt19937 rng(41);
  for (int i = 0; i < 15; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector x = testgen::small_vector(rng, dim, 2, 2);
    const PAConvexFunction g = testgen::random_pa_kinked_at(rng, x, 4);
    const PAConvexFunction h = testgen::random_pa_kinked_at(rng, x, 4);
    const RationalVector dir = testgen::small_vector(rng, dim, 2, 2);
    const double exact = dini_derivative(DCFunction(g, h), x, dir).value().get_d();
    const DiniEstimate d = dini_directional_estimate(to_blackbox(DCFunction(g, h)), x.to_doubles(), dir.to_doubles(),
                                                     SamplingPlan{});
    CHECK(std::abs(d.estimate - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("evaluation failures propagate") {
  const BlackBoxFunction f(1, sub(remark_seven(coord(0)), remark_seven(coord(0))));
  CHECK_THROWS_AS(dini_directional_estimate(f, {0.99}, {1.0}, small_plan(1, 4, 8)), Error);
}
