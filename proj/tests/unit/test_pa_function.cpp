#include <functional>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/pa_function.hpp"

using namespace subgrad;
using namespace subgrad::testgen;

namespace {

RationalVector iv(std::initializer_list<long> v) { return RationalVector::from_ints(v); }
Rational q(long p, long d = 1) { return make_rational(p, d); }
Polyhedron interval(Rational lo, Rational hi) { return Polyhedron::box({lo}, {hi}); }

PAConvexFunction abs1() { return PAConvexFunction({{iv({1}), 0}, {iv({-1}), 0}}); }
PAConvexFunction scaled_abs(long k) { return PAConvexFunction({{iv({k}), 0}, {iv({-k}), 0}}); }
PAConvexFunction linear(std::initializer_list<long> s) { return PAConvexFunction::affine(iv(s)); }
PAConvexFunction l1_2d() {
  return PAConvexFunction({{iv({1, 1}), 0}, {iv({1, -1}), 0}, {iv({-1, 1}), 0}, {iv({-1, -1}), 0}});
}
PAConvexFunction abs_x1() { return PAConvexFunction({{iv({1, 0}), 0}, {iv({-1, 0}), 0}}); }

// Interval {x* : x* h <= D(h) for all sampled h} of a positively homogeneous
// 1D function D, using h = +-k/64.
std::pair<Rational, Rational> direction_oracle_1d(const std::function<Rational(const Rational&)>& d) {
  Rational lo = -1000, hi = 1000;
  for (long k = 1; k <= 64; ++k) {
    const Rational h = q(k, 64);
    hi = std::min(hi, Rational(d(h) / h));
    lo = std::max(lo, Rational(-d(-h) / h));
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(evaluate(abs1(), iv({-3})) == Extended(q(3)));
  const PAConvexFunction on_box(abs1().pieces(), interval(-1, 1));
  CHECK(evaluate(on_box, iv({2})).is_infinite());
  CHECK(evaluate(PAConvexFunction({{iv({1}), 0}, {iv({2}), 0}}), iv({1})) == Extended(q(2)));
  CHECK(active_pieces(abs1(), iv({0})).size() == 2);
}

TEST_CASE("pieces are sorted and deduplicated") {
  const PAConvexFunction f({{iv({-1}), 0}, {iv({1}), 0}, {iv({-1}), 0}});
  CHECK(f.pieces().size() == 2);
  CHECK(f == abs1());
  CHECK_THROWS_AS(PAConvexFunction({}), Error);
  CHECK_THROWS_AS(PAConvexFunction({{iv({1}), 0}, {iv({1, 1}), 0}}), Error);
  CHECK_THROWS_AS(PAConvexFunction(abs1().pieces(), Polyhedron::empty(1)), Error);
}

TEST_CASE("subdifferential") {
  CHECK(set_equal(subdifferential_at(abs1(), iv({0})), interval(-1, 1)));
  const PAConvexFunction mx({{iv({1, 0}), 0}, {iv({0, 1}), 0}});
  CHECK(set_equal(subdifferential_at(mx, iv({0, 0})), Polyhedron::from_vrep(2, {iv({1, 0}), iv({0, 1})})));
  CHECK(set_equal(subdifferential_at(abs1(), iv({2})), Polyhedron::point(iv({1}))));
  CHECK_THROWS_AS(subdifferential_at(PAConvexFunction(abs1().pieces(), interval(0, 1)), iv({3})), Error);
}

TEST_CASE("eps-subdifferential") {
  const Polyhedron s = eps_subdifferential_at(abs1(), iv({0}), q(1), NormSpec::l1());
  // Direction oracle: x* h <= |h| + |h|.
  const auto [lo, hi] = direction_oracle_1d([](const Rational& h) -> Rational { return 2 * abs(h); });
  CHECK(lo == -2);
  CHECK(hi == 2);
  CHECK(set_equal(s, interval(lo, hi)));
  CHECK(set_equal(eps_subdifferential_at(abs1(), iv({0}), q(0), NormSpec::l1()), subdifferential_at(abs1(), iv({0}))));
  CHECK_THROWS_AS(eps_subdifferential_at(abs1(), iv({0}), q(-1), NormSpec::l1()), Error);
}

TEST_CASE("eps-subdifferential grows with eps") {
  std::mt19937 rng(21);
  for (int i = 0; i < 30; ++i) {
    const std::size_t dim = 1 + i % 3;
    const PAConvexFunction f = random_pa(rng, dim, 5);
    const RationalVector x = small_vector(rng, dim, 2, 2);
    Polyhedron prev = eps_subdifferential_at(f, x, q(0), NormSpec::l1());
    for (const Rational e : {q(1, 2), q(1), q(3)}) {
      const Polyhedron next = eps_subdifferential_at(f, x, e, NormSpec::l1());
      CHECK(contains_polyhedron(next, prev));
      prev = next;
    }
  }
}

TEST_CASE("directional derivative") {
  CHECK(directional_derivative(abs1(), iv({0}), iv({-2})) == 2);
  CHECK(directional_derivative(abs1(), iv({0}), iv({0})) == 0);
  const PAConvexFunction mx({{iv({1, 0}), 0}, {iv({0, 1}), 0}});
  CHECK(directional_derivative(mx, iv({0, 0}), iv({1, 1})) == 1);
  CHECK_THROWS_AS(directional_derivative(PAConvexFunction(abs1().pieces(), interval(0, 1)), iv({0}), iv({1})), Error);
}

TEST_CASE("restriction to a set") {
  const Polyhedron half = Polyhedron::from_hrep(1, {{iv({-1}), q(0)}});
  const PAConvexFunction r = restrict(abs1(), half);
  // [-1, 1] + cone{-1} = (-inf, 1]
  CHECK(set_equal(subdifferential_at(r, iv({0})), Polyhedron::from_hrep(1, {{iv({1}), q(1)}})));
  CHECK(restrict(abs1(), Polyhedron::whole_space(1)) == abs1());
  CHECK(subdifferential_at(restrict(abs1(), Polyhedron::point(iv({2}))), iv({2})).is_whole_space());
}

TEST_CASE("expansion by eps times the l1 distance") {
  const PAConvexFunction e = f_eps_expand(abs1(), iv({0}), q(1), NormSpec::l1());
  for (long k = -6; k <= 6; ++k) CHECK(evaluate(e, iv({k})) == evaluate(scaled_abs(2), iv({k})));
  CHECK(f_eps_expand(abs1(), iv({0}), q(0), NormSpec::l1()) == abs1());
  CHECK_THROWS_AS(f_eps_expand(abs1(), iv({0}), q(1), NormSpec::linf()), Error);
}

TEST_CASE("Lemma 1 identity on random functions") {
  std::mt19937 rng(22);
  for (int i = 0; i < 40; ++i) {
    const std::size_t dim = 1 + i % 3;
    const RationalVector x = small_vector(rng, dim, 2, 2);
    const PAConvexFunction f = i % 2 ? random_pa(rng, dim, 6) : random_pa_kinked_at(rng, x, 6);
    for (const Rational e : {q(0), q(1, 2), q(1), q(3)}) {
      const Polyhedron via_expand = subdifferential_at(f_eps_expand(f, x, e, NormSpec::l1()), x);
      CHECK(canonical(via_expand) == canonical(eps_subdifferential_at(f, x, e, NormSpec::l1())));
    }
  }
}

TEST_CASE("max of affine pieces is convex along segments") {
  std::mt19937 rng(23);
  for (int i = 0; i < 60; ++i) {
    const std::size_t dim = 1 + i % 3;
    const PAConvexFunction f = random_pa(rng, dim, 6);
    const RationalVector a = small_vector(rng, dim), b = small_vector(rng, dim);
    const RationalVector mid = q(1, 2) * (a + b);
    CHECK(2 * evaluate(f, mid).value() <= evaluate(f, a).value() + evaluate(f, b).value());
  }
}

TEST_CASE("sum of convex functions") {
  const PAConvexFunction s = abs1() + linear({1});
  CHECK(evaluate(s, iv({-2})) == Extended(q(0)));
  CHECK(evaluate(s, iv({3})) == Extended(q(6)));
  CHECK(set_equal(subdifferential_at(s, iv({0})), interval(0, 2)));
}

TEST_CASE("DC lower subdifferential examples") {
  const auto e22 = [](const DCFunction& f, const RationalVector& x) {
    return dc_dini_subdifferential(f, x, q(0), q(0), NormSpec::l1()).set;
  };
  // d(|x| - x)(0; h) = |h| - h
  const auto [lo, hi] = direction_oracle_1d([](const Rational& h) -> Rational { return abs(h) - h; });
  CHECK(lo == -2);
  CHECK(hi == 0);
  CHECK(set_equal(e22(DCFunction(abs1(), linear({1})), iv({0})), interval(lo, hi)));
  CHECK(set_equal(e22(DCFunction(abs1(), abs1()), iv({0})), Polyhedron::point(iv({0}))));
  CHECK(set_equal(e22(DCFunction(l1_2d(), abs_x1()), iv({0, 0})), Polyhedron::box(iv({0, -1}), iv({0, 1}))));
  const auto d11 = dc_dini_subdifferential(DCFunction(abs1(), abs1()), iv({0}), q(1), q(1), NormSpec::l1());
  CHECK(set_equal(d11.set, interval(-1, 1)));
  CHECK(e22(DCFunction(abs1(), scaled_abs(2)), iv({0})).is_empty());
}

TEST_CASE("DC hypotheses are exact for convex pieces") {
  const DCFunction f(abs1(), linear({1}));
  const HypothesisReport r = dc_hypotheses(f, iv({0}));
  CHECK(r.size() == 4);
  CHECK(all_green(r));
  for (const auto& h : r) CHECK(h.provenance == Provenance::ExactByConvexity);
  // At the boundary of dom h the gap-continuity argument no longer applies.
  const DCFunction bounded(PAConvexFunction(abs1().pieces(), interval(-1, 1)), PAConvexFunction(linear({1}).pieces(), interval(-1, 1)));
  CHECK_FALSE(all_green(dc_hypotheses(bounded, iv({1}))));
  CHECK(all_green(dc_hypotheses(bounded, iv({0}))));
}

TEST_CASE("dom g must lie in dom h") {
  CHECK_THROWS_AS(DCFunction(abs1(), PAConvexFunction(abs1().pieces(), interval(0, 1))), Error);
}

TEST_CASE("star and definitional routes agree and respect Dini derivatives") {
  std::mt19937 rng(24);
  for (int i = 0; i < 40; ++i) {
    const std::size_t dim = 1 + i % 2;
    const RationalVector x = small_vector(rng, dim, 1, 2);
    const DCFunction f(random_pa_kinked_at(rng, x, 4), random_pa_kinked_at(rng, x, 4));
    for (const Rational e : {q(0), q(1, 2)}) {
      const Polyhedron star = dc_dini_subdifferential(f, x, e, q(0), NormSpec::l1()).set;
      const Polyhedron def = dc_definitional_subdifferential(f, x, e, NormSpec::l1());
      CHECK(canonical(star) == canonical(def));
      if (e != 0 || star.is_empty()) continue;
      // sigma(h) <= d-f(x; h) for every direction
      for (int k = 0; k < 10; ++k) {
        const RationalVector h = small_vector(rng, dim, 2, 3);
        const Extended s = support_function(star, h);
        const Extended d = dini_derivative(f, x, h);
        CHECK(s <= d);
      }
    }
  }
}
