#include "doctest.h"
#include "subgrad/errors.hpp"
#include "subgrad/linalg.hpp"
#include "subgrad/rational.hpp"

using namespace subgrad;

TEST_CASE("parse and format rationals") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-4/2") == Rational(-2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-.5") == Rational(-1, 2));
  CHECK(parse_rational(" 7 ") == Rational(7));
  CHECK(format_rational(make_rational(-6, 4)) == "-3/2");
  CHECK(format_rational(Rational(5)) == "5");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("1e3"), Error);
}

TEST_CASE("round trip through text is exact") {
  for (long p = -40; p <= 40; p += 3) {
    for (long q = 1; q <= 17; q += 2) {
      const Rational r(p, q);
      Rational c = r;
      c.canonicalize();
      CHECK(parse_rational(format_rational(c)) == c);
    }
  }
}

TEST_CASE("doubles convert exactly") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(-3.0) == Rational(-3));
  const Rational tenth = rational_from_double(0.1);
  CHECK(tenth != Rational(1, 10));
  CHECK(tenth.get_d() == 0.1);
}

TEST_CASE("extended values order +infinity last") {
  const Extended inf = Extended::infinity();
  const Extended two(Rational(2));
  CHECK(two < inf);
  CHECK_FALSE(inf < two);
  CHECK((two + inf).is_infinite());
  CHECK((two + Extended(Rational(1))) == Extended(Rational(3)));
  CHECK(format_extended(inf) == "+inf");
  CHECK_THROWS(inf.value());
}

TEST_CASE("vector helpers") {
  const RationalVector a{Rational(1, 2), Rational(-3, 4)};
  const RationalVector b = RationalVector::from_ints({2, 1});
  CHECK(dot(a, b) == Rational(1, 4));
  CHECK(primitive_direction(a) == RationalVector::from_ints({2, -3}));
  CHECK(primitive_scale(a) * a == primitive_direction(a));
  CHECK(primitive_direction(RationalVector(3)).is_zero());
  CHECK(parse_rational_list("1/2, -3/4") == a);
  CHECK(format_vector(a) == "(1/2, -3/4)");
  CHECK(RationalVector::from_ints({0, 5}) < RationalVector::from_ints({1, -5}));
  CHECK_THROWS_AS(dot(a, RationalVector(3)), Error);
}

TEST_CASE("rref, rank and null space") {
  const RationalMatrix m = {RationalVector::from_ints({1, 2, 3}), RationalVector::from_ints({2, 4, 6}),
                            RationalVector::from_ints({1, 0, 1})};
  CHECK(linalg::rank(m, 3) == 2);
  const auto ns = linalg::nullspace(m, 3);
  REQUIRE(ns.size() == 1);
  CHECK(linalg::mat_vec(m, ns[0]).is_zero());
  CHECK(ns[0] == RationalVector::from_ints({1, 1, -1}));
  CHECK(linalg::independent_rows(m, 3) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("solve square systems") {
  const RationalMatrix a = {RationalVector::from_ints({2, 1}), RationalVector::from_ints({1, 3})};
  const auto x = linalg::solve(a, RationalVector::from_ints({3, 5}));
  REQUIRE(x);
  CHECK(*x == RationalVector{Rational(4, 5), Rational(7, 5)});
  const RationalMatrix sing = {RationalVector::from_ints({1, 2}), RationalVector::from_ints({2, 4})};
  CHECK_FALSE(linalg::solve(sing, RationalVector::from_ints({1, 1})));
}

TEST_CASE("orthogonal residual is orthogonal to the basis") {
  const RationalMatrix basis = {RationalVector::from_ints({1, 1, 0})};
  const RationalVector v = RationalVector::from_ints({3, 1, 2});
  const RationalVector r = linalg::orthogonal_residual(v, basis);
  CHECK(dot(r, basis[0]) == 0);
  CHECK(r == RationalVector::from_ints({1, -1, 2}));
}
