#include <doctest.h>

#include <cmath>

#include "rabctl/dynamics.hpp"
#include "test_support.hpp"

using namespace rabctl;
using rabctl::testing::central_difference_jacobian;
using rabctl::testing::random_state;
using rabctl::testing::same_bits;
using rabctl::testing::uniform;

namespace {
const Params kClassic = Params::classic();
}

TEST_CASE("vector_field at the origin vanishes") {
  CHECK(vector_field(kClassic, State::Zero().eval()) == State::Zero());
}

TEST_CASE("vector_field matches hand substitution at the initial point") {
  // -4(1.5) + 6.75(-1.25) + (-1.25)(3.5);  6.75(1.5) + 1.25 - 1.5(3.5);  -3.5 + 1.5(-1.25)
  const State ds = vector_field(kClassic, State(1.5, -1.25, 3.5));
  CHECK(ds(0) == doctest::Approx(-18.8125).epsilon(1e-15));
  CHECK(ds(1) == doctest::Approx(6.125).epsilon(1e-15));
  CHECK(ds(2) == doctest::Approx(-5.375).epsilon(1e-15));
}

TEST_CASE("published 4-decimal equilibrium is a near-zero of the field") {
  CHECK(residual_norm(kClassic, State(4.6119, 1.3979, 6.4469)) < 5e-4);
}

TEST_CASE("vector_field is deterministic") {
  const State s(0.3, -2.7, 9.1);
  CHECK(same_bits(vector_field(kClassic, s), vector_field(kClassic, s)));
}

TEST_CASE("jacobian entries") {
  SUBCASE("origin") {
    Matrix3 expected;
    expected << -4, 6.75, 0, 6.75, -1, 0, 0, 0, -1;
    CHECK(jacobian(kClassic, State::Zero().eval()) == expected);
  }
  SUBCASE("(1,1,1)") {
    Matrix3 expected;
    expected << -4, 7.75, 1, 5.75, -1, -1, 1, 1, -1;
    CHECK(jacobian(kClassic, State(1, 1, 1)) == expected);
  }
  SUBCASE("finite differences at the initial point") {
    const State s(1.5, -1.25, 3.5);
    const Matrix3 fd =
        central_difference_jacobian([](const State& q) { return vector_field(kClassic, q); }, s);
    CHECK((jacobian(kClassic, s) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("property: jacobian agrees with central differences on random states") {
  for (int i = 0; i < 100; ++i) {
    const State s = random_state();
    const Matrix3 fd =
        central_difference_jacobian([](const State& q) { return vector_field(kClassic, q); }, s);
    REQUIRE((jacobian(kClassic, s) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("property: mirror symmetry (x,y,z) -> (-x,-y,z) is bit-exact") {
  for (int i = 0; i < 200; ++i) {
    const State s = random_state();
    const State ds = vector_field(kClassic, s);
    const State dm = vector_field(kClassic, State(-s(0), -s(1), s(2)));
    REQUIRE(same_bits(dm, State(-ds(0), -ds(1), ds(2))));
  }
}

TEST_CASE("equilibria for the chaotic parameter set") {
  const EquilibriumSet eqs = equilibria(kClassic);
  REQUIRE(eqs.count() == 3);
  CHECK_FALSE(eqs.degenerate);
  CHECK(eqs.points[0] == State::Zero());
  CHECK((eqs.points[1] - State(4.6119, 1.3979, 6.4469)).cwiseAbs().maxCoeff() < 1e-3);
  CHECK((eqs.points[2] - State(-4.6119, -1.3979, 6.4469)).cwiseAbs().maxCoeff() < 1e-3);
  // z* = sqrt(6.75^2 - 4) = sqrt(41.5625)
  CHECK(eqs.points[1](2) == doctest::Approx(std::sqrt(41.5625)).epsilon(1e-15));
  CHECK(eqs.points[1](2) == doctest::Approx(6.446898).epsilon(1e-7));
  for (const State& p : eqs.points) CHECK(residual_norm(kClassic, p) < 1e-9);
  CHECK(eqs.points[2] == State(-eqs.points[1](0), -eqs.points[1](1), eqs.points[1](2)));
}

TEST_CASE("equilibria degenerate branch returns origin only") {
  const EquilibriumSet eqs = equilibria(Params{1, 1, 1, 0.5});
  CHECK(eqs.count() == 1);
  CHECK(eqs.degenerate);
  CHECK(eqs.points[0] == State::Zero());
  // boundary h^2 == ab is degenerate as well
  CHECK(equilibria(Params{4, 1, 1, 2}).count() == 1);
}

TEST_CASE("property: equilibrium count and residuals over random parameters") {
  for (int i = 0; i < 500; ++i) {
    const Params p{uniform(0.1, 10), uniform(0.1, 10), uniform(0.1, 10), uniform(0.1, 10)};
    const EquilibriumSet eqs = equilibria(p);
    REQUIRE(eqs.count() == (p.h * p.h > p.a * p.b ? 3u : 1u));
    for (const State& s : eqs.points) REQUIRE(residual_norm(p, s) < 1e-9);
    if (eqs.count() == 3) {
      REQUIRE(eqs.points[1](0) > 0);
      REQUIRE(eqs.points[2] == State(-eqs.points[1](0), -eqs.points[1](1), eqs.points[1](2)));
    }
  }
}

TEST_CASE("residual_norm") {
  CHECK(residual_norm(kClassic, State::Zero().eval()) == 0.0);
  // field at (1,0,0) is (-4, 6.75, 0)
  CHECK(residual_norm(kClassic, State(1, 0, 0)) == doctest::Approx(std::sqrt(16 + 45.5625)));
  CHECK(residual_norm(kClassic, State(1, 0, 0)) == doctest::Approx(7.846177).epsilon(1e-7));
}

TEST_CASE("parameter and state validation") {
  CHECK_NOTHROW(kClassic.validate());
  CHECK_THROWS_WITH_AS(Params({4, 1, -1, 6.75}).validate(), doctest::Contains("'d'"),
                       std::invalid_argument);
  CHECK_THROWS_AS(Params({0, 1, 1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Params({NAN, 1, 1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(equilibria(Params{1, 1, 1, -2}), std::invalid_argument);
  CHECK_THROWS_AS(make_state(1.0, std::nan(""), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_state(HUGE_VAL, 0.0, 0.0), std::invalid_argument);
  CHECK(make_state(1.0, 2.0, 3.0) == State(1, 2, 3));
}

TEST_CASE("other scalar types") {
  const ParamsT<long double> pl = ParamsT<long double>::classic();
  const auto eql = equilibria(pl);
  CHECK(residual_norm(pl, eql.points[1]) < 1e-15L);
  const ParamsT<float> pf = ParamsT<float>::classic();
  CHECK(residual_norm(pf, equilibria(pf).points[2]) < 1e-4f);
}
