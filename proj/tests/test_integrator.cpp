#include <doctest.h>

#include <cmath>
#include <vector>

#include "rabctl/integrator.hpp"
#include "test_support.hpp"

using namespace rabctl;
using rabctl::testing::same_bits;

namespace {

const auto kZero = [](double, const State&) { return State::Zero().eval(); };
const auto kDecay = [](double, const State& s) { return State(-s); };
const auto kGrowth = [](double, const State& s) { return State(s); };

// RK4 applied to x' = -x multiplies x by the degree-4 Taylor polynomial of e^{-h}.
double rk4_decay_factor(double h) { return 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0; }

double decay_error(double dt) {
  const TimeGrid grid{0.0, 1.0, dt};
  const State end = integrate(kDecay, State(1, 0, 0), grid, [](auto, auto, const auto&) {});
  return std::abs(end(0) - std::exp(-1.0));
}

}  // namespace

TEST_CASE("rk4_step leaves a state unchanged under the zero field") {
  const State s(1.5, -1.25, 3.5);
  CHECK(rk4_step(kZero, 0.0, s, 0.1) == s);
}

TEST_CASE("rk4_step on linear decay equals the RK4 polynomial") {
  const State s = rk4_step(kDecay, 0.0, State(1, 0, 0), 0.1);
  CHECK(rk4_decay_factor(0.1) == doctest::Approx(0.9048375).epsilon(1e-12));
  CHECK(s(0) == doctest::Approx(rk4_decay_factor(0.1)).epsilon(1e-15));
  CHECK(std::abs(s(0) - std::exp(-0.1)) < 1e-7);
  CHECK(s(1) == 0.0);
}

TEST_CASE("rk4_step is bit-reproducible") {
  const State s(0.1, 0.2, 0.3);
  const Params p = Params::classic();
  const auto f = [&p](double, const State& q) { return vector_field(p, q); };
  CHECK(same_bits(rk4_step(f, 0.0, s, 0.1), rk4_step(f, 0.0, s, 0.1)));
}

TEST_CASE("rk4_step rejects non-finite derivatives") {
  const auto bad = [](double, const State&) { return State(NAN, 0, 0); };
  CHECK_THROWS_AS(rk4_step(bad, 0.0, State::Zero().eval(), 0.1), NumericalError);
}

TEST_CASE("halving dt cuts the global error by about 16") {
  const double ratio = decay_error(0.1) / decay_error(0.05);
  CHECK(ratio > 16.0 * 0.8);
  CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("property: empirical order is 4.0 +- 0.2") {
  const double e1 = decay_error(0.1);
  const double e2 = decay_error(0.05);
  const double e3 = decay_error(0.025);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::log2(e2 / e3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("integrate calls the observer at every grid point") {
  const State s0(1, 2, 3);
  std::vector<double> times;
  std::vector<std::size_t> indices;
  const State end = integrate(kZero, s0, TimeGrid{0.0, 1.0, 0.1},
                              [&](std::size_t k, double t, const State&) {
                                indices.push_back(k);
                                times.push_back(t);
                              });
  CHECK(times.size() == 11);
  CHECK(end == s0);
  for (std::size_t k = 0; k < indices.size(); ++k) CHECK(indices[k] == k);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid times come from multiplication") {
  const TimeGrid grid{0.0, 200.0, 0.1};
  CHECK(grid.steps() == 2000);
  CHECK(std::abs(grid.time_at(2000) - 200.0) < 1e-12);
  double summed = 0.0;
  for (int k = 0; k < 2000; ++k) summed += 0.1;
  // Repeated addition drifts; the grid does not.
  CHECK(std::abs(summed - 200.0) > std::abs(grid.time_at(2000) - 200.0));
}

TEST_CASE("time grid validation") {
  CHECK_NOTHROW(TimeGrid({0.0, 200.0, 0.1}).validate());
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 0.3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({0.0, NAN, 0.1}).validate(), std::invalid_argument);
}

TEST_CASE("Rabinovich orbit over [0, 200] stays inside the divergence bound") {
  const Params p = Params::classic();
  const auto f = [&p](double, const State& s) { return vector_field(p, s); };
  double peak = 0.0;
  CHECK_NOTHROW(integrate(f, State(1.5, -1.25, 3.5), TimeGrid{0.0, 200.0, 0.1},
                          [&](std::size_t, double, const State& s) {
                            peak = std::max(peak, s.cwiseAbs().maxCoeff());
                          }));
  CHECK(peak < 50.0);
}

TEST_CASE("divergence guard reports the crossing step") {
  // Exact RK4 growth factor per step for x' = x, dt = 0.1; first k with g^k > 1e6.
  const double g = 1.0 + 0.1 + 0.01 / 2 + 0.001 / 6 + 0.0001 / 24;
  std::size_t expected = 0;
  for (double v = 1.0; v <= 1e6; v *= g) ++expected;

  try {
    integrate(kGrowth, State(1, 1, 1), TimeGrid{0.0, 100.0, 0.1}, [](auto, auto, const auto&) {});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == expected);
    CHECK(std::string(e.what()).find(std::to_string(expected)) != std::string::npos);
  }
}

TEST_CASE("non-finite initial state is rejected at step 0") {
  try {
    integrate(kZero, State(NAN, 0, 0), TimeGrid{0.0, 1.0, 0.1}, [](auto, auto, const auto&) {});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == 0);
  }
}

TEST_CASE("property: identical integrations produce identical observer sequences") {
  const Params p = Params::classic();
  const auto f = [&p](double, const State& s) { return vector_field(p, s); };
  const auto record = [&] {
    std::vector<State> out;
    integrate(f, State(1.5, -1.25, 3.5), TimeGrid{0.0, 50.0, 0.1},
              [&](std::size_t, double, const State& s) { out.push_back(s); });
    return out;
  };
  const auto a = record();
  const auto b = record();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(same_bits(a[i], b[i]));
}
