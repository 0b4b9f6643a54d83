/**
 * @file integrator.hpp
 * @brief Fixed-step classical RK4 with an observer hook and a divergence guard.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "rabctl/dynamics.hpp"
#include "rabctl/errors.hpp"

namespace rabctl {

/// Any state component beyond this magnitude aborts an integration.
/// Attractor magnitudes for the systems studied here are O(10).
inline constexpr double kDivergenceBound = 1e6;

/** @brief Uniform grid t0, t0 + dt, ..., t_end; dt must divide the span. */
template <typename Scalar>
struct TimeGridT {
  Scalar t0 = Scalar(0);
  Scalar t_end = Scalar(200);
  Scalar dt = Scalar(0.1);

  void validate() const {
    if (!(std::isfinite(t0) && std::isfinite(t_end) && std::isfinite(dt))) {
      throw std::invalid_argument("time grid values must be finite");
    }
    if (!(dt > Scalar(0))) throw std::invalid_argument("dt must be positive");
    if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed t0");
    const Scalar ratio = (t_end - t0) / dt;
    if (std::abs(ratio - std::round(ratio)) >= Scalar(1e-9)) {
      throw std::invalid_argument("dt must divide (t_end - t0) evenly");
    }
  }

  std::size_t steps() const {
    return static_cast<std::size_t>(std::llround((t_end - t0) / dt));
  }

  /// Grid times come from a product, never from repeated addition.
  Scalar time_at(std::size_t k) const { return t0 + static_cast<Scalar>(k) * dt; }

  friend bool operator==(const TimeGridT&, const TimeGridT&) = default;
};

using TimeGrid = TimeGridT<double>;

/** @brief Integration aborted at a given step (divergence or non-finite values). */
class IntegrationError : public NumericalError {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : NumericalError("integration failed at step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/**
 * @brief One classical RK4 step with (1, 2, 2, 1)/6 weighting.
 *
 * @p f is called as f(t, s) and must return a StateT<Scalar>. A non-finite
 * stage derivative throws NumericalError.
 */
template <typename Scalar, typename Field>
StateT<Scalar> rk4_step(Field&& f, Scalar t, const StateT<Scalar>& s, Scalar dt) {
  const Scalar half = dt / Scalar(2);
  const auto checked = [](const StateT<Scalar>& k) -> const StateT<Scalar>& {
    if (!k.allFinite()) throw NumericalError("non-finite derivative in RK4 stage");
    return k;
  };
  const StateT<Scalar> k1 = checked(f(t, s));
  const StateT<Scalar> k2 = checked(f(t + half, StateT<Scalar>(s + half * k1)));
  const StateT<Scalar> k3 = checked(f(t + half, StateT<Scalar>(s + half * k2)));
  const StateT<Scalar> k4 = checked(f(t + dt, StateT<Scalar>(s + dt * k3)));
  return s + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

namespace detail {

template <typename Scalar>
void guard(std::size_t step, const StateT<Scalar>& s) {
  if (!s.allFinite()) throw IntegrationError(step, "non-finite state");
  if (s.cwiseAbs().maxCoeff() > Scalar(kDivergenceBound)) {
    throw IntegrationError(step, "state magnitude exceeded divergence bound 1e6");
  }
}

}  // namespace detail

/**
 * @brief Integrates over @p grid, calling observer(k, t_k, s_k) at every grid point.
 *
 * The observer runs before the step leaving t_k, so it may update state that
 * the field reads (e.g. a switching gate). Returns the state at t_end.
 */
template <typename Scalar, typename Field, typename Observer>
StateT<Scalar> integrate(Field&& f, const StateT<Scalar>& s0, const TimeGridT<Scalar>& grid,
                         Observer&& observer) {
  grid.validate();
  const std::size_t n = grid.steps();
  StateT<Scalar> s = s0;
  detail::guard(0, s);
  for (std::size_t k = 0; k < n; ++k) {
    const Scalar t = grid.time_at(k);
    observer(k, t, static_cast<const StateT<Scalar>&>(s));
    try {
      s = rk4_step(f, t, s, grid.dt);
    } catch (const IntegrationError&) {
      throw;
    } catch (const NumericalError& e) {
      throw IntegrationError(k + 1, e.what());
    }
    detail::guard(k + 1, s);
  }
  observer(n, grid.time_at(n), static_cast<const StateT<Scalar>&>(s));
  return s;
}

}  // namespace rabctl
