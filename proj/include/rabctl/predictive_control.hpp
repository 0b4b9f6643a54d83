/**
 * @file predictive_control.hpp
 * @brief Predictive feedback on the z-equation, gain admissibility, stability
 *        verdicts and the neighborhood activation gate.
 *
 * The controller adds u = K (x_p - x) to the z-equation, where the predicted
 * state x_p is either the derivative itself (DerivativeAsPrediction, the
 * literal one-step-ahead law) or the Euler look-ahead x + tau * x'
 * (EulerPrediction, an extension that vanishes at every equilibrium).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rabctl/dynamics.hpp"
#include "rabctl/eigen3.hpp"
#include "rabctl/errors.hpp"

namespace rabctl {

enum class PredictionMode { DerivativeAsPrediction, EulerPrediction };

/// "literal" / "euler", the spelling used in config files and CSV.
constexpr std::string_view to_string(PredictionMode m) {
  return m == PredictionMode::DerivativeAsPrediction ? "literal" : "euler";
}

inline std::optional<PredictionMode> parse_prediction_mode(std::string_view s) {
  if (s == "literal") return PredictionMode::DerivativeAsPrediction;
  if (s == "euler") return PredictionMode::EulerPrediction;
  return std::nullopt;
}

template <typename Scalar>
struct ControllerConfigT {
  Scalar K = Scalar(-0.6);
  Scalar epsilon = Scalar(0.1);
  Scalar t_on = Scalar(40);
  PredictionMode mode = PredictionMode::DerivativeAsPrediction;
  Scalar tau = Scalar(1);
  /// Component receiving u. Only z (index 2) is supported for this system.
  int controlled_component = 2;

  void validate() const {
    if (!std::isfinite(K)) throw std::invalid_argument("K must be finite");
    if (!(std::isfinite(epsilon) && epsilon > Scalar(0))) {
      throw std::invalid_argument("epsilon must be a finite positive number");
    }
    if (!(std::isfinite(t_on) && t_on >= Scalar(0))) {
      throw std::invalid_argument("t_on must be a finite nonnegative number");
    }
    if (!(std::isfinite(tau) && tau > Scalar(0))) {
      throw std::invalid_argument("tau must be a finite positive number");
    }
    if (controlled_component != 2) {
      throw std::invalid_argument("controlled_component must be 2 (z)");
    }
  }

  /// Number of grid samples spanned by tau; throws unless tau/dt is a positive integer.
  std::size_t delay_samples(Scalar dt) const {
    const Scalar ratio = tau / dt;
    const Scalar rounded = std::round(ratio);
    if (!(rounded >= Scalar(1)) || std::abs(ratio - rounded) >= Scalar(1e-9)) {
      throw std::invalid_argument("tau must be a positive integer multiple of dt");
    }
    return static_cast<std::size_t>(rounded);
  }

  friend bool operator==(const ControllerConfigT&, const ControllerConfigT&) = default;
};

using ControllerConfig = ControllerConfigT<double>;

/** @brief Control input on the z-equation at state @p s. */
template <typename Scalar>
Scalar control_input(const ParamsT<Scalar>& p, const StateT<Scalar>& s,
                     const ControllerConfigT<Scalar>& cfg) {
  const Scalar x = s(0);
  const Scalar y = s(1);
  const Scalar z = s(2);
  if (cfg.mode == PredictionMode::DerivativeAsPrediction) {
    return cfg.K * (-(p.d + Scalar(1)) * z + x * y);
  }
  return cfg.K * cfg.tau * (-p.d * z + x * y);
}

/// Open-loop field with the control input added to the z-equation.
template <typename Scalar>
StateT<Scalar> controlled_vector_field(const ParamsT<Scalar>& p, const StateT<Scalar>& s,
                                       const ControllerConfigT<Scalar>& cfg) {
  StateT<Scalar> ds = vector_field(p, s);
  const Scalar u = control_input(p, s, cfg);
  if (u != Scalar(0)) ds(2) += u;
  return ds;
}

/** @brief Open interval (lo, hi) of admissible gains. */
template <typename Scalar>
struct GainIntervalT {
  Scalar lo;
  Scalar hi;

  bool contains(Scalar K) const { return lo < K && K < hi; }
};

using GainInterval = GainIntervalT<double>;

/// Gains with |-d - K(d+1)| < 1, i.e. (-1, (1-d)/(d+1)).
template <typename Scalar>
GainIntervalT<Scalar> admissible_gain_interval(Scalar d) {
  if (!(std::isfinite(d) && d > Scalar(0))) {
    throw std::invalid_argument("d must be a finite positive number");
  }
  return {Scalar(-1), (Scalar(1) - d) / (d + Scalar(1))};
}

/// Linearized z-coefficient of the literal closed loop: -d - K(d+1).
template <typename Scalar>
Scalar closed_loop_scalar_coeff(Scalar d, Scalar K) {
  return -d - K * (d + Scalar(1));
}

/// Jacobian of controlled_vector_field (literal mode): z-row becomes
/// ((1+K) y, (1+K) x, -d - K(d+1)).
template <typename Scalar>
Matrix3T<Scalar> closed_loop_jacobian(const ParamsT<Scalar>& p, Scalar K,
                                      const StateT<Scalar>& at) {
  Matrix3T<Scalar> J = jacobian(p, at);
  const Scalar g = Scalar(1) + K;
  J(2, 0) = g * at(1);
  J(2, 1) = g * at(0);
  J(2, 2) = closed_loop_scalar_coeff(p.d, K);
  return J;
}

template <typename Scalar>
using SmallMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/**
 * @brief Stability of M = A + K (A - I) under two readings.
 *
 * discrete_ok is the spectral-radius test rho(M) < 1 used for gain selection;
 * continuous_ok is the standard max Re(lambda) < 0 test for x' = M x. They can
 * disagree: d=1, K=-0.6 gives M=0.2, which passes the first and fails the second.
 */
template <typename Scalar>
struct StabilityVerdictT {
  SmallMatrixT<Scalar> closed_loop;
  std::vector<std::complex<Scalar>> eigenvalues;
  Scalar spectral_radius = Scalar(0);
  bool discrete_ok = false;
  Scalar max_real_part = Scalar(0);
  bool continuous_ok = false;
  /// det(A - I) != 0.
  bool gain_exists = false;
};

using StabilityVerdict = StabilityVerdictT<double>;

template <typename Derived, typename DerivedK>
StabilityVerdictT<typename Derived::Scalar> closed_loop_verdict(
    const Eigen::MatrixBase<Derived>& A, const Eigen::MatrixBase<DerivedK>& Kmat) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Kmat.rows() != n || Kmat.cols() != n) {
    throw std::invalid_argument("closed_loop_verdict: A and K must be square and of equal shape");
  }
  if (n != 1 && n != 3) {
    throw std::invalid_argument("closed_loop_verdict: only 1x1 and 3x3 systems are supported");
  }
  if (!A.allFinite() || !Kmat.allFinite()) {
    throw NumericalError("closed_loop_verdict: non-finite input");
  }

  StabilityVerdictT<Scalar> v;
  const SmallMatrixT<Scalar> shifted = A - SmallMatrixT<Scalar>::Identity(n, n);
  v.closed_loop = A + Kmat * shifted;

  const Scalar det = shifted.determinant();
  const Scalar scale = std::max(Scalar(1), std::pow(shifted.norm(), Scalar(n)));
  v.gain_exists = std::abs(det) > Scalar(1e-12) * scale;

  if (n == 1) {
    v.eigenvalues = {std::complex<Scalar>(v.closed_loop(0, 0), 0)};
  } else {
    const Matrix3T<Scalar> M = v.closed_loop;
    const auto ev = eigen3(M);
    v.eigenvalues.assign(ev.begin(), ev.end());
  }
  v.spectral_radius = Scalar(0);
  v.max_real_part = -std::numeric_limits<Scalar>::infinity();
  for (const auto& l : v.eigenvalues) {
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) {
      throw NumericalError("closed_loop_verdict: eigenvalue solver produced non-finite values");
    }
    v.spectral_radius = std::max(v.spectral_radius, std::abs(l));
    v.max_real_part = std::max(v.max_real_part, l.real());
  }
  v.discrete_ok = v.spectral_radius < Scalar(1);
  v.continuous_ok = v.max_real_part < Scalar(0);
  return v;
}

/// Scalar form, e.g. A = -d for the linearized z-equation.
template <typename Scalar>
  requires std::is_arithmetic_v<Scalar>
StabilityVerdictT<Scalar> closed_loop_verdict(Scalar A, Scalar K) {
  return closed_loop_verdict(Eigen::Matrix<Scalar, 1, 1>::Constant(A),
                             Eigen::Matrix<Scalar, 1, 1>::Constant(K));
}

/// Gain matrix that feeds a scalar gain into the z-equation only.
template <typename Scalar>
Matrix3T<Scalar> z_gain_matrix(Scalar K) {
  Matrix3T<Scalar> G = Matrix3T<Scalar>::Zero();
  G(2, 2) = K;
  return G;
}

/** @brief Fixed-lag history of grid states; yields s(t - tau) once full. */
template <typename Scalar>
class DelayLineT {
 public:
  explicit DelayLineT(std::size_t lag) : buf_(lag) {
    if (lag == 0) throw std::invalid_argument("delay line lag must be positive");
  }

  void push(const StateT<Scalar>& s) {
    buf_[head_] = s;
    head_ = (head_ + 1) % buf_.size();
    if (size_ < buf_.size()) ++size_;
  }

  std::optional<StateT<Scalar>> delayed() const {
    if (size_ < buf_.size()) return std::nullopt;
    return buf_[head_];
  }

  std::size_t lag() const { return buf_.size(); }

 private:
  std::vector<StateT<Scalar>> buf_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

using DelayLine = DelayLineT<double>;

template <typename Scalar>
struct GateStateT {
  bool active = false;
  /// Euclidean |s(t) - s(t - tau)|; empty until the history covers tau.
  std::optional<Scalar> r;
};

using GateState = GateStateT<double>;

/// Active iff t > t_on and |s - s(t - tau)| < epsilon.
template <typename Scalar>
GateStateT<Scalar> activation_gate(const std::optional<StateT<Scalar>>& delayed, Scalar t,
                                   const StateT<Scalar>& s, const ControllerConfigT<Scalar>& cfg) {
  GateStateT<Scalar> g;
  if (!delayed) return g;
  g.r = (s - *delayed).norm();
  g.active = t > cfg.t_on && *g.r < cfg.epsilon;
  return g;
}

template <typename Scalar>
GateStateT<Scalar> activation_gate(const DelayLineT<Scalar>& history, Scalar t,
                                   const StateT<Scalar>& s, const ControllerConfigT<Scalar>& cfg) {
  return activation_gate(history.delayed(), t, s, cfg);
}

}  // namespace rabctl
