/**
 * @file dynamics.hpp
 * @brief Rabinovich vector field, Jacobian and closed-form equilibria.
 *
 * All routines are templated on the scalar type and operate on fixed-size
 * Eigen vectors/matrices. Matrices are indexed (row, column); row i holds the
 * partial derivatives of the i-th component of the field.
 */
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rabctl {

template <typename Scalar>
using StateT = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3T = Eigen::Matrix<Scalar, 3, 3>;

using State = StateT<double>;
using Matrix3 = Matrix3T<double>;

/** @brief Positive constants of the Rabinovich system. */
template <typename Scalar>
struct ParamsT {
  Scalar a;
  Scalar b;
  Scalar d;
  Scalar h;

  /// Throws std::invalid_argument naming the first non-positive field.
  void validate() const {
    const auto check = [](Scalar v, const char* name) {
      if (!(std::isfinite(v) && v > Scalar(0))) {
        throw std::invalid_argument(std::string("parameter '") + name +
                                    "' must be a finite positive number");
      }
    };
    check(a, "a");
    check(b, "b");
    check(d, "d");
    check(h, "h");
  }

  /// The chaotic parameter set a=4, b=1, d=1, h=6.75.
  static ParamsT classic() { return {Scalar(4), Scalar(1), Scalar(1), Scalar(6.75)}; }

  friend bool operator==(const ParamsT&, const ParamsT&) = default;
};

using Params = ParamsT<double>;

/// Builds a state from external input, rejecting NaN and infinities.
template <typename Scalar = double>
StateT<Scalar> make_state(Scalar x, Scalar y, Scalar z) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(z))) {
    throw std::invalid_argument("state components must be finite");
  }
  return StateT<Scalar>(x, y, z);
}

/** @brief Time derivative (x', y', z') of the Rabinovich system at @p s. */
template <typename Scalar>
StateT<Scalar> vector_field(const ParamsT<Scalar>& p, const StateT<Scalar>& s) {
  const Scalar x = s(0);
  const Scalar y = s(1);
  const Scalar z = s(2);
  return StateT<Scalar>(-p.a * x + p.h * y + y * z,
                        p.h * x - p.b * y - x * z,
                        -p.d * z + x * y);
}

template <typename Scalar>
Matrix3T<Scalar> jacobian(const ParamsT<Scalar>& p, const StateT<Scalar>& s) {
  const Scalar x = s(0);
  const Scalar y = s(1);
  const Scalar z = s(2);
  Matrix3T<Scalar> J;
  J << -p.a, p.h + z, y,
       p.h - z, -p.b, -x,
       y, x, -p.d;
  return J;
}

template <typename Scalar>
Scalar residual_norm(const ParamsT<Scalar>& p, const StateT<Scalar>& s) {
  return vector_field(p, s).norm();
}

/** @brief Fixed points of the field: origin, then (+x*, +y*, z*), then its mirror. */
template <typename Scalar>
struct EquilibriumSetT {
  std::vector<StateT<Scalar>> points;
  /// True when h^2 <= a*b and only the origin exists.
  bool degenerate = false;

  std::size_t count() const { return points.size(); }
};

using EquilibriumSet = EquilibriumSetT<double>;

/**
 * @brief Closed-form equilibria.
 *
 * Nontrivial points solve h^2 - z^2 = a*b, x*y = d*z and a*x = y*(h+z):
 *   z* = sqrt(h^2 - a b),  y* = sqrt(a d z* / (h + z*)),  x* = y* (h + z*) / a.
 */
template <typename Scalar>
EquilibriumSetT<Scalar> equilibria(const ParamsT<Scalar>& p) {
  p.validate();
  EquilibriumSetT<Scalar> out;
  out.points.push_back(StateT<Scalar>::Zero());
  const Scalar disc = p.h * p.h - p.a * p.b;
  if (!(disc > Scalar(0))) {
    out.degenerate = true;
    return out;
  }
  const Scalar zs = std::sqrt(disc);
  const Scalar ys = std::sqrt(p.a * p.d * zs / (p.h + zs));
  const Scalar xs = ys * (p.h + zs) / p.a;
  out.points.emplace_back(xs, ys, zs);
  out.points.emplace_back(-xs, -ys, zs);
  return out;
}

}  // namespace rabctl
