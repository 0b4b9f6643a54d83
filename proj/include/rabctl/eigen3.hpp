/**
 * @file eigen3.hpp
 * @brief Eigenvalues of a 3x3 real matrix as roots of its characteristic cubic.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "rabctl/dynamics.hpp"
#include "rabctl/errors.hpp"

namespace rabctl {

/** @brief Monic cubic lambda^3 + c2 lambda^2 + c1 lambda + c0. */
template <typename Scalar>
struct CubicT {
  Scalar c2;
  Scalar c1;
  Scalar c0;

  template <typename T>
  T operator()(const T& x) const {
    return ((x + T(c2)) * x + T(c1)) * x + T(c0);
  }

  template <typename T>
  T derivative(const T& x) const {
    return (T(3) * x + T(2 * c2)) * x + T(c1);
  }
};

/// det(lambda I - M) expanded through the trace and principal minors.
template <typename Scalar>
CubicT<Scalar> characteristic_cubic(const Matrix3T<Scalar>& M) {
  const Scalar trace = M.trace();
  const Scalar minors = (M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0)) +
                        (M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0)) +
                        (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1));
  return {-trace, minors, -M.determinant()};
}

namespace detail {

// A few Newton iterations; each is kept only if it lowers |p(x)|.
template <typename Scalar, typename T>
T polish_root(const CubicT<Scalar>& p, T x) {
  using std::abs;
  auto best = abs(p(x));
  for (int it = 0; it < 8 && best > Scalar(0); ++it) {
    const T dp = p.derivative(x);
    if (dp == T(0)) break;
    const T next = x - p(x) / dp;
    const auto r = abs(p(next));
    if (!(r < best)) break;
    x = next;
    best = r;
  }
  return x;
}

}  // namespace detail

/**
 * @brief All three roots of a monic cubic, conjugate pairs kept exact.
 *
 * Sorted by descending real part, then descending imaginary part.
 */
template <typename Scalar>
std::array<std::complex<Scalar>, 3> cubic_roots(const CubicT<Scalar>& poly) {
  using C = std::complex<Scalar>;
  if (!(std::isfinite(poly.c2) && std::isfinite(poly.c1) && std::isfinite(poly.c0))) {
    throw NumericalError("characteristic polynomial has non-finite coefficients");
  }
  const Scalar shift = poly.c2 / Scalar(3);
  // Depressed form mu^3 + p mu + q with lambda = mu - shift.
  const Scalar p = poly.c1 - poly.c2 * shift;
  const Scalar q = Scalar(2) * shift * shift * shift - shift * poly.c1 + poly.c0;
  const Scalar half_q = q / Scalar(2);
  const Scalar third_p = p / Scalar(3);
  const Scalar disc = half_q * half_q + third_p * third_p * third_p;

  std::array<C, 3> roots;
  if (p == Scalar(0) && q == Scalar(0)) {
    roots.fill(C(-shift, 0));
  } else if (disc > Scalar(0)) {
    // One real root; the other two follow from deflation.
    const Scalar sq = std::sqrt(disc);
    const Scalar A = -std::copysign(std::cbrt(std::abs(half_q) + sq), q);
    const Scalar B = (A != Scalar(0)) ? -third_p / A : Scalar(0);
    const Scalar r = detail::polish_root(poly, A + B - shift);
    const Scalar beta = poly.c2 + r;
    const Scalar gamma = poly.c1 + r * beta;
    const Scalar qd = beta * beta - Scalar(4) * gamma;
    roots[0] = C(r, 0);
    if (qd >= Scalar(0)) {
      const Scalar t = -(beta + std::copysign(std::sqrt(qd), beta)) / Scalar(2);
      const Scalar r1 = (t != Scalar(0)) ? t : Scalar(0);
      const Scalar r2 = (t != Scalar(0)) ? gamma / t : Scalar(0);
      roots[1] = C(detail::polish_root(poly, r1), 0);
      roots[2] = C(detail::polish_root(poly, r2), 0);
    } else {
      const C z = detail::polish_root(poly, C(-beta / Scalar(2), std::sqrt(-qd) / Scalar(2)));
      roots[1] = C(z.real(), std::abs(z.imag()));
      roots[2] = std::conj(roots[1]);
    }
  } else {
    // Three real roots (trigonometric form); p < 0 here.
    const Scalar m = Scalar(2) * std::sqrt(-third_p);
    const Scalar arg = std::clamp(Scalar(3) * q / (p * m), Scalar(-1), Scalar(1));
    const Scalar theta = std::acos(arg) / Scalar(3);
    constexpr Scalar kTwoThirdsPi = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3);
    for (int k = 0; k < 3; ++k) {
      const Scalar mu = m * std::cos(theta - kTwoThirdsPi * Scalar(k));
      roots[k] = C(detail::polish_root(poly, mu - shift), 0);
    }
  }

  std::sort(roots.begin(), roots.end(), [](const C& l, const C& r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
  });
  return roots;
}

/// Eigenvalues of @p M; throws NumericalError on non-finite input.
template <typename Scalar>
std::array<std::complex<Scalar>, 3> eigen3(const Matrix3T<Scalar>& M) {
  if (!M.allFinite()) throw NumericalError("eigen3: matrix has non-finite entries");
  return cubic_roots(characteristic_cubic(M));
}

}  // namespace rabctl
