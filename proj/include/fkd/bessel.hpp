#pragma once

// Bessel functions of the first kind on the half-integer order lattice
// nu = 0, 1/2, 1, 3/2, ...: values, derivatives, continued-fraction ratios,
// first positive zeros and the radial normalisation integral.

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <numbers>
#include <string>

#include "fkd/errors.hpp"
#include "fkd/quadrature.hpp"

namespace fkd {

/// Bessel order stored as twice its value, so nu = twice / 2 is exact.
class HalfIntOrder {
 public:
  constexpr HalfIntOrder() = default;
  constexpr explicit HalfIntOrder(int twice_order) : twice_(twice_order) {
    if (twice_order < 0) throw DomainError("HalfIntOrder: negative order");
  }

  /// nu = N/2 - 1, the order whose first zero gives the ball eigenvalue.
  static constexpr HalfIntOrder for_dimension(int dim) {
    if (dim < 2) throw DomainError("HalfIntOrder: dimension must be >= 2");
    return HalfIntOrder(dim - 2);
  }

  /// ell_k = k + N/2 - 1, the order of the degree-k radial mode.
  static constexpr HalfIntOrder for_mode(int dim, int degree) {
    if (dim < 2) throw DomainError("HalfIntOrder: dimension must be >= 2");
    if (degree < 0) throw DomainError("HalfIntOrder: degree must be >= 0");
    return HalfIntOrder(2 * degree + dim - 2);
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfIntOrder operator+(int steps) const { return HalfIntOrder(twice_ + 2 * steps); }

  constexpr auto operator<=>(const HalfIntOrder&) const = default;

 private:
  int twice_ = 0;
};

/// Certified enclosure of j_nu.
struct ZeroBracket {
  double lower;
  double upper;
};

inline constexpr double kMaxBesselOrder = 200.0;

namespace detail {

// (x/2)^nu / Gamma(nu + 1) as a running product, accurate to a few ulps
// per factor and free of lgamma round-off.
inline double series_prefactor(HalfIntOrder order, double x) {
  const double half_x = 0.5 * x;
  const int n = order.twice() / 2;
  double p;
  double shift;
  if (order.is_integer()) {
    p = 1.0;
    shift = 0.0;
  } else {
    p = std::sqrt(half_x) / (0.5 * std::sqrt(std::numbers::pi));
    shift = 0.5;
  }
  for (int m = 1; m <= n; ++m) p *= half_x / (m + shift);
  return p;
}

inline double bessel_series(HalfIntOrder order, double x) {
  const double nu = order.value();
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return series_prefactor(order, x) * sum;
}

// Miller's backward recurrence. The unnormalised sequence is scaled with the
// Neumann sum 1 = J_0 + 2 sum J_2k (integer orders) or fitted to the closed
// forms of J_{1/2} and J_{-1/2} (half-integer orders).
inline double bessel_miller(HalfIntOrder order, double x) {
  const int n = order.twice() / 2;
  const double frac = order.is_integer() ? 0.0 : 0.5;
  const double reach = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(std::ceil(reach + 20.0 + 15.0 * std::cbrt(0.5 * x)));
  if (start % 2 == 1) ++start;

  constexpr int kRescaleExp = 600;
  const double big = std::ldexp(1.0, kRescaleExp);
  const double small = std::ldexp(1.0, -kRescaleExp);

  double f_next = 0.0;  // f_{m+1}
  double f_cur = 1e-30;  // f_m, m = start
  double neumann = 0.0;
  double captured = 0.0;
  int rescales_after_capture = 0;
  bool have_capture = false;
  double f_low = 0.0;       // order frac
  double f_below = 0.0;     // order frac - 1 (half-integer only)

  for (int m = start; m >= 0; --m) {
    if (m == n) {
      captured = f_cur;
      have_capture = true;
    }
    if (order.is_integer() && m % 2 == 0) neumann += (m == 0 ? 1.0 : 2.0) * f_cur;
    if (m == 0) {
      f_low = f_cur;
      if (!order.is_integer()) f_below = (2.0 * frac / x) * f_cur - f_next;
      break;
    }
    const double f_prev = (2.0 * (m + frac) / x) * f_cur - f_next;
    f_next = f_cur;
    f_cur = f_prev;
    if (std::abs(f_cur) > big) {
      f_cur *= small;
      f_next *= small;
      neumann *= small;
      if (have_capture) ++rescales_after_capture;
    }
  }

  double scale;
  if (order.is_integer()) {
    scale = 1.0 / neumann;
  } else {
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    const double j_half = amp * std::sin(x);
    const double j_minus_half = amp * std::cos(x);
    scale = (f_low * j_half + f_below * j_minus_half) / (f_low * f_low + f_below * f_below);
  }
  return std::ldexp(captured * scale, -kRescaleExp * rescales_after_capture);
}

inline double bessel_j_unchecked(HalfIntOrder order, double x) {
  if (x == 0.0) return order.twice() == 0 ? 1.0 : 0.0;
  const double nu = order.value();
  if (x * x <= 4.0 * (nu + 1.0)) return bessel_series(order, x);
  return bessel_miller(order, x);
}

inline void check_argument(double x, const char* who) {
  if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
  if (x < 0.0) throw DomainError(std::string(who) + ": negative argument");
}

inline void check_order(HalfIntOrder order, const char* who) {
  if (order.value() > kMaxBesselOrder) {
    throw RangeError(std::string(who) + ": order above supported range");
  }
}

}  // namespace detail

/// J_nu(x) for x >= 0 and nu <= 200.
inline double bessel_j(HalfIntOrder order, double x) {
  detail::check_argument(x, "bessel_j");
  detail::check_order(order, "bessel_j");
  return detail::bessel_j_unchecked(order, x);
}

/// J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
inline double bessel_j_prime(HalfIntOrder order, double x) {
  detail::check_argument(x, "bessel_j_prime");
  detail::check_order(order, "bessel_j_prime");
  if (x == 0.0) {
    if (order.twice() == 0) return 0.0;
    throw DomainError("bessel_j_prime: quotient nu/x is singular at x = 0");
  }
  return (order.value() / x) * detail::bessel_j_unchecked(order, x) -
         detail::bessel_j_unchecked(order + 1, x);
}

/// Closed trigonometric forms for nu = 1/2 .. 9/2, kept as an independent
/// evaluation path. Loses relative accuracy for x well below nu.
inline double bessel_j_half_closed(HalfIntOrder order, double x) {
  if (order.is_integer() || order.twice() > 9) {
    throw RangeError("bessel_j_half_closed: order must be one of 1/2 .. 9/2");
  }
  if (!(x > 0.0)) throw DomainError("bessel_j_half_closed: x must be positive");
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double x4 = x3 * x;
  double j;  // spherical Bessel j_n(x)
  switch (order.twice()) {
    case 1:
      j = s / x;
      break;
    case 3:
      j = s / x2 - c / x;
      break;
    case 5:
      j = (3.0 / x3 - 1.0 / x) * s - 3.0 * c / x2;
      break;
    case 7:
      j = (15.0 / x4 - 6.0 / x2) * s - (15.0 / x3 - 1.0 / x) * c;
      break;
    default:  // 9
      j = (105.0 / (x4 * x) - 45.0 / x3 + 1.0 / x) * s - (105.0 / x4 - 10.0 / x2) * c;
      break;
  }
  return std::sqrt(2.0 * x / std::numbers::pi) * j;
}

/// J_{nu+1}(x) / J_nu(x) from the continued fraction
///   1 / (2(nu+1)/x - 1 / (2(nu+2)/x - ...)),
/// evaluated forward with the modified Lentz method.
inline double bessel_ratio_cf(HalfIntOrder order, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_ratio_cf: x must be positive");
  const double nu = order.value();
  if (!(2.0 * (nu + 1.0) / x > 1.0)) {
    throw DomainError("bessel_ratio_cf: requires 2(nu+1)/x > 1");
  }
  constexpr double tiny = 1e-300;
  constexpr int kDepthCap = 10000;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int m = 1; m <= kDepthCap; ++m) {
    const double a = (m == 1) ? 1.0 : -1.0;
    const double b = 2.0 * (nu + m) / x;
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-14) return f;
  }
  throw ConvergenceError("bessel_ratio_cf: no convergence within depth cap");
}

/// Enclosure nu <= j_nu <= sqrt(nu+1) (sqrt(nu+2) + 1), i.e. the classical
/// bounds N/2 - 1 <= j_{N/2-1} <= sqrt(N/2) (sqrt(N/2+1) + 1).
inline ZeroBracket first_zero_bracket(HalfIntOrder order) {
  const double nu = order.value();
  return {nu, std::sqrt(nu + 1.0) * (std::sqrt(nu + 2.0) + 1.0)};
}

/// First positive zero j_nu: bisection inside the bracket, then Newton.
inline double first_zero(HalfIntOrder order) {
  detail::check_order(order, "first_zero");
  const ZeroBracket bracket = first_zero_bracket(order);
  double lo = bracket.lower;
  double hi = bracket.upper;
  double f_lo = detail::bessel_j_unchecked(order, lo);
  const double f_hi = detail::bessel_j_unchecked(order, hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw BracketError("first_zero: bracket does not straddle a sign change");
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = detail::bessel_j_unchecked(order, mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 50; ++iter) {
    const double f = detail::bessel_j_unchecked(order, x);
    if (f == 0.0) return x;
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double df = (order.value() / x) * f - detail::bessel_j_unchecked(order + 1, x);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // overshoot
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
    x = next;
  }
  return x;
}

/// The normalisation integral of the radial eigenfunction,
/// int_0^{j_nu} r J_nu(r)^2 dr, by adaptive Gauss-Legendre quadrature.
inline double radial_norm_integral(HalfIntOrder order) {
  const double zero = first_zero(order);
  auto integrand = [order](double r) {
    const double j = detail::bessel_j_unchecked(order, r);
    return r * j * j;
  };
  return integrate_adaptive(integrand, 0.0, zero, 1e-13);
}

}  // namespace fkd
