#pragma once

// Harmonically perturbed unit balls r = c(t) (1 + t V(xi)): exact volume
// normalisation, perimeter/volume by quadrature, the analytic t^2
// coefficients of both deficits, and the Fourier-Bessel field solving the
// boundary-velocity Helmholtz problem.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fkd/bessel.hpp"
#include "fkd/errors.hpp"
#include "fkd/quadrature.hpp"
#include "fkd/spectral_constants.hpp"

namespace fkd {

enum class HarmonicPhase { Cos, Sin, Zonal };

inline const char* to_string(HarmonicPhase phase) {
  switch (phase) {
    case HarmonicPhase::Cos:
      return "cos";
    case HarmonicPhase::Sin:
      return "sin";
    case HarmonicPhase::Zonal:
      return "zonal";
  }
  return "?";
}

struct HarmonicMode {
  int degree = 1;
  double coefficient = 0.0;
  HarmonicPhase phase = HarmonicPhase::Cos;
};

/// Legendre P_k(mu) and P_k'(mu) by the three-term recurrences.
inline std::pair<double, double> legendre(int k, double mu) {
  double p_prev = 1.0;
  double p = mu;
  double dp_prev = 0.0;
  double dp = 1.0;
  if (k == 0) return {1.0, 0.0};
  for (int m = 2; m <= k; ++m) {
    const double p_next = ((2.0 * m - 1.0) * mu * p - (m - 1.0) * p_prev) / m;
    const double dp_next = dp_prev + (2.0 * m - 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

/// L^2(S^{N-1})-normalised harmonic of one mode, for N = 2 (angle is the
/// azimuth) and zonal N = 3 (angle is the polar angle).
inline double harmonic_value(int dim, const HarmonicMode& mode, double angle) {
  const int k = mode.degree;
  if (dim == 2) {
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    return norm * (mode.phase == HarmonicPhase::Sin ? std::sin(k * angle) : std::cos(k * angle));
  }
  if (dim == 3) {
    const double norm = std::sqrt((2.0 * k + 1.0) / (4.0 * std::numbers::pi));
    return norm * legendre(k, std::cos(angle)).first;
  }
  throw UnsupportedDimensionError("harmonic_value: pointwise harmonics exist only for N = 2, 3");
}

inline double harmonic_angular_derivative(int dim, const HarmonicMode& mode, double angle) {
  const int k = mode.degree;
  if (dim == 2) {
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    return norm * k * (mode.phase == HarmonicPhase::Sin ? std::cos(k * angle) : -std::sin(k * angle));
  }
  if (dim == 3) {
    const double norm = std::sqrt((2.0 * k + 1.0) / (4.0 * std::numbers::pi));
    return -norm * std::sin(angle) * legendre(k, std::cos(angle)).second;
  }
  throw UnsupportedDimensionError("harmonic_angular_derivative: only N = 2, 3");
}

/// Boundary velocity V = sum a_k Y_k on the unit sphere. For N = 2 each
/// degree may carry a cosine and a sine part; for N >= 3 modes are zonal
/// representatives and only the per-degree energy a_k^2 matters.
class HarmonicProfile {
 public:
  HarmonicProfile() = default;
  HarmonicProfile(int dim, std::vector<HarmonicMode> modes) : dim_(dim), modes_(std::move(modes)) {
    if (dim < 2) throw InvalidProfileError("profile: dimension must be >= 2");
    std::vector<std::pair<int, HarmonicPhase>> seen;
    for (const auto& m : modes_) {
      if (m.degree == 0) {
        throw InvalidProfileError("profile: degree-0 mode violates the volume constraint");
      }
      if (m.degree < 0) throw InvalidProfileError("profile: negative degree");
      if (!std::isfinite(m.coefficient)) throw InvalidProfileError("profile: non-finite coefficient");
      const bool planar_phase = m.phase != HarmonicPhase::Zonal;
      if ((dim == 2) != planar_phase) {
        throw InvalidProfileError(dim == 2 ? "profile: N = 2 modes need phase cos or sin"
                                           : "profile: N >= 3 modes need phase zonal");
      }
      const auto key = std::make_pair(m.degree, m.phase);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        throw InvalidProfileError("profile: duplicate mode for degree " + std::to_string(m.degree));
      }
      seen.push_back(key);
    }
  }

  int dim() const { return dim_; }
  const std::vector<HarmonicMode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  /// a_k^2 per degree.
  std::map<int, double> degree_energy() const {
    std::map<int, double> energy;
    for (const auto& m : modes_) energy[m.degree] += m.coefficient * m.coefficient;
    return energy;
  }

  double l2_norm_squared() const {
    double s = 0.0;
    for (const auto& m : modes_) s += m.coefficient * m.coefficient;
    return s;
  }

  /// Lowest degree >= 2 with non-zero coefficient, or 0 when there is none.
  int lowest_active_degree() const {
    int lowest = 0;
    for (const auto& [k, e] : degree_energy()) {
      if (k >= 2 && e > 0.0 && (lowest == 0 || k < lowest)) lowest = k;
    }
    return lowest;
  }

  double value(double angle) const {
    double v = 0.0;
    for (const auto& m : modes_) v += m.coefficient * harmonic_value(dim_, m, angle);
    return v;
  }

  double angular_derivative(double angle) const {
    double v = 0.0;
    for (const auto& m : modes_) v += m.coefficient * harmonic_angular_derivative(dim_, m, angle);
    return v;
  }

  /// max |V| sampled on a dense angular grid.
  double max_abs(int samples = 4096) const {
    const double span = dim_ == 2 ? 2.0 * std::numbers::pi : std::numbers::pi;
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) m = std::max(m, std::abs(value(span * i / samples)));
    return m;
  }

  double min_value(int samples = 4096) const {
    const double span = dim_ == 2 ? 2.0 * std::numbers::pi : std::numbers::pi;
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) m = std::min(m, value(span * i / samples));
    return m;
  }

  HarmonicProfile negated() const {
    HarmonicProfile p = *this;
    for (auto& m : p.modes_) m.coefficient = -m.coefficient;
    return p;
  }

 private:
  int dim_ = 2;
  std::vector<HarmonicMode> modes_;
};

inline constexpr int kPlanarQuadratureNodes = 2048;
inline constexpr int kZonalQuadratureNodes = 512;
inline constexpr double kStarShapeGuard = 0.5;

namespace detail {

inline void require_geometric_dimension(int dim, const char* who) {
  if (dim != 2 && dim != 3) {
    throw UnsupportedDimensionError(std::string(who) + ": only N = 2 and zonal N = 3 are supported");
  }
}

inline const GaussLegendreRule& zonal_rule() {
  static const GaussLegendreRule rule = gauss_legendre(kZonalQuadratureNodes);
  return rule;
}

// Volume enclosed by r < s (1 + t V) for s = 1.
inline double raw_volume(const HarmonicProfile& profile, double t) {
  if (profile.dim() == 2) {
    const int n = kPlanarQuadratureNodes;
    const double h = 2.0 * std::numbers::pi / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = 1.0 + t * profile.value(h * i);
      sum += 0.5 * r * r;
    }
    return sum * h;
  }
  const auto& rule = zonal_rule();
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = 1.0 + t * profile.value(std::acos(rule.nodes[i]));
    sum += rule.weights[i] * r * r * r;
  }
  return 2.0 * std::numbers::pi / 3.0 * sum;
}

}  // namespace detail

/// Star-shaped domain r < c (1 + t V(xi)) with c fixing the volume to omega_N.
class PerturbedBall {
 public:
  PerturbedBall(HarmonicProfile profile, double t, double scale)
      : profile_(std::move(profile)), t_(t), scale_(scale) {}

  const HarmonicProfile& profile() const { return profile_; }
  int dim() const { return profile_.dim(); }
  double t() const { return t_; }
  double scale() const { return scale_; }

  double radius(double angle) const { return scale_ * (1.0 + t_ * profile_.value(angle)); }
  double radius_derivative(double angle) const {
    return scale_ * t_ * profile_.angular_derivative(angle);
  }

 private:
  HarmonicProfile profile_;
  double t_;
  double scale_;
};

/// Volume-normalised member of the family at time t >= 0.
inline PerturbedBall normalize_volume(const HarmonicProfile& profile, double t) {
  detail::require_geometric_dimension(profile.dim(), "normalize_volume");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("normalize_volume: t must be finite and >= 0");
  if (profile.empty() || t == 0.0) return PerturbedBall(profile, t, 1.0);
  if (1.0 + t * profile.min_value() <= 0.0) {
    throw DegenerateDomainError("normalize_volume: 1 + tV vanishes somewhere");
  }
  if (t * profile.max_abs() > kStarShapeGuard) {
    throw DegenerateDomainError("normalize_volume: t max|V| exceeds the star-shape guard 0.5");
  }
  const int n = profile.dim();
  const double omega = unit_ball_volume(n);
  const double scale = std::pow(omega / detail::raw_volume(profile, t), 1.0 / n);
  return PerturbedBall(profile, t, scale);
}

/// Int A dsigma of the normal acceleration induced by the normalisation.
/// c(t) = 1 + c2 t^2 + O(t^3) gives A = 2 c2; c2 is estimated from small t
/// with one Richardson step on the even part of c.
inline double induced_acceleration_integral(const HarmonicProfile& profile) {
  detail::require_geometric_dimension(profile.dim(), "induced_acceleration_integral");
  const double h = 1e-3;
  // Averaging V and -V removes the odd powers of t from c(t).
  const HarmonicProfile reflected = profile.negated();
  auto quotient = [&](double t) {
    const double c_plus = normalize_volume(profile, t).scale();
    const double c_minus = normalize_volume(reflected, t).scale();
    return (0.5 * (c_plus + c_minus) - 1.0) / (t * t);
  };
  const double c2 = (4.0 * quotient(h) - quotient(2.0 * h)) / 3.0;
  const int n = profile.dim();
  return 2.0 * c2 * n * unit_ball_volume(n);
}

struct Geometry {
  double perimeter;
  double volume;
  double delta_p;
};

/// Perimeter, volume and isoperimetric deficit by spectrally accurate quadrature.
inline Geometry geometry_exact(const PerturbedBall& ball) {
  detail::require_geometric_dimension(ball.dim(), "geometry_exact");
  Geometry g{};
  if (ball.dim() == 2) {
    const int n = kPlanarQuadratureNodes;
    const double h = 2.0 * std::numbers::pi / n;
    double per = 0.0;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = ball.radius(h * i);
      const double dr = ball.radius_derivative(h * i);
      per += std::sqrt(r * r + dr * dr);
      area += 0.5 * r * r;
    }
    g.perimeter = per * h;
    g.volume = area * h;
  } else {
    // Surface of revolution in mu = cos(theta): dA = 2 pi r sqrt(r^2 + r_theta^2) dmu.
    const auto& rule = detail::zonal_rule();
    double per = 0.0;
    double vol = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double theta = std::acos(rule.nodes[i]);
      const double r = ball.radius(theta);
      const double dr = ball.radius_derivative(theta);
      per += rule.weights[i] * r * std::sqrt(r * r + dr * dr);
      vol += rule.weights[i] * r * r * r;
    }
    g.perimeter = 2.0 * std::numbers::pi * per;
    g.volume = 2.0 * std::numbers::pi / 3.0 * vol;
  }
  const int n = ball.dim();
  const double omega = unit_ball_volume(n);
  g.delta_p = g.perimeter /
                  (n * std::pow(omega, 1.0 / n) * std::pow(g.volume, (n - 1.0) / n)) -
              1.0;
  return g;
}

struct DeficitCoefficients {
  double c_p;       // delta P = c_p t^2 + o(t^2)
  double c_lambda;  // delta lambda = c_lambda t^2 + o(t^2)
};

/// Analytic t^2 coefficients; translation modes (k = 1) are excluded.
inline DeficitCoefficients deficit_coeffs(const HarmonicProfile& profile) {
  const int n = profile.dim();
  const DimensionParams p = dimension_params(n);
  double perimeter_sum = 0.0;
  double eigen_sum = 0.0;
  for (const auto& [k, energy] : profile.degree_energy()) {
    if (k < 2 || energy == 0.0) continue;
    perimeter_sum += energy * perimeter_weight(n, k);
    eigen_sum += energy * eigenvalue_weight(n, k);
  }
  const double g_over_z = p.grad_modulus / p.z;
  return {perimeter_sum / (2.0 * n * p.omega), g_over_z * g_over_z * eigen_sum};
}

/// Deficits of one domain together with their analytic coefficients.
struct DeficitPair {
  double delta_p = 0.0;
  double delta_lambda = 0.0;
  double c_p = 0.0;
  double c_lambda = 0.0;
};

/// lambda''(0) = 2 G^2 sum_{k>=2} a_k^2 (k + N - 1 - z rho_k).
inline double second_variation(const HarmonicProfile& profile) {
  const int n = profile.dim();
  const DimensionParams p = dimension_params(n);
  double sum = 0.0;
  for (const auto& [k, energy] : profile.degree_energy()) {
    if (k < 2 || energy == 0.0) continue;
    sum += energy * eigenvalue_weight(n, k);
  }
  return 2.0 * p.grad_modulus * p.grad_modulus * sum;
}

/// lambda'(0) = -G^2 int V dsigma; by quadrature for N = 2, 3.
inline double first_variation(const HarmonicProfile& profile) {
  const int n = profile.dim();
  const DimensionParams p = dimension_params(n);
  double integral = 0.0;
  if (n == 2) {
    const int m = kPlanarQuadratureNodes;
    const double h = 2.0 * std::numbers::pi / m;
    for (int i = 0; i < m; ++i) integral += profile.value(h * i);
    integral *= h;
  } else if (n == 3) {
    const auto& rule = detail::zonal_rule();
    for (std::size_t i = 0; i < rule.size(); ++i) {
      integral += rule.weights[i] * profile.value(std::acos(rule.nodes[i]));
    }
    integral *= 2.0 * std::numbers::pi;
  }
  // N >= 4: every admissible mode has degree >= 1 and integrates to zero.
  return -p.grad_modulus * p.grad_modulus * integral;
}

/// k + N - 1 - z rho_{ell_1} for the translation mode; zero up to rounding.
inline double translation_defect(int dim) {
  return eigenvalue_weight(dim, 1);
}

namespace detail {

// G a r^{1-N/2} J_ell(z r) / J_ell(z) for one mode.
inline double v_radial(const DimensionParams& p, int degree, double coefficient, double r) {
  const HalfIntOrder ell = HalfIntOrder::for_mode(p.dim, degree);
  if (r == 0.0) return 0.0;
  const double radial = bessel_j(ell, p.z * r) / bessel_j(ell, p.z);
  return p.grad_modulus * coefficient * std::pow(r, 1.0 - 0.5 * p.dim) * radial;
}

}  // namespace detail

/// v(r, xi) = G r^{1-N/2} sum a_k J_{ell_k}(z r) / J_{ell_k}(z) Y_k(xi), so that
/// v(1, xi) = G V(xi).
inline double v_field(const HarmonicProfile& profile, double r, double angle) {
  detail::require_geometric_dimension(profile.dim(), "v_field");
  if (!(r >= 0.0)) throw DomainError("v_field: r must be >= 0");
  const DimensionParams p = dimension_params(profile.dim());
  double v = 0.0;
  for (const auto& m : profile.modes()) {
    v += detail::v_radial(p, m.degree, m.coefficient, r) * harmonic_value(p.dim, m, angle);
  }
  return v;
}

/// dv/dr at r = 1: G sum a_k (k - z rho_k) Y_k.
inline double v_normal_derivative(const HarmonicProfile& profile, double angle) {
  detail::require_geometric_dimension(profile.dim(), "v_normal_derivative");
  const DimensionParams p = dimension_params(profile.dim());
  double dv = 0.0;
  for (const auto& m : profile.modes()) {
    const double coeff = m.degree - p.z * mode_ratio(p.dim, m.degree);
    dv += p.grad_modulus * m.coefficient * coeff * harmonic_value(p.dim, m, angle);
  }
  return dv;
}

/// Uniform radial sample r_min .. r_max with n points; the finite-difference
/// step equals the sample spacing.
struct RadialGrid {
  double r_min = 0.05;
  double r_max = 1.0;
  int points = 400;
  int angles = 64;

  double spacing() const { return (r_max - r_min) / (points - 1); }
};

struct PoissonResidual {
  double max_residual = 0.0;
  double max_abs_v = 0.0;
};

/// max |-r^{1-N} (r^{N-1} v_r)_r - r^{-2} Lap_xi v - z^2 v| over the grid,
/// with fourth-order differences in r and Lap_xi Y_k = -k(k+N-2) Y_k.
inline PoissonResidual poisson_residual(const HarmonicProfile& profile, const RadialGrid& grid) {
  detail::require_geometric_dimension(profile.dim(), "poisson_residual");
  if (grid.points < 2 || grid.angles < 1) throw DomainError("poisson_residual: grid too small");
  const double h = grid.spacing();
  if (grid.r_min - 2.0 * h <= 0.0) {
    throw DomainError("poisson_residual: stencil reaches r = 0; raise r_min or refine");
  }
  PoissonResidual out;
  if (profile.empty()) return out;
  const DimensionParams p = dimension_params(profile.dim());
  const int n = p.dim;
  const double span = n == 2 ? 2.0 * std::numbers::pi : std::numbers::pi;

  std::vector<double> harmonics;
  for (int a = 0; a < grid.angles; ++a) {
    const double angle = span * (a + 0.5) / grid.angles;
    for (const auto& m : profile.modes()) harmonics.push_back(harmonic_value(n, m, angle));
  }
  const std::size_t nm = profile.modes().size();

  std::vector<double> mode_residual(nm);
  std::vector<double> mode_value(nm);
  for (int i = 0; i < grid.points; ++i) {
    const double r = grid.r_min + i * h;
    for (std::size_t j = 0; j < nm; ++j) {
      const auto& m = profile.modes()[j];
      auto f = [&](double rr) { return detail::v_radial(p, m.degree, m.coefficient, rr); };
      const double fm2 = f(r - 2 * h);
      const double fm1 = f(r - h);
      const double f0 = f(r);
      const double fp1 = f(r + h);
      const double fp2 = f(r + 2 * h);
      const double d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
      const double d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
      const double k = m.degree;
      mode_residual[j] = -d2 - (n - 1.0) / r * d1 + k * (k + n - 2.0) / (r * r) * f0 - p.lambda_ball * f0;
      mode_value[j] = f0;
    }
    for (int a = 0; a < grid.angles; ++a) {
      double res = 0.0;
      double v = 0.0;
      for (std::size_t j = 0; j < nm; ++j) {
        res += mode_residual[j] * harmonics[a * nm + j];
        v += mode_value[j] * harmonics[a * nm + j];
      }
      out.max_residual = std::max(out.max_residual, std::abs(res));
      out.max_abs_v = std::max(out.max_abs_v, std::abs(v));
    }
  }
  return out;
}

}  // namespace fkd
