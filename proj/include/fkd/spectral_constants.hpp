#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "fkd/bessel.hpp"
#include "fkd/errors.hpp"

namespace fkd {

inline constexpr int kMaxDimension = 100;
inline constexpr int kMaxFinaleDimension = 200;
inline constexpr int kMaxModeDegree = 1000;

/// Volume of the unit ball in R^N, pi^{N/2} / Gamma(N/2 + 1).
inline double unit_ball_volume(int dim) {
  if (dim < 1) throw RangeError("unit_ball_volume: dimension must be >= 1");
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

/// Everything the closed-form constants need for one dimension.
struct DimensionParams {
  int dim = 0;
  double z = 0.0;             // j_{N/2-1}
  double omega = 0.0;         // |B_1|
  double lambda_ball = 0.0;   // z^2
  double grad_modulus = 0.0;  // G_N, boundary |Du| of the normalised eigenfunction
  double radial_norm = 0.0;   // int_0^z r J^2 dr
  double j_prime_at_zero = 0.0;  // J'_{N/2-1}(z), negative
};

namespace detail {

inline void check_dimension(int dim, int max_dim, const char* who) {
  if (dim < 2 || dim > max_dim) {
    throw RangeError(std::string(who) + ": dimension outside [2, " + std::to_string(max_dim) + "]");
  }
}

inline DimensionParams compute_dimension_params(int dim) {
  const HalfIntOrder nu = HalfIntOrder::for_dimension(dim);
  DimensionParams p;
  p.dim = dim;
  p.z = first_zero(nu);
  p.omega = unit_ball_volume(dim);
  p.lambda_ball = p.z * p.z;
  p.radial_norm = radial_norm_integral(nu);
  p.j_prime_at_zero = bessel_j_prime(nu, p.z);
  // |Du| on the sphere; the sign of J' is dropped since only G_N^2 is used.
  p.grad_modulus = std::abs(p.z * p.z * p.j_prime_at_zero) /
                   std::sqrt(dim * p.omega * p.radial_norm);
  return p;
}

}  // namespace detail

/// Memoised per dimension; the cache is shared and guarded by a mutex.
inline DimensionParams dimension_params(int dim) {
  detail::check_dimension(dim, kMaxDimension, "dimension_params");
  static std::mutex mutex;
  static std::map<int, DimensionParams> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(dim); it != cache.end()) return it->second;
  }
  DimensionParams p = detail::compute_dimension_params(dim);
  std::lock_guard lock(mutex);
  cache.emplace(dim, p);
  return p;
}

/// C_N = N(N+1) int r J^2 / [2 (z J'(z))^2 (z^2 - N)].
inline double faber_krahn_constant(int dim) {
  const DimensionParams p = dimension_params(dim);
  const double zj = p.z * p.j_prime_at_zero;
  return dim * (dim + 1.0) * p.radial_norm / (2.0 * zj * zj * (p.lambda_ball - dim));
}

/// rho_k = J_{ell_k + 1}(z_N) / J_{ell_k}(z_N).
inline double mode_ratio(int dim, int degree) {
  const DimensionParams p = dimension_params(dim);
  return bessel_ratio_cf(HalfIntOrder::for_mode(dim, degree), p.z);
}

/// ell_k^2 - N^2/4 = (k - 1)(k + N - 1), exact zero for the translation mode.
inline double perimeter_weight(int dim, int degree) {
  return static_cast<double>(degree - 1) * static_cast<double>(degree + dim - 1);
}

/// ell_k + N/2 - z rho_k = k + N - 1 - z rho_k.
inline double eigenvalue_weight(int dim, int degree) {
  const DimensionParams p = dimension_params(dim);
  return (degree + dim - 1.0) - p.z * mode_ratio(dim, degree);
}

/// z^2 / (2 N omega G^2), the common prefactor of every Q_k.
inline double q_prefactor(int dim) {
  const DimensionParams p = dimension_params(dim);
  return p.lambda_ball / (2.0 * dim * p.omega * p.grad_modulus * p.grad_modulus);
}

/// Limiting deficit ratio for a pure degree-k perturbation.
inline double q_value(int dim, int degree) {
  detail::check_dimension(dim, kMaxDimension, "q_value");
  if (degree < 2) {
    throw InvalidModeError(
        "q_value: degree must be >= 2 (k = 0 breaks the volume constraint, k = 1 is a translation)");
  }
  if (degree > kMaxModeDegree) throw RangeError("q_value: degree above supported range");
  const double denom = eigenvalue_weight(dim, degree);
  if (!(denom > 0.0)) throw ConvergenceError("q_value: non-positive eigenvalue weight");
  return q_prefactor(dim) * perimeter_weight(dim, degree) / denom;
}

/// Left-hand side of (z^2 - 2) N^2 + 5 z^2 N - 2 z^4 > 0, positive iff Q_2 < Q_3.
inline double finale_criterion(int dim) {
  detail::check_dimension(dim, kMaxFinaleDimension, "finale_criterion");
  const double z = first_zero(HalfIntOrder::for_dimension(dim));
  const double z2 = z * z;
  const double n = dim;
  return (z2 - 2.0) * n * n + 5.0 * z2 * n - 2.0 * z2 * z2;
}

struct QEntry {
  int k;
  double q;
};

struct QTable {
  int dim = 0;
  std::vector<QEntry> entries;
  double c_n = 0.0;
};

struct QConvexityReport {
  QTable table;
  std::vector<double> first_diff;   // Q_{k+1} - Q_k, k = 2 .. kmax-1
  std::vector<double> second_diff;  // Q_{k+1} - 2Q_k + Q_{k-1}, k = 3 .. kmax-1
  bool monotone = true;             // every first difference >= -1e-12
  bool convex = true;               // every second difference >= -1e-10
};

inline QTable q_table(int dim, int kmax) {
  if (kmax < 2) throw InvalidModeError("q_table: kmax must be >= 2");
  QTable table;
  table.dim = dim;
  for (int k = 2; k <= kmax; ++k) table.entries.push_back({k, q_value(dim, k)});
  table.c_n = table.entries.front().q;
  return table;
}

inline QConvexityReport q_convexity_report(int dim, int kmax) {
  if (kmax < 4) throw InvalidModeError("q_convexity_report: kmax must be >= 4");
  QConvexityReport report;
  report.table = q_table(dim, kmax);
  const auto& e = report.table.entries;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double d = e[i + 1].q - e[i].q;
    report.first_diff.push_back(d);
    if (d < -1e-12) report.monotone = false;
  }
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    const double d2 = e[i + 1].q - 2.0 * e[i].q + e[i - 1].q;
    report.second_diff.push_back(d2);
    if (d2 < -1e-10) report.convex = false;
  }
  return report;
}

}  // namespace fkd
