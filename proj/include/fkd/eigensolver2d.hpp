#pragma once

// First Dirichlet Laplacian eigenvalue of planar star-shaped domains
// r < rho(theta), discretised in mapped polar coordinates s = r / rho(theta).
//
// With g = rho'/rho the Dirichlet energy and L^2 mass become
//   E[U] = int int s (1 + g^2) U_s^2 - 2 g U_s U_phi + U_phi^2 / s  ds dphi
//   M[U] = int int s rho^2 U^2 ds dphi
// and -Lap u = lambda u turns into K U = lambda M U with
//   K U = -(s (1+g^2) U_s - g U_phi)_s - (U_phi / s - g U_s)_phi.
// Every derivative is a centred second-order difference on a cell-centred
// radial grid (s_i = (i - 1/2) / n_r) and a periodic angular grid. The
// discrete operator is assembled from the discrete energy, so K is symmetric
// and the smallest eigenpair is found by inverse iteration with a sparse
// LDL^T factorisation.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fkd/errors.hpp"

namespace fkd {

/// A periodic boundary r = rho(theta) with derivative rho'(theta).
template <class T>
concept RadialBoundary = requires(const T& b, double theta) {
  { b.radius(theta) } -> std::convertible_to<double>;
  { b.radius_derivative(theta) } -> std::convertible_to<double>;
};

struct CircleBoundary {
  double r = 1.0;
  double radius(double) const { return r; }
  double radius_derivative(double) const { return 0.0; }
};

/// Rotated copy of another boundary, rho(theta + shift).
template <RadialBoundary B>
struct RotatedBoundary {
  const B& base;
  double shift;
  double radius(double theta) const { return base.radius(theta + shift); }
  double radius_derivative(double theta) const { return base.radius_derivative(theta + shift); }
};

struct PolarGrid {
  int n_r = 64;
  int n_theta = 128;

  void validate() const {
    if (n_r < 16) throw DomainError("PolarGrid: n_r must be >= 16");
    if (n_theta < 64 || n_theta % 2 != 0) throw DomainError("PolarGrid: n_theta must be even and >= 64");
  }
  double h() const { return 1.0 / n_r; }
};

struct EigResult {
  double lambda_h = 0.0;
  int iterations = 0;
  double residual = 0.0;
  PolarGrid grid;
  bool single_signed = false;
  std::vector<double> eigenvector;  // index j * n_r + i, M-normalised
};

struct EigenSolveOptions {
  double rel_tol = 1e-12;
  double residual_tol = 1e-10;
  int max_iterations = 500;
  bool keep_eigenvector = false;
};

namespace detail {

class SymmetricAssembler {
 public:
  explicit SymmetricAssembler(int size) : size_(size) {}

  struct Term {
    int index;
    double coeff;
  };

  // Adds w (a . U)(b . U) to the energy.
  template <std::size_t NA, std::size_t NB>
  void add_product(double w, const std::array<Term, NA>& a, const std::array<Term, NB>& b) {
    for (const auto& x : a) {
      for (const auto& y : b) {
        const double v = 0.5 * w * x.coeff * y.coeff;
        triplets_.emplace_back(x.index, y.index, v);
        triplets_.emplace_back(y.index, x.index, v);
      }
    }
  }

  Eigen::SparseMatrix<double> build() const {
    Eigen::SparseMatrix<double> k(size_, size_);
    k.setFromTriplets(triplets_.begin(), triplets_.end());
    return k;
  }

 private:
  int size_;
  std::vector<Eigen::Triplet<double>> triplets_;
};

}  // namespace detail

/// Discrete stiffness and lumped mass for the mapped-polar energy.
template <RadialBoundary B>
void assemble_polar_operator(const B& boundary, const PolarGrid& grid, Eigen::SparseMatrix<double>& stiffness,
                             Eigen::VectorXd& mass) {
  grid.validate();
  const int nr = grid.n_r;
  const int nt = grid.n_theta;
  const int size = nr * nt;
  const double h = grid.h();
  const double dphi = 2.0 * std::numbers::pi / nt;
  const double cell = h * dphi;
  auto id = [nr, nt](int i, int j) { return ((j % nt + nt) % nt) * nr + i; };

  std::vector<double> rho(nt);
  std::vector<double> g(nt);
  for (int j = 0; j < nt; ++j) {
    const double phi = j * dphi;
    rho[j] = boundary.radius(phi);
    if (!(rho[j] > 0.0)) throw DomainError("assemble_polar_operator: boundary radius must be positive");
    g[j] = boundary.radius_derivative(phi) / rho[j];
  }

  using Term = detail::SymmetricAssembler::Term;
  detail::SymmetricAssembler asmb(size);
  mass.resize(size);

  for (int j = 0; j < nt; ++j) {
    const double gj = g[j];
    for (int i = 0; i < nr; ++i) {
      const double s = (i + 0.5) * h;
      mass[id(i, j)] = s * rho[j] * rho[j] * cell;

      // Angular flux on the face (i, j + 1/2).
      const std::array<Term, 2> dphi_face{Term{id(i, j + 1), 1.0 / dphi}, Term{id(i, j), -1.0 / dphi}};
      asmb.add_product(cell / s, dphi_face, dphi_face);

      if (i + 1 < nr) {
        // Radial face s = (i + 1) h between nodes i and i + 1.
        const double sf = (i + 1) * h;
        const std::array<Term, 2> ds{Term{id(i + 1, j), 1.0 / h}, Term{id(i, j), -1.0 / h}};
        asmb.add_product(cell * sf * (1.0 + gj * gj), ds, ds);
        // U_phi on the face, averaged from the two centred node differences.
        const double c = 0.25 / dphi;
        const std::array<Term, 4> uphi{Term{id(i, j + 1), c}, Term{id(i, j - 1), -c},
                                       Term{id(i + 1, j + 1), c}, Term{id(i + 1, j - 1), -c}};
        asmb.add_product(-2.0 * gj * cell, ds, uphi);
      } else {
        // Boundary half cell: U = 0 at s = 1, half a cell away from the node.
        const std::array<Term, 1> ds{Term{id(i, j), -2.0 / h}};
        asmb.add_product(0.5 * cell * (1.0 + gj * gj), ds, ds);
      }
    }
  }
  stiffness = asmb.build();
}

/// Smallest Dirichlet eigenvalue of r < rho(theta) by zero-shift inverse iteration.
template <RadialBoundary B>
EigResult solve_dirichlet_eig(const B& boundary, const PolarGrid& grid, const EigenSolveOptions& options = {}) {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  assemble_polar_operator(boundary, grid, stiffness, mass);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(stiffness);
  if (ldlt.info() != Eigen::Success) throw IndefiniteOperatorError("solve_dirichlet_eig: factorisation failed");
  if (ldlt.vectorD().minCoeff() <= 0.0) {
    throw IndefiniteOperatorError("solve_dirichlet_eig: discrete operator is not positive definite");
  }

  const int nr = grid.n_r;
  Eigen::VectorXd u(stiffness.rows());
  for (Eigen::Index idx = 0; idx < u.size(); ++idx) {
    const double s = (static_cast<int>(idx % nr) + 0.5) * grid.h();
    u[idx] = 1.0 - s * s;
  }
  u /= std::sqrt(u.dot(mass.cwiseProduct(u)));

  EigResult result;
  result.grid = grid;
  double lambda = u.dot(stiffness * u);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const Eigen::VectorXd x = ldlt.solve(mass.cwiseProduct(u));
    const double next = u.dot(stiffness * u);
    // Residual measured through K^{-1}: lambda || u - lambda K^{-1} M u ||_M.
    const Eigen::VectorXd defect = u - next * x;
    const double residual = next * std::sqrt(defect.dot(mass.cwiseProduct(defect)));
    const double change = std::abs(next - lambda) / std::abs(next);
    lambda = next;
    result.iterations = iter;
    result.residual = residual;
    if (change < options.rel_tol && residual <= options.residual_tol * lambda) break;
    u = x / std::sqrt(x.dot(mass.cwiseProduct(x)));
  }
  if (!(result.residual <= options.residual_tol * lambda)) {
    throw ConvergenceError("solve_dirichlet_eig: inverse iteration did not converge");
  }
  if (u.sum() < 0.0) u = -u;
  result.lambda_h = lambda;
  result.single_signed = u.minCoeff() >= -1e-12 * u.maxCoeff();
  if (options.keep_eigenvector) result.eigenvector.assign(u.data(), u.data() + u.size());
  return result;
}

struct Extrapolation {
  double lambda_star;
  double order;
};

/// Fits lambda_h = lambda* + c h^p through the last three samples of a
/// ladder whose step halves each time.
inline Extrapolation richardson_extrapolate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw IllConditionedFitError("richardson_extrapolate: need >= 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double ratio = samples[i - 1].first / samples[i].first;
    if (std::abs(ratio - 2.0) > 1e-9) {
      throw IllConditionedFitError("richardson_extrapolate: steps must halve");
    }
  }
  const std::size_t n = samples.size();
  const double l1 = samples[n - 3].second;
  const double l2 = samples[n - 2].second;
  const double l3 = samples[n - 1].second;
  const double d1 = l1 - l2;
  const double d2 = l2 - l3;
  const double floor = 1e-14 * std::abs(l3);
  if (std::abs(d1) <= floor && std::abs(d2) <= floor) return {l3, std::numeric_limits<double>::quiet_NaN()};
  if (d1 * d2 <= 0.0 || std::abs(d2) >= std::abs(d1)) {
    throw IllConditionedFitError("richardson_extrapolate: samples are not monotonically converging");
  }
  const double p = std::log2(d1 / d2);
  const double factor = std::pow(2.0, p) - 1.0;
  return {l3 - d2 / factor, p};
}

}  // namespace fkd
