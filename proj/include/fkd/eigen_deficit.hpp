#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "fkd/eigensolver2d.hpp"
#include "fkd/perturbation.hpp"
#include "fkd/spectral_constants.hpp"

namespace fkd {

using GridLadder = std::vector<PolarGrid>;

/// n_r = 32, 64, 128 with n_theta = 4 n_r; the angular resolution keeps
/// modes up to degree 5 in the asymptotic regime on every level.
inline GridLadder default_grid_ladder() { return {{32, 128}, {64, 256}, {128, 512}}; }

struct ExtrapolatedEigenvalue {
  double lambda_star = 0.0;
  double order = 0.0;
  std::vector<EigResult> solves;
  bool single_signed = true;
};

/// Solves on every grid of the ladder and extrapolates in h = 1/n_r.
template <RadialBoundary B>
ExtrapolatedEigenvalue extrapolated_eigenvalue(const B& boundary, const GridLadder& ladder) {
  ExtrapolatedEigenvalue out;
  std::vector<std::pair<double, double>> samples;
  for (const auto& grid : ladder) {
    EigResult r = solve_dirichlet_eig(boundary, grid);
    samples.emplace_back(grid.h(), r.lambda_h);
    out.single_signed = out.single_signed && r.single_signed;
    out.solves.push_back(std::move(r));
  }
  const Extrapolation e = richardson_extrapolate(samples);
  out.lambda_star = e.lambda_star;
  out.order = e.order;
  return out;
}

struct EigenDeficit {
  double delta_lambda = 0.0;
  double lambda_star = 0.0;
  double order = 0.0;
  bool single_signed = true;
  // [lambda(t) - lambda(-t)] / (2t), when requested.
  std::optional<double> centered_first_difference;
};

/// delta lambda = lambda* / j_0^2 - 1 for the volume-normalised N = 2 domain.
inline EigenDeficit eigen_deficit(const HarmonicProfile& profile, double t, const GridLadder& ladder,
                                  bool with_first_difference = false) {
  if (profile.dim() != 2) throw UnsupportedDimensionError("eigen_deficit: only N = 2 is supported");
  const double lambda_ball = dimension_params(2).lambda_ball;
  const auto plus = extrapolated_eigenvalue(normalize_volume(profile, t), ladder);
  EigenDeficit out;
  out.lambda_star = plus.lambda_star;
  out.order = plus.order;
  out.delta_lambda = plus.lambda_star / lambda_ball - 1.0;
  out.single_signed = plus.single_signed;
  if (with_first_difference && t > 0.0) {
    const auto minus = extrapolated_eigenvalue(normalize_volume(profile.negated(), t), ladder);
    out.centered_first_difference = (plus.lambda_star - minus.lambda_star) / (2.0 * t);
    out.single_signed = out.single_signed && minus.single_signed;
  }
  return out;
}

}  // namespace fkd
