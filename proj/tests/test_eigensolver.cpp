#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

#include "fkd/eigen_deficit.hpp"

using fkd::CircleBoundary;
using fkd::PolarGrid;

namespace {

const double kJ0Squared = [] {
  const double j = boost::math::cyl_bessel_j_zero(0.0, 1);
  return j * j;
}();

const fkd::GridLadder kSmallLadder{{16, 64}, {32, 128}, {64, 256}};

fkd::HarmonicProfile mode(int k, double a = 1.0, fkd::HarmonicPhase ph = fkd::HarmonicPhase::Cos) {
  return fkd::HarmonicProfile(2, {{k, a, ph}});
}

}  // namespace

TEST(PolarGrid, Validation) {
  EXPECT_THROW((PolarGrid{8, 64}.validate()), fkd::DomainError);
  EXPECT_THROW((PolarGrid{32, 63}.validate()), fkd::DomainError);
  EXPECT_THROW((PolarGrid{32, 32}.validate()), fkd::DomainError);
  EXPECT_NO_THROW((PolarGrid{16, 64}.validate()));
}

TEST(DirichletEig, UnitDiskConvergesAtSecondOrder) {
  double prev_err = 0.0;
  for (const auto& grid : kSmallLadder) {
    const auto r = fkd::solve_dirichlet_eig(CircleBoundary{}, grid);
    const double err = std::abs(r.lambda_h - kJ0Squared) / kJ0Squared;
    EXPECT_LE(r.residual, 1e-10 * r.lambda_h);
    EXPECT_TRUE(r.single_signed);
    if (prev_err > 0.0) {
      EXPECT_NEAR(std::log2(prev_err / err), 2.0, 0.1);
    }
    prev_err = err;
  }
  const auto ex = fkd::extrapolated_eigenvalue(CircleBoundary{}, kSmallLadder);
  EXPECT_NEAR(ex.lambda_star, kJ0Squared, 2e-7 * kJ0Squared);
  EXPECT_NEAR(ex.order, 2.0, 0.05);
}

TEST(DirichletEig, HomothetyScaling) {
  const PolarGrid grid{32, 64};
  const double unit = fkd::solve_dirichlet_eig(CircleBoundary{}, grid).lambda_h;
  for (double rho : {0.5, 1.7, 3.0}) {
    const double scaled = fkd::solve_dirichlet_eig(CircleBoundary{rho}, grid).lambda_h;
    EXPECT_NEAR(scaled * rho * rho, unit, 1e-10 * unit) << rho;
  }
}

TEST(DirichletEig, RotationInvariance) {
  const auto ball = fkd::normalize_volume(mode(3, 1.0, fkd::HarmonicPhase::Sin), 0.1);
  const PolarGrid grid{32, 64};
  const double base = fkd::solve_dirichlet_eig(ball, grid).lambda_h;
  // Shifts by whole angular cells map the grid onto itself.
  for (int cells : {1, 5, 17}) {
    const fkd::RotatedBoundary<fkd::PerturbedBall> rotated{ball, cells * 2.0 * std::numbers::pi / grid.n_theta};
    EXPECT_NEAR(fkd::solve_dirichlet_eig(rotated, grid).lambda_h, base, 1e-10 * base) << cells;
  }
}

TEST(DirichletEig, EigenvectorIsPositiveAndNormalised) {
  fkd::EigenSolveOptions opts;
  opts.keep_eigenvector = true;
  const auto ball = fkd::normalize_volume(mode(2), 0.2);
  const auto r = fkd::solve_dirichlet_eig(ball, PolarGrid{32, 64}, opts);
  ASSERT_EQ(r.eigenvector.size(), 32u * 64u);
  EXPECT_TRUE(r.single_signed);
  for (double v : r.eigenvector) EXPECT_GT(v, 0.0);
}

TEST(DirichletEig, RejectsNonPositiveRadius) {
  EXPECT_THROW(fkd::solve_dirichlet_eig(CircleBoundary{0.0}, PolarGrid{16, 64}), fkd::DomainError);
}

TEST(Richardson, RecoversExactModel) {
  for (double p : {1.0, 2.0, 3.5}) {
    std::vector<std::pair<double, double>> s;
    for (double h : {0.1, 0.05, 0.025}) s.emplace_back(h, 4.0 + 0.7 * std::pow(h, p));
    const auto e = fkd::richardson_extrapolate(s);
    EXPECT_NEAR(e.lambda_star, 4.0, 1e-12);
    EXPECT_NEAR(e.order, p, 1e-9);
  }
}

TEST(Richardson, UsesLastThreeSamples) {
  std::vector<std::pair<double, double>> s{{0.4, 100.0}};
  for (double h : {0.2, 0.1, 0.05}) s.emplace_back(h, 1.0 - 2.0 * h * h);
  EXPECT_NEAR(fkd::richardson_extrapolate(s).lambda_star, 1.0, 1e-12);
}

TEST(Richardson, BoundedErrorUnderSmallNoise) {
  // Perturbing each sample by eps moves lambda* by at most a small multiple of eps.
  const double eps = 1e-9;
  std::vector<std::pair<double, double>> s{{0.1, 2.0 + 0.5 * 0.01 + eps},
                                           {0.05, 2.0 + 0.5 * 0.0025 - eps},
                                           {0.025, 2.0 + 0.5 * 0.000625 + eps}};
  EXPECT_NEAR(fkd::richardson_extrapolate(s).lambda_star, 2.0, 10.0 * eps);
}

TEST(Richardson, IllConditionedInputs) {
  using S = std::vector<std::pair<double, double>>;
  EXPECT_THROW(fkd::richardson_extrapolate(S{{0.1, 1.0}, {0.05, 0.9}}), fkd::IllConditionedFitError);
  EXPECT_THROW(fkd::richardson_extrapolate(S{{0.1, 1.0}, {0.06, 0.9}, {0.03, 0.8}}), fkd::IllConditionedFitError);
  EXPECT_THROW(fkd::richardson_extrapolate(S{{0.1, 1.0}, {0.05, 0.9}, {0.025, 0.95}}),
               fkd::IllConditionedFitError);
  EXPECT_THROW(fkd::richardson_extrapolate(S{{0.1, 1.0}, {0.05, 0.9}, {0.025, 0.7}}), fkd::IllConditionedFitError);
  const auto flat = fkd::richardson_extrapolate(S{{0.1, 3.0}, {0.05, 3.0}, {0.025, 3.0}});
  EXPECT_EQ(flat.lambda_star, 3.0);
  EXPECT_TRUE(std::isnan(flat.order));
}

TEST(EigenDeficit, DiscreteFaberKrahn) {
  for (const auto& profile : {mode(2), mode(3, 1.0, fkd::HarmonicPhase::Sin), mode(5, 0.6)}) {
    const auto d = fkd::eigen_deficit(profile, 0.1, kSmallLadder);
    EXPECT_GE(d.lambda_star, kJ0Squared - 1e-3);
    EXPECT_GT(d.delta_lambda, 0.0);
    EXPECT_TRUE(d.single_signed);
  }
}

TEST(EigenDeficit, MatchesSecondOrderCoefficient) {
  const auto p = mode(2);
  const double t = 0.04;
  const auto d = fkd::eigen_deficit(p, t, kSmallLadder);
  const double c = fkd::deficit_coeffs(p).c_lambda;
  EXPECT_NEAR(d.delta_lambda / (t * t), c, 0.02 * c);
}

TEST(EigenDeficit, CentredDifferenceVanishesForEvenMode) {
  const auto d = fkd::eigen_deficit(mode(2), 0.05, kSmallLadder, true);
  ASSERT_TRUE(d.centered_first_difference.has_value());
  EXPECT_LT(std::abs(*d.centered_first_difference), 1e-6);
}

TEST(EigenDeficit, OnlyPlanar) {
  EXPECT_THROW(fkd::eigen_deficit(fkd::HarmonicProfile(3, {{2, 1.0, fkd::HarmonicPhase::Zonal}}), 0.05, kSmallLadder),
               fkd::UnsupportedDimensionError);
}
