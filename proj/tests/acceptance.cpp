// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails or exceeds its time budget.

#include <boost/math/special_functions/bessel.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fkd/fkd.hpp"

namespace {

using fkd::HarmonicMode;
using fkd::HarmonicPhase;
using fkd::HarmonicProfile;

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v) { return fkd::harness::format_real(v); }

const double kJ0 = boost::math::cyl_bessel_j_zero(0.0, 1);
const double kLambdaDisk = kJ0 * kJ0;

// Every extrapolated eigenvalue solved for criteria 8-11 lands here.
std::vector<double> g_solved_lambdas;

HarmonicProfile planar(int k, double a = 1.0) { return HarmonicProfile(2, {{k, a, HarmonicPhase::Cos}}); }

Outcome zero_table() {
  const std::vector<std::pair<int, double>> table{{2, 2.404826}, {3, std::numbers::pi}, {4, 3.831706},
                                                  {5, 4.4934095}, {6, 5.135622},        {7, 5.763459},
                                                  {8, 6.380162},  {9, 6.987932}};
  double worst = 0.0;
  for (auto [n, z] : table) worst = std::max(worst, std::abs(fkd::first_zero(fkd::HalfIntOrder::for_dimension(n)) - z));
  return {worst <= 1e-6, "max |z - table| = " + fmt(worst) + " (tol 1e-6)"};
}

Outcome constant_consistency() {
  double worst = 0.0;
  for (int n = 2; n <= 100; ++n) {
    const double c = fkd::faber_krahn_constant(n);
    worst = std::max(worst, std::abs(c - fkd::q_value(n, 2)) / c);
  }
  return {worst <= 1e-10, "max |C_N - Q_2|/C_N = " + fmt(worst) + " (tol 1e-10)"};
}

Outcome reduced_closed_form() {
  // int_0^{j0} r J0^2 dr = j0^2 J1(j0)^2 / 2 reduces C_2 to 3 / (2 (j0^2 - 2)).
  const double closed = 3.0 / (2.0 * (kLambdaDisk - 2.0));
  const double rel = std::abs(fkd::faber_krahn_constant(2) - closed) / closed;
  return {rel <= 1e-10, "C_2 = " + fmt(fkd::faber_krahn_constant(2)) + ", rel err " + fmt(rel) + " (tol 1e-10)"};
}

Outcome monotonicity() {
  double worst_mono = -std::numeric_limits<double>::infinity();
  double worst_convex = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 12; ++n) {
    for (int k = 2; k <= 50; ++k) worst_mono = std::max(worst_mono, fkd::q_value(n, k) - fkd::q_value(n, k + 1));
    for (int k = 2; k <= 50; ++k) {
      const double d2 = fkd::mode_ratio(n, k + 1) - 2.0 * fkd::mode_ratio(n, k) + fkd::mode_ratio(n, k - 1);
      worst_convex = std::min(worst_convex, d2);
    }
  }
  const bool ok = worst_mono <= 1e-12 && worst_convex >= -1e-12;
  return {ok, "max (Q_k - Q_{k+1}) = " + fmt(worst_mono) + ", min rho second diff = " + fmt(worst_convex)};
}

Outcome polynomial_criterion() {
  double lowest = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 200; ++n) lowest = std::min(lowest, fkd::finale_criterion(n));
  int mismatches = 0;
  for (int n = 2; n <= 50; ++n) {
    if ((fkd::finale_criterion(n) > 0.0) != (fkd::q_value(n, 3) - fkd::q_value(n, 2) > 0.0)) ++mismatches;
  }
  return {lowest > 0.0 && mismatches == 0,
          "min criterion over N=2..200 = " + fmt(lowest) + ", sign mismatches = " + std::to_string(mismatches)};
}

Outcome poisson_residual() {
  double worst_rel = 0.0;
  double worst_order = std::numeric_limits<double>::infinity();
  for (int n : {2, 3}) {
    const HarmonicPhase ph = n == 2 ? HarmonicPhase::Cos : HarmonicPhase::Zonal;
    for (const auto& modes : std::vector<std::vector<HarmonicMode>>{
             {{2, 1.0, ph}}, {{3, 1.0, ph}}, {{2, 1.0, ph}, {4, 0.5, ph}}}) {
      const HarmonicProfile p(n, modes);
      const auto fine = fkd::poisson_residual(p, fkd::RadialGrid{});
      worst_rel = std::max(worst_rel, fine.max_residual / fine.max_abs_v);
      // Refinement study on coarser levels, where truncation error dominates rounding.
      double prev = 0.0;
      for (int points : {25, 49, 97}) {
        const double r = fkd::poisson_residual(p, fkd::RadialGrid{0.2, 1.0, points, 16}).max_residual;
        if (prev > 0.0) worst_order = std::min(worst_order, std::log2(prev / r));
        prev = r;
      }
    }
  }
  return {worst_rel <= 1e-6 && worst_order >= 3.8,
          "max residual/max|v| = " + fmt(worst_rel) + " (tol 1e-6), min order = " + fmt(worst_order)};
}

Outcome disk_eigenvalue() {
  const auto e = fkd::extrapolated_eigenvalue(fkd::CircleBoundary{}, fkd::default_grid_ladder());
  const double rel = std::abs(e.lambda_star - kLambdaDisk) / kLambdaDisk;
  return {rel <= 1e-4 && e.order >= 1.8 && e.order <= 2.2,
          "lambda* = " + fmt(e.lambda_star) + ", rel err " + fmt(rel) + ", order " + fmt(e.order)};
}

fkd::harness::ConvergeSummary numeric_run(int k) {
  fkd::harness::RunConfig cfg;
  cfg.dim = 2;
  cfg.profile = planar(k);
  cfg.mode = fkd::harness::RunMode::Numeric;
  std::ostringstream csv;
  auto s = fkd::harness::run_converge(cfg, csv);
  for (const auto& row : s.rows) g_solved_lambdas.push_back(row.lambda_star);
  return s;
}

Outcome equality_family() {
  const auto s = numeric_run(2);
  const double c2 = fkd::faber_krahn_constant(2);
  const double rel = std::abs(s.fit.c0 - c2) / c2;
  return {rel <= 0.01, "c0 = " + fmt(s.fit.c0) + ", C_2 = " + fmt(c2) + ", rel gap " + fmt(rel) + " (tol 1e-2)"};
}

Outcome mode_three() {
  const auto s = numeric_run(3);
  const double q3 = fkd::q_value(2, 3);
  const double c2 = fkd::faber_krahn_constant(2);
  const double rel = std::abs(s.fit.c0 - q3) / q3;
  return {rel <= 0.01 && s.fit.c0 - c2 >= 0.2,
          "c0 = " + fmt(s.fit.c0) + ", Q_3 = " + fmt(q3) + ", rel gap " + fmt(rel) + ", c0 - C_2 = " +
              fmt(s.fit.c0 - c2)};
}

Outcome stationarity() {
  const double t = 0.05;
  const auto profile = planar(2);
  const auto d = fkd::eigen_deficit(profile, t, fkd::default_grid_ladder(), true);
  g_solved_lambdas.push_back(d.lambda_star);
  const auto minus = fkd::eigen_deficit(profile.negated(), t, fkd::default_grid_ladder());
  g_solved_lambdas.push_back(minus.lambda_star);
  const double bound = 0.02 * fkd::second_variation(profile) * t;
  const double diff = std::abs(*d.centered_first_difference);
  return {diff <= bound, "|centred difference| = " + fmt(diff) + ", bound " + fmt(bound)};
}

Outcome translation_neutrality() {
  const double t = 0.05;
  const auto profile = planar(1);
  const double cp = fkd::deficit_coeffs(profile).c_p;
  const double dp = fkd::geometry_exact(fkd::normalize_volume(profile, t)).delta_p / (t * t);
  const auto d = fkd::eigen_deficit(profile, t, fkd::default_grid_ladder());
  g_solved_lambdas.push_back(d.lambda_star);
  return {cp == 0.0 && std::abs(dp) <= 1e-3, "c_P = " + fmt(cp) + ", delta_P/t^2 = " + fmt(dp) + " (tol 1e-3)"};
}

Outcome discrete_faber_krahn() {
  if (g_solved_lambdas.empty()) return {false, "no domains were solved"};
  double lowest = std::numeric_limits<double>::infinity();
  for (double l : g_solved_lambdas) lowest = std::min(lowest, l);
  return {lowest >= kLambdaDisk - 1e-3, std::to_string(g_solved_lambdas.size()) + " domains, min lambda* = " +
                                            fmt(lowest) + ", j0^2 = " + fmt(kLambdaDisk)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "zero table reproduction", 1.0, zero_table},
      {2, "constant consistency", 5.0, constant_consistency},
      {3, "reduced closed form", 1.0, reduced_closed_form},
      {4, "monotonicity and convexity", 10.0, monotonicity},
      {5, "polynomial criterion", 5.0, polynomial_criterion},
      {6, "poisson residual", 5.0, poisson_residual},
      {7, "disk eigenvalue", 60.0, disk_eigenvalue},
      {8, "equality family V=Y2", 300.0, equality_family},
      {9, "mode-3 separation", 300.0, mode_three},
      {10, "stationarity", 120.0, stationarity},
      {11, "translation neutrality", 120.0, translation_neutrality},
      {12, "discrete Faber-Krahn", 1.0, discrete_faber_krahn},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = out.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %2d (%s): %s; %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
