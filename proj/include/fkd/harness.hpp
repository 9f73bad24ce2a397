#pragma once

// Report builders behind the `fkd` command line: constants, Q-sequence CSV,
// deficit-ratio convergence runs and the cross-module validation suite.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkd/bessel.hpp"
#include "fkd/eigen_deficit.hpp"
#include "fkd/eigensolver2d.hpp"
#include "fkd/errors.hpp"
#include "fkd/perturbation.hpp"
#include "fkd/spectral_constants.hpp"

namespace fkd::harness {

using json = nlohmann::json;

/// 12 significant digits in scientific notation, independent of the locale.
inline std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 11);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Profile and run configuration (JSON)

inline HarmonicPhase phase_from_string(const std::string& s) {
  if (s == "cos") return HarmonicPhase::Cos;
  if (s == "sin") return HarmonicPhase::Sin;
  if (s == "zonal") return HarmonicPhase::Zonal;
  throw UsageError("profile: unknown phase '" + s + "'");
}

/// {"dim": N, "modes": [{"k": int, "a": real, "phase": "cos"|"sin"|"zonal"}]}
inline HarmonicProfile profile_from_json(const json& j, int default_dim = 0) {
  try {
    const int dim = j.contains("dim") ? j.at("dim").get<int>() : default_dim;
    if (dim < 2) throw UsageError("profile: dim must be >= 2");
    std::vector<HarmonicMode> modes;
    for (const auto& m : j.value("modes", json::array())) {
      HarmonicMode mode;
      mode.degree = m.at("k").get<int>();
      mode.coefficient = m.at("a").get<double>();
      mode.phase = phase_from_string(m.value("phase", dim == 2 ? "cos" : "zonal"));
      modes.push_back(mode);
    }
    return HarmonicProfile(dim, std::move(modes));
  } catch (const json::exception& e) {
    throw UsageError(std::string("profile: ") + e.what());
  } catch (const InvalidProfileError& e) {
    throw UsageError(e.what());
  }
}

inline json profile_to_json(const HarmonicProfile& profile) {
  json modes = json::array();
  for (const auto& m : profile.modes()) {
    modes.push_back({{"k", m.degree}, {"a", m.coefficient}, {"phase", to_string(m.phase)}});
  }
  return {{"dim", profile.dim()}, {"modes", modes}};
}

enum class RunMode { Analytic, Numeric, Both };

inline RunMode mode_from_string(const std::string& s) {
  if (s == "analytic") return RunMode::Analytic;
  if (s == "numeric") return RunMode::Numeric;
  if (s == "both") return RunMode::Both;
  throw UsageError("unknown mode '" + s + "' (expected analytic, numeric or both)");
}

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Analytic:
      return "analytic";
    case RunMode::Numeric:
      return "numeric";
    case RunMode::Both:
      return "both";
  }
  return "?";
}

/// Geometric t sequence t_max, t_max f, t_max f^2, ...
struct TLadder {
  double t_max = 0.08;
  double factor = 0.5;
  int count = 3;

  std::vector<double> values() const {
    std::vector<double> ts;
    double t = t_max;
    for (int i = 0; i < count; ++i, t *= factor) ts.push_back(t);
    return ts;
  }
};

struct RunConfig {
  int dim = 2;
  HarmonicProfile profile;
  TLadder t_ladder;
  GridLadder grid_ladder = default_grid_ladder();
  std::string output;
  RunMode mode = RunMode::Both;

  void validate() const {
    if (profile.dim() != dim) throw UsageError("config: profile dim differs from run dim");
    if (t_ladder.count < 3) throw UsageError("config: t_ladder.count must be >= 3");
    if (!(t_ladder.factor > 0.0 && t_ladder.factor < 1.0)) {
      throw UsageError("config: t_ladder.factor must lie in (0, 1)");
    }
    if (!(t_ladder.t_max > 0.0)) throw UsageError("config: t_ladder.t_max must be positive");
    if (mode != RunMode::Analytic) {
      if (dim != 2) throw UsageError("config: numeric mode requires dim = 2");
      if (t_ladder.t_max * profile.max_abs() > kStarShapeGuard) {
        throw UsageError("config: t_max max|V| exceeds the star-shape guard 0.5");
      }
      if (grid_ladder.size() < 3) throw UsageError("config: grid_ladder needs >= 3 grids");
      for (std::size_t i = 0; i < grid_ladder.size(); ++i) {
        grid_ladder[i].validate();
        if (i > 0 && grid_ladder[i].n_r != 2 * grid_ladder[i - 1].n_r) {
          throw UsageError("config: grid_ladder n_r must double at each level");
        }
      }
    }
  }
};

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.dim = j.value("dim", j.contains("profile") ? j.at("profile").value("dim", 2) : 2);
    cfg.profile = profile_from_json(j.at("profile"), cfg.dim);
    if (j.contains("t_ladder")) {
      const auto& t = j.at("t_ladder");
      cfg.t_ladder.t_max = t.value("t_max", cfg.t_ladder.t_max);
      cfg.t_ladder.factor = t.value("factor", cfg.t_ladder.factor);
      cfg.t_ladder.count = t.value("count", cfg.t_ladder.count);
    }
    if (j.contains("grid_ladder")) {
      cfg.grid_ladder.clear();
      for (const auto& g : j.at("grid_ladder")) {
        cfg.grid_ladder.push_back({g.at(0).get<int>(), g.at(1).get<int>()});
      }
    }
    cfg.output = j.value("output", std::string{});
    cfg.mode = j.contains("mode") ? mode_from_string(j.at("mode").get<std::string>())
                                  : (cfg.dim == 2 ? RunMode::Both : RunMode::Analytic);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Convergence runs

enum class RowSource { Analytic, Numeric };

inline const char* to_string(RowSource s) {
  return s == RowSource::Analytic ? "analytic" : "quadrature+eigensolver";
}

struct ConvergenceRow {
  double t = 0.0;
  double delta_p = 0.0;
  double delta_lambda = 0.0;
  double ratio = 0.0;
  RowSource source = RowSource::Analytic;
  double lambda_star = 0.0;  // numeric rows only
};

inline std::string csv_header() { return "t,delta_P,delta_lambda,ratio,source\n"; }

inline std::string csv_row(const ConvergenceRow& row) {
  return format_real(row.t) + "," + format_real(row.delta_p) + "," + format_real(row.delta_lambda) + "," +
         format_real(row.ratio) + "," + to_string(row.source) + "\n";
}

inline double safe_ratio(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

struct LinearFit {
  double c0 = 0.0;
  double c1 = 0.0;
};

/// Least-squares ratio(t) = c0 + c1 t through the three smallest t.
inline LinearFit fit_ratio(std::vector<ConvergenceRow> rows) {
  std::erase_if(rows, [](const ConvergenceRow& r) { return !std::isfinite(r.ratio); });
  if (rows.size() < 3) throw IllConditionedFitError("fit_ratio: need three rows with a finite ratio");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  rows.resize(3);
  double mt = 0.0;
  double mr = 0.0;
  for (const auto& r : rows) {
    mt += r.t / 3.0;
    mr += r.ratio / 3.0;
  }
  double stt = 0.0;
  double str = 0.0;
  for (const auto& r : rows) {
    stt += (r.t - mt) * (r.t - mt);
    str += (r.t - mt) * (r.ratio - mr);
  }
  if (stt == 0.0) throw IllConditionedFitError("fit_ratio: t values coincide");
  LinearFit fit;
  fit.c1 = str / stt;
  fit.c0 = mr - fit.c1 * mt;
  return fit;
}

inline ConvergenceRow analytic_row(const DeficitCoefficients& c, double t) {
  ConvergenceRow row;
  row.t = t;
  row.delta_p = c.c_p * t * t;
  row.delta_lambda = c.c_lambda * t * t;
  row.ratio = safe_ratio(row.delta_p, row.delta_lambda);
  row.source = RowSource::Analytic;
  return row;
}

inline ConvergenceRow numeric_row(const HarmonicProfile& profile, double t, const GridLadder& ladder) {
  const Geometry g = geometry_exact(normalize_volume(profile, t));
  const EigenDeficit d = eigen_deficit(profile, t, ladder);
  ConvergenceRow row;
  row.t = t;
  row.delta_p = g.delta_p;
  row.delta_lambda = d.delta_lambda;
  row.ratio = safe_ratio(row.delta_p, row.delta_lambda);
  row.source = RowSource::Numeric;
  row.lambda_star = d.lambda_star;
  return row;
}

struct ConvergeSummary {
  int dim = 0;
  RunMode mode = RunMode::Both;
  int lowest_degree = 0;
  LinearFit fit;
  RowSource fit_source = RowSource::Analytic;
  double q_lowest = std::numeric_limits<double>::quiet_NaN();
  double c_n = 0.0;
  double min_lambda_star = std::numeric_limits<double>::quiet_NaN();
  // max |ratio_numeric - ratio_analytic| / ratio_analytic over rows with t <= 0.04
  double max_numeric_analytic_gap = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConvergenceRow> rows;

  json to_json() const {
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"dim", dim},
            {"mode", harness::to_string(mode)},
            {"lowest_degree", lowest_degree},
            {"fit_source", harness::to_string(fit_source)},
            {"c0", num(fit.c0)},
            {"c1", num(fit.c1)},
            {"q_lowest", num(q_lowest)},
            {"c_n", num(c_n)},
            {"gap_to_q", num(fit.c0 - q_lowest)},
            {"rel_gap_to_q", num((fit.c0 - q_lowest) / q_lowest)},
            {"gap_to_c_n", num(fit.c0 - c_n)},
            {"rel_gap_to_c_n", num((fit.c0 - c_n) / c_n)},
            {"min_lambda_star", num(min_lambda_star)},
            {"max_numeric_analytic_gap", num(max_numeric_analytic_gap)},
            {"rows", rows.size()}};
  }
};

/// Runs the t ladder, streaming CSV rows to `csv` in decreasing t as they
/// become available. Numeric t-points are solved concurrently; rows already
/// written stay flushed if a later point fails.
inline ConvergeSummary run_converge(const RunConfig& cfg, std::ostream& csv) {
  cfg.validate();
  ConvergeSummary summary;
  summary.dim = cfg.dim;
  summary.mode = cfg.mode;
  summary.lowest_degree = cfg.profile.lowest_active_degree();
  summary.c_n = faber_krahn_constant(cfg.dim);
  if (summary.lowest_degree >= 2) summary.q_lowest = q_value(cfg.dim, summary.lowest_degree);

  const DeficitCoefficients coeffs = deficit_coeffs(cfg.profile);
  std::vector<double> ts = cfg.t_ladder.values();
  std::sort(ts.begin(), ts.end(), std::greater<>());

  const bool numeric = cfg.mode != RunMode::Analytic;
  const bool analytic = cfg.mode != RunMode::Numeric;
  std::vector<std::future<ConvergenceRow>> pending;
  if (numeric) {
    for (double t : ts) {
      pending.push_back(std::async(std::launch::async, [&cfg, t] {
        return numeric_row(cfg.profile, t, cfg.grid_ladder);
      }));
    }
  }

  csv << csv_header() << std::flush;
  std::vector<ConvergenceRow> numeric_rows;
  std::vector<ConvergenceRow> analytic_rows;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (analytic) {
      analytic_rows.push_back(analytic_row(coeffs, ts[i]));
      summary.rows.push_back(analytic_rows.back());
      csv << csv_row(analytic_rows.back());
    }
    if (numeric) {
      numeric_rows.push_back(pending[i].get());
      summary.rows.push_back(numeric_rows.back());
      csv << csv_row(numeric_rows.back());
    }
    csv << std::flush;
  }

  if (numeric) {
    summary.fit = fit_ratio(numeric_rows);
    summary.fit_source = RowSource::Numeric;
    summary.min_lambda_star = numeric_rows.front().lambda_star;
    for (const auto& r : numeric_rows) summary.min_lambda_star = std::min(summary.min_lambda_star, r.lambda_star);
  } else {
    summary.fit = fit_ratio(analytic_rows);
    summary.fit_source = RowSource::Analytic;
  }
  if (numeric && analytic) {
    double gap = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] > 0.04 + 1e-15) continue;
      gap = std::max(gap, std::abs(numeric_rows[i].ratio - analytic_rows[i].ratio) / analytic_rows[i].ratio);
      any = true;
    }
    if (any) summary.max_numeric_analytic_gap = gap;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Constants and Q sequence

inline json constants_json(int dim) {
  const DimensionParams p = dimension_params(dim);
  return {{"dim", dim},
          {"z_N", p.z},
          {"omega_N", p.omega},
          {"lambda_ball", p.lambda_ball},
          {"G_N", p.grad_modulus},
          {"C_N", faber_krahn_constant(dim)}};
}

inline std::string constants_text(int dim) {
  const json j = constants_json(dim);
  std::ostringstream out;
  auto line = [&out](const char* name, double v) {
    std::string label = name;
    label.resize(12, ' ');
    out << label << format_real(v) << "\n";
  };
  out << "N           " << dim << "\n";
  line("z_N", j["z_N"].get<double>());
  line("omega_N", j["omega_N"].get<double>());
  line("lambda(0)", j["lambda_ball"].get<double>());
  line("G_N", j["G_N"].get<double>());
  line("C_N", j["C_N"].get<double>());
  return out.str();
}

struct QSequenceCsv {
  std::string text;
  bool monotone = true;
};

/// Columns k,Q_k,first_diff,second_diff for k = 2..kmax, where
/// first_diff = Q_{k+1} - Q_k and second_diff = Q_{k+1} - 2 Q_k + Q_{k-1}
/// (empty at k = 2); footer row C_N,<value>,finale_criterion,<value>.
inline QSequenceCsv q_sequence_csv(int dim, int kmax) {
  if (kmax < 2) throw UsageError("qseq: kmax must be >= 2");
  if (kmax + 1 > kMaxModeDegree) throw UsageError("qseq: kmax too large");
  std::vector<double> q;
  for (int k = 2; k <= kmax + 1; ++k) q.push_back(q_value(dim, k));
  QSequenceCsv out;
  std::string& s = out.text;
  s = "k,Q_k,first_diff,second_diff\n";
  for (int k = 2; k <= kmax; ++k) {
    const std::size_t i = static_cast<std::size_t>(k - 2);
    const double d1 = q[i + 1] - q[i];
    if (d1 < -1e-12) out.monotone = false;
    s += std::to_string(k) + "," + format_real(q[i]) + "," + format_real(d1) + ",";
    if (i > 0) s += format_real(q[i + 1] - 2.0 * q[i] + q[i - 1]);
    s += "\n";
  }
  s += "C_N," + format_real(faber_krahn_constant(dim)) + ",finale_criterion," +
       format_real(finale_criterion(dim)) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Validation suite

/// j_{N/2-1} for N = 2..9 as tabulated in the literature.
inline std::map<int, double> reference_zero_table() {
  return {{2, 2.404826}, {3, std::numbers::pi}, {4, 3.831706}, {5, 4.4934095},
          {6, 5.135622}, {7, 5.763459},        {8, 6.380162}, {9, 6.987932}};
}

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  json to_json() const {
    return {{"name", name},
            {"measured", std::isfinite(measured) ? json(measured) : json(nullptr)},
            {"tolerance", tolerance},
            {"passed", passed}};
  }
};

inline CheckResult check_at_most(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, measured <= tolerance};
}

inline std::vector<CheckResult> run_validation(bool quick, const std::map<int, double>& zero_table) {
  std::vector<CheckResult> checks;

  double zero_err = 0.0;
  for (const auto& [n, z] : zero_table) {
    zero_err = std::max(zero_err, std::abs(first_zero(HalfIntOrder::for_dimension(n)) - z));
  }
  checks.push_back(check_at_most("zero_table", zero_err, 1e-6));

  double cq = 0.0;
  for (int n = 2; n <= kMaxDimension; ++n) {
    const double c = faber_krahn_constant(n);
    cq = std::max(cq, std::abs(c - q_value(n, 2)) / c);
  }
  checks.push_back(check_at_most("constant_consistency", cq, 1e-10));

  {
    const HalfIntOrder zero_order(0);
    const double j0 = first_zero(zero_order);
    const double closed = 3.0 / (2.0 * (j0 * j0 - 2.0));
    checks.push_back(check_at_most("closed_form_c2", std::abs(faber_krahn_constant(2) - closed) / closed, 1e-10));
  }

  double mono = 0.0;
  double convex = 0.0;
  for (int n = 2; n <= 12; ++n) {
    const auto report = q_convexity_report(n, 51);
    for (double d : report.first_diff) mono = std::max(mono, -d);
    const double z = dimension_params(n).z;
    std::vector<double> rho;
    for (int k = 1; k <= 51; ++k) rho.push_back(bessel_ratio_cf(HalfIntOrder::for_mode(n, k), z));
    for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
      convex = std::max(convex, -(rho[i + 1] - 2.0 * rho[i] + rho[i - 1]));
    }
  }
  checks.push_back(check_at_most("q_monotonicity", mono, 1e-12));
  checks.push_back(check_at_most("ratio_convexity", convex, 1e-12));

  double finale_min = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= kMaxFinaleDimension; ++n) finale_min = std::min(finale_min, finale_criterion(n));
  checks.push_back({"finale_criterion_positive", finale_min, 0.0, finale_min > 0.0});
  int sign_mismatches = 0;
  for (int n = 2; n <= 50; ++n) {
    const bool a = finale_criterion(n) > 0.0;
    const bool b = q_value(n, 3) - q_value(n, 2) > 0.0;
    if (a != b) ++sign_mismatches;
  }
  checks.push_back(check_at_most("finale_sign_agreement", sign_mismatches, 0.0));

  double poisson = 0.0;
  for (int n : {2, 3}) {
    const HarmonicPhase ph = n == 2 ? HarmonicPhase::Cos : HarmonicPhase::Zonal;
    for (const auto& modes : std::vector<std::vector<HarmonicMode>>{
             {{2, 1.0, ph}}, {{3, 1.0, ph}}, {{2, 1.0, ph}, {4, 0.5, ph}}}) {
      const auto r = poisson_residual(HarmonicProfile(n, modes), RadialGrid{});
      poisson = std::max(poisson, r.max_residual / r.max_abs_v);
    }
  }
  checks.push_back(check_at_most("poisson_residual", poisson, 1e-6));

  if (!quick) {
    const auto disk = extrapolated_eigenvalue(CircleBoundary{}, default_grid_ladder());
    const double lb = dimension_params(2).lambda_ball;
    checks.push_back(check_at_most("disk_eigenvalue", std::abs(disk.lambda_star - lb) / lb, 1e-4));
    checks.push_back({"disk_convergence_order", disk.order, 0.2, std::abs(disk.order - 2.0) <= 0.2});
  }
  return checks;
}

}  // namespace fkd::harness
