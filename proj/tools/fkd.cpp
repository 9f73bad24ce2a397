#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "fkd/fkd.hpp"

namespace {

using fkd::harness::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fkd::UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw fkd::UsageError(path + ": " + e.what());
  }
}

int cmd_constants(int dim) {
  if (dim < 2 || dim > fkd::kMaxDimension) {
    throw fkd::UsageError("--dim must lie in [2, " + std::to_string(fkd::kMaxDimension) + "]");
  }
  std::cout << fkd::harness::constants_text(dim) << fkd::harness::constants_json(dim).dump() << "\n";
  return kExitOk;
}

int cmd_qseq(int dim, int kmax, const std::string& csv_path) {
  if (dim < 2 || dim > fkd::kMaxDimension) {
    throw fkd::UsageError("--dim must lie in [2, " + std::to_string(fkd::kMaxDimension) + "]");
  }
  const auto table = fkd::harness::q_sequence_csv(dim, kmax);
  if (csv_path.empty()) {
    std::cout << table.text;
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw fkd::UsageError("cannot write " + csv_path);
    out << table.text;
  }
  if (!table.monotone) {
    std::cerr << "qseq: Q_k is not monotone\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

int cmd_converge(const std::string& config_path, const std::string& mode) {
  auto cfg = fkd::harness::run_config_from_json(read_json_file(config_path));
  if (!mode.empty()) cfg.mode = fkd::harness::mode_from_string(mode);
  if (cfg.output.empty()) cfg.output = "converge.csv";
  cfg.validate();
  std::ofstream csv(cfg.output, std::ios::binary);
  if (!csv) throw fkd::UsageError("cannot write " + cfg.output);
  const auto summary = fkd::harness::run_converge(cfg, csv);
  json out = summary.to_json();
  out["csv"] = cfg.output;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_validate(bool quick, const std::string& zero_table_path) {
  auto table = fkd::harness::reference_zero_table();
  if (!zero_table_path.empty()) {
    table.clear();
    try {
      const json j = read_json_file(zero_table_path);
      for (auto it = j.begin(); it != j.end(); ++it) table[std::stoi(it.key())] = it.value().get<double>();
    } catch (const std::exception& e) {
      throw fkd::UsageError(std::string("zero table: ") + e.what());
    }
  }
  const auto checks = fkd::harness::run_validation(quick, table);
  json report = json::array();
  json failed = json::array();
  for (const auto& c : checks) {
    report.push_back(c.to_json());
    if (!c.passed) failed.push_back(c.name);
  }
  std::cout << json{{"checks", report}, {"failed", failed}, {"passed", failed.empty()}}.dump(2) << "\n";
  if (!failed.empty()) {
    for (const auto& name : failed) std::cerr << "validate: check failed: " << name.get<std::string>() << "\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fkd: Faber-Krahn deficit constants and convergence experiments"};
  app.require_subcommand(1);

  int dim = 2;
  int kmax = 10;
  std::string csv_path;
  std::string config_path;
  std::string mode;
  std::string zero_table;
  bool quick = false;

  auto* constants = app.add_subcommand("constants", "print z_N, omega_N, lambda(0), G_N and C_N");
  constants->add_option("--dim", dim, "dimension N")->required();

  auto* qseq = app.add_subcommand("qseq", "CSV of the deficit-ratio sequence Q_k");
  qseq->add_option("--dim", dim, "dimension N")->required();
  qseq->add_option("--kmax", kmax, "largest degree")->required();
  qseq->add_option("--csv", csv_path, "write the CSV here instead of stdout");

  auto* converge = app.add_subcommand("converge", "deficit-ratio convergence run");
  converge->add_option("--config", config_path, "RunConfig JSON")->required();
  converge->add_option("--mode", mode, "analytic, numeric or both")
      ->check(CLI::IsMember({"analytic", "numeric", "both"}));

  auto* validate = app.add_subcommand("validate", "cross-module invariant checks");
  validate->add_flag("--quick", quick, "skip the eigensolver checks");
  validate->add_option("--zero-table", zero_table, "JSON object {\"N\": j} replacing the reference zeros");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*constants) return cmd_constants(dim);
    if (*qseq) return cmd_qseq(dim, kmax, csv_path);
    if (*converge) return cmd_converge(config_path, mode);
    if (*validate) return cmd_validate(quick, zero_table);
  } catch (const fkd::UsageError& e) {
    std::cerr << "fkd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fkd: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitUsage;
}
