#include "cli.hpp"

#include "projflow/config.hpp"
#include "projflow/diagnostics.hpp"
#include "projflow/error.hpp"
#include "projflow/mms.hpp"
#include "projflow/output.hpp"
#include "projflow/scheme.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

namespace projflow::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Residuals {
  double identity = 0.0;
  double pythagoras = 0.0;
  double weak_divergence = 0.0;
  double skew = 0.0;
};

Residuals max_residuals(const EnergyLedger& ledger) {
  Residuals r;
  for (const LedgerRow& row : ledger) {
    r.identity = std::max(r.identity, row.residual_identity);
    r.pythagoras = std::max(r.pythagoras, row.residual_pythagoras);
    r.weak_divergence = std::max(r.weak_divergence, row.weak_divergence);
    r.skew = std::max(r.skew, row.skew_residual);
  }
  return r;
}

void print_residuals(const Residuals& r, std::ostream& out) {
  out << std::scientific << std::setprecision(3);
  out << "  max energy identity residual  " << r.identity << "\n";
  out << "  max Pythagoras residual       " << r.pythagoras << "\n";
  out << "  max weak divergence           " << r.weak_divergence << "\n";
  out << "  max convection skew residual  " << r.skew << "\n";
  out << std::defaultfloat;
}

void print_energy(const EnergyReport& e, std::ostream& out) {
  out << "  energy bound constant C = " << e.constant << ", max lhs/rhs = " << e.max_ratio
      << (e.holds ? " (holds)" : " (VIOLATED)") << "\n";
  if (!e.final_form_applicable) out << "  note: dt > 1/6, only the Gronwall form of the bound is checked\n";
  for (const std::string& v : e.violations) out << "  violation: " << v << "\n";
}

std::string level_name(int m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%05d.vtk", m);
  return buf;
}

int cmd_run(const std::string& path, bool cellwise, std::ostream& out) {
  RunConfig rc = parse_config(fs::path(path));
  for (const auto& w : rc.warnings) out << "warning: " << w << "\n";
  rc.scheme.enforce_gates = false;
  const RunResult res = run(rc.scheme);
  for (const auto& w : res.warnings)
    if (std::find(rc.warnings.begin(), rc.warnings.end(), w) == rc.warnings.end()) out << "warning: " << w << "\n";

  const fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  write_ledger_csv(res.ledger, dir / "ledger.csv");
  VtkOptions vo;
  vo.cellwise = cellwise;
  for (const Snapshot& s : res.trajectory) write_vtk(s, *res.disc, dir / level_name(s.m), vo);

  out << "case " << rc.case_name << ": " << res.grid.steps << " steps of dt = " << res.grid.dt << ", "
      << res.disc->n_u() << " velocity / " << res.disc->n_p() << " pressure dofs\n";
  print_residuals(max_residuals(res.ledger), out);
  print_energy(res.energy, out);
  out << "wrote " << (dir / "ledger.csv").string() << " and " << res.trajectory.size() << " VTK files\n";
  return kOk;
}

int cmd_convergence(const std::string& path, const std::string& mode_name, const std::string& out_file,
                    std::ostream& out) {
  const RunConfig rc = parse_config(fs::path(path));
  for (const auto& w : rc.warnings) out << "warning: " << w << "\n";
  const StudyMode mode = parse_study_mode(mode_name);
  const ManufacturedCase mc = case_by_name(rc.case_name, rc.scheme.mu);
  if (!mc.exact) throw ConfigError("case '" + rc.case_name + "' has no exact solution to measure errors against");
  const RateTable table = convergence_study(mode, rc.scheme, mc, default_study_grid(mode, rc.scheme));

  const fs::path target = out_file.empty() ? fs::path(rc.out_dir) / ("rates_" + mode_name + ".csv") : fs::path(out_file);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream f(target);
  if (!f) throw Error("cannot write '" + target.string() + "'");
  write_rate_table_csv(table, f);
  write_rate_table_csv(table, out);
  for (const auto& w : table.warnings) out << "warning: " << w << "\n";
  out << "wrote " << target.string() << "\n";
  return kOk;
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  RunConfig rc = parse_config(fs::path(path));
  for (const auto& w : rc.warnings) out << "warning: " << w << "\n";
  rc.scheme.enforce_gates = true;
  RunResult res;
  try {
    res = run(rc.scheme);
  } catch (const IdentityViolation& e) {
    err << "verify FAILED: " << e.what() << "\n";
    return kCheckFailed;
  }
  out << "verify: " << res.grid.steps << " steps, all per-step gates passed\n";
  print_residuals(max_residuals(res.ledger), out);
  print_energy(res.energy, out);
  if (!res.energy.holds) {
    err << "verify FAILED: energy inequality violated\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_gronwall(unsigned seed, int length, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double dt = 0.01 + 0.09 * unif(rng);
  const double nu = 0.9 * unif(rng) / dt;
  std::vector<double> b(length);
  for (double& v : b) v = unif(rng);
  const auto bound = discrete_gronwall_bound(b, nu, dt);

  out << "seed " << seed << ": nu = " << nu << ", dt = " << dt << "\n";
  out << "n,b,bound,recursion\n" << std::setprecision(12);
  double sum = 0.0;
  bool ok = true;
  for (int n = 0; n < length; ++n) {
    // Worst case: a_{n+1} = b_{n+1} + nu dt sum_{j<=n+1} a_j, solved for a_{n+1}.
    const double a = (b[n] + nu * dt * sum) / (1.0 - nu * dt);
    sum += a;
    ok = ok && bound[n] >= a * (1.0 - 1e-12);
    out << n + 1 << ',' << b[n] << ',' << bound[n] << ',' << a << "\n";
  }
  out << (ok ? "bound dominates the recursion\n" : "bound FAILS to dominate the recursion\n");
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"BDF2 incremental pressure-correction solver"};
  app.require_subcommand(1);

  std::string config;
  bool cellwise = false;
  auto* run_cmd = app.add_subcommand("run", "simulate; write the energy ledger CSV and VTK snapshots");
  run_cmd->add_option("config", config, "run file")->required();
  run_cmd->add_flag("--cellwise", cellwise, "also write the projected velocity per cell");

  std::string mode;
  std::string rates_out;
  auto* conv_cmd = app.add_subcommand("convergence", "convergence study; write a rate table CSV");
  conv_cmd->add_option("config", config, "run file")->required();
  conv_cmd->add_option("--mode", mode, "temporal | spatial | coupled")
      ->required()
      ->check(CLI::IsMember({"temporal", "spatial", "coupled"}));
  conv_cmd->add_option("-o,--out", rates_out, "output CSV (default: <out_dir>/rates_<mode>.csv)");

  auto* verify_cmd = app.add_subcommand("verify", "run asserting every per-step identity");
  verify_cmd->add_option("config", config, "run file")->required();

  bool demo = false;
  unsigned seed = 7;
  int length = 20;
  auto* gr_cmd = app.add_subcommand("gronwall", "discrete Gronwall bound against the worst-case recursion");
  gr_cmd->add_flag("--demo", demo, "seeded random example")->required();
  gr_cmd->add_option("--seed", seed, "random seed");
  gr_cmd->add_option("--length", length, "sequence length")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config, cellwise, out);
    if (*conv_cmd) return cmd_convergence(config, mode, rates_out, out);
    if (*verify_cmd) return cmd_verify(config, out, err);
    if (*gr_cmd) return cmd_gronwall(seed, length, out);
  } catch (const ParseError& e) {
    err << "error: " << config << ": " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IdentityViolation& e) {
    err << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace projflow::cli
