// Command-line driver: run | scan | scaling | report.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcpt/errors.hpp"
#include "qcpt/pipeline.hpp"

namespace {

struct Flags {
  std::string config, fcidump, mode, povm, out;
  int core = -1, active = -2;
  double sigma_mha = -1.0;
  long long seed = -1, budget = -1;
  std::vector<std::string> fixtures;
};

void add_common(CLI::App* app, Flags& f, bool needs_fcidump) {
  app->add_option("--config", f.config, "JSON config; flags override it");
  if (needs_fcidump) app->add_option("--fcidump", f.fcidump, "FCIDUMP integral file");
  app->add_option("--core", f.core, "number of doubly occupied core orbitals");
  app->add_option("--active", f.active, "number of active orbitals (default: all above the core)");
  app->add_option("--mode", f.mode, "sv or povm")->check(CLI::IsMember({"sv", "povm"}));
  app->add_option("--povm", f.povm, "POVM class")->check(CLI::IsMember({"4p", "8p"}));
  app->add_option("--sigma-mha", f.sigma_mha, "target standard error of the energy, mHa");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--budget", f.budget, "maximum number of shots");
}

qcpt::RunConfig build(const Flags& f) {
  qcpt::RunConfig c;
  if (!f.config.empty()) c = qcpt::load_config(f.config);
  if (!f.fcidump.empty()) c.fcidump = f.fcidump;
  if (f.core >= 0) c.n_core = f.core;
  if (f.active >= -1) c.n_active = f.active;
  if (!f.mode.empty()) c.mode = qcpt::parse_run_mode(f.mode);
  if (!f.povm.empty()) c.povm_class = qcpt::parse_povm_class(f.povm);
  if (f.sigma_mha > 0.0) c.sigma_target = f.sigma_mha * 1e-3;
  if (f.seed >= 0) c.seed = static_cast<uint64_t>(f.seed);
  if (!f.out.empty()) c.out = f.out;
  if (f.budget > 0) c.budget = static_cast<size_t>(f.budget);
  if (!f.fixtures.empty()) c.fixtures.assign(f.fixtures.begin(), f.fixtures.end());
  return qcpt::config_from_json(qcpt::config_to_json(c), qcpt::RunConfig{});  // validates
}

void print_run(const qcpt::RunResult& r) {
  std::printf("fixture        %s\n", r.fixture.c_str());
  std::printf("active         %d orbitals, %d qubits, %d ADAPT layers\n", r.n_active, r.n_qubits, r.layers);
  std::printf("E_VQESCF       %.8f Ha (exact %.8f, sigma %.3e)\n", r.e_estimate, r.e_exact, r.sigma);
  std::printf("shots          %zu%s\n", r.shots, r.partial ? " (budget exhausted)" : "");
  std::printf("E_PT2          %.8f Ha (exact RDMs %.8f)\n", r.e2, r.e2_exact);
  for (const auto& w : r.report.warnings) std::printf("warning        %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcpt: POVM-based SC-NEVPT2 workflow"};
  app.require_subcommand(1);
  Flags run_f, scan_f, scale_f;
  std::string report_dir;

  auto* run = app.add_subcommand("run", "single point");
  add_common(run, run_f, true);
  auto* scan = app.add_subcommand("scan", "same settings over several fixtures");
  add_common(scan, scan_f, false);
  scan->add_option("fixtures", scan_f.fixtures, "FCIDUMP files in scan order");
  auto* scaling = app.add_subcommand("scaling", "shots to reach sigma for both POVM classes");
  add_common(scaling, scale_f, false);
  scaling->add_option("fixtures", scale_f.fixtures, "FCIDUMP files, one per chain length");
  auto* report = app.add_subcommand("report", "redo the perturbation step from a run directory");
  report->add_option("dir", report_dir, "output directory of an earlier run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto c = build(run_f);
      if (c.fcidump.empty()) throw qcpt::ConfigError("--fcidump is required");
      print_run(qcpt::cmd_run(c));
      return 0;
    }
    if (report->parsed()) {
      print_run(qcpt::cmd_report(report_dir));
      return 0;
    }
    if (scan->parsed()) {
      const auto rows = qcpt::cmd_scan(build(scan_f));
      bool failed = false;
      for (const auto& r : rows) {
        if (r.ok)
          std::printf("%-28s E=%.8f E_PT2=%.8f shots=%zu\n", r.fixture.stem().c_str(), r.result.e_estimate,
                      r.result.e2, r.result.shots);
        else
          std::printf("%-28s FAILED %s\n", r.fixture.stem().c_str(), r.error.c_str());
        failed |= !r.ok;
      }
      return failed ? 2 : 0;
    }
    if (scaling->parsed()) {
      for (const auto& r : qcpt::cmd_scaling(build(scale_f)))
        std::printf("%-20s n_a=%d %s median_shots=%.0f ratio=%.6g\n", r.fixture.c_str(), r.n_active,
                    qcpt::to_string(r.povm_class).c_str(), r.median_shots, r.ratio);
      return 0;
    }
  } catch (const qcpt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
