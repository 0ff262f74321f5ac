#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcpt/adapt_vqe.hpp"
#include "qcpt/adaptive_measurement.hpp"
#include "qcpt/measurement_record.hpp"
#include "qcpt/povm.hpp"
#include "qcpt/sc_nevpt2.hpp"

namespace qcpt {

enum class RunMode { Statevector, Povm };

RunMode parse_run_mode(const std::string& s);
std::string to_string(RunMode m);

struct RunConfig {
  std::filesystem::path fcidump;
  int n_core = 0;
  int n_active = -1;  // -1: every orbital above the core
  RunMode mode = RunMode::Statevector;
  PovmClass povm_class = PovmClass::FourP;
  double sigma_target = 1.6e-3;  // Ha
  uint64_t seed = 1;
  std::filesystem::path out;     // empty: nothing written
  size_t budget = 100000000;     // shots
  AdaptSettings adapt;           // state preparation
  AdaptiveOptions measurement;   // budget is copied from `budget`
  RecordFormat record_format = RecordFormat::Binary;
  int seeds = 5;                 // scaling: seeds per chain and class
  std::vector<std::filesystem::path> fixtures;  // scan / scaling inputs
};

// JSON keys mirror the command-line flags: fcidump, core, active, mode, povm, sigma_mha,
// seed, out, budget, plus adapt {grad_threshold, max_layers, ...} and measurement
// {initial_shots, min_batch, max_batch, max_generations, optimize} blocks, seeds, fixtures.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
std::string config_to_json(const RunConfig& c);

struct RunResult {
  std::string fixture;
  int n_active = 0;
  int n_qubits = 0;
  int layers = 0;
  double e_exact = 0.0;     // ADAPT state, exact expectation
  double e_estimate = 0.0;  // equals e_exact in statevector mode
  double sigma = 0.0;       // reported standard error of e_estimate
  size_t shots = 0;
  bool partial = false;     // measurement stopped on the budget
  double e2 = 0.0;          // from the RDMs of this run
  double e2_exact = 0.0;    // from exact RDMs of the same state
  Nevpt2Report report;
};

// parse -> fold -> adapt_vqe -> (POVM measurement) -> RDMs -> semicanonical SC-NEVPT2.
// With config.out set, writes config.json, energies.json, adapt_trace.csv, rdms.{bin,json},
// nevpt2_report.{json,csv} and, in POVM mode, the record files.
RunResult cmd_run(const RunConfig& config);

// Recomputes RDMs and the perturbation step from the files of an earlier run without
// sampling again; rewrites the report files there.
RunResult cmd_report(const std::filesystem::path& run_dir);

struct ScanRow {
  std::filesystem::path fixture;
  double geometry = 0.0;  // bond length parsed from "_r<value>" in the file name, else NaN
  bool ok = false;
  std::string error;
  RunResult result;
};

// Runs every fixture with the same settings, keeping input order; failures are recorded
// and the scan continues. Writes scan.csv under config.out.
std::vector<ScanRow> cmd_scan(const RunConfig& config);

struct ScalingRow {
  std::string fixture;
  int n_active = 0;
  PovmClass povm_class = PovmClass::FourP;
  std::vector<size_t> shots;  // one per seed
  double median_shots = 0.0;
  double ratio = 0.0;         // median_shots / n_active^8
};

// Shots needed to reach sigma_target on the energy, for both POVM classes on every fixture.
// Writes scaling.csv (medians) and scaling_runs.csv (per seed) under config.out.
std::vector<ScalingRow> cmd_scaling(const RunConfig& config);

void write_report_json(const std::filesystem::path& path, const RunResult& r, const RunConfig& c);
void write_report_csv(const std::filesystem::path& path, const RunResult& r, const RunConfig& c);

}  // namespace qcpt
