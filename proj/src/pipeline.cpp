#include "qcpt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "qcpt/errors.hpp"
#include "qcpt/estimation.hpp"
#include "qcpt/hamiltonians.hpp"
#include "qcpt/integrals.hpp"
#include "qcpt/rdm.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt {

using nlohmann::json;

RunMode parse_run_mode(const std::string& s) {
  if (s == "sv") return RunMode::Statevector;
  if (s == "povm") return RunMode::Povm;
  throw ConfigError("mode must be sv or povm, got '" + s + "'");
}

std::string to_string(RunMode m) { return m == RunMode::Statevector ? "sv" : "povm"; }

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

void validate(const RunConfig& c) {
  if (c.n_core < 0) throw ConfigError("core must be >= 0");
  if (c.n_active < -1) throw ConfigError("active must be >= 0");
  if (!(c.sigma_target > 0.0) || !std::isfinite(c.sigma_target)) throw ConfigError("sigma must be positive");
  if (c.budget == 0) throw ConfigError("budget must be positive");
  if (c.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (!(c.adapt.grad_threshold > 0.0) || c.adapt.max_layers < 0) throw ConfigError("invalid adapt settings");
  if (c.measurement.min_batch == 0 || c.measurement.max_batch < c.measurement.min_batch)
    throw ConfigError("invalid measurement batch sizes");
}

// Runs one stage, tagging any library failure with its name.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << s;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v, int prec) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

struct Prepared {
  IntegralSet ints;
  SpacePartition part;
  ActiveHamiltonian active_h;
  int n_qubits = 0;
};

Prepared prepare(const RunConfig& c) {
  Prepared p;
  p.ints = stage("integrals_io", [&] { return read_fcidump(c.fcidump); });
  stage("integrals_io", [&] {
    const int n_act = c.n_active < 0 ? p.ints.norb - c.n_core : c.n_active;
    p.part = load_partition(c.n_core, n_act, p.ints);
    return 0;
  });
  p.active_h = stage("hamiltonians", [&] { return fold_core(p.ints, p.part); });
  p.n_qubits = 2 * p.part.n_active();
  return p;
}

// Fock from the active 1-RDM, semicanonical orbitals, then the eight classes.
Nevpt2Report perturbation_step(const Prepared& p, const RdmSet& rdms) {
  return stage("sc_nevpt2", [&] {
    const SpinFreeRdms sf = spin_trace(rdms, std::min(2, rdms.max_order()));
    Eigen::MatrixXd dm1 = p.part.n_active() > 0 ? dm1_matrix(sf) : Eigen::MatrixXd(0, 0);
    dm1 = 0.5 * (dm1 + dm1.transpose()).eval();
    // Estimated densities carry shot noise in the trace; the electron count is exact.
    const double tr = dm1.trace();
    if (rdms.estimated() && tr > 0.0) dm1 *= p.active_h.n_electrons / tr;
    const Eigen::MatrixXd fock = build_fock(p.ints, p.part, dm1);
    const SemicanonicalResult semi = semicanonicalize(fock, p.ints, p.part);
    return sc_nevpt2(semi.integrals, p.part, semi.energies, rdms);
  });
}

int rdm_order(const Prepared& p) { return std::min(4, p.n_qubits); }

json report_json(const Nevpt2Report& rep) {
  json classes = json::array();
  for (const auto& cr : rep.classes) {
    json labels = json::array();
    for (const auto& l : cr.labels)
      labels.push_back({{"holes", l.holes}, {"particles", l.particles}, {"norm", l.norm},
                        {"energy_Ha", l.energy}, {"contribution_Ha", l.contribution}});
    classes.push_back({{"class", class_name(cr.cls)}, {"e2_Ha", cr.e2}, {"intruders", cr.intruders},
                       {"clamped_norms", cr.clamped_norms}, {"labels", labels}});
  }
  return {{"e0_Ha", rep.e0}, {"e2_Ha", rep.e2}, {"classes", classes}, {"warnings", rep.warnings}};
}

void write_energies(const std::filesystem::path& dir, const RunResult& r) {
  json j{{"fixture", r.fixture},       {"n_active", r.n_active},   {"n_qubits", r.n_qubits},
         {"layers", r.layers},         {"E_exact_Ha", r.e_exact},  {"E_estimate_Ha", r.e_estimate},
         {"sigma_Ha", r.sigma},        {"shots", r.shots},         {"partial", r.partial},
         {"E2_Ha", r.e2},              {"E2_exact_Ha", r.e2_exact}};
  write_text(dir / "energies.json", j.dump(2) + "\n");
}

void write_outputs(const RunResult& r, const RunConfig& c, const RdmSet& rdms) {
  stage("output", [&] {
    write_energies(c.out, r);
    write_rdms(c.out / "rdms", rdms);
    write_report_json(c.out / "nevpt2_report.json", r, c);
    write_report_csv(c.out / "nevpt2_report.csv", r, c);
    return 0;
  });
}

}  // namespace

RunConfig config_from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, {"fcidump", "core", "active", "mode", "povm", "sigma_mha", "seed", "out", "budget", "adapt",
                   "measurement", "record_format", "seeds", "fixtures"},
               "config");
    if (j.contains("fcidump")) c.fcidump = j["fcidump"].get<std::string>();
    take(j, "core", c.n_core);
    take(j, "active", c.n_active);
    if (j.contains("mode")) c.mode = parse_run_mode(j["mode"].get<std::string>());
    if (j.contains("povm")) c.povm_class = parse_povm_class(j["povm"].get<std::string>());
    if (j.contains("sigma_mha")) c.sigma_target = j["sigma_mha"].get<double>() * 1e-3;
    take(j, "seed", c.seed);
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    take(j, "budget", c.budget);
    take(j, "seeds", c.seeds);
    if (j.contains("record_format")) {
      const auto f = j["record_format"].get<std::string>();
      if (f != "bin" && f != "csv") throw ConfigError("record_format must be bin or csv");
      c.record_format = f == "csv" ? RecordFormat::Csv : RecordFormat::Binary;
    }
    if (j.contains("fixtures")) {
      c.fixtures.clear();
      for (const auto& f : j["fixtures"]) c.fixtures.emplace_back(f.get<std::string>());
    }
    if (j.contains("adapt")) {
      const json& a = j["adapt"];
      check_keys(a, {"mode", "grad_threshold", "max_layers", "optimizer_tol", "max_iterations",
                     "shots_per_evaluation", "fd_step"},
                 "adapt");
      if (a.contains("mode")) {
        const auto m = a["mode"].get<std::string>();
        if (m != "exact" && m != "sampled") throw ConfigError("adapt.mode must be exact or sampled");
        c.adapt.mode = m == "exact" ? AdaptMode::Exact : AdaptMode::Sampled;
      }
      take(a, "grad_threshold", c.adapt.grad_threshold);
      take(a, "max_layers", c.adapt.max_layers);
      take(a, "optimizer_tol", c.adapt.optimizer_tol);
      take(a, "max_iterations", c.adapt.max_iterations);
      take(a, "shots_per_evaluation", c.adapt.shots_per_evaluation);
      take(a, "fd_step", c.adapt.fd_step);
    }
    if (j.contains("measurement")) {
      const json& m = j["measurement"];
      check_keys(m, {"initial_shots", "min_batch", "max_batch", "max_generations", "optimize"}, "measurement");
      take(m, "initial_shots", c.measurement.initial_shots);
      take(m, "min_batch", c.measurement.min_batch);
      take(m, "max_batch", c.measurement.max_batch);
      take(m, "max_generations", c.measurement.max_generations);
      take(m, "optimize", c.measurement.optimize);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  return config_from_json(read_text(path), std::move(base));
}

std::string config_to_json(const RunConfig& c) {
  json fixtures = json::array();
  for (const auto& f : c.fixtures) fixtures.push_back(f.string());
  json j{{"fcidump", c.fcidump.string()},
         {"core", c.n_core},
         {"active", c.n_active},
         {"mode", to_string(c.mode)},
         {"povm", to_string(c.povm_class)},
         {"sigma_mha", c.sigma_target * 1e3},
         {"seed", c.seed},
         {"out", c.out.string()},
         {"budget", c.budget},
         {"seeds", c.seeds},
         {"record_format", c.record_format == RecordFormat::Csv ? "csv" : "bin"},
         {"fixtures", fixtures},
         {"adapt",
          {{"mode", c.adapt.mode == AdaptMode::Exact ? "exact" : "sampled"},
           {"grad_threshold", c.adapt.grad_threshold},
           {"max_layers", c.adapt.max_layers},
           {"optimizer_tol", c.adapt.optimizer_tol},
           {"max_iterations", c.adapt.max_iterations},
           {"shots_per_evaluation", c.adapt.shots_per_evaluation},
           {"fd_step", c.adapt.fd_step}}},
         {"measurement",
          {{"initial_shots", c.measurement.initial_shots},
           {"min_batch", c.measurement.min_batch},
           {"max_batch", c.measurement.max_batch},
           {"max_generations", c.measurement.max_generations},
           {"optimize", c.measurement.optimize}}}};
  return j.dump(2) + "\n";
}

void write_report_json(const std::filesystem::path& path, const RunResult& r, const RunConfig& c) {
  json j{{"fixture", r.fixture},
         {"mode", to_string(c.mode)},
         {"povm_class", c.mode == RunMode::Povm ? to_string(c.povm_class) : "sv"},
         {"sigma_th_mHa", c.mode == RunMode::Povm ? c.sigma_target * 1e3 : 0.0},
         {"E_VQESCF_Ha", r.e_estimate},
         {"E_VQESCF_exact_Ha", r.e_exact},
         {"sigma_Ha", r.sigma},
         {"shots", r.shots},
         {"partial", r.partial},
         {"E_PT2_Ha", r.e2},
         {"E_PT2_exact_Ha", r.e2_exact},
         {"nevpt2", report_json(r.report)}};
  write_text(path, j.dump(2) + "\n");
}

void write_report_csv(const std::filesystem::path& path, const RunResult& r, const RunConfig& c) {
  std::string s = "povm_class,sigma_th_mHa,E_VQESCF_Ha,E_PT2_POVM_Ha,shots_x1e3,dE_mHa,dE_PT2_mHa\n";
  const bool povm = c.mode == RunMode::Povm;
  s += (povm ? to_string(c.povm_class) : std::string("sv")) + "," + fmt(povm ? c.sigma_target * 1e3 : 0.0, 2) + "," +
       fmt(r.e_estimate, 8) + "," + fmt(r.e2, 8) + "," + fmt(r.shots * 1e-3, 3) + "," +
       fmt((r.e_estimate - r.e_exact) * 1e3, 4) + "," + fmt((r.e2 - r.e2_exact) * 1e3, 4) + "\n";
  write_text(path, s);
}

RunResult cmd_run(const RunConfig& config) {
  validate(config);
  const Prepared p = prepare(config);
  if (!config.out.empty()) {
    std::filesystem::create_directories(config.out);
    write_text(config.out / "config.json", config_to_json(config));
  }

  RunResult r;
  r.fixture = config.fcidump.stem().string();
  r.n_active = p.part.n_active();
  r.n_qubits = p.n_qubits;

  AdaptSettings as = config.adapt;
  as.povm_class = config.povm_class;
  as.sigma_target = config.sigma_target;
  as.seed = config.seed;
  as.final_measurement = config.measurement;
  as.final_measurement.budget = config.budget;
  const AdaptResult ar = stage("adapt_vqe", [&] { return run_adapt(p.active_h, as); });
  if (!config.out.empty()) write_adapt_trace(config.out / "adapt_trace.csv", ar.trace);
  r.layers = static_cast<int>(ar.ansatz.ops.size());
  const QubitOperator h = stage("qubit_algebra", [&] { return qubit_hamiltonian(p.active_h); });
  r.e_exact = expectation(ar.state, h);

  const RdmSet exact = stage("estimation", [&] { return exact_rdms_from_state(ar.state, rdm_order(p)); });
  const Nevpt2Report exact_rep = perturbation_step(p, exact);
  r.e2_exact = exact_rep.e2;

  if (config.mode == RunMode::Statevector) {
    r.e_estimate = r.e_exact;
    r.report = exact_rep;
    r.e2 = exact_rep.e2;
    if (!config.out.empty()) write_outputs(r, config, exact);
    return r;
  }

  const AdaptiveResult meas = stage("povm", [&] {
    AdaptiveOptions opt = config.measurement;
    opt.budget = config.budget;
    const StateVector& psi = ar.state;
    const uint64_t seed = config.seed;
    const PovmSampler sampler = [&psi, seed](const ProductPovm& povm, size_t shots, uint64_t first) {
      return sample_outcomes(psi, povm, shots, seed, first);
    };
    return adapt_measurement(h, ProductPovm::symmetric(config.povm_class, p.n_qubits), sampler,
                             config.sigma_target, seed, opt);
  });
  r.e_estimate = meas.estimate.mean;
  r.sigma = meas.estimate.std_error;
  r.shots = meas.record.shots();
  r.partial = meas.partial;
  if (!config.out.empty())
    stage("output", [&] {
      write_record(config.out / "record", meas.record, config.record_format);
      return 0;
    });

  const RdmSet est = stage("estimation", [&] { return estimate_rdms(meas.record, rdm_order(p)); });
  r.report = perturbation_step(p, est);
  r.e2 = r.report.e2;
  if (!config.out.empty()) write_outputs(r, config, est);
  return r;
}

RunResult cmd_report(const std::filesystem::path& run_dir) {
  RunConfig c = load_config(run_dir / "config.json");
  c.out = run_dir;
  const Prepared p = prepare(c);
  const json e = stage("output", [&] { return json::parse(read_text(run_dir / "energies.json")); });
  RunResult r;
  r.fixture = e.at("fixture").get<std::string>();
  r.n_active = p.part.n_active();
  r.n_qubits = p.n_qubits;
  r.layers = e.at("layers").get<int>();
  r.e_exact = e.at("E_exact_Ha").get<double>();
  r.e2_exact = e.at("E2_exact_Ha").get<double>();
  RdmSet rdms;
  if (c.mode == RunMode::Povm) {
    const MeasurementRecord rec = stage("povm", [&] { return read_record(run_dir / "record"); });
    const QubitOperator h = qubit_hamiltonian(p.active_h);
    const ObservableEstimate est = stage("estimation", [&] { return estimate_observable(rec, h); });
    r.e_estimate = est.mean;
    r.sigma = est.std_error;
    r.shots = rec.shots();
    r.partial = e.at("partial").get<bool>();
    rdms = stage("estimation", [&] { return estimate_rdms(rec, rdm_order(p)); });
  } else {
    r.e_estimate = r.e_exact;
    rdms = stage("output", [&] { return read_rdms(run_dir / "rdms"); });
  }
  r.report = perturbation_step(p, rdms);
  r.e2 = r.report.e2;
  write_outputs(r, c, rdms);
  return r;
}

std::vector<ScanRow> cmd_scan(const RunConfig& config) {
  validate(config);
  std::vector<ScanRow> rows;
  const std::regex geom(R"(_r([0-9]+(\.[0-9]+)?))");
  for (const auto& f : config.fixtures) {
    ScanRow row;
    row.fixture = f;
    std::smatch m;
    const std::string stem = f.stem().string();
    row.geometry = std::regex_search(stem, m, geom) ? std::stod(m[1].str()) : std::numeric_limits<double>::quiet_NaN();
    RunConfig c = config;
    c.fcidump = f;
    if (!config.out.empty()) c.out = config.out / stem;
    try {
      row.result = cmd_run(c);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  if (!config.out.empty()) {
    std::filesystem::create_directories(config.out);
    std::string s =
        "fixture,geometry_A,E_VQESCF_Ha,E_exact_Ha,abs_dE_mHa,E_PT2_POVM_Ha,E_PT2_exact_Ha,abs_dE_PT2_mHa,"
        "sigma_th_mHa,shots_x1e3,status\n";
    for (const auto& row : rows) {
      const auto& r = row.result;
      s += row.fixture.stem().string() + "," + (std::isnan(row.geometry) ? std::string() : fmt(row.geometry, 3)) + ",";
      if (row.ok) {
        s += fmt(r.e_estimate, 8) + "," + fmt(r.e_exact, 8) + "," + fmt(std::abs(r.e_estimate - r.e_exact) * 1e3, 4) +
             "," + fmt(r.e2, 8) + "," + fmt(r.e2_exact, 8) + "," + fmt(std::abs(r.e2 - r.e2_exact) * 1e3, 4) + "," +
             fmt(config.mode == RunMode::Povm ? config.sigma_target * 1e3 : 0.0, 2) + "," + fmt(r.shots * 1e-3, 3) +
             ",ok\n";
      } else {
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        s += ",,,,,,,,failed: " + err + "\n";
      }
    }
    write_text(config.out / "scan.csv", s);
  }
  return rows;
}

std::vector<ScalingRow> cmd_scaling(const RunConfig& config) {
  validate(config);
  std::vector<ScalingRow> rows;
  std::string runs = "fixture,n_active,povm_class,seed,shots,sigma_mHa,generations\n";
  for (const auto& f : config.fixtures) {
    RunConfig c = config;
    c.fcidump = f;
    const Prepared p = prepare(c);
    AdaptSettings as = config.adapt;
    as.mode = AdaptMode::Exact;
    const AdaptResult ar = stage("adapt_vqe", [&] { return run_adapt(p.active_h, as); });
    const QubitOperator h = qubit_hamiltonian(p.active_h);
    const StateVector& psi = ar.state;
    for (PovmClass cls : {PovmClass::FourP, PovmClass::EightP}) {
      ScalingRow row;
      row.fixture = f.stem().string();
      row.n_active = p.part.n_active();
      row.povm_class = cls;
      for (int k = 0; k < config.seeds; ++k) {
        const uint64_t seed = config.seed + static_cast<uint64_t>(k);
        AdaptiveOptions opt = config.measurement;
        opt.budget = config.budget;
        const PovmSampler sampler = [&psi, seed](const ProductPovm& povm, size_t shots, uint64_t first) {
          return sample_outcomes(psi, povm, shots, seed, first);
        };
        const AdaptiveResult m = stage("povm", [&] {
          return adapt_measurement(h, ProductPovm::symmetric(cls, p.n_qubits), sampler, config.sigma_target, seed, opt);
        });
        row.shots.push_back(m.record.shots());
        runs += row.fixture + "," + std::to_string(row.n_active) + "," + to_string(cls) + "," + std::to_string(seed) +
                "," + std::to_string(m.record.shots()) + "," + fmt(m.estimate.std_error * 1e3, 4) + "," +
                std::to_string(m.generations.size()) + "\n";
      }
      std::vector<size_t> s = row.shots;
      std::sort(s.begin(), s.end());
      const size_t n = s.size();
      row.median_shots = n % 2 ? static_cast<double>(s[n / 2]) : 0.5 * (static_cast<double>(s[n / 2 - 1]) + s[n / 2]);
      row.ratio = row.median_shots / std::pow(static_cast<double>(row.n_active), 8);
      rows.push_back(std::move(row));
    }
  }
  if (!config.out.empty()) {
    std::filesystem::create_directories(config.out);
    std::string s = "fixture,n_active,povm_class,median_shots,shots_x1e3,ratio_shots_per_na8\n";
    for (const auto& r : rows) {
      std::ostringstream ratio;
      ratio.precision(6);
      ratio << r.ratio;
      s += r.fixture + "," + std::to_string(r.n_active) + "," + to_string(r.povm_class) + "," + fmt(r.median_shots, 1) +
           "," + fmt(r.median_shots * 1e-3, 3) + "," + ratio.str() + "\n";
    }
    write_text(config.out / "scaling.csv", s);
    write_text(config.out / "scaling_runs.csv", runs);
  }
  return rows;
}

}  // namespace qcpt
