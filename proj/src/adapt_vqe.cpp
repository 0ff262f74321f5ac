#include "qcpt/adapt_vqe.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qcpt/errors.hpp"

namespace qcpt {

uint64_t reference_occupation(int n_active, int n_electrons, int ms2) {
  if ((n_electrons + ms2) % 2 != 0) throw InputError("electron count and MS2 parity differ");
  const int na = (n_electrons + ms2) / 2, nb = (n_electrons - ms2) / 2;
  if (na < 0 || nb < 0 || na > n_active || nb > n_active) throw InputError("electrons do not fit the active space");
  uint64_t occ = 0;
  for (int p = 0; p < na; ++p) occ |= uint64_t{1} << (2 * p);
  for (int p = 0; p < nb; ++p) occ |= uint64_t{1} << (2 * p + 1);
  return occ;
}

OperatorPool build_pool(int n_active, int n_electrons, int ms2) {
  OperatorPool pool;
  if (n_active == 0) return pool;
  const int nq = 2 * n_active;
  const uint64_t occ = reference_occupation(n_active, n_electrons, ms2);
  std::vector<int> o, v;
  for (int q = 0; q < nq; ++q) ((occ >> q) & 1 ? o : v).push_back(q);
  auto add = [&](FermionString t, std::string label) {
    FermionString td;
    for (auto it = t.rbegin(); it != t.rend(); ++it) td.push_back({it->index, !it->dagger});
    QubitOperator a = jordan_wigner(t, nq) - jordan_wigner(td, nq);
    a.prune(1e-14);
    if (a.size() == 0) return;
    pool.push_back({std::move(label), std::move(t), std::move(a)});
  };
  for (int i : o)
    for (int a : v)
      if ((i & 1) == (a & 1)) add({{a, true}, {i, false}}, "s " + std::to_string(i) + "->" + std::to_string(a));
  for (size_t x = 0; x < o.size(); ++x)
    for (size_t y = x + 1; y < o.size(); ++y)
      for (size_t z = 0; z < v.size(); ++z)
        for (size_t w = z + 1; w < v.size(); ++w) {
          const int i = o[x], j = o[y], a = v[z], b = v[w];
          if ((i & 1) + (j & 1) != (a & 1) + (b & 1)) continue;
          add({{a, true}, {b, true}, {j, false}, {i, false}},
              "d " + std::to_string(i) + "," + std::to_string(j) + "->" + std::to_string(a) + "," + std::to_string(b));
        }
  return pool;
}

std::vector<double> pool_gradients(const StateVector& psi, const QubitOperator& h, const OperatorPool& pool) {
  const auto hpsi = apply_operator(h, psi);
  std::vector<double> g;
  g.reserve(pool.size());
  for (const auto& op : pool) g.push_back(2.0 * inner(hpsi, apply_operator(op.generator, psi)).real());
  return g;
}

StateVector prepare_ansatz(const Ansatz& ansatz, const OperatorPool& pool, int n_qubits) {
  StateVector psi = prepare_reference(ansatz.reference, n_qubits, std::popcount(ansatz.reference));
  for (size_t k = 0; k < ansatz.ops.size(); ++k)
    psi = apply_exp_pauli(psi, pool.at(ansatz.ops[k]).generator, ansatz.params[k]);
  return psi;
}

void write_adapt_trace(const std::filesystem::path& path, const std::vector<AdaptLayer>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "layer,energy_Ha,max_gradient_Ha,shots_cumulative\n";
  out.precision(12);
  for (const auto& l : trace) out << l.layer << ',' << l.energy << ',' << l.max_gradient << ',' << l.shots_cumulative << '\n';
}

namespace {

struct Objective {
  const QubitOperator* h;
  const OperatorPool* pool;
  Ansatz* ansatz;
  int n_qubits;
  // sampled mode
  bool sampled = false;
  const AdaptSettings* settings = nullptr;
  uint64_t* eval_counter = nullptr;
  size_t* shots = nullptr;

  double energy(const std::vector<double>& theta, uint64_t eval_seed) const {
    Ansatz a = *ansatz;
    a.params = theta;
    const StateVector psi = prepare_ansatz(a, *pool, n_qubits);
    if (!sampled) return expectation(psi, *h);
    const ProductPovm povm = ProductPovm::symmetric(settings->povm_class, n_qubits);
    const auto rec = sample_product_povm(psi, povm, settings->shots_per_evaluation, eval_seed);
    *shots += settings->shots_per_evaluation;
    return estimate_observable(rec, povm, *h).mean;
  }

  // Exact mode: reverse sweep. Sampled mode: central differences with shared seeds.
  double energy_and_gradient(const std::vector<double>& theta, std::vector<double>& grad) const {
    const size_t k = theta.size();
    grad.assign(k, 0.0);
    if (sampled) {
      const uint64_t s = settings->seed * 0x9e3779b97f4a7c15ULL + (*eval_counter)++;
      const double e = energy(theta, s);
      for (size_t i = 0; i < k; ++i) {
        auto tp = theta, tm = theta;
        tp[i] += settings->fd_step;
        tm[i] -= settings->fd_step;
        grad[i] = (energy(tp, s) - energy(tm, s)) / (2.0 * settings->fd_step);
      }
      return e;
    }
    Ansatz a = *ansatz;
    a.params = theta;
    StateVector psi = prepare_ansatz(a, *pool, n_qubits);
    StateVector lam = psi;
    lam.amplitudes() = apply_operator(*h, psi);
    const double e = inner(psi.amplitudes(), lam.amplitudes()).real();
    for (size_t j = k; j-- > 0;) {
      const auto& gen = pool->at(a.ops[j]).generator;
      grad[j] = 2.0 * inner(lam.amplitudes(), apply_operator(gen, psi)).real();
      psi = apply_exp_pauli(psi, gen, -theta[j]);
      lam = apply_exp_pauli(lam, gen, -theta[j]);
    }
    return e;
  }
};

std::vector<double> to_vec(const gsl_vector* x) {
  std::vector<double> v(x->size);
  for (size_t i = 0; i < x->size; ++i) v[i] = gsl_vector_get(x, i);
  return v;
}

double gsl_f(const gsl_vector* x, void* p) {
  std::vector<double> g;
  return static_cast<Objective*>(p)->energy_and_gradient(to_vec(x), g);
}

void gsl_df(const gsl_vector* x, void* p, gsl_vector* out) {
  std::vector<double> g;
  static_cast<Objective*>(p)->energy_and_gradient(to_vec(x), g);
  for (size_t i = 0; i < g.size(); ++i) gsl_vector_set(out, i, g[i]);
}

void gsl_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* out) {
  std::vector<double> g;
  *f = static_cast<Objective*>(p)->energy_and_gradient(to_vec(x), g);
  for (size_t i = 0; i < g.size(); ++i) gsl_vector_set(out, i, g[i]);
}

// Quasi-Newton (BFGS) from the warm start; returns the final energy.
double optimise(Objective& obj, std::vector<double>& theta, const AdaptSettings& s) {
  const size_t k = theta.size();
  gsl_multimin_function_fdf fn;
  fn.n = k;
  fn.f = gsl_f;
  fn.df = gsl_df;
  fn.fdf = gsl_fdf;
  fn.params = &obj;
  gsl_vector* x = gsl_vector_alloc(k);
  for (size_t i = 0; i < k; ++i) gsl_vector_set(x, i, theta[i]);
  gsl_multimin_fdfminimizer* m = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, k);
  gsl_multimin_fdfminimizer_set(m, &fn, x, 0.01, 0.1);
  const double tol = obj.sampled ? 1e-3 : s.optimizer_tol;
  for (int it = 0; it < s.max_iterations; ++it) {
    if (gsl_multimin_test_gradient(m->gradient, tol) == GSL_SUCCESS) break;
    if (gsl_multimin_fdfminimizer_iterate(m) != GSL_SUCCESS) break;  // no further progress
  }
  theta = to_vec(m->x);
  const double e = m->f;
  gsl_multimin_fdfminimizer_free(m);
  gsl_vector_free(x);
  return e;
}

}  // namespace

AdaptResult run_adapt(const ActiveHamiltonian& h_act, const AdaptSettings& s) {
  if (!(s.grad_threshold > 0.0) || s.max_layers < 0 || !(s.optimizer_tol > 0.0))
    throw ConfigError("ADAPT thresholds must be positive");
  gsl_set_error_handler_off();
  const int n_act = h_act.n_active();
  const int nq = 2 * n_act;
  const QubitOperator h = qubit_hamiltonian(h_act);
  const OperatorPool pool = build_pool(n_act, h_act.n_electrons, h_act.ms2);

  AdaptResult res;
  res.ansatz.reference = reference_occupation(n_act, h_act.n_electrons, h_act.ms2);
  uint64_t eval_counter = 0;
  Objective obj{&h, &pool, &res.ansatz, nq, s.mode == AdaptMode::Sampled, &s, &eval_counter, &res.shots};

  res.state = prepare_ansatz(res.ansatz, pool, nq);
  res.energy = expectation(res.state, h);
  if (obj.sampled) res.energy = obj.energy({}, s.seed);
  const ProductPovm screen_povm = ProductPovm::symmetric(s.povm_class, nq);
  std::vector<QubitOperator> commutators;
  if (obj.sampled)
    for (const auto& op : pool) commutators.push_back(commutator(h, op.generator));

  for (int layer = 0;; ++layer) {
    std::vector<double> g;
    if (obj.sampled) {
      const auto rec = sample_product_povm(res.state, screen_povm, s.shots_per_evaluation,
                                           s.seed * 0x2545f4914f6cdd1dULL + eval_counter++);
      res.shots += s.shots_per_evaluation;
      for (const auto& c : commutators) g.push_back(estimate_observable(rec, screen_povm, c).mean);
    } else {
      g = pool_gradients(res.state, h, pool);
    }
    int best = -1;
    double gmax = 0.0;
    for (size_t k = 0; k < g.size(); ++k)
      if (std::abs(g[k]) > gmax) {
        gmax = std::abs(g[k]);
        best = static_cast<int>(k);
      }
    res.trace.push_back({layer, res.energy, gmax, res.shots});
    if (best < 0 || gmax < s.grad_threshold) {
      res.converged = true;
      break;
    }
    if (layer >= s.max_layers) break;
    res.ansatz.ops.push_back(best);
    res.ansatz.params.push_back(0.0);
    std::vector<double> theta = res.ansatz.params;
    const double e = optimise(obj, theta, s);
    if (!obj.sampled && e > res.energy + 1e-10) {
      std::string msg = "ADAPT optimiser raised the energy at layer " + std::to_string(layer + 1) + "; trace:";
      for (const auto& t : res.trace) msg += " " + std::to_string(t.energy);
      throw OptimizerError(msg);
    }
    res.ansatz.params = theta;
    res.state = prepare_ansatz(res.ansatz, pool, nq);
    res.energy = obj.sampled ? e : expectation(res.state, h);
  }
  res.trace.back().shots_cumulative = res.shots;

  if (obj.sampled) {
    const StateVector psi = res.state;
    const PovmSampler sampler = [&psi, &s](const ProductPovm& p, size_t shots, uint64_t first) {
      return sample_outcomes(psi, p, shots, s.seed, first);
    };
    res.measurement = adapt_measurement(h, screen_povm, sampler, s.sigma_target, s.seed, s.final_measurement);
    res.shots += res.measurement->record.shots();
    res.energy = res.measurement->estimate.mean;
    res.trace.push_back({static_cast<int>(res.ansatz.ops.size()), res.energy, res.trace.back().max_gradient, res.shots});
  }
  return res;
}

}  // namespace qcpt
