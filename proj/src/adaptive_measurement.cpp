#include "qcpt/adaptive_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qcpt/errors.hpp"
#include "qcpt/local_transform.hpp"

namespace qcpt {

namespace {

using Map4 = std::array<std::array<double, 4>, 4>;

Map4 transpose(const PauliTable& t) {
  Map4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = t[j][i];
  return m;
}

Map4 inverse(const PauliTable& t) {
  Eigen::Matrix4d a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = t[i][j];
  const Eigen::Matrix4d inv = a.inverse();
  Map4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = inv(i, j);
  return m;
}

// Adds the Pauli-basis image of outcome counts, sum_m f(m) Tr[Delta_m sigma_P], into acc.
void accumulate_pauli_sums(const std::vector<double>& counts, const std::vector<QubitDual>& duals,
                           std::vector<double>& acc) {
  std::vector<double> t = counts;
  for (size_t q = 0; q < duals.size(); ++q) apply_local_map(t, static_cast<int>(q), transpose(duals[q].omega));
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += t[i];
}

// Predicted outcome probabilities and single-shot values under a POVM B:
//   q_B = (x E_B) r_hat,  w_B = (x T_B) c,  Var_B = sum q_B w_B^2 - (c.r_hat)^2
// r_hat comes from finite data, so q_B can dip below zero for badly conditioned B; those
// outcomes are dropped from the second moment instead of being allowed to cancel it.
class VarianceModel {
 public:
  VarianceModel(std::vector<double> coeffs, std::vector<double> rhat, int n)
      : n_(n), c_(std::move(coeffs)), r_(std::move(rhat)) {
    mean_ = 0.0;
    for (size_t i = 0; i < c_.size(); ++i) mean_ += c_[i] * r_[i];
  }

  void set_povm(const std::vector<QubitDual>& duals) {
    duals_ = duals;
    w_ = c_;
    p_ = r_;
    for (int q = 0; q < n_; ++q) {
      apply_local_map(w_, q, duals_[q].omega);
      apply_local_map(p_, q, duals_[q].prob);
    }
  }

  double variance() const {
    double m2 = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) m2 += std::max(p_[i], 0.0) * w_[i] * w_[i];
    return m2 - mean_ * mean_;
  }

  // Strips qubit q back to the Pauli basis so candidates for it can be scored cheaply.
  void exclude(int q) {
    wx_ = w_;
    px_ = p_;
    apply_local_map(wx_, q, inverse(duals_[q].omega));
    apply_local_map(px_, q, inverse(duals_[q].prob));
    excluded_ = q;
  }

  double candidate_variance(const QubitDual& d) const {
    const int q = excluded_;
    const size_t stride = size_t{1} << (2 * q);
    const size_t block = stride * 4;
    double m2 = 0.0;
    for (size_t base = 0; base < wx_.size(); base += block)
      for (size_t off = 0; off < stride; ++off) {
        const double* w = wx_.data() + base + off;
        const double* p = px_.data() + base + off;
        for (int m = 0; m < 4; ++m) {
          const auto& t = d.omega[m];
          const auto& e = d.prob[m];
          const double wm = t[0] * w[0] + t[1] * w[stride] + t[2] * w[2 * stride] + t[3] * w[3 * stride];
          const double pm = e[0] * p[0] + e[1] * p[stride] + e[2] * p[2 * stride] + e[3] * p[3 * stride];
          m2 += std::max(pm, 0.0) * wm * wm;
        }
      }
    return m2 - mean_ * mean_;
  }

  void accept(const QubitDual& d) {
    const int q = excluded_;
    duals_[q] = d;
    w_ = wx_;
    p_ = px_;
    apply_local_map(w_, q, d.omega);
    apply_local_map(p_, q, d.prob);
  }

 private:
  int n_;
  std::vector<double> c_, r_;
  double mean_ = 0.0;
  std::vector<QubitDual> duals_;
  std::vector<double> w_, p_, wx_, px_;
  int excluded_ = -1;
};

std::vector<double> rhat_from_record(const MeasurementRecord& rec) {
  const int n = rec.n_qubits;
  std::vector<double> acc(pow4(n), 0.0);
  for (size_t g = 0; g < rec.generations(); ++g) {
    std::vector<double> counts(pow4(n), 0.0);
    for (size_t s = 0; s < rec.shots(); ++s)
      if (rec.generation[s] == g) counts[rec.outcomes[s]] += 1.0;
    accumulate_pauli_sums(counts, dual_frame(rec.povms[g]), acc);
  }
  for (double& v : acc) v /= static_cast<double>(rec.shots());
  return acc;
}

std::optional<QubitDual> try_dual(PovmClass cls, const std::vector<double>& params) {
  try {
    const Effects e = cls == PovmClass::FourP ? effects_4p(params) : effects_8p(params);
    QubitDual d = single_qubit_dual(e);
    if (d.frame_condition > kSearchMaxFrameCondition) return std::nullopt;
    return d;
  } catch (const ParameterError&) {
    return std::nullopt;
  } catch (const NotInformationallyComplete&) {
    return std::nullopt;
  }
}

// One round of greedy coordinate moves of size +-step on every qubit.
ProductPovm coordinate_search(VarianceModel& model, const ProductPovm& start, double step, int sweeps,
                              double& variance) {
  const PovmClass cls = start.povm_class();
  auto params = start.all_params();
  model.set_povm(dual_frame(start));
  variance = model.variance();
  const int k = parameter_count(cls);
  for (int sweep = 0; sweep < sweeps; ++sweep)
    for (int q = 0; q < start.n_qubits(); ++q) {
      model.exclude(q);
      bool moved = false;
      for (int j = 0; j < k; ++j)
        for (double dir : {1.0, -1.0}) {
          auto trial = params[q];
          trial[j] += dir * step;
          const auto d = try_dual(cls, trial);
          if (!d) continue;
          const double v = model.candidate_variance(*d);
          if (v > 0.0 && v < variance * (1.0 - 1e-12)) {
            variance = v;
            params[q] = trial;
            model.accept(*d);
            model.exclude(q);
            moved = true;
            break;
          }
        }
      (void)moved;
    }
  return ProductPovm(cls, params);
}

}  // namespace

double estimate_variance_under(const MeasurementRecord& rec, const ProductPovm& candidate,
                               const QubitOperator& obs) {
  const int n = rec.n_qubits;
  if (n > kDenseMaxQubits) throw ResourceError("variance prediction limited to 12 qubits");
  if (candidate.n_qubits() != n || obs.n_qubits() != n) throw InputError("sizes differ");
  if (rec.shots() == 0) throw InputError("empty record");
  VarianceModel model(pauli_coefficients(obs), rhat_from_record(rec), n);
  model.set_povm(dual_frame(candidate));
  return model.variance();
}

AdaptiveResult adapt_measurement(const QubitOperator& obs, const ProductPovm& initial,
                                 const PovmSampler& sampler, double target_sigma, uint64_t seed,
                                 const AdaptiveOptions& opt) {
  const int n = obs.n_qubits();
  if (initial.n_qubits() != n) throw InputError("POVM and observable sizes differ");
  if (!(target_sigma > 0.0)) throw ConfigError("target error must be positive");
  if (opt.initial_shots == 0 || opt.min_batch == 0 || opt.max_batch < opt.min_batch)
    throw ConfigError("bad batch settings");
  const bool dense = n <= kDenseMaxQubits;
  if (opt.optimize && !dense) throw ResourceError("POVM optimisation limited to 12 qubits");

  AdaptiveResult res;
  res.record.n_qubits = n;
  res.record.seed = seed;
  const auto terms = obs.real_terms();
  std::vector<double> coeffs;
  if (dense) coeffs = pauli_coefficients(obs);

  ProductPovm cur = initial;
  std::vector<QubitDual> cur_duals = dual_frame(cur);
  std::vector<double> cur_omega;  // dense single-shot values for cur
  std::vector<double> cur_counts;
  std::vector<double> pauli_sums;  // finished generations
  if (dense) {
    cur_omega = dense_omega(cur_duals, coeffs);
    cur_counts.assign(pow4(n), 0.0);
    pauli_sums.assign(pow4(n), 0.0);
  }
  std::vector<ObservableEstimate> finished;
  double s1 = 0.0, s2 = 0.0;
  size_t gen_shots = 0, used = 0;
  int rounds = 0;
  size_t batch = opt.initial_shots;

  auto current_estimate = [&] {
    ObservableEstimate e;
    e.shots = gen_shots;
    e.mean = s1 / gen_shots;
    e.std_error = std::sqrt(std::max(0.0, s2 / gen_shots - e.mean * e.mean) / gen_shots);
    return e;
  };
  auto pooled = [&] {
    auto parts = finished;
    parts.push_back(current_estimate());
    return pool_estimates(parts);
  };
  auto summarize = [&](double predicted) {
    const auto e = current_estimate();
    if (!res.generations.empty() && res.generations.back().povm_id == cur.id()) {
      auto& g = res.generations.back();
      g.shots = e.shots, g.mean = e.mean, g.std_error = e.std_error, g.predicted_variance = predicted;
    } else {
      res.generations.push_back({cur.id(), e.shots, e.mean, e.std_error, predicted});
    }
  };

  while (true) {
    batch = std::min(batch, opt.budget - used);
    const auto outs = sampler(cur, batch, used);
    if (outs.size() != batch) throw InternalError("sampler returned the wrong number of shots");
    res.record.append(cur, outs);
    used += batch;
    for (Outcome m : outs) {
      const double w = dense ? cur_omega[m] : omega_value(cur_duals, terms, m);
      s1 += w;
      s2 += w * w;
      if (dense) cur_counts[m] += 1.0;
    }
    gen_shots += batch;
    res.estimate = pooled();
    if (res.estimate.std_error <= target_sigma) {
      res.converged = true;
      summarize(current_estimate().std_error * current_estimate().std_error * gen_shots);
      break;
    }
    if (used >= opt.budget) {
      res.partial = true;
      summarize(current_estimate().std_error * current_estimate().std_error * gen_shots);
      break;
    }

    if (opt.optimize && static_cast<int>(res.record.generations()) < opt.max_generations) {
      std::vector<double> rhat = pauli_sums;
      accumulate_pauli_sums(cur_counts, cur_duals, rhat);
      for (double& v : rhat) v /= static_cast<double>(used);
      VarianceModel model(coeffs, std::move(rhat), n);
      const double step = std::max(opt.step_min, opt.step_initial * std::pow(opt.step_decay, rounds));
      ++rounds;
      double var_new = 0.0;
      ProductPovm next = coordinate_search(model, cur, step, opt.sweeps_per_generation, var_new);
      summarize(var_new);
      if (next.id() != cur.id()) {
        accumulate_pauli_sums(cur_counts, cur_duals, pauli_sums);
        finished.push_back(current_estimate());
        cur = std::move(next);
        cur_duals = dual_frame(cur);
        cur_omega = dense_omega(cur_duals, coeffs);
        std::fill(cur_counts.begin(), cur_counts.end(), 0.0);
        s1 = s2 = 0.0;
        gen_shots = 0;
      }
    } else {
      summarize(std::pow(current_estimate().std_error, 2) * gen_shots);
    }
    // Shots still needed if the pooled error keeps falling as 1/sqrt(S).
    const double ratio = res.estimate.std_error / target_sigma;
    const double want = std::ceil(ratio * ratio * static_cast<double>(used)) - static_cast<double>(used);
    batch = static_cast<size_t>(std::clamp(want, static_cast<double>(opt.min_batch),
                                           static_cast<double>(opt.max_batch)));
  }
  res.final_povm = cur;
  return res;
}

}  // namespace qcpt
