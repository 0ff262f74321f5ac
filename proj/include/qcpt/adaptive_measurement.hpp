#pragma once

#include <functional>
#include <vector>

#include "qcpt/estimation.hpp"
#include "qcpt/measurement_record.hpp"
#include "qcpt/povm.hpp"
#include "qcpt/qubit_algebra.hpp"

namespace qcpt {

// Per-shot variance the observable would have under a candidate POVM, predicted from the
// shots already in the record (no new sampling). Dense over 4^n, so n <= 12.
double estimate_variance_under(const MeasurementRecord& rec, const ProductPovm& candidate,
                               const QubitOperator& obs);

// Draws `shots` outcomes with shot indices first_shot, first_shot+1, ...
using PovmSampler = std::function<std::vector<Outcome>(const ProductPovm&, size_t shots, uint64_t first_shot)>;

// Search candidates with a worse frame condition are skipped. The bound sits just above the
// most stretched 4P set (about 2.3e3), so both classes search the same conditioning range.
inline constexpr double kSearchMaxFrameCondition = 2500.0;

struct AdaptiveOptions {
  size_t initial_shots = 2000;
  size_t min_batch = 2000;
  size_t max_batch = 200000;
  size_t budget = 100000000;
  int max_generations = 60;  // distinct POVMs; afterwards the last one is kept
  bool optimize = true;      // false keeps the initial POVM throughout
  double step_initial = 0.3;
  double step_min = 0.01;
  double step_decay = 0.85;  // per generation
  int sweeps_per_generation = 1;
};

struct GenerationSummary {
  std::string povm_id;
  size_t shots = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double predicted_variance = 0.0;  // per shot, for the POVM chosen for the next generation
};

struct AdaptiveResult {
  ObservableEstimate estimate;  // pooled over generations
  MeasurementRecord record;
  ProductPovm final_povm;
  bool converged = false;  // reached the target error
  bool partial = false;    // stopped on the budget
  std::vector<GenerationSummary> generations;
};

// Alternates sampling with derivative-free POVM updates until the pooled standard error of
// <obs> drops to target_sigma or the shot budget runs out.
AdaptiveResult adapt_measurement(const QubitOperator& obs, const ProductPovm& initial,
                                 const PovmSampler& sampler, double target_sigma, uint64_t seed,
                                 const AdaptiveOptions& options = {});

}  // namespace qcpt
