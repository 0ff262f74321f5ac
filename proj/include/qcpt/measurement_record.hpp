#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qcpt/povm.hpp"

namespace qcpt {

// Outcome of one shot on up to 16 qubits, two bits per qubit: digit q = (m >> 2q) & 3.
using Outcome = uint32_t;
inline int outcome_digit(Outcome m, int q) { return static_cast<int>((m >> (2 * q)) & 3u); }
inline constexpr int kMaxRecordQubits = 16;

// Shots grouped into generations; every shot of a generation used the same product POVM.
struct MeasurementRecord {
  int n_qubits = 0;
  uint64_t seed = 0;
  std::vector<Outcome> outcomes;
  std::vector<uint32_t> generation;  // one tag per shot
  std::vector<ProductPovm> povms;    // one per generation

  size_t shots() const { return outcomes.size(); }
  size_t generations() const { return povms.size(); }
  size_t shots_in_generation(size_t g) const;

  // Appends shots; they join the last generation when the POVM id matches it.
  void append(const ProductPovm& povm, std::span<const Outcome> shots);
};

enum class RecordFormat { Binary, Csv };

// Writes <prefix>.bin or <prefix>.csv plus a <prefix>.json sidecar with the POVMs.
void write_record(const std::filesystem::path& prefix, const MeasurementRecord& rec,
                  RecordFormat format = RecordFormat::Binary);
MeasurementRecord read_record(const std::filesystem::path& prefix);

}  // namespace qcpt
