#include "qcpt/measurement_record.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcpt/errors.hpp"

namespace qcpt {

size_t MeasurementRecord::shots_in_generation(size_t g) const {
  size_t n = 0;
  for (uint32_t t : generation) n += (t == g);
  return n;
}

void MeasurementRecord::append(const ProductPovm& povm, std::span<const Outcome> shots) {
  if (n_qubits == 0) n_qubits = povm.n_qubits();
  if (povm.n_qubits() != n_qubits) throw InputError("POVM qubit count differs from the record");
  if (n_qubits > kMaxRecordQubits) throw ResourceError("records hold at most 16 qubits");
  if (povms.empty() || povms.back().id() != povm.id()) povms.push_back(povm);
  const auto g = static_cast<uint32_t>(povms.size() - 1);
  outcomes.insert(outcomes.end(), shots.begin(), shots.end());
  generation.insert(generation.end(), shots.size(), g);
}

namespace {

std::filesystem::path with_ext(const std::filesystem::path& prefix, const char* ext) {
  auto p = prefix;
  p += ext;
  return p;
}

}  // namespace

void write_record(const std::filesystem::path& prefix, const MeasurementRecord& rec,
                  RecordFormat format) {
  nlohmann::json side;
  side["n_qubits"] = rec.n_qubits;
  side["seed"] = rec.seed;
  side["shots"] = rec.shots();
  side["format"] = format == RecordFormat::Binary ? "binary" : "csv";
  side["outcome_encoding"] = "digit q = (m >> 2q) & 3 is the effect index on qubit q";
  if (format == RecordFormat::Binary)
    side["binary_layout"] = "uint32 little-endian outcomes[shots], then uint32 generation[shots]";
  nlohmann::json gens = nlohmann::json::array();
  for (size_t g = 0; g < rec.povms.size(); ++g) {
    const auto& p = rec.povms[g];
    gens.push_back({{"class", to_string(p.povm_class())},
                    {"id", p.id()},
                    {"shots", rec.shots_in_generation(g)},
                    {"params", p.all_params()}});
  }
  side["generations"] = gens;
  {
    std::ofstream out(with_ext(prefix, ".json"));
    if (!out) throw IoError("cannot write record sidecar");
    out << side.dump(1) << "\n";
  }
  if (format == RecordFormat::Binary) {
    std::ofstream out(with_ext(prefix, ".bin"), std::ios::binary);
    if (!out) throw IoError("cannot write record payload");
    out.write(reinterpret_cast<const char*>(rec.outcomes.data()),
              static_cast<std::streamsize>(rec.outcomes.size() * sizeof(Outcome)));
    out.write(reinterpret_cast<const char*>(rec.generation.data()),
              static_cast<std::streamsize>(rec.generation.size() * sizeof(uint32_t)));
  } else {
    std::ofstream out(with_ext(prefix, ".csv"));
    if (!out) throw IoError("cannot write record payload");
    out << "shot,generation,outcome\n";
    std::string digits(rec.n_qubits, '0');
    for (size_t s = 0; s < rec.shots(); ++s) {
      for (int q = 0; q < rec.n_qubits; ++q)
        digits[q] = static_cast<char>('0' + outcome_digit(rec.outcomes[s], q));
      out << s << ',' << rec.generation[s] << ',' << digits << '\n';
    }
  }
}

MeasurementRecord read_record(const std::filesystem::path& prefix) {
  std::ifstream in(with_ext(prefix, ".json"));
  if (!in) throw IoError("cannot open record sidecar " + with_ext(prefix, ".json").string());
  nlohmann::json side;
  try {
    in >> side;
  } catch (const std::exception& e) {
    throw IoError(std::string("bad record sidecar: ") + e.what());
  }
  MeasurementRecord rec;
  rec.n_qubits = side.at("n_qubits").get<int>();
  rec.seed = side.at("seed").get<uint64_t>();
  const size_t shots = side.at("shots").get<size_t>();
  for (const auto& g : side.at("generations")) {
    ProductPovm p(parse_povm_class(g.at("class").get<std::string>()),
                  g.at("params").get<std::vector<std::vector<double>>>());
    if (p.id() != g.at("id").get<std::string>()) throw IoError("POVM id does not match its parameters");
    rec.povms.push_back(std::move(p));
  }
  rec.outcomes.resize(shots);
  rec.generation.resize(shots);
  if (side.at("format").get<std::string>() == "binary") {
    std::ifstream b(with_ext(prefix, ".bin"), std::ios::binary);
    b.read(reinterpret_cast<char*>(rec.outcomes.data()), static_cast<std::streamsize>(shots * sizeof(Outcome)));
    b.read(reinterpret_cast<char*>(rec.generation.data()), static_cast<std::streamsize>(shots * sizeof(uint32_t)));
    if (!b) throw IoError("truncated record payload");
  } else {
    std::ifstream c(with_ext(prefix, ".csv"));
    std::string line;
    std::getline(c, line);
    for (size_t s = 0; s < shots; ++s) {
      if (!std::getline(c, line)) throw IoError("truncated record csv");
      std::istringstream ls(line);
      std::string f0, f1, f2;
      std::getline(ls, f0, ',');
      std::getline(ls, f1, ',');
      std::getline(ls, f2, ',');
      if (static_cast<int>(f2.size()) != rec.n_qubits) throw IoError("bad outcome field in record csv");
      rec.generation[s] = static_cast<uint32_t>(std::stoul(f1));
      Outcome m = 0;
      for (int q = 0; q < rec.n_qubits; ++q) m |= static_cast<Outcome>(f2[q] - '0') << (2 * q);
      rec.outcomes[s] = m;
    }
  }
  for (uint32_t g : rec.generation)
    if (g >= rec.povms.size()) throw IoError("record generation tag out of range");
  return rec;
}

}  // namespace qcpt
