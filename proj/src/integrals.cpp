#include "qcpt/integrals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "qcpt/errors.hpp"

namespace qcpt {

void Tensor4::set_symmetric(int p, int q, int r, int s, double v) {
  const std::array<std::array<int, 4>, 8> perms = {{{p, q, r, s},
                                                    {q, p, r, s},
                                                    {p, q, s, r},
                                                    {q, p, s, r},
                                                    {r, s, p, q},
                                                    {s, r, p, q},
                                                    {r, s, q, p},
                                                    {s, r, q, p}}};
  for (const auto& k : perms) (*this)(k[0], k[1], k[2], k[3]) = v;
}

void IntegralSet::check_symmetry(double tol) const {
  if (h.rows() != norb || h.cols() != norb || g.dim() != norb)
    throw ConsistencyError("integral tensors do not match NORB");
  for (int p = 0; p < norb; ++p)
    for (int q = 0; q < norb; ++q)
      if (std::abs(h(p, q) - h(q, p)) > tol)
        throw ConsistencyError("one-electron integrals not symmetric");
  for (int p = 0; p < norb; ++p)
    for (int q = 0; q < norb; ++q)
      for (int r = 0; r < norb; ++r)
        for (int s = 0; s < norb; ++s) {
          const double v = g(p, q, r, s);
          if (std::abs(v - g(q, p, r, s)) > tol || std::abs(v - g(p, q, s, r)) > tol ||
              std::abs(v - g(r, s, p, q)) > tol)
            throw ConsistencyError("two-electron integrals lack eightfold symmetry");
        }
}

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct HeaderValue {
  std::vector<std::string> values;
  int line = 0;
};

int to_int(const std::string& tok, int line) {
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
}

double to_double(std::string tok, int line) {
  for (char& c : tok)
    if (c == 'D' || c == 'd') c = 'E';
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
}

std::array<int, 4> canonical_eri(int p, int q, int r, int s) {
  if (p < q) std::swap(p, q);
  if (r < s) std::swap(r, s);
  if (std::make_pair(p, q) < std::make_pair(r, s)) {
    std::swap(p, r);
    std::swap(q, s);
  }
  return {p, q, r, s};
}

}  // namespace

IntegralSet parse_fcidump(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::map<std::string, HeaderValue> header;
  bool started = false;
  bool ended = false;
  std::string current_key;

  while (!ended && std::getline(in, line)) {
    ++lineno;
    std::string text = trim(line);
    if (text.empty()) continue;
    std::string up = upper(text);
    if (!started) {
      if (up.rfind("&FCI", 0) != 0 && up.rfind("$FCI", 0) != 0)
        throw ParseError("header must start with &FCI", lineno);
      started = true;
      text = text.substr(4);
      up = up.substr(4);
    }
    const auto end_pos = std::min(up.find("&END"), up.find('/'));
    if (end_pos != std::string::npos) {
      text = text.substr(0, end_pos);
      ended = true;
    }
    for (char& c : text)
      if (c == ',') c = ' ';
    std::istringstream tokens(text);
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        current_key = upper(tok.substr(0, eq));
        if (current_key.empty()) throw ParseError("header assignment without a key", lineno);
        header[current_key].line = lineno;
        tok = tok.substr(eq + 1);
        if (tok.empty()) continue;
      }
      if (current_key.empty()) throw ParseError("header value '" + tok + "' without a key", lineno);
      header[current_key].values.push_back(tok);
    }
  }
  if (!started) throw ParseError("empty input, no &FCI header", std::max(lineno, 1));
  if (!ended) throw ParseError("header not terminated by &END", lineno);

  auto scalar = [&](const std::string& key, std::optional<int> fallback) {
    auto it = header.find(key);
    if (it == header.end()) {
      if (fallback) return *fallback;
      throw ParseError("header lacks " + key, lineno);
    }
    if (it->second.values.size() != 1)
      throw ParseError(key + " must have a single value", it->second.line);
    return to_int(it->second.values[0], it->second.line);
  };

  IntegralSet ints;
  ints.norb = scalar("NORB", std::nullopt);
  ints.n_electrons = scalar("NELEC", std::nullopt);
  ints.ms2 = scalar("MS2", 0);
  if (auto it = header.find("UHF"); it != header.end() && !it->second.values.empty()) {
    const std::string v = upper(it->second.values[0]);
    if (v == ".TRUE." || v == "T" || v == "1" || v == "TRUE")
      throw ParseError("unrestricted integrals are not supported", it->second.line);
  }
  if (auto it = header.find("ORBSYM"); it != header.end() &&
                                       static_cast<int>(it->second.values.size()) != ints.norb)
    throw ParseError("ORBSYM length differs from NORB", it->second.line);
  if (ints.norb <= 0) throw ParseError("NORB must be positive", header["NORB"].line);
  if (ints.n_electrons < 0 || ints.n_electrons > 2 * ints.norb)
    throw ConsistencyError("NELEC outside 0..2*NORB");
  if (std::abs(ints.ms2) > ints.n_electrons || (ints.n_electrons + ints.ms2) % 2 != 0 ||
      (ints.n_electrons + ints.ms2) / 2 > ints.norb || (ints.n_electrons - ints.ms2) / 2 > ints.norb)
    throw ConsistencyError("MS2 incompatible with NELEC and NORB");

  const int n = ints.norb;
  ints.h = Eigen::MatrixXd::Zero(n, n);
  ints.g = Tensor4(n);

  struct Seen {
    double value;
    int line;
  };
  std::map<std::array<int, 4>, Seen> seen;
  auto record = [&](std::array<int, 4> key, double v, int ln) {
    auto [it, fresh] = seen.emplace(key, Seen{v, ln});
    if (!fresh && std::abs(it->second.value - v) > 1e-10)
      throw ConsistencyError("line " + std::to_string(ln) + ": integral repeats line " +
                             std::to_string(it->second.line) + " with a different value");
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty()) continue;
    std::istringstream fields(text);
    std::vector<std::string> tok;
    std::string t;
    while (fields >> t) tok.push_back(t);
    if (tok.size() != 5) throw ParseError("integral line needs 5 fields", lineno);
    const double v = to_double(tok[0], lineno);
    std::array<int, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      idx[k] = to_int(tok[k + 1], lineno);
      if (idx[k] < 0 || idx[k] > n) throw ParseError("orbital index out of range", lineno);
    }
    const auto [p, q, r, s] = idx;
    if (p > 0 && q > 0 && r > 0 && s > 0) {
      record(canonical_eri(p - 1, q - 1, r - 1, s - 1), v, lineno);
    } else if (p > 0 && q > 0 && r == 0 && s == 0) {
      record({-1, std::max(p, q) - 1, std::min(p, q) - 1, -1}, v, lineno);
    } else if (p == 0 && q == 0 && r == 0 && s == 0) {
      record({-1, -1, -1, -1}, v, lineno);
    } else if (p > 0 && q == 0 && r == 0 && s == 0) {
      // orbital energy line, carries no Hamiltonian information
    } else {
      throw ParseError("unrecognised index pattern", lineno);
    }
  }

  for (const auto& [k, entry] : seen) {
    if (k[0] >= 0) {
      ints.g.set_symmetric(k[0], k[1], k[2], k[3], entry.value);
    } else if (k[1] >= 0) {
      ints.h(k[1], k[2]) = entry.value;
      ints.h(k[2], k[1]) = entry.value;
    } else {
      ints.e_nuc_core = entry.value;
    }
  }
  return ints;
}

IntegralSet read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralSet& ints) {
  const int n = ints.norb;
  char buf[128];
  out << " &FCI NORB=" << n << ",NELEC=" << ints.n_electrons << ",MS2=" << ints.ms2 << ",\n";
  out << "  ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  auto line = [&](double v, int p, int q, int r, int s) {
    std::snprintf(buf, sizeof buf, "%.17g %d %d %d %d\n", v, p, q, r, s);
    out << buf;
  };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= (r == p ? q : r); ++s) {
          const double v = ints.g(p, q, r, s);
          if (std::abs(v) > 1e-15) line(v, p + 1, q + 1, r + 1, s + 1);
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (std::abs(ints.h(p, q)) > 1e-15) line(ints.h(p, q), p + 1, q + 1, 0, 0);
  line(ints.e_nuc_core, 0, 0, 0, 0);
}

void write_fcidump(const std::filesystem::path& path, const IntegralSet& ints) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_fcidump(out, ints);
}

SpacePartition load_partition(int n_core, int n_active, const IntegralSet& ints) {
  if (n_core < 0 || n_active <= 0 || n_core + n_active > ints.norb)
    throw InputError("core/active counts do not fit in " + std::to_string(ints.norb) +
                     " orbitals");
  const int n_act_el = ints.n_electrons - 2 * n_core;
  if (n_act_el < 0) throw InputError("core holds more electrons than the molecule has");
  if (n_act_el > 2 * n_active) throw InputError("active space cannot hold the remaining electrons");
  if (std::abs(ints.ms2) > n_act_el || (n_act_el + ints.ms2) / 2 > n_active ||
      (n_act_el - ints.ms2) / 2 > n_active)
    throw InputError("active space cannot realise the requested spin projection");
  SpacePartition part;
  for (int i = 0; i < ints.norb; ++i) {
    if (i < n_core)
      part.core.push_back(i);
    else if (i < n_core + n_active)
      part.active.push_back(i);
    else
      part.virt.push_back(i);
  }
  return part;
}

int active_electron_count(const SpacePartition& part, const IntegralSet& ints) {
  return ints.n_electrons - 2 * part.n_core();
}

}  // namespace qcpt
