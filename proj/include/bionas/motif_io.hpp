#pragma once

// PWM file formats: MEME-minimal text (letter-probability matrix blocks) and
// a plain CSV alternative (position, A, C, G, T).

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "bionas/motif.hpp"
#include "bionas/util.hpp"

namespace bionas {

namespace detail {

// Rows from text files may be off by accumulated rounding; renormalize when
// close, reject otherwise.
inline void normalize_pwm_row(double* row, const std::string& where) {
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (row[k] < -1e-9) throw ConfigError(where + ": negative probability");
    row[k] = std::max(row[k], 0.0);
    sum += row[k];
  }
  if (std::abs(sum - 1.0) > 1e-3)
    throw ConfigError(where + ": row sums to " + std::to_string(sum) + ", not 1");
  for (int k = 0; k < 4; ++k) row[k] /= sum;
}

}  // namespace detail

inline KnowledgeSet read_meme(std::istream& in, const std::string& where = "meme") {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(trim(line));

  KnowledgeSet ks;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].rfind("MOTIF", 0) != 0) {
      ++i;
      continue;
    }
    std::istringstream ms(lines[i]);
    std::string kw, name;
    ms >> kw >> name;
    if (name.empty()) throw ConfigError(where + ": MOTIF line without a name");
    ++i;
    // skip to the matrix header; ignore URL / nsites annotations
    while (i < lines.size() && lines[i].find("letter-probability matrix") == std::string::npos) {
      if (lines[i].rfind("MOTIF", 0) == 0)
        throw ConfigError(where + ": motif '" + name + "' has no matrix block");
      ++i;
    }
    if (i >= lines.size()) throw ConfigError(where + ": motif '" + name + "' has no matrix block");
    long declared_w = -1;
    const auto wpos = lines[i].find("w=");
    if (wpos != std::string::npos) {
      std::istringstream ws(lines[i].substr(wpos + 2));
      ws >> declared_w;
    }
    ++i;
    std::vector<double> values;
    while (i < lines.size() && !lines[i].empty() && lines[i].rfind("MOTIF", 0) != 0 &&
           lines[i].rfind("URL", 0) != 0) {
      std::istringstream rs(lines[i]);
      double a, c, g, u;
      if (!(rs >> a >> c >> g >> u))
        throw ConfigError(where + ": bad matrix row '" + lines[i] + "'");
      values.insert(values.end(), {a, c, g, u});
      ++i;
    }
    const std::size_t n = values.size() / 4;
    if (n == 0) throw ConfigError(where + ": empty matrix for motif '" + name + "'");
    if (declared_w > 0 && std::size_t(declared_w) != n)
      throw ConfigError(where + ": matrix has " + std::to_string(n) +
                        " rows but header says w=" + std::to_string(declared_w));
    Pwm pwm;
    pwm.name = name;
    pwm.rows = Matrix(n, 4);
    for (std::size_t r = 0; r < n; ++r) {
      double row[4] = {values[4 * r], values[4 * r + 1], values[4 * r + 2], values[4 * r + 3]};
      detail::normalize_pwm_row(row, where + " motif " + name);
      for (std::size_t k = 0; k < 4; ++k) pwm.rows(r, k) = row[k];
    }
    ks.motifs.push_back(std::move(pwm));
  }
  if (ks.motifs.empty()) throw ConfigError(where + ": no motifs found");
  ks.validate();
  return ks;
}

inline void write_meme(const KnowledgeSet& ks, std::ostream& os) {
  os << "MEME version 4\n\nALPHABET= ACGT\n\nstrands: +\n\n"
     << "Background letter frequencies\nA 0.25 C 0.25 G 0.25 T 0.25\n\n";
  os << std::setprecision(6) << std::fixed;
  for (const auto& m : ks.motifs) {
    os << "MOTIF " << m.name << "\n";
    os << "letter-probability matrix: alength= 4 w= " << m.length() << "\n";
    for (std::size_t i = 0; i < m.length(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) os << (k ? " " : "") << m.rows(i, k);
      os << "\n";
    }
    os << "\n";
  }
}

inline Pwm read_pwm_csv(std::istream& in, const std::string& name,
                        const std::string& where = "csv") {
  std::string line;
  std::vector<double> values;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen && t.find_first_not_of("positionACGT, \t") == std::string::npos) {
      header_seen = true;
      continue;
    }
    auto fields = split(t, ',');
    if (fields.size() != 5) throw ConfigError(where + ": expected 5 columns, got '" + t + "'");
    for (int k = 1; k <= 4; ++k) values.push_back(std::stod(trim(fields[k])));
  }
  const std::size_t n = values.size() / 4;
  if (n == 0) throw ConfigError(where + ": no rows");
  Pwm pwm;
  pwm.name = name;
  pwm.rows = Matrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    double row[4] = {values[4 * i], values[4 * i + 1], values[4 * i + 2], values[4 * i + 3]};
    detail::normalize_pwm_row(row, where);
    for (std::size_t k = 0; k < 4; ++k) pwm.rows(i, k) = row[k];
  }
  pwm.validate();
  return pwm;
}

inline void write_pwm_csv(const Pwm& m, std::ostream& os) {
  os << "position,A,C,G,T\n" << std::setprecision(6) << std::fixed;
  for (std::size_t i = 0; i < m.length(); ++i) {
    os << i;
    for (std::size_t k = 0; k < 4; ++k) os << ',' << m.rows(i, k);
    os << '\n';
  }
}

// Dispatch on extension: .csv reads a single-motif CSV, anything else MEME.
inline KnowledgeSet load_knowledge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open knowledge file: " + path);
  const auto ext = lower(std::filesystem::path(path).extension().string());
  if (ext == ".csv") {
    KnowledgeSet ks;
    ks.motifs.push_back(read_pwm_csv(in, std::filesystem::path(path).stem().string(), path));
    return ks;
  }
  return read_meme(in, path);
}

}  // namespace bionas
