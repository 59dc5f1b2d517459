#pragma once

// Prior-knowledge scoring for first-layer convolution filters: PWM encoding,
// softmax filter decoding, and the sliding Kullback-Leibler knowledge
// dissimilarity between decoded filters and motif matrices.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bionas/util.hpp"

namespace bionas {

inline constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

// A motif as an n x 4 row-stochastic matrix.
struct Pwm {
  std::string name;
  Matrix rows;  // n x 4, each row a distribution over ACGT

  std::size_t length() const { return rows.rows(); }

  void validate() const {
    if (rows.rows() < 1 || rows.cols() != 4)
      throw std::invalid_argument("pwm '" + name + "': needs an n x 4 matrix, n >= 1");
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double v = rows(i, k);
        if (!(v >= 0.0 && v <= 1.0))
          throw std::invalid_argument("pwm '" + name + "': entry out of [0,1]");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("pwm '" + name + "': row does not sum to 1");
    }
  }

  // mean per-position information content, bits
  double mean_information() const {
    double total = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      double ic = 2.0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double p = rows(i, k);
        if (p > 0.0) ic += p * std::log2(p);
      }
      total += ic;
    }
    return total / double(rows.rows());
  }
};

// Raw (unbounded) first-layer convolution filter weights, m x 4.
struct ConvFilter {
  Matrix weights;

  std::size_t width() const { return weights.rows(); }
};

// Row-stochastic decoded form of a filter.
struct DecodedFilter {
  Matrix rows;  // m x 4

  std::size_t width() const { return rows.rows(); }
};

struct DecoderConfig {
  double beta = 0.1;            // softmax temperature
  double epsilon_smooth = 1e-6; // smoothing of the second KL argument

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("decoder: beta must be > 0");
    if (!(epsilon_smooth > 0.0 && epsilon_smooth <= 1e-3))
      throw std::invalid_argument("decoder: epsilon_smooth must be in (0, 1e-3]");
  }
};

struct KnowledgeSet {
  std::vector<Pwm> motifs;

  void validate() const {
    if (motifs.empty()) throw std::invalid_argument("knowledge set is empty");
    for (const auto& m : motifs) m.validate();
  }
};

// Row-wise softmax of beta * weights, stabilized by subtracting the row max.
inline DecodedFilter decode_filter(const ConvFilter& filter, const DecoderConfig& cfg) {
  cfg.validate();
  if (filter.weights.rows() < 1 || filter.weights.cols() != 4)
    throw std::invalid_argument("decode_filter: filter must be m x 4, m >= 1");
  if (!filter.weights.all_finite())
    throw std::invalid_argument("decode_filter: non-finite filter weight");
  DecodedFilter out;
  out.rows = Matrix(filter.weights.rows(), 4);
  for (std::size_t i = 0; i < filter.weights.rows(); ++i) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 4; ++k) hi = std::max(hi, cfg.beta * filter.weights(i, k));
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double e = std::exp(cfg.beta * filter.weights(i, k) - hi);
      out.rows(i, k) = e;
      sum += e;
    }
    for (std::size_t k = 0; k < 4; ++k) out.rows(i, k) /= sum;
  }
  return out;
}

// KL(p || q') over 4 letters with q' = (1-4e)q + e and 0*ln(0/.) = 0.
inline double kl_rows(const double* p, const double* q, double epsilon_smooth) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (p[k] <= 0.0) continue;
    const double qs = (1.0 - 4.0 * epsilon_smooth) * q[k] + epsilon_smooth;
    d += p[k] * std::log(p[k] / qs);
  }
  return d;
}

namespace detail {

// Decoded filter padded with ceil(n/2) uniform rows per side; slide range
// covers every start position of the motif inside the padded window.
inline Matrix pad_uniform(const Matrix& rows, std::size_t pad) {
  Matrix out(rows.rows() + 2 * pad, 4, 0.25);
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t k = 0; k < 4; ++k) out(i + pad, k) = rows(i, k);
  return out;
}

}  // namespace detail

struct FilterMatch {
  double distance = std::numeric_limits<double>::infinity();
  // motif start relative to the unpadded filter; negative means the motif
  // hangs off the left edge into the padding
  long offset = 0;
};

inline FilterMatch best_match(const Pwm& motif, const DecodedFilter& decoded,
                              double epsilon_smooth) {
  const std::size_t n = motif.length();
  const std::size_t m = decoded.width();
  if (n < 1 || m < 1) throw std::invalid_argument("best_match: empty motif or filter");
  const std::size_t pad = (n + 1) / 2;
  const Matrix padded = detail::pad_uniform(decoded.rows, pad);
  const std::size_t last = m + 2 * pad - n;  // inclusive
  FilterMatch best;
  for (std::size_t i = 0; i <= last; ++i) {
    double d = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      d += kl_rows(motif.rows.row(r), padded.row(i + r), epsilon_smooth);
    d /= double(n);
    if (d < best.distance) {
      best.distance = d;
      best.offset = long(i) - long(pad);
    }
  }
  return best;
}

inline double filter_distance(const Pwm& motif, const DecodedFilter& decoded,
                              double epsilon_smooth) {
  return best_match(motif, decoded, epsilon_smooth).distance;
}

// K(W, A): per motif the minimum filter distance over all decoded filters,
// averaged over motifs.
inline double knowledge_dissimilarity(const std::vector<ConvFilter>& weights,
                                      const KnowledgeSet& knowledge,
                                      const DecoderConfig& cfg) {
  if (weights.empty()) throw std::invalid_argument("knowledge_dissimilarity: no filters");
  knowledge.validate();
  std::vector<DecodedFilter> decoded;
  decoded.reserve(weights.size());
  for (const auto& w : weights) decoded.push_back(decode_filter(w, cfg));
  double total = 0.0;
  for (const auto& motif : knowledge.motifs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : decoded)
      best = std::min(best, filter_distance(motif, d, cfg.epsilon_smooth));
    total += best;
  }
  return total / double(knowledge.motifs.size());
}

// Per-position information content and per-letter letter heights, as CSV.
inline void export_logo_data(const DecodedFilter& decoded, std::ostream& os) {
  os << "position,letter,height,information_content\n";
  for (std::size_t i = 0; i < decoded.width(); ++i) {
    double ic = 2.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = decoded.rows(i, k);
      if (p > 0.0) ic += p * std::log2(p);
    }
    for (std::size_t k = 0; k < 4; ++k)
      os << i << ',' << kBases[k] << ',' << decoded.rows(i, k) * ic << ',' << ic << '\n';
  }
}

// Log-odds scores of the motif against a uniform background at every start
// offset of a packed base sequence (values 0..3). Zero probabilities are
// floored before taking logs.
inline std::vector<double> log_odds_scan(const Pwm& motif, const std::uint8_t* seq,
                                         std::size_t len) {
  const std::size_t n = motif.length();
  if (len < n) return {};
  std::vector<double> scores(len - n + 1);
  Matrix lo(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < 4; ++k)
      lo(i, k) = std::log(std::max(motif.rows(i, k), 1e-4) / 0.25);
  for (std::size_t off = 0; off + n <= len; ++off) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += lo(i, seq[off + i]);
    scores[off] = s;
  }
  return scores;
}

}  // namespace bionas
