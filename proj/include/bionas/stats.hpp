#pragma once

// Small statistical toolbox used by the bench protocols and the test suite:
// rank helpers, two-sample tests (Mann-Whitney, Kolmogorov-Smirnov),
// chi-squared goodness of fit, Spearman trend, ROC AUC.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bionas/util.hpp"

namespace bionas::stats {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Midranks (1-based); ties share the average rank.
inline std::vector<double> midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double shared = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = shared;
    i = j + 1;
  }
  return r;
}

// Dense ranks (1-based): equal values share a rank, ranks have no gaps.
inline std::vector<std::size_t> dense_ranks(const std::vector<double>& v) {
  std::vector<double> uniq(v);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<std::size_t> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    r[i] = std::size_t(std::lower_bound(uniq.begin(), uniq.end(), v[i]) -
                       uniq.begin()) + 1;
  }
  return r;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

// Chi-squared goodness-of-fit p-value of observed counts vs uniform.
inline double chi2_uniform_p(const std::vector<std::size_t>& counts) {
  const std::size_t k = counts.size();
  if (k < 2) throw std::invalid_argument("chi2 needs >= 2 categories");
  const double total = double(std::accumulate(counts.begin(), counts.end(), std::size_t(0)));
  const double expected = total / double(k);
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double d = double(c) - expected;
    stat += d * d / expected;
  }
  return chi2_sf(stat, double(k - 1));
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sided Mann-Whitney U test with normal approximation, tie and
// continuity corrections. p is for the alternative "x stochastically
// smaller than y".
inline TestResult mann_whitney_less(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n1 = x.size(), n2 = y.size();
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("mann_whitney: empty sample");
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> r = midranks(pooled);
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += r[i];
  const double u = r1 - double(n1) * double(n1 + 1) / 2.0;

  const double n = double(n1 + n2);
  // tie correction: sum over tie groups of t^3 - t
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    const double t = double(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mu = double(n1) * double(n2) / 2.0;
  const double var =
      double(n1) * double(n2) / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return {u, 1.0};  // everything tied
  const double z = (u - mu + 0.5) / std::sqrt(var);
  return {u, normal_cdf(z)};
}

// Kolmogorov distribution survival function Q(t) = P(sup > t).
inline double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.1) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * double(j) * double(j) * t * t);
    sum += (j % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample KS test; asymptotic p with the small-sample correction
// Q((sqrt(mn/(m+n)) + 0.12 + 0.11/sqrt(..)) * D).
inline TestResult ks_2samp(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_2samp: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t m = x.size(), n = y.size();
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < m && j < n) {
    const double v = std::min(x[i], y[j]);
    while (i < m && x[i] <= v) ++i;
    while (j < n && y[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / double(m) - double(j) / double(n)));
  }
  const double en = std::sqrt(double(m) * double(n) / double(m + n));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) throw std::invalid_argument("pearson: bad input");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  if (sa == 0.0 || sb == 0.0) return 0.0;
  return sab / std::sqrt(sa * sb);
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(midranks(x), midranks(y));
}

// One-sided permutation p-value for Spearman correlation. tail=+1 tests
// "rho as large as observed", tail=-1 "as small as observed".
inline double spearman_perm_p(const std::vector<double>& x,
                              const std::vector<double>& y, int tail,
                              std::size_t n_perm = 20000,
                              std::uint64_t seed = 12345) {
  const double observed = spearman_rho(x, y);
  std::vector<double> ry = midranks(y);
  const std::vector<double> rx = midranks(x);
  Rng rng(seed);
  std::size_t at_least = 0;
  for (std::size_t p = 0; p < n_perm; ++p) {
    for (std::size_t i = ry.size(); i > 1; --i)
      std::swap(ry[i - 1], ry[rng.uniform_int(i)]);
    const double rho = pearson(rx, ry);
    if (tail >= 0 ? rho >= observed - 1e-12 : rho <= observed + 1e-12) ++at_least;
  }
  return double(at_least + 1) / double(n_perm + 1);
}

// ROC AUC via the rank-sum identity.
inline double auc_score(const std::vector<int>& labels,
                        const std::vector<double>& scores) {
  if (labels.size() != scores.size() || labels.empty())
    throw std::invalid_argument("auc_score: bad input");
  const std::vector<double> r = midranks(scores);
  double rank_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      rank_pos += r[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc_score: single-class labels");
  return (rank_pos - double(n_pos) * double(n_pos + 1) / 2.0) /
         (double(n_pos) * double(n_neg));
}

}  // namespace bionas::stats
