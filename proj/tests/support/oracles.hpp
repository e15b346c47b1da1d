#pragma once

// Independent reference computations for the tests. Plain loops over
// std::vector, no library code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

// cnn * affordance / prior, renormalized; empty when the product vanishes
inline std::vector<double> fuse(const std::vector<double>& cnn, const std::vector<double>& aff,
                                const std::vector<double>& prior) {
  std::vector<double> out(cnn.size(), 0.0);
  double total = 0.0;
  for (std::size_t g = 0; g < cnn.size(); ++g) {
    const double num = cnn[g] * aff[g];
    if (num != 0.0) out[g] = num / prior[g];
    total += out[g];
  }
  if (total == 0.0) return {};
  for (double& x : out) x /= total;
  return out;
}

inline std::size_t first_max(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline double population_std_nonzero(const std::vector<double>& v) {
  std::vector<double> nz;
  for (double x : v) {
    if (x > 0) nz.push_back(x);
  }
  if (nz.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : nz) mean += x;
  mean /= static_cast<double>(nz.size());
  double ss = 0.0;
  for (double x : nz) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(nz.size()));
}

// 1-based average ranks
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) below += 1;
      if (x[j] == x[i]) equal += 1;
    }
    r[i] = below + (equal + 1) / 2.0;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(ranks(a), ranks(b));
}

}  // namespace oracle
