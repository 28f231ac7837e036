#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace egonet {

// Welford running mean/variance; merges are exact regardless of split.
struct RunningStat {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStat& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

  // standard error of the mean: unbiased sample sd / sqrt(n); 0 when n < 2
  double stderr_mean() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

struct CurveBin {
  std::int64_t bin = 0;
  double mean = 0.0;
  std::uint64_t count = 0;
  double stderr_mean = 0.0;
  bool low_count = false;  // single observation: stderr is reported as 0
};

// Integer-binned sample accumulator. Empty bins are never materialized, so
// the exported rows satisfy the count > 0 rule by construction.
class BinnedCurve {
public:
  void add(std::int64_t bin, double x) { acc_[bin].add(x); }

  void merge(const BinnedCurve& o) {
    for (const auto& [b, st] : o.acc_) acc_[b].merge(st);
  }

  const RunningStat* find(std::int64_t bin) const {
    auto it = acc_.find(bin);
    return it == acc_.end() ? nullptr : &it->second;
  }

  bool empty() const { return acc_.empty(); }
  std::size_t bin_count() const { return acc_.size(); }

  std::vector<CurveBin> bins() const {
    std::vector<CurveBin> out;
    out.reserve(acc_.size());
    for (const auto& [b, st] : acc_) {
      if (st.n == 0) continue;
      out.push_back({b, st.mean, st.n, st.stderr_mean(), st.n == 1});
    }
    return out;
  }

private:
  std::map<std::int64_t, RunningStat> acc_;
};

// Centered moving average; the window shrinks symmetrically at the ends so
// the output has the same length as the input.
inline std::vector<double> smooth_centered(const std::vector<double>& v, int window = 5) {
  if (window < 2 || v.size() < 2) return v;
  const int radius = window / 2;
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n - 1, i + radius);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += v[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace egonet
