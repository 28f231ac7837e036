#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/community.hpp"
#include "egonet/curves.hpp"
#include "egonet/graph.hpp"

namespace egonet {

// For one ego: the chronological order m at which each community first
// appeared, i.e. the earliest appearance rank among its members. Exactly one
// value per community, all distinct, ascending.
struct FirstAppearanceSample {
  NodeId ego = 0;
  std::uint32_t c = 0;
  std::vector<std::uint32_t> orders;
};

inline FirstAppearanceSample first_appearance_orders(const EgoNetwork& net,
                                                     const CommunityAssignment& asg) {
  if (!net.from_real_timestamps)
    throw DataError(
        "first-appearance orders need real edge timestamps; this store was ingested without a "
        "ts column (file-order pseudo-time)");
  if (net.ego != asg.ego)
    throw DataError("assignment is for ego " + std::to_string(asg.ego) + ", network for ego " +
                    std::to_string(net.ego));
  std::unordered_map<NodeId, std::uint32_t> position;
  position.reserve(net.alter_ids.size());
  for (std::uint32_t i = 0; i < net.alter_ids.size(); ++i) position[net.alter_ids[i]] = i;

  FirstAppearanceSample out;
  out.ego = net.ego;
  out.c = static_cast<std::uint32_t>(asg.communities.size());
  out.orders.reserve(asg.communities.size());
  for (const auto& community : asg.communities) {
    std::uint32_t best = UINT32_MAX;
    for (NodeId m : community) {
      auto it = position.find(m);
      if (it == position.end())
        throw DataError("community member " + std::to_string(m) + " is not an alter of ego " +
                        std::to_string(net.ego));
      best = std::min(best, it->second);
    }
    out.orders.push_back(best + 1);  // ranks are 1-based
  }
  std::sort(out.orders.begin(), out.orders.end());
  return out;
}

// Pooled first-appearance histogram over egos with exactly `c` communities,
// normalized to probabilities. mean carries P(m); stderr is the binomial
// standard error sqrt(p(1-p)/N) of that probability.
inline std::vector<CurveBin> pcm_distribution(std::span<const FirstAppearanceSample> samples,
                                              std::uint32_t c) {
  std::unordered_map<std::uint32_t, std::uint64_t> hist;
  std::uint64_t total = 0;
  for (const auto& s : samples) {
    if (s.c != c) continue;
    for (std::uint32_t m : s.orders) {
      ++hist[m];
      ++total;
    }
  }
  std::vector<CurveBin> rows;
  if (total == 0) return rows;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> bins(hist.begin(), hist.end());
  std::sort(bins.begin(), bins.end());
  rows.reserve(bins.size());
  for (auto [m, n] : bins) {
    const double p = static_cast<double>(n) / static_cast<double>(total);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    rows.push_back({static_cast<std::int64_t>(m), p, n, se, n == 1});
  }
  return rows;
}

// P_c(m) = (1 - 1/c)^(m-1) * (1/c): the first-appearance distribution when
// communities are picked uniformly at random with unbounded membership.
inline double geometric_pcm(std::uint32_t c, std::uint32_t m) {
  if (c < 1 || m < 1) throw ConfigError("geometric_pcm needs c >= 1 and m >= 1");
  const double q = 1.0 - 1.0 / static_cast<double>(c);
  return std::pow(q, static_cast<double>(m - 1)) / static_cast<double>(c);
}

struct ExponentialFit {
  double m0 = 0.0;        // decay scale of P(m) ~ exp(-m/m0)
  std::uint32_t m_max = 0;  // fit window upper bound
  double r_squared = 0.0;
  std::uint32_t bins_used = 0;
};

// Unweighted least-squares line through (m, ln P(m)) for positive-count bins
// with m <= m_max; the scale is -1/slope. Fewer than three usable bins or a
// non-decaying slope yield no fit.
inline std::optional<ExponentialFit> fit_exponential_scale(std::span<const CurveBin> dist,
                                                           std::uint32_t m_max = 25) {
  std::vector<std::pair<double, double>> pts;
  for (const CurveBin& b : dist) {
    if (b.bin > static_cast<std::int64_t>(m_max)) continue;
    if (b.count == 0 || b.mean <= 0.0) continue;
    pts.emplace_back(static_cast<double>(b.bin), std::log(b.mean));
  }
  if (pts.size() < 3) return std::nullopt;

  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (n * sxy - sx * sy) / denom;
  if (slope >= 0.0) return std::nullopt;
  const double intercept = (sy - slope * sx) / n;

  const double ymean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (auto [x, y] : pts) {
    const double e = y - (intercept + slope * x);
    ss_res += e * e;
    ss_tot += (y - ymean) * (y - ymean);
  }
  ExponentialFit fit;
  fit.m0 = -1.0 / slope;
  fit.m_max = m_max;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.bins_used = static_cast<std::uint32_t>(pts.size());
  return fit;
}

}  // namespace egonet
