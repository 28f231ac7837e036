#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/curves.hpp"
#include "egonet/parallel.hpp"
#include "egonet/rng.hpp"

namespace egonet {

// Constants of the modeled appearance-order overlap
//   o_s(n) = (1 - 1/(s + shift)) * amplitude / (s^shape + saturation) + bump * [n == 1].
// They are demonstration values, not data fits, hence configurable.
struct OverlapParams {
  double amplitude = 60.0;
  double shape = 0.7;
  double saturation = 100.0;
  double bump = 0.07;
  double shift = 2.0;
};

// Power-law community-size distribution P(s) ~ s^exponent on [s_min, s_max].
struct SizeDistribution {
  double exponent = -1.5;
  std::uint32_t s_min = 2;
  std::uint32_t s_max = 100;

  void validate() const {
    if (s_min < 1 || s_max < s_min)
      throw ConfigError("size distribution needs 1 <= s_min <= s_max");
  }
};

struct ModelConfig {
  std::uint32_t k_real = 150;
  SizeDistribution sizes;
  OverlapParams overlap;
  std::uint32_t ensemble = 5000;
  std::uint64_t seed = 0;

  void validate() const {
    sizes.validate();
    if (k_real < 1) throw ConfigError("k_real must be at least 1");
    if (ensemble < 1) throw ConfigError("ensemble size must be at least 1");
  }
};

// Overlap of the n-th strongest member of a size-s community with the ego.
inline double model_order_overlap(std::uint32_t s, std::uint32_t n,
                                  const OverlapParams& p = {}) {
  if (n < 1 || n > s)
    throw ConfigError("order overlap needs 1 <= n <= s, got n=" + std::to_string(n) +
                      " s=" + std::to_string(s));
  const double sd = static_cast<double>(s);
  const double base = (1.0 - 1.0 / (sd + p.shift)) * p.amplitude / (std::pow(sd, p.shape) + p.saturation);
  return n == 1 ? base + p.bump : base;
}

// Community-size average of the order overlaps: base(s) + bump/s in closed
// form, since only n = 1 deviates from the base level.
inline double model_community_overlap(std::uint32_t s, const OverlapParams& p = {}) {
  if (s < 1) throw ConfigError("community overlap needs s >= 1");
  const double sd = static_cast<double>(s);
  const double base = (1.0 - 1.0 / (sd + p.shift)) * p.amplitude / (std::pow(sd, p.shape) + p.saturation);
  return base + p.bump / sd;
}

// Inverse-CDF sampler over the discrete power law; construction is O(range),
// sampling is O(log range).
class SizeSampler {
public:
  explicit SizeSampler(const SizeDistribution& d) : s_min_(d.s_min) {
    d.validate();
    const std::size_t n = d.s_max - d.s_min + 1;
    cdf_.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += std::pow(static_cast<double>(d.s_min + i), d.exponent);
      cdf_[i] = total;
    }
    normalizer_ = 1.0 / total;
    for (auto& c : cdf_) c *= normalizer_;
    cdf_.back() = 1.0;  // guard against rounding shortfall
  }

  std::uint32_t sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return s_min_ + static_cast<std::uint32_t>(it - cdf_.begin());
  }

  // P(s), zero outside the supported range.
  double pmf(std::uint32_t s) const {
    if (s < s_min_ || s >= s_min_ + cdf_.size()) return 0.0;
    const std::size_t i = s - s_min_;
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }

  // normalization constant A with P(s) = A * s^exponent
  double normalizer() const { return normalizer_; }

private:
  std::uint32_t s_min_ = 2;
  double normalizer_ = 0.0;
  std::vector<double> cdf_;
};

// Draws i.i.d. sizes until the budget k_real is met; a draw that overshoots
// is truncated so the final community takes exactly the remainder (possibly
// smaller than s_min). Sizes always sum to k_real.
inline std::vector<std::uint32_t> sample_community_sizes(std::uint32_t k_real,
                                                         const SizeSampler& sampler, Rng& rng) {
  std::vector<std::uint32_t> sizes;
  std::uint32_t remaining = k_real;
  while (remaining > 0) {
    std::uint32_t s = sampler.sample(rng);
    if (s > remaining) s = remaining;
    sizes.push_back(s);
    remaining -= s;
  }
  return sizes;
}

namespace detail {

// Shared inner loop of the growth procedure: repeatedly picks a surviving
// community uniformly at random and consumes its strongest remaining member
// (members leave in order n = 1, 2, ..., s). `on_pick(community, n, step)` is
// invoked for every accession, steps counted from 1.
template <typename OnPick>
void run_growth(std::span<const std::uint32_t> sizes, Rng& rng, OnPick&& on_pick) {
  const std::size_t c = sizes.size();
  std::vector<std::uint32_t> community(c);   // surviving community ids
  std::vector<std::uint32_t> next_n(c, 1);   // next member rank per community
  for (std::size_t r = 0; r < c; ++r) community[r] = static_cast<std::uint32_t>(r);

  std::size_t alive = c;
  std::uint32_t step = 0;
  while (alive > 0) {
    const std::size_t slot = static_cast<std::size_t>(rng.below(alive));
    const std::uint32_t r = community[slot];
    on_pick(r, next_n[r], ++step);
    if (++next_n[r] > sizes[r]) {
      community[slot] = community[--alive];  // exhausted: swap-remove
    }
  }
}

}  // namespace detail

// One synthetic ego: sampled community sizes, the accession sequence of
// member overlaps produced by the random-community growth procedure, and the
// step at which each community was entered for the first time.
struct SyntheticEgo {
  std::vector<std::uint32_t> sizes;
  std::vector<double> accession;  // accession[k-1] = overlap of the k-th added alter
  std::vector<std::uint32_t> first_appearance;  // ascending, one per community
};

inline SyntheticEgo simulate_ego(const ModelConfig& cfg, const SizeSampler& sampler, Rng& rng) {
  SyntheticEgo ego;
  ego.sizes = sample_community_sizes(cfg.k_real, sampler, rng);
  ego.accession.resize(cfg.k_real);
  ego.first_appearance.reserve(ego.sizes.size());
  detail::run_growth(ego.sizes, rng, [&](std::uint32_t r, std::uint32_t n, std::uint32_t step) {
    ego.accession[step - 1] = model_order_overlap(ego.sizes[r], n, cfg.overlap);
    if (n == 1) ego.first_appearance.push_back(step);  // steps arrive in order
  });
  return ego;
}

// First-appearance orders for an ego with exactly `c` communities of
// unconstrained i.i.d. sizes: the step at which each community was first
// picked. Returns c ascending values with minimum 1.
inline std::vector<std::uint32_t> simulate_first_appearance(std::uint32_t c,
                                                            const SizeSampler& sampler, Rng& rng) {
  std::vector<std::uint32_t> sizes(c);
  for (auto& s : sizes) s = sampler.sample(rng);
  std::vector<std::uint32_t> first(c, 0);
  detail::run_growth(sizes, rng, [&](std::uint32_t r, std::uint32_t n, std::uint32_t step) {
    if (n == 1) first[r] = step;
  });
  std::sort(first.begin(), first.end());
  return first;
}

// Ensemble mean of the k-th accession overlap over cfg.ensemble egos. Egos
// run on substreams keyed by ego index and land in preallocated slots, then
// are reduced in index order, so the curve is identical for any thread count.
inline BinnedCurve simulate_ensemble(const ModelConfig& cfg, unsigned threads = 0) {
  cfg.validate();
  const SizeSampler sampler(cfg.sizes);
  const std::size_t e = cfg.ensemble;
  std::vector<std::vector<double>> rows(e);
  parallel_for(e, threads, [&](std::size_t i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    rows[i] = simulate_ego(cfg, sampler, rng).accession;
  });
  BinnedCurve curve;
  for (std::size_t i = 0; i < e; ++i)
    for (std::uint32_t k = 0; k < cfg.k_real; ++k)
      curve.add(static_cast<std::int64_t>(k + 1), rows[i][k]);
  return curve;
}

}  // namespace egonet
