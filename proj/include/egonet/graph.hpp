#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/features.hpp"

namespace egonet {

// Per-feature trait columns for every node in a graph, plus the token pools
// that make categorical codes comparable. Immutable once attached.
class ProfileTable {
public:
  ProfileTable() = default;

  ProfileTable(FeatureSchema schema, std::size_t node_count)
      : schema_(std::move(schema)),
        pools_(schema_.size()),
        rows_(node_count, Profile{0, std::vector<TraitValue>(schema_.size())}) {}

  const FeatureSchema& schema() const { return schema_; }
  std::size_t node_count() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  Profile& row(NodeIndex i) { return rows_[i]; }
  const Profile& row(NodeIndex i) const { return rows_[i]; }

  TokenPool& pool(std::size_t feature) { return pools_[feature]; }
  const TokenPool& pool(std::size_t feature) const { return pools_[feature]; }

  // Fraction of nodes with a non-MISSING value, per feature.
  std::vector<double> availability() const {
    std::vector<double> out(schema_.size(), 0.0);
    if (rows_.empty()) return out;
    for (const auto& r : rows_)
      for (std::size_t f = 0; f < schema_.size(); ++f)
        if (!r.traits[f].is_missing()) out[f] += 1.0;
    for (auto& v : out) v /= static_cast<double>(rows_.size());
    return out;
  }

private:
  FeatureSchema schema_;
  std::vector<TokenPool> pools_;
  std::vector<Profile> rows_;
};

struct IngestStats {
  std::uint64_t edge_records = 0;
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t duplicates_collapsed = 0;
  std::uint64_t malformed_lines = 0;
  std::vector<std::uint64_t> first_malformed_lines;  // up to a handful, for diagnostics
  std::uint64_t profile_rows = 0;
  std::uint64_t profile_rows_unknown_user = 0;
};

// Immutable undirected graph: sorted-CSR adjacency with a creation timestamp
// per edge and an optional profile table. Internal indices are positions in
// the sorted external-id array.
class SocialGraph {
public:
  SocialGraph() = default;

  // edges: internal-index pairs (a < b), deduplicated, with one timestamp each.
  SocialGraph(std::vector<NodeId> ids,
              const std::vector<std::pair<NodeIndex, NodeIndex>>& edges,
              const std::vector<Timestamp>& stamps, bool real_timestamps)
      : ids_(std::move(ids)), real_timestamps_(real_timestamps) {
    const std::size_t n = ids_.size();
    edge_count_ = edges.size();
    offsets_.assign(n + 1, 0);
    for (auto [a, b] : edges) {
      ++offsets_[a + 1];
      ++offsets_[b + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    neighbors_.resize(2 * edges.size());
    stamps_.resize(2 * edges.size());
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto [a, b] = edges[e];
      neighbors_[cursor[a]] = b;
      stamps_[cursor[a]++] = stamps[e];
      neighbors_[cursor[b]] = a;
      stamps_[cursor[b]++] = stamps[e];
    }
    for (std::size_t v = 0; v < n; ++v) {
      // sort each adjacency run by neighbor index, timestamps in tow
      auto b = offsets_[v], e = offsets_[v + 1];
      std::vector<std::pair<NodeIndex, Timestamp>> run;
      run.reserve(e - b);
      for (auto i = b; i < e; ++i) run.emplace_back(neighbors_[i], stamps_[i]);
      std::sort(run.begin(), run.end());
      for (std::size_t i = 0; i < run.size(); ++i) {
        neighbors_[b + i] = run[i].first;
        stamps_[b + i] = run[i].second;
      }
    }
  }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool has_real_timestamps() const { return real_timestamps_; }

  NodeId id_of(NodeIndex i) const { return ids_[i]; }

  std::optional<NodeIndex> index_of(NodeId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<NodeIndex>(it - ids_.begin());
  }

  std::size_t degree(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<const NodeIndex> neighbors(NodeIndex i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  std::span<const Timestamp> stamps(NodeIndex i) const {
    return {stamps_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  bool adjacent(NodeIndex a, NodeIndex b) const {
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  void attach_profiles(ProfileTable table) { profiles_ = std::move(table); }
  const ProfileTable& profiles() const { return profiles_; }
  bool has_profiles() const { return !profiles_.empty(); }

  IngestStats& stats() { return stats_; }
  const IngestStats& stats() const { return stats_; }

  const std::vector<NodeId>& ids() const { return ids_; }
  const std::vector<std::uint64_t>& raw_offsets() const { return offsets_; }
  const std::vector<NodeIndex>& raw_neighbors() const { return neighbors_; }
  const std::vector<Timestamp>& raw_stamps() const { return stamps_; }

private:
  std::vector<NodeId> ids_;  // sorted ascending
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeIndex> neighbors_;
  std::vector<Timestamp> stamps_;
  std::uint64_t edge_count_ = 0;
  bool real_timestamps_ = true;
  ProfileTable profiles_;
  IngestStats stats_;
};

// One ego and its alters in appearance order (edge timestamp ascending,
// ties broken by alter id), plus the induced alter-alter edge set.
struct EgoNetwork {
  NodeId ego = 0;
  NodeIndex ego_index = 0;
  std::vector<NodeIndex> alters;      // graph indices, appearance order; rank n = position + 1
  std::vector<NodeId> alter_ids;      // external ids, same order as alters
  std::vector<Timestamp> alter_times;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> induced_edges;  // positions into alters
  bool from_real_timestamps = true;

  std::size_t degree() const { return alters.size(); }
  bool empty() const { return alters.empty(); }
};

inline EgoNetwork extract_ego_network(const SocialGraph& g, NodeId ego) {
  auto idx = g.index_of(ego);
  if (!idx) throw DataError("ego " + std::to_string(ego) + " not present in graph");
  EgoNetwork net;
  net.ego = ego;
  net.ego_index = *idx;
  net.from_real_timestamps = g.has_real_timestamps();
  auto nb = g.neighbors(*idx);
  auto ts = g.stamps(*idx);
  const std::size_t k = nb.size();
  if (k == 0) return net;  // empty marker

  std::vector<std::uint32_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (ts[a] != ts[b]) return ts[a] < ts[b];
    return g.id_of(nb[a]) < g.id_of(nb[b]);
  });
  net.alters.reserve(k);
  net.alter_ids.reserve(k);
  net.alter_times.reserve(k);
  for (auto i : order) {
    net.alters.push_back(nb[i]);
    net.alter_ids.push_back(g.id_of(nb[i]));
    net.alter_times.push_back(ts[i]);
  }

  // position of each alter within the ego network
  std::vector<std::pair<NodeIndex, std::uint32_t>> pos;
  pos.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) pos.emplace_back(net.alters[i], i);
  std::sort(pos.begin(), pos.end());
  auto local_of = [&](NodeIndex v) -> std::optional<std::uint32_t> {
    auto it = std::lower_bound(pos.begin(), pos.end(), std::make_pair(v, std::uint32_t{0}));
    if (it == pos.end() || it->first != v) return std::nullopt;
    return it->second;
  };
  for (std::uint32_t i = 0; i < k; ++i) {
    for (NodeIndex w : g.neighbors(net.alters[i])) {
      if (w == *idx) continue;
      auto j = local_of(w);
      if (j && net.alters[i] < w)  // emit each induced edge once
        net.induced_edges.emplace_back(i, *j);
    }
  }
  return net;
}

/// Ego selection: minimum incident-edge activity span OR degree interval,
// combined with OR. Both criteria optional; an ego passes if any present
// criterion accepts it.
struct EgoFilter {
  std::optional<Timestamp> min_activity_span;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> degree_range;

  void validate() const {
    if (degree_range && degree_range->first > degree_range->second)
      throw ConfigError("ego filter: empty degree interval");
  }
};

inline std::vector<NodeId> filter_egos(const SocialGraph& g, const EgoFilter& f) {
  f.validate();
  if (f.min_activity_span && !g.has_real_timestamps())
    throw DataError("activity-span filter needs real timestamps, store has pseudo-time");
  std::vector<NodeId> out;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    const std::size_t k = g.degree(v);
    if (k == 0) continue;
    bool keep = false;
    if (f.degree_range)
      keep = k >= f.degree_range->first && k <= f.degree_range->second;
    if (!keep && f.min_activity_span) {
      auto ts = g.stamps(v);
      auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
      keep = (*hi - *lo) >= *f.min_activity_span;
    }
    if (!f.degree_range && !f.min_activity_span) keep = true;
    if (keep) out.push_back(g.id_of(v));
  }
  return out;  // ids_ sorted ascending, so output is too
}

}  // namespace egonet
