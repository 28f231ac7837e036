#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/community.hpp"
#include "egonet/curves.hpp"
#include "egonet/features.hpp"
#include "egonet/graph.hpp"

namespace egonet {

namespace detail {

inline void require_profiles(const SocialGraph& g) {
  if (!g.has_profiles()) throw ConfigError("overlap curves need a store with profiles attached");
}

inline NodeIndex require_index(const SocialGraph& g, NodeId id) {
  auto idx = g.index_of(id);
  if (!idx) throw DataError("user " + std::to_string(id) + " not present in graph");
  return *idx;
}

}  // namespace detail

// Mean subset overlap of egos with each of their communities, binned by
// community size s. Communities whose members all lack shared features with
// the ego contribute to neither mean nor count.
inline BinnedCurve community_overlap_curve(const SocialGraph& g,
                                           std::span<const CommunityAssignment> assignments) {
  detail::require_profiles(g);
  const ProfileTable& pt = g.profiles();
  BinnedCurve curve;
  std::vector<Profile> members;
  for (const CommunityAssignment& a : assignments) {
    const Profile& ego = pt.row(detail::require_index(g, a.ego));
    for (const auto& community : a.communities) {
      members.clear();
      members.reserve(community.size());
      for (NodeId m : community) members.push_back(pt.row(detail::require_index(g, m)));
      if (auto o = subset_overlap(ego, members, pt.schema()))
        curve.add(static_cast<std::int64_t>(community.size()), *o);
    }
  }
  return curve;
}

// Mean subset overlap of each ego with its full neighbor set, binned by
// degree k. Egos without any overlap-defined alter are skipped.
inline BinnedCurve ego_overlap_curve(const SocialGraph& g, std::span<const NodeId> egos) {
  detail::require_profiles(g);
  const ProfileTable& pt = g.profiles();
  BinnedCurve curve;
  for (NodeId id : egos) {
    const NodeIndex v = detail::require_index(g, id);
    const auto nb = g.neighbors(v);
    if (nb.empty()) continue;
    const Profile& ego = pt.row(v);
    double sum = 0.0;
    std::size_t defined = 0;
    for (NodeIndex w : nb) {
      if (auto o = link_overlap(ego, pt.row(w), pt.schema())) {
        sum += o->value;
        ++defined;
      }
    }
    if (defined > 0)
      curve.add(static_cast<std::int64_t>(nb.size()), sum / static_cast<double>(defined));
  }
  return curve;
}

// Link overlaps of members of size-s communities, binned by the member's
// within-community appearance rank n (1-based). Ranks are taken over the
// full membership; members without shared features merely contribute no
// sample at their rank. Requires true timestamps: appearance order from
// file-order pseudo-time would be meaningless here.
inline BinnedCurve appearance_order_curve(const SocialGraph& g,
                                          std::span<const CommunityAssignment> assignments,
                                          std::uint32_t s) {
  detail::require_profiles(g);
  if (s < 2) throw ConfigError("appearance-order curve is defined for community size >= 2");
  if (!g.has_real_timestamps())
    throw DataError(
        "appearance-order curve needs real edge timestamps; this store was ingested without a "
        "ts column (file-order pseudo-time)");
  const ProfileTable& pt = g.profiles();
  BinnedCurve curve;
  std::unordered_map<NodeId, std::uint32_t> position;
  std::vector<std::pair<std::uint32_t, NodeId>> ranked;
  for (const CommunityAssignment& a : assignments) {
    bool wanted = false;
    for (const auto& c : a.communities) wanted = wanted || c.size() == s;
    if (!wanted) continue;

    const EgoNetwork net = extract_ego_network(g, a.ego);
    position.clear();
    for (std::uint32_t i = 0; i < net.alter_ids.size(); ++i) position[net.alter_ids[i]] = i;
    const Profile& ego = pt.row(net.ego_index);

    for (const auto& community : a.communities) {
      if (community.size() != s) continue;
      ranked.clear();
      for (NodeId m : community) {
        auto it = position.find(m);
        if (it == position.end())
          throw DataError("community member " + std::to_string(m) + " is not an alter of ego " +
                          std::to_string(a.ego));
        ranked.emplace_back(it->second, m);
      }
      std::sort(ranked.begin(), ranked.end());
      for (std::size_t n = 0; n < ranked.size(); ++n) {
        const Profile& alter = pt.row(detail::require_index(g, ranked[n].second));
        if (auto o = link_overlap(ego, alter, pt.schema()))
          curve.add(static_cast<std::int64_t>(n + 1), o->value);
      }
    }
  }
  return curve;
}

}  // namespace egonet
