#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/graph.hpp"
#include "egonet/rng.hpp"

namespace egonet {

// Undirected weighted graph as seen by a random walker. node_flow is the
// walker's unnormalized visit weight (degree at level zero, module totals
// after aggregation); total_flow is the level-zero normalizer and is
// inherited through aggregation so codelengths stay comparable.
class FlowNetwork {
public:
  FlowNetwork() = default;

  FlowNetwork(std::size_t n, std::vector<std::vector<std::pair<std::uint32_t, double>>> links,
              std::vector<double> node_flow, double total_flow)
      : n_(n), links_(std::move(links)), node_flow_(std::move(node_flow)), total_flow_(total_flow) {}

  static FlowNetwork from_edges(std::size_t n,
                                std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> links(n);
    std::vector<double> flow(n, 0.0);
    for (auto [a, b] : edges) {
      if (a == b) continue;
      links[a].emplace_back(b, 1.0);
      links[b].emplace_back(a, 1.0);
      flow[a] += 1.0;
      flow[b] += 1.0;
    }
    double total = 2.0 * static_cast<double>(edges.size());
    return FlowNetwork(n, std::move(links), std::move(flow), total);
  }

  std::size_t size() const { return n_; }
  double total_flow() const { return total_flow_; }
  double node_flow(std::uint32_t v) const { return node_flow_[v]; }
  const std::vector<std::pair<std::uint32_t, double>>& links(std::uint32_t v) const {
    return links_[v];
  }

  // External link weight of v (flow leaving v when alone in a module).
  double out_flow(std::uint32_t v) const {
    double d = 0.0;
    for (const auto& [w, f] : links_[v]) d += f;
    return d;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> links_;
  std::vector<double> node_flow_;
  double total_flow_ = 0.0;
};

namespace detail {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace detail

// Two-level map equation L(M) = q H(Q) + sum_i p_i H(P_i) in bits, for an
// unweighted, unrecorded-teleportation random walk: node visit rates are
// degree/2W, module exit rates cut(i)/2W. A graph with no edges codes to
// zero bits.
inline double map_equation_codelength(const FlowNetwork& net,
                                      std::span<const std::uint32_t> modules) {
  const double T = net.total_flow();
  if (T <= 0.0 || net.size() == 0) return 0.0;
  std::uint32_t max_mod = 0;
  for (std::size_t v = 0; v < net.size(); ++v) max_mod = std::max(max_mod, modules[v]);
  std::vector<double> exit(max_mod + 1, 0.0), flow(max_mod + 1, 0.0);
  for (std::uint32_t v = 0; v < net.size(); ++v) {
    flow[modules[v]] += net.node_flow(v);
    for (const auto& [w, f] : net.links(v))
      if (modules[w] != modules[v]) exit[modules[v]] += f;
  }
  double exit_total = 0.0;
  for (double q : exit) exit_total += q;

  using detail::plogp;
  double L = plogp(exit_total / T);
  for (std::size_t m = 0; m < exit.size(); ++m) {
    L -= 2.0 * plogp(exit[m] / T);
    L += plogp((exit[m] + flow[m]) / T);
  }
  for (std::uint32_t v = 0; v < net.size(); ++v) L -= plogp(net.node_flow(v) / T);
  return L;
}

struct Partition {
  std::vector<std::uint32_t> modules;
  double codelength = 0.0;
};

namespace detail {

// no move is accepted unless it improves the codelength by more than this
constexpr double kMinGain = 1e-10;

struct MoveState {
  std::vector<std::uint32_t> module_of;
  std::vector<double> mod_exit;
  std::vector<double> mod_flow;
  std::vector<std::uint32_t> mod_size;
  double exit_total = 0.0;

  void init_singletons(const FlowNetwork& net) {
    const std::size_t n = net.size();
    module_of.resize(n);
    std::iota(module_of.begin(), module_of.end(), 0);
    mod_exit.assign(n, 0.0);
    mod_flow.assign(n, 0.0);
    mod_size.assign(n, 1);
    exit_total = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
      mod_exit[v] = net.out_flow(v);
      mod_flow[v] = net.node_flow(v);
      exit_total += mod_exit[v];
    }
  }
};

// One full local-moving phase: repeated sweeps over the nodes in a seeded
// random order, moving each node to the adjacent (or a fresh) module with
// the largest codelength gain, until a sweep makes no move. Returns the
// number of non-singleton merges that happened.
inline bool local_moving(const FlowNetwork& net, MoveState& st, Rng& rng) {
  const std::size_t n = net.size();
  const double T = net.total_flow();
  if (T <= 0.0 || n < 2) return false;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> flow_to(n, 0.0);
  std::vector<std::uint32_t> touched;
  touched.reserve(16);
  std::vector<std::uint32_t> free_modules;

  auto plogpT = [T](double x) { return plogp(x / T); };

  bool any_move_ever = false;
  bool sweep_moved = true;
  while (sweep_moved) {
    sweep_moved = false;
    // Fisher-Yates
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);

    for (std::uint32_t v : order) {
      const std::uint32_t M = st.module_of[v];
      const double p_v = net.node_flow(v);
      double d_v = 0.0;
      touched.clear();
      for (const auto& [w, f] : net.links(v)) {
        d_v += f;
        const std::uint32_t mw = st.module_of[w];
        if (flow_to[mw] == 0.0) touched.push_back(mw);
        flow_to[mw] += f;
      }
      const double f_M = flow_to[M];

      // candidate target modules: adjacent ones plus one empty module
      std::uint32_t fresh = n;  // sentinel: none
      if (st.mod_size[M] > 1) {
        free_modules.clear();
        for (std::uint32_t m = 0; m < st.mod_size.size(); ++m)
          if (st.mod_size[m] == 0) {
            fresh = m;
            break;
          }
      }

      const double q_M = st.mod_exit[M];
      const double s_M = st.mod_flow[M];
      const double q_M_new = (st.mod_size[M] == 1) ? 0.0 : std::max(0.0, q_M - d_v + 2.0 * f_M);
      const double s_M_new = (st.mod_size[M] == 1) ? 0.0 : s_M - p_v;
      const double removal = -2.0 * (plogpT(q_M_new) - plogpT(q_M)) +
                             plogpT(q_M_new + s_M_new) - plogpT(q_M + s_M);

      double best_delta = 0.0;
      std::uint32_t best_module = M;
      auto consider = [&](std::uint32_t N, double f_N) {
        if (N == M) return;
        const double q_N = st.mod_exit[N];
        const double s_N = st.mod_flow[N];
        const double q_N_new = q_N + d_v - 2.0 * f_N;
        const double q_new = st.exit_total + (q_M_new - q_M) + (q_N_new - q_N);
        const double delta = plogpT(q_new) - plogpT(st.exit_total) + removal -
                             2.0 * (plogpT(q_N_new) - plogpT(q_N)) +
                             plogpT(q_N_new + s_N + p_v) - plogpT(q_N + s_N);
        if (delta < best_delta - 1e-15 ||
            (delta < best_delta + 1e-15 && N < best_module)) {
          best_delta = delta;
          best_module = N;
        }
      };
      for (std::uint32_t m : touched) consider(m, flow_to[m]);
      if (fresh != n) consider(fresh, 0.0);

      if (best_module != M && best_delta < -kMinGain) {
        const std::uint32_t N = best_module;
        const double f_N = flow_to[N];
        st.exit_total += (q_M_new - q_M);
        st.mod_exit[M] = q_M_new;
        st.mod_flow[M] = s_M_new;
        st.mod_size[M] -= 1;
        const double q_N_old = st.mod_exit[N];
        st.mod_exit[N] = q_N_old + d_v - 2.0 * f_N;
        st.exit_total += st.mod_exit[N] - q_N_old;
        st.mod_flow[N] += p_v;
        st.mod_size[N] += 1;
        st.module_of[v] = N;
        sweep_moved = true;
        any_move_ever = true;
      }

      for (std::uint32_t m : touched) flow_to[m] = 0.0;
    }
  }
  return any_move_ever;
}

inline std::uint32_t compress_labels(std::vector<std::uint32_t>& labels) {
  std::vector<std::uint32_t> remap(labels.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (remap[l] == UINT32_MAX) remap[l] = next++;
    l = remap[l];
  }
  return next;
}

inline FlowNetwork aggregate(const FlowNetwork& net, std::span<const std::uint32_t> modules,
                             std::uint32_t module_count) {
  std::vector<double> flow(module_count, 0.0);
  std::vector<std::map<std::uint32_t, double>> acc(module_count);
  for (std::uint32_t v = 0; v < net.size(); ++v) {
    const std::uint32_t mv = modules[v];
    flow[mv] += net.node_flow(v);
    for (const auto& [w, f] : net.links(v)) {
      const std::uint32_t mw = modules[w];
      if (mw != mv) acc[mv][mw] += f;
    }
  }
  std::vector<std::vector<std::pair<std::uint32_t, double>>> links(module_count);
  for (std::uint32_t m = 0; m < module_count; ++m) {
    links[m].reserve(acc[m].size());
    for (const auto& [w, f] : acc[m]) links[m].emplace_back(w, f);
  }
  return FlowNetwork(module_count, std::move(links), std::move(flow), net.total_flow());
}

}  // namespace detail

// Greedy two-level search: local node moving, then module aggregation and
// another round on the coarser graph, repeated until nothing merges;
// restarted `trials` times from seeded shuffles keeping the best result.
// The returned partition never codes worse than the all-singletons or the
// single-module partition, and module ids are canonicalized by first
// appearance so identical (net, seed) inputs give identical output.
inline Partition optimize_partition(const FlowNetwork& net, std::uint64_t seed, int trials = 10) {
  const std::size_t n = net.size();
  Partition best;
  best.modules.resize(n);
  std::iota(best.modules.begin(), best.modules.end(), 0);
  best.codelength = map_equation_codelength(net, best.modules);
  if (n == 0 || net.total_flow() <= 0.0) return best;

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<std::uint32_t> flat(n);
    std::iota(flat.begin(), flat.end(), 0);
    FlowNetwork level = net;
    bool first_level = true;
    while (true) {
      detail::MoveState st;
      st.init_singletons(level);
      const bool moved = detail::local_moving(level, st, rng);
      if (!moved) break;
      std::vector<std::uint32_t> labels = st.module_of;
      const std::uint32_t module_count = detail::compress_labels(labels);
      if (first_level) {
        flat = labels;
        first_level = false;
      } else {
        for (auto& m : flat) m = labels[m];
      }
      if (module_count == level.size() || module_count <= 1) break;
      level = detail::aggregate(level, labels, module_count);
    }
    const double L = map_equation_codelength(net, flat);
    if (L < best.codelength - detail::kMinGain) {
      best.modules = std::move(flat);
      best.codelength = L;
    }
  }

  // the one-module partition is not always reachable by gainful single moves
  std::vector<std::uint32_t> one(n, 0);
  const double L1 = map_equation_codelength(net, one);
  if (L1 < best.codelength - detail::kMinGain) {
    best.modules = std::move(one);
    best.codelength = L1;
  }

  detail::compress_labels(best.modules);
  return best;
}

// Partition of one ego's alters into egocentric communities. Members are
// listed in appearance order; communities are ordered by their earliest
// member. The codelength refers to the ego-included detection graph.
struct CommunityAssignment {
  NodeId ego = 0;
  std::vector<std::vector<NodeId>> communities;
  double codelength = 0.0;
  std::uint64_t seed = 0;
};

// Detection graph: alters 0..k-1 in appearance order plus the ego as node k,
// with the induced alter-alter edges and one edge from every alter to the ego.
inline FlowNetwork build_detection_network(const EgoNetwork& net) {
  const std::size_t k = net.alters.size();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(net.induced_edges.size() + k);
  for (auto [a, b] : net.induced_edges) edges.emplace_back(a, b);
  for (std::uint32_t i = 0; i < k; ++i) edges.emplace_back(i, static_cast<std::uint32_t>(k));
  return FlowNetwork::from_edges(k + 1, edges);
}

// Codelength of a partition over the ego-included detection graph; the
// modules span covers the alters in appearance order with the ego last.
inline double map_equation_codelength(const EgoNetwork& net,
                                      std::span<const std::uint32_t> modules_with_ego) {
  return map_equation_codelength(build_detection_network(net), modules_with_ego);
}

// Runs the optimizer on the ego-included graph, then deletes the ego from
// whichever module contains it. Deterministic for fixed (net, seed).
inline CommunityAssignment detect_communities(const EgoNetwork& net, std::uint64_t seed,
                                              int trials = 10) {
  CommunityAssignment out;
  out.ego = net.ego;
  out.seed = seed;
  const std::size_t k = net.alters.size();
  if (k == 0) return out;

  const FlowNetwork fn = build_detection_network(net);
  Partition part = optimize_partition(fn, seed, trials);
  out.codelength = part.codelength;

  std::uint32_t max_mod = 0;
  for (std::uint32_t m : part.modules) max_mod = std::max(max_mod, m);
  std::vector<std::vector<std::uint32_t>> groups(max_mod + 1);
  for (std::uint32_t i = 0; i < k; ++i) groups[part.modules[i]].push_back(i);  // ego excluded

  std::vector<std::vector<std::uint32_t>*> nonempty;
  for (auto& grp : groups)
    if (!grp.empty()) nonempty.push_back(&grp);
  std::sort(nonempty.begin(), nonempty.end(),
            [](const auto* a, const auto* b) { return a->front() < b->front(); });
  for (const auto* grp : nonempty) {
    std::vector<NodeId> comm;
    comm.reserve(grp->size());
    for (std::uint32_t pos : *grp) comm.push_back(net.alter_ids[pos]);
    out.communities.push_back(std::move(comm));
  }
  return out;
}

template <typename AssignmentRange>
std::map<std::uint32_t, std::uint64_t> community_size_histogram(const AssignmentRange& assignments) {
  std::map<std::uint32_t, std::uint64_t> counts;
  for (const CommunityAssignment& a : assignments)
    for (const auto& c : a.communities) ++counts[static_cast<std::uint32_t>(c.size())];
  return counts;
}

}  // namespace egonet
