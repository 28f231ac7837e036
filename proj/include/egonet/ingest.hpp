#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/graph.hpp"

namespace egonet {

struct IngestOptions {
  std::uint64_t max_errors = 100;  // abort once more lines than this are malformed
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view field, T& out) {
  field = trim(field);
  if (field.empty()) return false;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && p == field.data() + field.size();
}

inline bool parse_real(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && p == field.data() + field.size();
}

}  // namespace detail

// Reads `src,dst[,ts]` records, drops self-loops (counted), collapses
// duplicate undirected pairs keeping the earliest timestamp, and builds the
// adjacency. Records without a timestamp fall back to the line number as
// pseudo-time; a store built that way is flagged and appearance-order
// analyses refuse to run on it.
inline SocialGraph ingest_edges(std::istream& in, const IngestOptions& opts = {}) {
  struct Rec {
    NodeId a, b;
    Timestamp ts;
  };
  std::vector<Rec> recs;
  IngestStats stats;
  std::string line;
  std::uint64_t line_no = 0;
  bool saw_real_ts = false;
  bool saw_missing_ts = false;

  auto reject = [&](std::uint64_t ln) {
    ++stats.malformed_lines;
    if (stats.first_malformed_lines.size() < 10) stats.first_malformed_lines.push_back(ln);
    if (stats.malformed_lines > opts.max_errors)
      throw DataError("edges: more than " + std::to_string(opts.max_errors) +
                      " malformed lines, first at line " +
                      std::to_string(stats.first_malformed_lines.front()));
  };

  bool header_checked = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;  // blank or manifest comment
    if (!header_checked) {
      header_checked = true;
      if (sv.substr(0, 3) == "src") continue;  // header `src,dst[,ts]`
    }
    auto fields = detail::split_csv(sv);
    if (fields.size() != 2 && fields.size() != 3) {
      reject(line_no);
      continue;
    }
    Rec r{};
    if (!detail::parse_int(fields[0], r.a) || !detail::parse_int(fields[1], r.b)) {
      reject(line_no);
      continue;
    }
    bool has_ts = fields.size() == 3 && !trim(fields[2]).empty();
    if (has_ts) {
      if (!detail::parse_int(fields[2], r.ts)) {
        reject(line_no);
        continue;
      }
      saw_real_ts = true;
    } else {
      r.ts = static_cast<Timestamp>(line_no);
      saw_missing_ts = true;
    }
    ++stats.edge_records;
    if (r.a == r.b) {
      ++stats.self_loops_dropped;
      continue;
    }
    recs.push_back(r);
  }

  // mixed timestamped / untimestamped input is not a coherent timeline
  if (saw_real_ts && saw_missing_ts)
    throw DataError("edges: mix of timestamped and untimestamped records");
  const bool real_timestamps = saw_real_ts;

  // id space
  std::vector<NodeId> ids;
  ids.reserve(recs.size() * 2);
  for (const auto& r : recs) {
    ids.push_back(r.a);
    ids.push_back(r.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&](NodeId id) {
    return static_cast<NodeIndex>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  struct Edge {
    NodeIndex a, b;
    Timestamp ts;
    bool operator<(const Edge& o) const {
      if (a != o.a) return a < o.a;
      if (b != o.b) return b < o.b;
      return ts < o.ts;
    }
  };
  std::vector<Edge> edges;
  edges.reserve(recs.size());
  for (const auto& r : recs) {
    NodeIndex ia = index_of(r.a), ib = index_of(r.b);
    if (ia > ib) std::swap(ia, ib);
    edges.push_back({ia, ib, r.ts});
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  std::vector<Timestamp> stamps;
  pairs.reserve(edges.size());
  stamps.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && edges[i].a == edges[i - 1].a && edges[i].b == edges[i - 1].b) {
      ++stats.duplicates_collapsed;  // sorted by ts, first one is earliest
      continue;
    }
    pairs.emplace_back(edges[i].a, edges[i].b);
    stamps.push_back(edges[i].ts);
  }

  SocialGraph g(std::move(ids), pairs, stamps, real_timestamps);
  g.stats() = stats;
  return g;
}

// Reads `id,<feature1>,...` rows against the schema (columns may be in any
// order but must cover exactly the schema names). Empty cells become
// MISSING; nodes without a row stay all-MISSING. Rows for ids absent from
// the graph are counted and skipped.
inline void ingest_profiles(std::istream& in, const FeatureSchema& schema, SocialGraph& g,
                            const IngestOptions& opts = {}) {
  ProfileTable table(schema, g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) table.row(v).id = g.id_of(v);

  std::string line;
  std::uint64_t line_no = 0;
  std::string_view header_line;
  while (std::getline(in, line)) {
    ++line_no;
    header_line = trim(line);
    if (!header_line.empty() && header_line.front() != '#') break;  // skip manifest comments
    header_line = {};
  }
  if (header_line.empty()) throw DataError("profiles: empty file, expected a header row");
  auto header = detail::split_csv(header_line);
  if (header.empty() || trim(header[0]) != "id")
    throw DataError("profiles: first header column must be 'id'");
  std::vector<std::size_t> column_feature(header.size() - 1);
  std::vector<bool> covered(schema.size(), false);
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto name = trim(header[c]);
    auto f = schema.index_of(name);
    if (!f) throw DataError("profiles: header column '" + std::string(name) + "' not in schema");
    if (covered[*f]) throw DataError("profiles: duplicate column '" + std::string(name) + "'");
    covered[*f] = true;
    column_feature[c - 1] = *f;
  }
  for (std::size_t f = 0; f < schema.size(); ++f)
    if (!covered[f])
      throw DataError("profiles: schema feature '" + schema.at(f).name + "' missing from header");

  IngestStats& stats = g.stats();
  auto reject = [&](std::uint64_t ln) {
    ++stats.malformed_lines;
    if (stats.first_malformed_lines.size() < 10) stats.first_malformed_lines.push_back(ln);
    if (stats.malformed_lines > opts.max_errors)
      throw DataError("profiles: more than " + std::to_string(opts.max_errors) +
                      " malformed lines, first at line " + std::to_string(ln));
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = detail::split_csv(sv);
    if (fields.size() != header.size()) {
      reject(line_no);
      continue;
    }
    NodeId id;
    if (!detail::parse_int(fields[0], id)) {
      reject(line_no);
      continue;
    }
    ++stats.profile_rows;
    auto idx = g.index_of(id);
    if (!idx) {
      ++stats.profile_rows_unknown_user;
      continue;
    }
    Profile& row = table.row(*idx);
    bool bad = false;
    for (std::size_t c = 1; c < fields.size() && !bad; ++c) {
      const std::size_t f = column_feature[c - 1];
      auto cell = trim(fields[c]);
      if (cell.empty()) continue;  // MISSING
      if (schema.at(f).kind == FeatureKind::categorical) {
        row.traits[f] = TraitValue::categorical(table.pool(f).intern(cell));
      } else {
        double v;
        if (!detail::parse_real(cell, v)) {
          bad = true;
          break;
        }
        row.traits[f] = TraitValue::numeric(v);
      }
    }
    if (bad) {
      // discard the whole row
      row = Profile{id, std::vector<TraitValue>(schema.size())};
      reject(line_no);
    }
  }

  g.attach_profiles(std::move(table));
}

}  // namespace egonet
