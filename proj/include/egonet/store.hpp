#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/graph.hpp"
#include "json.hpp"

namespace egonet {

namespace detail {

constexpr char kStoreMagic[8] = {'E', 'G', 'N', 'S', 'T', 'O', 'R', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("store: truncated file");
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  write_pod(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& in, std::vector<T>& v) {
  std::uint64_t n;
  read_pod(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw DataError("store: truncated file");
}

inline void write_str(std::ostream& out, const std::string& s) {
  write_pod(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& in) {
  std::uint32_t n;
  read_pod(in, n);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw DataError("store: truncated file");
  return s;
}

}  // namespace detail

// Writes graph.bin (adjacency + timestamps + profile columns) and a small
// meta.json next to it. The binary file is the authority; meta.json carries
// the human-readable ingest summary.
inline void save_store(const SocialGraph& g, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path bin_tmp = dir / "graph.bin.tmp";
  {
    std::ofstream out(bin_tmp, std::ios::binary);
    if (!out) throw DataError("store: cannot write " + bin_tmp.string());
    out.write(detail::kStoreMagic, sizeof(detail::kStoreMagic));
    detail::write_pod(out, std::uint32_t{1});
    detail::write_pod(out, static_cast<std::uint8_t>(g.has_real_timestamps() ? 1 : 0));
    detail::write_pod(out, static_cast<std::uint64_t>(g.edge_count()));
    detail::write_vec(out, g.ids());
    detail::write_vec(out, g.raw_offsets());
    detail::write_vec(out, g.raw_neighbors());
    detail::write_vec(out, g.raw_stamps());

    const bool profiles = g.has_profiles();
    detail::write_pod(out, static_cast<std::uint8_t>(profiles ? 1 : 0));
    if (profiles) {
      const ProfileTable& t = g.profiles();
      const FeatureSchema& schema = t.schema();
      detail::write_str(out, schema.to_json());
      for (std::size_t f = 0; f < schema.size(); ++f) {
        const bool cat = schema.at(f).kind == FeatureKind::categorical;
        if (cat) {
          detail::write_pod(out, static_cast<std::uint32_t>(t.pool(f).size()));
          for (std::uint32_t c = 0; c < t.pool(f).size(); ++c)
            detail::write_str(out, t.pool(f).token(c));
        }
        std::vector<std::uint8_t> present(g.node_count());
        for (NodeIndex v = 0; v < g.node_count(); ++v)
          present[v] = t.row(v).traits[f].is_missing() ? 0 : 1;
        detail::write_vec(out, present);
        if (cat) {
          std::vector<std::uint32_t> codes(g.node_count(), 0);
          for (NodeIndex v = 0; v < g.node_count(); ++v)
            if (present[v]) codes[v] = t.row(v).traits[f].code();
          detail::write_vec(out, codes);
        } else {
          std::vector<double> values(g.node_count(), 0.0);
          for (NodeIndex v = 0; v < g.node_count(); ++v)
            if (present[v]) values[v] = t.row(v).traits[f].value();
          detail::write_vec(out, values);
        }
      }
    }
    if (!out) throw DataError("store: write failed for " + bin_tmp.string());
  }
  fs::rename(bin_tmp, dir / "graph.bin");

  nlohmann::json meta;
  meta["version"] = 1;
  meta["nodes"] = g.node_count();
  meta["edges"] = g.edge_count();
  meta["real_timestamps"] = g.has_real_timestamps();
  meta["edge_records"] = g.stats().edge_records;
  meta["self_loops_dropped"] = g.stats().self_loops_dropped;
  meta["duplicates_collapsed"] = g.stats().duplicates_collapsed;
  meta["malformed_lines"] = g.stats().malformed_lines;
  meta["profile_rows"] = g.stats().profile_rows;
  meta["profile_rows_unknown_user"] = g.stats().profile_rows_unknown_user;
  if (g.has_profiles()) {
    nlohmann::json avail = nlohmann::json::object();
    auto a = g.profiles().availability();
    for (std::size_t f = 0; f < g.profiles().schema().size(); ++f)
      avail[g.profiles().schema().at(f).name] = a[f];
    meta["availability"] = std::move(avail);
  }
  const fs::path meta_tmp = dir / "meta.json.tmp";
  {
    std::ofstream out(meta_tmp);
    out << meta.dump(2) << "\n";
  }
  fs::rename(meta_tmp, dir / "meta.json");
}

inline SocialGraph load_store(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path bin = dir / "graph.bin";
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw DataError("store: cannot open " + bin.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kStoreMagic, 8) != 0)
    throw DataError("store: bad magic in " + bin.string());
  std::uint32_t version;
  detail::read_pod(in, version);
  if (version != 1) throw DataError("store: unsupported version");
  std::uint8_t real_ts;
  detail::read_pod(in, real_ts);
  std::uint64_t edge_count;
  detail::read_pod(in, edge_count);
  std::vector<NodeId> ids;
  std::vector<std::uint64_t> offsets;
  std::vector<NodeIndex> neighbors;
  std::vector<Timestamp> stamps;
  detail::read_vec(in, ids);
  detail::read_vec(in, offsets);
  detail::read_vec(in, neighbors);
  detail::read_vec(in, stamps);

  // rebuild edge list (a < b once) from adjacency
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  std::vector<Timestamp> ets;
  pairs.reserve(edge_count);
  ets.reserve(edge_count);
  for (NodeIndex v = 0; v + 1 < offsets.size(); ++v) {
    for (std::uint64_t i = offsets[v]; i < offsets[v + 1]; ++i) {
      if (neighbors[i] > v) {
        pairs.emplace_back(v, neighbors[i]);
        ets.push_back(stamps[i]);
      }
    }
  }
  SocialGraph g(std::move(ids), pairs, ets, real_ts != 0);

  std::uint8_t has_profiles;
  detail::read_pod(in, has_profiles);
  if (has_profiles) {
    FeatureSchema schema = FeatureSchema::parse_json(detail::read_str(in));
    ProfileTable table(schema, g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v) table.row(v).id = g.id_of(v);
    for (std::size_t f = 0; f < schema.size(); ++f) {
      const bool cat = schema.at(f).kind == FeatureKind::categorical;
      if (cat) {
        std::uint32_t pool_size;
        detail::read_pod(in, pool_size);
        for (std::uint32_t c = 0; c < pool_size; ++c) table.pool(f).intern(detail::read_str(in));
      }
      std::vector<std::uint8_t> present;
      detail::read_vec(in, present);
      if (present.size() != g.node_count()) throw DataError("store: profile column size mismatch");
      if (cat) {
        std::vector<std::uint32_t> codes;
        detail::read_vec(in, codes);
        for (NodeIndex v = 0; v < g.node_count(); ++v)
          if (present[v]) table.row(v).traits[f] = TraitValue::categorical(codes[v]);
      } else {
        std::vector<double> values;
        detail::read_vec(in, values);
        for (NodeIndex v = 0; v < g.node_count(); ++v)
          if (present[v]) table.row(v).traits[f] = TraitValue::numeric(values[v]);
      }
    }
    g.attach_profiles(std::move(table));
  }
  return g;
}

}  // namespace egonet
