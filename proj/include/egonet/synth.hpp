#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/features.hpp"
#include "egonet/model.hpp"
#include "egonet/rng.hpp"
#include "json.hpp"

namespace egonet {

// Synthetic population: independent ego blocks with planted communities,
// timestamps from the random-community growth procedure, and per-feature
// trait agreement following the modeled order overlap. Every quantity the
// empirical pipeline later estimates is known exactly at generation time
// and recorded in the truth sidecar.
struct SynthConfig {
  enum class CommunityMode { budget, fixed };

  std::uint64_t egos = 1000;
  std::uint64_t seed = 0;
  FeatureSchema schema;
  CommunityMode mode = CommunityMode::budget;
  std::uint32_t k_real = 150;   // budget mode: sizes drawn until they sum to this
  std::uint32_t fixed_c = 1;    // fixed mode: exactly this many communities
  SizeDistribution sizes;
  OverlapParams overlap;
  double intra_density = 1.0;
  double inter_density = 0.0;
  std::vector<double> missing_rates;  // aligned to schema, default all 0
  std::uint32_t categorical_cardinality = 20;
  NodeId start_id = 1;
  Timestamp epoch = 1600000000;
  std::int64_t tick_seconds = 3600;

  static FeatureSchema default_schema() {
    return FeatureSchema({{"gender", FeatureKind::categorical, 0.0},
                          {"age", FeatureKind::numeric, 2.0},
                          {"location", FeatureKind::categorical, 0.0},
                          {"bmi", FeatureKind::numeric, 1.0}});
  }

  void validate() const {
    if (egos < 1) throw ConfigError("synth: egos must be at least 1");
    if (schema.size() == 0) throw ConfigError("synth: schema must declare at least one feature");
    if (mode == CommunityMode::budget && k_real < 1)
      throw ConfigError("synth: k_real must be at least 1");
    if (mode == CommunityMode::fixed && fixed_c < 1)
      throw ConfigError("synth: communities per ego must be at least 1");
    sizes.validate();
    if (!(intra_density > 0.0 && intra_density <= 1.0))
      throw ConfigError("synth: intra-community density must be in (0,1]");
    if (!(inter_density >= 0.0 && inter_density <= 1.0))
      throw ConfigError("synth: inter-community density must be in [0,1]");
    if (missing_rates.size() != schema.size())
      throw ConfigError("synth: missing rates not aligned to schema");
    for (double r : missing_rates)
      if (!(r >= 0.0 && r < 1.0)) throw ConfigError("synth: missing rates must be in [0,1)");
    if (categorical_cardinality < 2)
      throw ConfigError("synth: categorical cardinality must be at least 2");
    if (tick_seconds < 1) throw ConfigError("synth: tick_seconds must be positive");
    if (overlap.bump < 0.0) throw ConfigError("synth: overlap bump must be non-negative");
    // every (s, n) must be a valid match probability
    for (std::uint32_t s : {sizes.s_min, sizes.s_max}) {
      const double hi = model_order_overlap(s, 1, overlap);
      if (!(hi >= 0.0 && hi <= 1.0))
        throw ConfigError("synth: overlap parameters produce match probability outside [0,1]");
    }
  }

  static SynthConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(std::string("synth config: unknown key '") + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synth config: top level must be a JSON object");
  detail::require_keys(j,
                       {"egos", "seed", "schema", "communities_per_ego", "community_sizes",
                        "overlap", "intra_density", "inter_density", "missing_rates",
                        "categorical_cardinality", "start_id", "epoch", "tick_seconds"},
                       "top level");
  SynthConfig cfg;
  try {
    cfg.egos = j.value("egos", cfg.egos);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.schema = j.contains("schema") ? FeatureSchema::parse_json(j.at("schema").dump())
                                      : default_schema();
    if (j.contains("communities_per_ego")) {
      const auto& c = j.at("communities_per_ego");
      detail::require_keys(c, {"mode", "k_real", "c"}, "communities_per_ego");
      const std::string mode = c.value("mode", "budget");
      if (mode == "budget") {
        cfg.mode = CommunityMode::budget;
        cfg.k_real = c.value("k_real", cfg.k_real);
      } else if (mode == "fixed") {
        cfg.mode = CommunityMode::fixed;
        cfg.fixed_c = c.value("c", cfg.fixed_c);
      } else {
        throw ConfigError("synth config: communities_per_ego.mode must be 'budget' or 'fixed'");
      }
    }
    if (j.contains("community_sizes")) {
      const auto& s = j.at("community_sizes");
      detail::require_keys(s, {"exponent", "s_min", "s_max"}, "community_sizes");
      cfg.sizes.exponent = s.value("exponent", cfg.sizes.exponent);
      cfg.sizes.s_min = s.value("s_min", cfg.sizes.s_min);
      cfg.sizes.s_max = s.value("s_max", cfg.sizes.s_max);
    }
    if (j.contains("overlap")) {
      const auto& o = j.at("overlap");
      detail::require_keys(o, {"amplitude", "shape", "saturation", "bump", "shift"}, "overlap");
      cfg.overlap.amplitude = o.value("amplitude", cfg.overlap.amplitude);
      cfg.overlap.shape = o.value("shape", cfg.overlap.shape);
      cfg.overlap.saturation = o.value("saturation", cfg.overlap.saturation);
      cfg.overlap.bump = o.value("bump", cfg.overlap.bump);
      cfg.overlap.shift = o.value("shift", cfg.overlap.shift);
    }
    cfg.intra_density = j.value("intra_density", cfg.intra_density);
    cfg.inter_density = j.value("inter_density", cfg.inter_density);
    cfg.missing_rates.assign(cfg.schema.size(), 0.0);
    if (j.contains("missing_rates")) {
      for (auto it = j.at("missing_rates").begin(); it != j.at("missing_rates").end(); ++it) {
        auto f = cfg.schema.index_of(it.key());
        if (!f)
          throw ConfigError("synth config: missing_rates names unknown feature '" + it.key() + "'");
        cfg.missing_rates[*f] = it.value().get<double>();
      }
    }
    cfg.categorical_cardinality = j.value("categorical_cardinality", cfg.categorical_cardinality);
    cfg.start_id = j.value("start_id", cfg.start_id);
    cfg.epoch = j.value("epoch", cfg.epoch);
    cfg.tick_seconds = j.value("tick_seconds", cfg.tick_seconds);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json SynthConfig::to_json() const {
  nlohmann::json j;
  j["egos"] = egos;
  j["seed"] = seed;
  j["schema"] = nlohmann::json::parse(schema.to_json());
  if (mode == CommunityMode::budget)
    j["communities_per_ego"] = {{"mode", "budget"}, {"k_real", k_real}};
  else
    j["communities_per_ego"] = {{"mode", "fixed"}, {"c", fixed_c}};
  j["community_sizes"] = {{"exponent", sizes.exponent}, {"s_min", sizes.s_min}, {"s_max", sizes.s_max}};
  j["overlap"] = {{"amplitude", overlap.amplitude},
                  {"shape", overlap.shape},
                  {"saturation", overlap.saturation},
                  {"bump", overlap.bump},
                  {"shift", overlap.shift}};
  j["intra_density"] = intra_density;
  j["inter_density"] = inter_density;
  nlohmann::json mr = nlohmann::json::object();
  for (std::size_t f = 0; f < schema.size(); ++f)
    if (missing_rates[f] > 0.0) mr[schema.at(f).name] = missing_rates[f];
  j["missing_rates"] = mr;
  j["categorical_cardinality"] = categorical_cardinality;
  j["start_id"] = start_id;
  j["epoch"] = epoch;
  j["tick_seconds"] = tick_seconds;
  return j;
}

struct TruthRow {
  NodeId ego = 0;
  NodeId alter = 0;
  std::uint32_t community_label = 0;  // per-ego community index, 0-based
  std::uint32_t accession_rank = 0;   // 1-based step at which the alter joined
};

struct SynthStats {
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::uint64_t communities = 0;
};

namespace detail {

inline void append_u64(std::string& s, std::uint64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
}

inline void append_i64(std::string& s, std::int64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, r.ptr);
}

inline void append_real(std::string& s, double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  s.append(buf, static_cast<std::size_t>(n));
}

}  // namespace detail

// Writes edges.csv, profiles.csv and the truth sidecar for one population.
// Single pass in ego-id order with one RNG substream per ego, so output is
// byte-identical for a fixed config.
inline SynthStats generate_population(const SynthConfig& cfg, std::ostream& edges_out,
                                      std::ostream& profiles_out, std::ostream& truth_out) {
  cfg.validate();
  const SizeSampler sampler(cfg.sizes);
  const std::size_t nf = cfg.schema.size();

  std::string header = "id";
  for (std::size_t f = 0; f < nf; ++f) header += "," + cfg.schema.at(f).name;
  edges_out << "src,dst,ts\n";
  profiles_out << header << '\n';
  truth_out << "ego,alter,community_label,accession_rank\n";

  SynthStats stats;
  std::string line;
  std::vector<std::uint32_t> sizes, offset, rank;
  // per-feature ego values: a categorical code or a numeric value
  std::vector<std::uint32_t> ego_cat(nf);
  std::vector<double> ego_num(nf);
  std::vector<bool> missing(nf);

  const Timestamp tick = cfg.tick_seconds;
  NodeId next_id = cfg.start_id;

  auto emit_profile = [&](NodeId id) {
    line.clear();
    detail::append_u64(line, id);
    for (std::size_t f = 0; f < nf; ++f) {
      line += ',';
      if (missing[f]) continue;
      if (cfg.schema.at(f).kind == FeatureKind::categorical) {
        line += 'c';
        detail::append_u64(line, ego_cat[f]);
      } else {
        detail::append_real(line, ego_num[f]);
      }
    }
    line += '\n';
    profiles_out << line;
  };

  for (std::uint64_t e = 0; e < cfg.egos; ++e) {
    Rng rng(cfg.seed, e);

    // 1. community layout
    if (cfg.mode == SynthConfig::CommunityMode::budget) {
      sizes = sample_community_sizes(cfg.k_real, sampler, rng);
    } else {
      sizes.resize(cfg.fixed_c);
      for (auto& s : sizes) s = sampler.sample(rng);
    }
    const std::size_t c = sizes.size();
    offset.assign(c, 0);
    std::uint32_t k = 0;
    for (std::size_t r = 0; r < c; ++r) {
      offset[r] = k;
      k += sizes[r];
    }

    const NodeId ego_id = next_id;
    ++next_id;
    const NodeId alter_base = next_id;
    next_id += k;
    stats.nodes += 1 + k;
    stats.communities += c;

    // 2. accession ranks from the growth procedure
    rank.assign(k, 0);
    detail::run_growth(sizes, rng, [&](std::uint32_t r, std::uint32_t n, std::uint32_t step) {
      rank[offset[r] + n - 1] = step;
    });

    // 3. ego profile (values first, then missingness)
    for (std::size_t f = 0; f < nf; ++f) {
      if (cfg.schema.at(f).kind == FeatureKind::categorical)
        ego_cat[f] = static_cast<std::uint32_t>(rng.below(cfg.categorical_cardinality));
      else
        ego_num[f] = rng.uniform() * 100.0;
    }
    const std::vector<std::uint32_t> base_cat = ego_cat;
    const std::vector<double> base_num = ego_num;
    for (std::size_t f = 0; f < nf; ++f)
      missing[f] = cfg.missing_rates[f] > 0.0 && rng.uniform() < cfg.missing_rates[f];
    emit_profile(ego_id);

    // 4. alters: traits agree with the ego feature-wise with probability
    //    o_s(n); timestamps place each alter at its accession step
    for (std::size_t r = 0; r < c; ++r) {
      for (std::uint32_t n = 1; n <= sizes[r]; ++n) {
        const std::uint32_t member = offset[r] + n - 1;
        const NodeId alter_id = alter_base + member;
        const double p = model_order_overlap(sizes[r], n, cfg.overlap);
        for (std::size_t f = 0; f < nf; ++f) {
          const FeatureDef& def = cfg.schema.at(f);
          const bool match = rng.uniform() < p;
          if (def.kind == FeatureKind::categorical) {
            if (match) {
              ego_cat[f] = base_cat[f];
            } else {
              auto other = static_cast<std::uint32_t>(rng.below(cfg.categorical_cardinality - 1));
              ego_cat[f] = other >= base_cat[f] ? other + 1 : other;
            }
          } else {
            const double tol = def.tolerance;
            if (match) {
              ego_num[f] = base_num[f] + (2.0 * rng.uniform() - 1.0) * tol;
            } else {
              const double off = tol + 0.001 + rng.uniform() * (tol + 1.0);
              ego_num[f] = rng.below(2) ? base_num[f] + off : base_num[f] - off;
            }
          }
        }
        for (std::size_t f = 0; f < nf; ++f)
          missing[f] = cfg.missing_rates[f] > 0.0 && rng.uniform() < cfg.missing_rates[f];
        emit_profile(alter_id);

        line.clear();
        detail::append_u64(line, ego_id);
        line += ',';
        detail::append_u64(line, alter_id);
        line += ',';
        detail::append_i64(line, cfg.epoch + static_cast<Timestamp>(rank[member]) * tick);
        line += '\n';
        edges_out << line;
        ++stats.edges;

        line.clear();
        detail::append_u64(line, ego_id);
        line += ',';
        detail::append_u64(line, alter_id);
        line += ',';
        detail::append_u64(line, r);
        line += ',';
        detail::append_u64(line, rank[member]);
        line += '\n';
        truth_out << line;
      }
    }

    // 5. alter-alter edges: dense inside communities, sparse across; an edge
    //    appears when its later endpoint joins
    auto emit_edge = [&](std::uint32_t a, std::uint32_t b) {
      const Timestamp t = cfg.epoch + static_cast<Timestamp>(std::max(rank[a], rank[b])) * tick;
      line.clear();
      detail::append_u64(line, alter_base + a);
      line += ',';
      detail::append_u64(line, alter_base + b);
      line += ',';
      detail::append_i64(line, t);
      line += '\n';
      edges_out << line;
      ++stats.edges;
    };
    for (std::size_t r = 0; r < c; ++r) {
      for (std::uint32_t i = offset[r]; i < offset[r] + sizes[r]; ++i)
        for (std::uint32_t j = i + 1; j < offset[r] + sizes[r]; ++j)
          if (rng.uniform() < cfg.intra_density) emit_edge(i, j);
    }
    if (cfg.inter_density > 0.0) {
      for (std::size_t r1 = 0; r1 < c; ++r1)
        for (std::size_t r2 = r1 + 1; r2 < c; ++r2)
          for (std::uint32_t i = offset[r1]; i < offset[r1] + sizes[r1]; ++i)
            for (std::uint32_t j = offset[r2]; j < offset[r2] + sizes[r2]; ++j)
              if (rng.uniform() < cfg.inter_density) emit_edge(i, j);
    }
  }
  return stats;
}

// Reads a truth sidecar back; tolerant of manifest comment lines.
inline std::vector<TruthRow> read_truth(std::istream& in) {
  std::vector<TruthRow> rows;
  std::string line;
  bool header_seen = false;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (sv.substr(0, 3) == "ego") continue;
    }
    TruthRow r;
    std::size_t pos = 0;
    std::uint64_t vals[4];
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = sv.find(',', pos);
      const std::string_view tok =
          sv.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), vals[f]);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw DataError("truth file: malformed line " + std::to_string(line_no));
      if (f < 3 && comma == std::string_view::npos)
        throw DataError("truth file: malformed line " + std::to_string(line_no));
      pos = comma + 1;
    }
    r.ego = vals[0];
    r.alter = vals[1];
    r.community_label = static_cast<std::uint32_t>(vals[2]);
    r.accession_rank = static_cast<std::uint32_t>(vals[3]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace egonet
