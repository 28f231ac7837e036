// Command-line front end: ingest -> detect -> overlap / order-stats for the
// empirical pipeline, plus simulate / model-curve / synth for the model side.
// Exit codes: 0 ok, 2 configuration error, 3 data error, 1 internal error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "egonet/egonet.hpp"

namespace {

using namespace egonet;

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  std::random_device rd;  // recorded in the manifest so the run stays reproducible
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<NodeId> read_ego_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ego list " + path.string());
  std::vector<NodeId> egos;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    NodeId id{};
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), id);
    if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
      throw DataError("ego list " + path.string() + ": bad id at line " + std::to_string(line_no));
    egos.push_back(id);
  }
  return egos;
}

// communities.csv rows: ego,alter,community_index,codelength
void write_communities_csv(const std::filesystem::path& path, const RunManifest& manifest,
                           std::span<const CommunityAssignment> assignments) {
  ArtifactWriter w(path);
  manifest.write(w.stream());
  w.stream() << "ego,alter,community_index,codelength\n";
  std::string line;
  for (const CommunityAssignment& a : assignments) {
    const std::string code = detail::format_real(a.codelength);
    for (std::size_t c = 0; c < a.communities.size(); ++c) {
      for (NodeId alter : a.communities[c]) {
        line.clear();
        line += std::to_string(a.ego);
        line += ',';
        line += std::to_string(alter);
        line += ',';
        line += std::to_string(c);
        line += ',';
        line += code;
        line += '\n';
        w.stream() << line;
      }
    }
  }
  w.commit();
}

std::vector<CommunityAssignment> read_communities_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open communities file " + path.string());
  std::vector<CommunityAssignment> out;
  std::unordered_map<NodeId, std::size_t> slot;
  std::string line;
  std::uint64_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (sv.substr(0, 3) == "ego") continue;
    }
    const auto bad = [&]() {
      return DataError(path.string() + ": malformed row at line " + std::to_string(line_no));
    };
    std::uint64_t ego, alter, index;
    double code;
    std::size_t pos = 0;
    auto next = [&](bool last) -> std::string_view {
      if (pos > sv.size()) throw bad();
      const std::size_t comma = sv.find(',', pos);
      if (!last && comma == std::string_view::npos) throw bad();
      auto tok = sv.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                : comma - pos);
      pos = comma == std::string_view::npos ? sv.size() + 1 : comma + 1;
      return tok;
    };
    auto parse_u64 = [&](std::string_view tok, std::uint64_t& v) {
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) throw bad();
    };
    parse_u64(next(false), ego);
    parse_u64(next(false), alter);
    parse_u64(next(false), index);
    auto tok = next(true);
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), code);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) throw bad();

    auto [it, fresh] = slot.try_emplace(ego, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().ego = ego;
    }
    CommunityAssignment& a = out[it->second];
    a.codelength = code;
    if (a.communities.size() <= index) a.communities.resize(index + 1);
    a.communities[index].push_back(alter);
  }
  for (const auto& a : out)
    for (const auto& c : a.communities)
      if (c.empty())
        throw DataError(path.string() + ": ego " + std::to_string(a.ego) +
                        " has a gap in community indices");
  return out;
}

std::filesystem::path store_graph_file(const std::filesystem::path& dir) {
  return dir / "graph.bin";
}

// ---------------------------------------------------------------- ingest --

int run_ingest(const std::filesystem::path& edges, const std::filesystem::path& profiles,
               const std::filesystem::path& schema_path, const std::filesystem::path& out) {
  RunManifest manifest;
  manifest.subcommand = "ingest";
  manifest.add_input("edges", edges);
  const bool with_profiles = !profiles.empty();
  if (with_profiles != !schema_path.empty())
    throw ConfigError("--profiles and --schema must be given together");

  std::ifstream ein(edges);
  if (!ein) throw ConfigError("cannot open edges file " + edges.string());
  SocialGraph g = ingest_edges(ein);

  if (with_profiles) {
    manifest.add_input("profiles", profiles);
    manifest.add_input("schema", schema_path);
    FeatureSchema schema = FeatureSchema::load(schema_path);
    std::ifstream pin(profiles);
    if (!pin) throw ConfigError("cannot open profiles file " + profiles.string());
    ingest_profiles(pin, schema, g);
  }

  save_store(g, out);
  {
    ArtifactWriter w(out / "manifest.txt");
    manifest.write(w.stream());
    w.commit();
  }
  const IngestStats& st = g.stats();
  std::cerr << "ingest: " << g.node_count() << " nodes, " << g.edge_count() << " edges ("
            << st.self_loops_dropped << " self-loops dropped, " << st.duplicates_collapsed
            << " duplicates collapsed, " << st.malformed_lines << " malformed lines)\n";
  if (with_profiles) {
    const auto avail = g.profiles().availability();
    std::cerr << "ingest: profile availability:";
    for (std::size_t f = 0; f < avail.size(); ++f)
      std::cerr << ' ' << g.profiles().schema().at(f).name << '='
                << static_cast<int>(avail[f] * 100.0 + 0.5) << '%';
    std::cerr << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- detect --

int run_detect(const std::filesystem::path& store, std::optional<std::uint64_t> seed_flag,
               int trials, const std::filesystem::path& out, const std::filesystem::path& ego_file,
               std::optional<std::uint32_t> kmin, std::optional<std::uint32_t> kmax,
               std::optional<std::int64_t> min_span, unsigned threads) {
  if (trials < 1) throw ConfigError("--trials must be at least 1");
  const std::uint64_t seed = pick_seed(seed_flag);
  SocialGraph g = load_store(store);

  std::vector<NodeId> egos;
  if (!ego_file.empty()) {
    if (kmin || kmax || min_span)
      throw ConfigError("--egos cannot be combined with degree/span filters");
    egos = read_ego_file(ego_file);
  } else {
    EgoFilter filter;
    if (kmin || kmax) {
      filter.degree_range = {kmin.value_or(1), kmax.value_or(UINT32_MAX)};
    }
    if (min_span) filter.min_activity_span = *min_span;
    egos = filter_egos(g, filter);
  }

  RunManifest manifest;
  manifest.subcommand = "detect";
  manifest.seed = seed;
  manifest.add_input("store", store_graph_file(store));
  manifest.set("trials", static_cast<std::uint64_t>(trials));
  manifest.set("egos", static_cast<std::uint64_t>(egos.size()));
  if (!ego_file.empty()) manifest.add_input("ego-list", ego_file);
  if (kmin) manifest.set("kmin", static_cast<std::uint64_t>(*kmin));
  if (kmax) manifest.set("kmax", static_cast<std::uint64_t>(*kmax));
  if (min_span) manifest.set("min-span-seconds", static_cast<std::uint64_t>(*min_span));

  std::vector<CommunityAssignment> results(egos.size());
  parallel_for(egos.size(), threads, [&](std::size_t i) {
    const EgoNetwork net = extract_ego_network(g, egos[i]);
    results[i] = detect_communities(net, substream_seed(seed, egos[i]), trials);
  });

  write_communities_csv(out, manifest, results);
  std::cerr << "detect: " << egos.size() << " egos, seed " << seed << "\n";
  return 0;
}

// --------------------------------------------------------------- overlap --

int run_overlap(const std::filesystem::path& store, const std::filesystem::path& communities,
                const std::string& curve, std::optional<std::uint32_t> size,
                const std::filesystem::path& out) {
  SocialGraph g = load_store(store);
  std::vector<CommunityAssignment> assignments = read_communities_csv(communities);

  RunManifest manifest;
  manifest.subcommand = "overlap";
  manifest.add_input("store", store_graph_file(store));
  manifest.add_input("communities", communities);
  manifest.set("curve", curve);

  BinnedCurve result;
  if (curve == "s") {
    result = community_overlap_curve(g, assignments);
  } else if (curve == "k") {
    std::vector<NodeId> egos;
    egos.reserve(assignments.size());
    for (const auto& a : assignments) egos.push_back(a.ego);
    result = ego_overlap_curve(g, egos);
  } else if (curve == "order") {
    if (!size) throw ConfigError("--curve order requires --size S");
    manifest.set("size", static_cast<std::uint64_t>(*size));
    result = appearance_order_curve(g, assignments, *size);
  } else {
    throw ConfigError("--curve must be one of s, k, order");
  }

  ArtifactWriter w(out);
  const auto rows = result.bins();
  write_curve_csv(w.stream(), manifest, rows);
  w.commit();
  std::cerr << "overlap: " << rows.size() << " bins\n";
  return 0;
}

// ----------------------------------------------------------- order-stats --

int run_order_stats(const std::filesystem::path& store, const std::filesystem::path& communities,
                    std::uint32_t c, std::uint32_t mmax, const std::filesystem::path& out) {
  if (c < 1) throw ConfigError("--c must be at least 1");
  SocialGraph g = load_store(store);
  std::vector<CommunityAssignment> assignments = read_communities_csv(communities);

  RunManifest manifest;
  manifest.subcommand = "order-stats";
  manifest.add_input("store", store_graph_file(store));
  manifest.add_input("communities", communities);
  manifest.set("c", static_cast<std::uint64_t>(c));
  manifest.set("mmax", static_cast<std::uint64_t>(mmax));

  std::vector<FirstAppearanceSample> samples;
  samples.reserve(assignments.size());
  for (const auto& a : assignments) {
    const EgoNetwork net = extract_ego_network(g, a.ego);
    samples.push_back(first_appearance_orders(net, a));
  }
  const auto rows = pcm_distribution(samples, c);
  std::uint64_t matching = 0;
  for (const auto& s : samples)
    if (s.c == c) ++matching;

  ArtifactWriter w(out);
  manifest.write(w.stream());
  w.stream() << "# egos-with-c: " << matching << '\n';
  const auto fit = fit_exponential_scale(rows, mmax);
  if (c >= 2 && fit) {
    w.stream() << "# fit-m0: " << detail::format_real(fit->m0) << '\n';
    w.stream() << "# fit-r-squared: " << detail::format_real(fit->r_squared) << '\n';
    w.stream() << "# fit-bins-used: " << fit->bins_used << '\n';
    w.stream() << "# fit-m-max: " << fit->m_max << '\n';
    const double exact = -1.0 / std::log(1.0 - 1.0 / static_cast<double>(c));
    w.stream() << "# geometric-scale-exact: " << detail::format_real(exact) << '\n';
    w.stream() << "# geometric-scale-large-c: " << c << '\n';
  } else {
    w.stream() << "# fit: none\n";
  }
  std::string low;
  for (const CurveBin& b : rows)
    if (b.low_count) {
      if (!low.empty()) low += ',';
      low += std::to_string(b.bin);
    }
  if (!low.empty()) w.stream() << "# low-count-bins: " << low << '\n';
  w.stream() << "bin,mean,count,stderr\n";
  for (const CurveBin& b : rows)
    w.stream() << b.bin << ',' << detail::format_real(b.mean) << ',' << b.count << ','
               << detail::format_real(b.stderr_mean) << '\n';
  w.commit();
  std::cerr << "order-stats: " << matching << " egos with c=" << c
            << (fit && c >= 2 ? ", m0=" + std::to_string(fit->m0) : ", no fit") << "\n";
  return 0;
}

// -------------------------------------------------------------- simulate --

int run_simulate(std::uint32_t kreal, std::uint32_t egos, std::optional<std::uint64_t> seed_flag,
                 const std::filesystem::path& out, unsigned threads) {
  ModelConfig cfg;
  cfg.k_real = kreal;
  cfg.ensemble = egos;
  cfg.seed = pick_seed(seed_flag);
  cfg.validate();

  RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.seed = cfg.seed;
  manifest.set("kreal", static_cast<std::uint64_t>(cfg.k_real));
  manifest.set("egos", static_cast<std::uint64_t>(cfg.ensemble));

  const BinnedCurve curve = simulate_ensemble(cfg, threads);
  ArtifactWriter w(out);
  const auto rows = curve.bins();
  write_curve_csv(w.stream(), manifest, rows);
  w.commit();
  std::cerr << "simulate: " << cfg.ensemble << " egos at k_real=" << cfg.k_real << ", seed "
            << cfg.seed << "\n";
  return 0;
}

// ------------------------------------------------------------ model-curve --

int run_model_curve(const std::string& what, std::optional<std::uint32_t> size,
                    std::uint32_t smax, const std::filesystem::path& out) {
  RunManifest manifest;
  manifest.subcommand = "model-curve";
  manifest.set("what", what);

  std::vector<CurveBin> rows;
  if (what == "os") {
    manifest.set("smax", static_cast<std::uint64_t>(smax));
    for (std::uint32_t s = 1; s <= smax; ++s)
      rows.push_back({static_cast<std::int64_t>(s), model_community_overlap(s), 1, 0.0, false});
  } else if (what == "osn") {
    if (!size) throw ConfigError("--what osn requires --size S");
    manifest.set("size", static_cast<std::uint64_t>(*size));
    for (std::uint32_t n = 1; n <= *size; ++n)
      rows.push_back({static_cast<std::int64_t>(n), model_order_overlap(*size, n), 1, 0.0, false});
  } else {
    throw ConfigError("--what must be os or osn");
  }

  ArtifactWriter w(out);
  write_curve_csv(w.stream(), manifest, rows);
  w.commit();
  return 0;
}

// ----------------------------------------------------------------- synth --

int run_synth(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_flag) {
  std::ifstream cin_(config_path);
  if (!cin_) throw ConfigError("cannot open config " + config_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(cin_);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth config: invalid JSON: ") + e.what());
  }
  SynthConfig cfg = SynthConfig::from_json(j);
  if (seed_flag) cfg.seed = *seed_flag;  // command line wins over the config file

  RunManifest manifest;
  manifest.subcommand = "synth";
  manifest.seed = cfg.seed;
  manifest.add_input("config", config_path);
  manifest.set("resolved-config", cfg.to_json().dump());

  std::filesystem::create_directories(out_dir);
  ArtifactWriter edges(out_dir / "edges.csv");
  ArtifactWriter profiles(out_dir / "profiles.csv");
  ArtifactWriter truth(out_dir / "truth.csv");
  manifest.write(edges.stream());
  manifest.write(profiles.stream());
  manifest.write(truth.stream());
  const SynthStats stats = generate_population(cfg, edges.stream(), profiles.stream(),
                                               truth.stream());
  edges.commit();
  profiles.commit();
  truth.commit();
  std::cerr << "synth: " << stats.nodes << " nodes, " << stats.edges << " edges, "
            << stats.communities << " planted communities (seed " << cfg.seed << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Egocentric-network homophily toolkit: ingest/detect/overlap/order-stats for "
               "empirical data, simulate/model-curve/synth for the growth model"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for all subcommands");

  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all hardware threads)")
      ->envname("EGONET_THREADS");

  std::optional<std::uint64_t> seed;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build a binary store from CSV edge/profile lists");
  std::filesystem::path in_edges, in_profiles, in_schema, ingest_out;
  ingest->add_option("--edges", in_edges, "edges.csv with header src,dst[,ts]")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--profiles", in_profiles, "profiles.csv with header id,<features>")
      ->check(CLI::ExistingFile);
  ingest->add_option("--schema", in_schema, "feature schema JSON")->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "store output directory")->required();

  // detect
  auto* detect = app.add_subcommand("detect", "Detect egocentric communities per ego");
  std::filesystem::path det_store, det_out, det_egos;
  int det_trials = 10;
  std::optional<std::uint32_t> det_kmin, det_kmax;
  std::optional<std::int64_t> det_span;
  detect->add_option("--store", det_store, "store directory from ingest")
      ->required()
      ->check(CLI::ExistingDirectory);
  detect->add_option("--seed", seed, "global seed (omitted: entropy, recorded in manifest)")
      ->envname("EGONET_SEED");
  detect->add_option("--trials", det_trials, "optimizer restarts per ego")
      ->envname("EGONET_TRIALS");
  detect->add_option("--out", det_out, "communities.csv output")->required();
  detect->add_option("--egos", det_egos, "file with one ego id per line")
      ->check(CLI::ExistingFile);
  detect->add_option("--kmin", det_kmin, "ego filter: minimum degree");
  detect->add_option("--kmax", det_kmax, "ego filter: maximum degree");
  detect->add_option("--min-span-seconds", det_span,
                     "ego filter: minimum incident-edge activity span (OR-combined with degree)");

  // overlap
  auto* overlap = app.add_subcommand("overlap", "Aggregate overlap curves from detections");
  std::filesystem::path ov_store, ov_comm, ov_out;
  std::string ov_curve;
  std::optional<std::uint32_t> ov_size;
  overlap->add_option("--store", ov_store, "store directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  overlap->add_option("--communities", ov_comm, "communities.csv from detect")
      ->required()
      ->check(CLI::ExistingFile);
  overlap->add_option("--curve", ov_curve, "s (community size), k (degree), order (rank)")
      ->required();
  overlap->add_option("--size", ov_size, "community size for --curve order");
  overlap->add_option("--out", ov_out, "curve CSV output")->required();

  // order-stats
  auto* ostats = app.add_subcommand("order-stats",
                                    "First-appearance distribution P_c(m) and exponential fit");
  std::filesystem::path os_store, os_comm, os_out;
  std::uint32_t os_c = 0, os_mmax = 25;
  ostats->add_option("--store", os_store, "store directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  ostats->add_option("--communities", os_comm, "communities.csv from detect")
      ->required()
      ->check(CLI::ExistingFile);
  ostats->add_option("--c", os_c, "number of communities per ego to condition on")->required();
  ostats->add_option("--mmax", os_mmax, "fit window upper bound");
  ostats->add_option("--out", os_out, "pcm CSV output")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Ensemble of model egos; mean overlap vs k");
  std::uint32_t sim_kreal = 150, sim_egos = 5000;
  std::filesystem::path sim_out;
  simulate->add_option("--kreal", sim_kreal, "final degree of each simulated ego");
  simulate->add_option("--egos", sim_egos, "ensemble size");
  simulate->add_option("--seed", seed, "global seed (omitted: entropy, recorded in manifest)")
      ->envname("EGONET_SEED");
  simulate->add_option("--out", sim_out, "curve CSV output")->required();

  // model-curve
  auto* mcurve = app.add_subcommand("model-curve", "Analytic model tables");
  std::string mc_what;
  std::optional<std::uint32_t> mc_size;
  std::uint32_t mc_smax = 100;
  std::filesystem::path mc_out;
  mcurve->add_option("--what", mc_what, "os: community overlap vs s; osn: order overlap vs n")
      ->required();
  mcurve->add_option("--size", mc_size, "community size for --what osn");
  mcurve->add_option("--smax", mc_smax, "largest s for --what os");
  mcurve->add_option("--out", mc_out, "curve CSV output")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic population with ground truth");
  std::filesystem::path sy_config, sy_out;
  synth->add_option("--config", sy_config, "synth config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", seed, "overrides the seed in the config file")
      ->envname("EGONET_SEED");
  synth->add_option("--out", sy_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (*ingest) return run_ingest(in_edges, in_profiles, in_schema, ingest_out);
    if (*detect)
      return run_detect(det_store, seed, det_trials, det_out, det_egos, det_kmin, det_kmax,
                        det_span, threads);
    if (*overlap) return run_overlap(ov_store, ov_comm, ov_curve, ov_size, ov_out);
    if (*ostats) return run_order_stats(os_store, os_comm, os_c, os_mmax, os_out);
    if (*simulate) return run_simulate(sim_kreal, sim_egos, seed, sim_out, threads);
    if (*mcurve) return run_model_curve(mc_what, mc_size, mc_smax, mc_out);
    if (*synth) return run_synth(sy_config, sy_out, seed);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
