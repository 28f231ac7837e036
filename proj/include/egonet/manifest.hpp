#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egonet/common.hpp"
#include "egonet/curves.hpp"
#include "egonet/version.hpp"

namespace egonet {

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  return h;
}

}  // namespace detail

// Provenance block embedded at the top of every artifact as `#` comment
// lines: tool version, subcommand, seed, resolved configuration, input
// digests, and a digest over all of those. The wall-clock line is the only
// part that varies between identical reruns and is excluded from the digest.
struct RunManifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // label -> digest hex

  void set(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
  void set(const std::string& key, std::uint64_t value) {
    config.emplace_back(key, std::to_string(value));
  }
  void set(const std::string& key, double value) {
    config.emplace_back(key, detail::format_real(value));
  }

  void add_input(const std::string& label, const std::filesystem::path& path) {
    inputs.emplace_back(label, detail::hex64(detail::fnv1a_file(path)));
  }

  // stable lines, excluding wall-clock
  std::vector<std::string> stable_lines() const {
    std::vector<std::string> lines;
    lines.push_back(std::string("# tool: egonet ") + kVersion);
    lines.push_back("# subcommand: " + subcommand);
    lines.push_back("# seed: " + std::to_string(seed));
    for (const auto& [k, v] : config) lines.push_back("# config " + k + ": " + v);
    for (const auto& [k, v] : inputs) lines.push_back("# input " + k + ": fnv1a " + v);
    return lines;
  }

  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& l : stable_lines()) {
      h = fnv1a(l, h);
      h = fnv1a("\n", h);
    }
    return h;
  }

  void write(std::ostream& out) const {
    for (const auto& l : stable_lines()) out << l << '\n';
    out << "# manifest-digest: " << detail::hex64(digest()) << '\n';
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    out << "# wallclock: " << buf << '\n';
  }
};

// Writes to `<path>.tmp` and renames into place on commit, so readers never
// observe a half-written artifact and failed runs leave no partial output.
class ArtifactWriter {
public:
  explicit ArtifactWriter(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot open " + tmp_.string() + " for writing");
  }

  ~ArtifactWriter() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw DataError("write failed for " + tmp_.string());
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

// Standard curve artifact: manifest comments, a low-count advisory when any
// bin rests on a single observation, the fixed header, then one row per bin.
inline void write_curve_csv(std::ostream& out, const RunManifest& manifest,
                            std::span<const CurveBin> rows) {
  manifest.write(out);
  std::string low;
  for (const CurveBin& b : rows)
    if (b.low_count) {
      if (!low.empty()) low += ',';
      low += std::to_string(b.bin);
    }
  if (!low.empty()) out << "# low-count-bins: " << low << '\n';
  out << "bin,mean,count,stderr\n";
  for (const CurveBin& b : rows) {
    out << b.bin << ',' << detail::format_real(b.mean) << ',' << b.count << ','
        << detail::format_real(b.stderr_mean) << '\n';
  }
}

}  // namespace egonet
