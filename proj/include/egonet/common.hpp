#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace egonet {

// External user id as it appears in input files.
using NodeId = std::uint64_t;
// Dense internal index assigned at ingest.
using NodeIndex = std::uint32_t;
// Edge creation time, integer epoch seconds (or a line-number pseudo-time).
using Timestamp = std::int64_t;

// Bad flags, bad config files, infeasible parameter combinations. Exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or unusable input data. Exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// FNV-1a, used for input digests in run manifests.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace egonet
