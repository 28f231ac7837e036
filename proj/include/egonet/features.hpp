#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "egonet/common.hpp"
#include "json.hpp"

namespace egonet {

enum class FeatureKind : std::uint8_t { categorical, numeric };

// One metadata dimension: a categorical feature matches on exact token
// equality, a numeric feature matches within +/- tolerance.
struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  double tolerance = 0.0;  // numeric kind only, same units as the trait
};

class FeatureSchema {
public:
  FeatureSchema() = default;

  explicit FeatureSchema(std::vector<FeatureDef> defs) : defs_(std::move(defs)) {
    std::unordered_set<std::string> seen;
    for (const auto& d : defs_) {
      if (d.name.empty()) throw ConfigError("schema: feature with empty name");
      if (!seen.insert(d.name).second)
        throw ConfigError("schema: duplicate feature name '" + d.name + "'");
      if (d.kind == FeatureKind::numeric && !(d.tolerance >= 0.0))
        throw ConfigError("schema: negative tolerance for feature '" + d.name + "'");
      if (d.kind == FeatureKind::categorical && d.tolerance != 0.0)
        throw ConfigError("schema: tolerance given for categorical feature '" + d.name + "'");
    }
  }

  // Schema file format: [{"name": ..., "kind": "cat"|"num", "tolerance": x}, ...]
  static FeatureSchema parse_json(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("schema: top-level value must be an array");
    std::vector<FeatureDef> defs;
    for (const auto& item : j) {
      FeatureDef d;
      d.name = item.value("name", std::string{});
      std::string kind = item.value("kind", std::string{});
      if (kind == "cat") {
        d.kind = FeatureKind::categorical;
        if (item.contains("tolerance"))
          throw ConfigError("schema: tolerance given for categorical feature '" + d.name + "'");
      } else if (kind == "num") {
        d.kind = FeatureKind::numeric;
        if (!item.contains("tolerance"))
          throw ConfigError("schema: numeric feature '" + d.name + "' needs a tolerance");
        d.tolerance = item["tolerance"].get<double>();
      } else {
        throw ConfigError("schema: feature '" + d.name + "' has unknown kind '" + kind + "'");
      }
      defs.push_back(std::move(d));
    }
    return FeatureSchema(std::move(defs));
  }

  static FeatureSchema load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("schema: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str());
  }

  std::string to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : defs_) {
      nlohmann::json item;
      item["name"] = d.name;
      item["kind"] = d.kind == FeatureKind::categorical ? "cat" : "num";
      if (d.kind == FeatureKind::numeric) item["tolerance"] = d.tolerance;
      j.push_back(std::move(item));
    }
    return j.dump();
  }

  std::size_t size() const { return defs_.size(); }
  const FeatureDef& at(std::size_t i) const { return defs_.at(i); }
  const std::vector<FeatureDef>& defs() const { return defs_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < defs_.size(); ++i)
      if (defs_[i].name == name) return i;
    return std::nullopt;
  }

private:
  std::vector<FeatureDef> defs_;
};

// A trait is either a categorical token code, a finite real, or MISSING.
// MISSING is explicit; it never participates in a match.
class TraitValue {
public:
  TraitValue() = default;

  static TraitValue missing() { return TraitValue(); }

  static TraitValue categorical(std::uint32_t code) {
    TraitValue v;
    v.tag_ = Tag::categorical;
    v.code_ = code;
    return v;
  }

  static TraitValue numeric(double value) {
    if (!std::isfinite(value)) throw DataError("numeric trait must be finite");
    TraitValue v;
    v.tag_ = Tag::numeric;
    v.value_ = value;
    return v;
  }

  bool is_missing() const { return tag_ == Tag::missing; }
  bool is_categorical() const { return tag_ == Tag::categorical; }
  bool is_numeric() const { return tag_ == Tag::numeric; }

  std::uint32_t code() const { return code_; }
  double value() const { return value_; }

private:
  enum class Tag : std::uint8_t { missing, categorical, numeric };
  Tag tag_ = Tag::missing;
  std::uint32_t code_ = 0;
  double value_ = 0.0;
};

struct Profile {
  NodeId id = 0;
  std::vector<TraitValue> traits;  // aligned to schema order
};

// Interns categorical tokens of one feature; codes are only comparable
// within the pool they came from.
class TokenPool {
public:
  std::uint32_t intern(std::string_view token) {
    auto it = index_.find(std::string(token));
    if (it != index_.end()) return it->second;
    auto code = static_cast<std::uint32_t>(tokens_.size());
    tokens_.emplace_back(token);
    index_.emplace(tokens_.back(), code);
    return code;
  }

  std::optional<std::uint32_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(std::uint32_t code) const { return tokens_.at(code); }
  std::size_t size() const { return tokens_.size(); }

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Pairwise matching function: 1 for matching traits, 0 otherwise.
// Categorical traits match on token identity, numeric traits within
// |a - b| <= tolerance (inclusive). Callers must pre-filter MISSING.
inline bool trait_match(const FeatureDef& def, const TraitValue& a, const TraitValue& b) {
  if (a.is_missing() || b.is_missing())
    throw DataError("trait_match called with MISSING trait for feature '" + def.name + "'");
  if (def.kind == FeatureKind::categorical) return a.code() == b.code();
  return std::fabs(a.value() - b.value()) <= def.tolerance;
}

struct LinkOverlap {
  double value = 0.0;              // fraction of mutually available features that match
  std::uint32_t shared_features = 0;  // |F_ij|
};

// Mean of the matching function over features available in both profiles.
// Returns nullopt when the two profiles share no feature; such pairs are
// excluded from all downstream aggregation.
inline std::optional<LinkOverlap> link_overlap(const Profile& a, const Profile& b,
                                               const FeatureSchema& schema) {
  std::uint32_t shared = 0;
  std::uint32_t matches = 0;
  const std::size_t n = schema.size();
  for (std::size_t f = 0; f < n; ++f) {
    const TraitValue& va = a.traits[f];
    const TraitValue& vb = b.traits[f];
    if (va.is_missing() || vb.is_missing()) continue;
    ++shared;
    if (trait_match(schema.at(f), va, vb)) ++matches;
  }
  if (shared == 0) return std::nullopt;
  return LinkOverlap{static_cast<double>(matches) / shared, shared};
}

// Mean link overlap between an ego and a subset of its alters, skipping
// alters that share no feature with the ego. Returns nullopt when nothing
// remains after the skip (an undefined overlap, excluded from curves).
template <typename ProfileRange>
std::optional<double> subset_overlap(const Profile& ego, const ProfileRange& subset,
                                     const FeatureSchema& schema) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Profile& alter : subset) {
    if (auto o = link_overlap(ego, alter, schema)) {
      sum += o->value;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace egonet
