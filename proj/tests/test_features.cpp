#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "test_util.hpp"

using namespace egonet;

namespace {

Profile make_profile(NodeId id, std::vector<TraitValue> traits) {
  Profile p;
  p.id = id;
  p.traits = std::move(traits);
  return p;
}

}  // namespace

TEST_CASE("schema json round trip and validation", "[features]") {
  const char* text = R"([
    {"name": "gender", "kind": "cat"},
    {"name": "age", "kind": "num", "tolerance": 2.0}
  ])";
  auto schema = FeatureSchema::parse_json(text);
  REQUIRE(schema.size() == 2);
  CHECK(schema.at(0).kind == FeatureKind::categorical);
  CHECK(schema.at(1).tolerance == 2.0);
  CHECK(schema.index_of("age").value() == 1);
  CHECK_FALSE(schema.index_of("height").has_value());

  auto round = FeatureSchema::parse_json(schema.to_json());
  REQUIRE(round.size() == 2);
  CHECK(round.at(1).name == "age");
  CHECK(round.at(1).tolerance == 2.0);

  CHECK_THROWS_AS(FeatureSchema::parse_json("{}"), ConfigError);
  CHECK_THROWS_AS(FeatureSchema::parse_json(R"([{"name":"x","kind":"cat","tolerance":1}])"),
                  ConfigError);
  CHECK_THROWS_AS(FeatureSchema::parse_json(R"([{"name":"x","kind":"num"}])"), ConfigError);
  CHECK_THROWS_AS(
      FeatureSchema::parse_json(R"([{"name":"x","kind":"cat"},{"name":"x","kind":"cat"}])"),
      ConfigError);
}

TEST_CASE("trait match honors kind and inclusive tolerance", "[features]") {
  FeatureDef cat{"gender", FeatureKind::categorical, 0.0};
  FeatureDef age{"age", FeatureKind::numeric, 2.0};

  CHECK(trait_match(cat, TraitValue::categorical(3), TraitValue::categorical(3)));
  CHECK_FALSE(trait_match(cat, TraitValue::categorical(3), TraitValue::categorical(4)));

  CHECK(trait_match(age, TraitValue::numeric(30.0), TraitValue::numeric(32.0)));  // boundary
  CHECK(trait_match(age, TraitValue::numeric(32.0), TraitValue::numeric(30.0)));
  CHECK_FALSE(trait_match(age, TraitValue::numeric(30.0), TraitValue::numeric(32.5)));
}

TEST_CASE("link overlap counts matches over mutually defined features", "[features]") {
  auto schema = testutil::four_features();
  // gender matches, age off by 5, location differs, bmi within tolerance
  auto a = make_profile(1, {TraitValue::categorical(0), TraitValue::numeric(30.0),
                            TraitValue::categorical(2), TraitValue::numeric(24.0)});
  auto b = make_profile(2, {TraitValue::categorical(0), TraitValue::numeric(35.0),
                            TraitValue::categorical(5), TraitValue::numeric(24.8)});
  auto o = link_overlap(a, b, schema);
  REQUIRE(o.has_value());
  CHECK(o->value == 0.5);
  CHECK(o->shared_features == 4);
}

TEST_CASE("link overlap ignores features missing on either side", "[features]") {
  auto schema = testutil::four_features();
  auto a = make_profile(1, {TraitValue::categorical(0), TraitValue::missing(),
                            TraitValue::categorical(2), TraitValue::numeric(24.0)});
  auto b = make_profile(2, {TraitValue::categorical(0), TraitValue::numeric(50.0),
                            TraitValue::missing(), TraitValue::numeric(30.0)});
  // only gender and bmi are defined on both sides; one of the two matches
  auto o = link_overlap(a, b, schema);
  REQUIRE(o.has_value());
  CHECK(o->value == 0.5);
  CHECK(o->shared_features == 2);
}

TEST_CASE("link overlap is undefined without shared features", "[features]") {
  auto schema = testutil::four_features();
  auto a = make_profile(1, {TraitValue::categorical(0), TraitValue::missing(),
                            TraitValue::categorical(2), TraitValue::missing()});
  auto b = make_profile(2, {TraitValue::missing(), TraitValue::numeric(50.0),
                            TraitValue::missing(), TraitValue::numeric(30.0)});
  CHECK_FALSE(link_overlap(a, b, schema).has_value());
  auto empty = make_profile(3, {TraitValue::missing(), TraitValue::missing(),
                                TraitValue::missing(), TraitValue::missing()});
  CHECK_FALSE(link_overlap(empty, empty, schema).has_value());
}

TEST_CASE("link overlap is symmetric and bounded on random profiles", "[features]") {
  auto schema = testutil::four_features();
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_real_distribution<double> real(0.0, 60.0);
  auto random_profile = [&](NodeId id) {
    std::vector<TraitValue> t;
    for (std::size_t f = 0; f < schema.size(); ++f) {
      int c = coin(rng);
      if (c == 0)
        t.push_back(TraitValue::missing());
      else if (schema.at(f).kind == FeatureKind::categorical)
        t.push_back(TraitValue::categorical(static_cast<std::uint32_t>(coin(rng))));
      else
        t.push_back(TraitValue::numeric(real(rng)));
    }
    return make_profile(id, std::move(t));
  };
  for (int i = 0; i < 200; ++i) {
    auto a = random_profile(1), b = random_profile(2);
    auto ab = link_overlap(a, b, schema), ba = link_overlap(b, a, schema);
    REQUIRE(ab.has_value() == ba.has_value());
    if (ab) {
      CHECK(ab->value == ba->value);  // exact symmetry, not approximate
      CHECK(ab->value >= 0.0);
      CHECK(ab->value <= 1.0);
      // value is matches / shared with integers on top and bottom
      const double scaled = ab->value * static_cast<double>(ab->shared_features);
      CHECK(scaled == static_cast<double>(static_cast<int>(scaled + 0.5)));
    }
  }
}

TEST_CASE("subset overlap averages defined pairs and skips the rest", "[features]") {
  auto schema = testutil::four_features();
  auto ego = make_profile(1, {TraitValue::categorical(0), TraitValue::numeric(30.0),
                              TraitValue::categorical(2), TraitValue::numeric(24.0)});
  auto full_match = ego;
  full_match.id = 2;
  auto no_match = make_profile(3, {TraitValue::categorical(1), TraitValue::numeric(50.0),
                                   TraitValue::categorical(9), TraitValue::numeric(30.0)});
  auto half = make_profile(4, {TraitValue::categorical(0), TraitValue::numeric(30.0),
                               TraitValue::categorical(9), TraitValue::numeric(30.0)});
  auto all_missing = make_profile(5, {TraitValue::missing(), TraitValue::missing(),
                                      TraitValue::missing(), TraitValue::missing()});

  std::vector<Profile> members{full_match, no_match, half};
  auto o = subset_overlap(ego, members, schema);
  REQUIRE(o.has_value());
  CHECK_THAT(*o, Catch::Matchers::WithinAbs(0.5, 1e-15));

  // undefined members are excluded from the mean rather than counted as zero
  std::vector<Profile> with_missing{full_match, all_missing};
  auto o2 = subset_overlap(ego, with_missing, schema);
  REQUIRE(o2.has_value());
  CHECK(*o2 == 1.0);

  std::vector<Profile> only_missing{all_missing};
  CHECK_FALSE(subset_overlap(ego, only_missing, schema).has_value());

  std::vector<Profile> nobody;
  CHECK_FALSE(subset_overlap(ego, nobody, schema).has_value());
}
