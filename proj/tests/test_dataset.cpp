#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "pathways/dataset.hpp"

using namespace pathways;
using model::EnergySystemDataset;

namespace {
const std::string kMiniBe = std::string(PATHWAYS_DATA_DIR) + "/mini_be.json";
}

TEST_CASE("mini-be loads with the documented shape") {
  const EnergySystemDataset ds = model::load_dataset(kMiniBe);
  CHECK(ds.technologies.size() == 14);
  CHECK(ds.resources.size() == 7);
  CHECK(ds.slices.size() == 6);
  std::set<std::string> demand_layers;
  for (const auto& d : ds.demands) demand_layers.insert(d.layer);
  CHECK(demand_layers.size() == 4);
}

TEST_CASE("phase grid") {
  CHECK(model::phase_years() == std::vector<int>{2020, 2025, 2030, 2035, 2040, 2045, 2050});
  CHECK(model::Phase::from_year(2035).index == 3);
  CHECK_THROWS(model::Phase::from_year(2037));
  CHECK(model::is_phase_year(2050));
  CHECK(!model::is_phase_year(2055));
}

TEST_CASE("ghg limit interpolates linearly") {
  model::GhgTrajectory t{100.0, 0.0};
  CHECK(model::ghg_limit(t, 2035) == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(model::ghg_limit(t, 2050) == 0.0);
  CHECK(model::ghg_limit(model::GhgTrajectory{80.0, 20.0}, 2040) ==
        doctest::Approx(40.0).epsilon(1e-15));
  CHECK_THROWS(model::ghg_limit(t, 2019));
  CHECK_THROWS(model::ghg_limit(t, 2051));
}

TEST_CASE("ghg limit is monotonically non-increasing") {
  model::GhgTrajectory t{9000.0, 250.0};
  double prev = model::ghg_limit(t, 2020);
  for (int y = 2021; y <= 2050; ++y) {
    const double cur = model::ghg_limit(t, y);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("loading, serializing and reloading is bit-exact") {
  const EnergySystemDataset ds = model::load_dataset(kMiniBe);
  const std::string text = model::serialize_dataset(ds);
  const EnergySystemDataset again = model::parse_dataset(text);
  CHECK(ds == again);
  CHECK(model::serialize_dataset(again) == text);
}

namespace {

std::string patched_mini_be(const std::string& needle, const std::string& replacement) {
  const EnergySystemDataset ds = model::load_dataset(kMiniBe);
  std::string text = model::serialize_dataset(ds);
  const auto pos = text.find(needle);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, needle.size(), replacement);
}

}  // namespace

TEST_CASE("zero lifetime is an invariant violation naming the rule") {
  const std::string text = patched_mini_be("\"lifetime_phases\": 5", "\"lifetime_phases\": 0");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("invariant violation"),
                       model::DatasetError);
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("lifetime"),
                       model::DatasetError);
}

TEST_CASE("slice weights must total 8760") {
  const std::string text = patched_mini_be("\"hours\": 1460", "\"hours\": 700");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("slice weights"),
                       model::DatasetError);
}

TEST_CASE("duplicate technology names are rejected") {
  const std::string text = patched_mini_be("\"name\": \"wind_onshore\"", "\"name\": \"pv\"");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("duplicate"),
                       model::DatasetError);
}

TEST_CASE("schema violations name the offending field") {
  const std::string text = patched_mini_be("\"capex\": 600.0", "\"capex\": \"cheap\"");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("capex"),
                       model::DatasetError);
}

TEST_CASE("electrofuel availability must ramp linearly between its anchors") {
  const std::string text =
      patched_mini_be("\"2040\": 30000.0", "\"2040\": 31000.0");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("linearly"),
                       model::DatasetError);
}

TEST_CASE("initial capacity above potential is rejected") {
  const std::string text = patched_mini_be("\"nuclear\": 6.0", "\"nuclear\": 7.5");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("potential_max"),
                       model::DatasetError);
}

TEST_CASE("demand profiles must sum to one") {
  const std::string text = patched_mini_be("0.21,", "0.25,");
  CHECK_THROWS_WITH_AS(model::parse_dataset(text), doctest::Contains("profile"),
                       model::DatasetError);
}

TEST_CASE("missing files and broken json fail loudly") {
  CHECK_THROWS_AS(model::load_dataset("/nonexistent/ds.json"), model::DatasetError);
  CHECK_THROWS_WITH_AS(model::parse_dataset("{"), doctest::Contains("JSON"), model::DatasetError);
}
