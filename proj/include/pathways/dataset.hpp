#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathways::model {

// Representative years, 5-year grid. 2020 is the fixed initial system;
// decisions (new builds / decommissioning) happen 2025..2050.
inline constexpr int kFirstYear = 2020;
inline constexpr int kLastYear = 2050;
inline constexpr int kYearStep = 5;
inline constexpr int kNumYears = 7;
inline constexpr double kHoursPerYear = 8760.0;

struct Phase {
  int representative_year = kFirstYear;
  int index = 0;  // 0..6

  static Phase from_year(int year);
};

inline std::vector<int> phase_years() {
  std::vector<int> ys;
  for (int y = kFirstYear; y <= kLastYear; y += kYearStep) ys.push_back(y);
  return ys;
}

inline bool is_phase_year(int year) {
  return year >= kFirstYear && year <= kLastYear && (year - kFirstYear) % kYearStep == 0;
}

enum class RenewableClass { none, pv, wind_on, wind_off };
enum class NuclearClass { none, conventional, smr };
enum class UnicornClass { none, nh3_ccgt, nh3_crack, dac, smr, ccs, geothermal };
enum class HeatingClass { none, lt_decentral, lt_dhn, ht };
enum class MobilityClass { none, passenger, freight };
enum class ImportGroup { none, electrofuel, biofuel, electricity };

struct TechnologyFlags {
  bool imported = false;
  RenewableClass renewable_class = RenewableClass::none;
  NuclearClass nuclear_class = NuclearClass::none;
  UnicornClass unicorn_class = UnicornClass::none;
  HeatingClass heating_class = HeatingClass::none;
  MobilityClass mobility_class = MobilityClass::none;

  bool operator==(const TechnologyFlags&) const = default;
};

// Optional intra-year storage attached to one layer; level is cyclic over
// the slice sequence.
struct StorageSpec {
  std::string layer;
  double charge_efficiency = 1.0;
  double discharge_efficiency = 1.0;

  bool operator==(const StorageSpec&) const = default;
};

struct Technology {
  std::string name;
  // layer -> per-slice output per unit capacity (renewables carry their
  // slice capacity factors here; dispatchables use a flat coefficient).
  std::map<std::string, std::vector<double>> layer_outputs;
  // layer -> input per unit output.
  std::map<std::string, double> layer_inputs;
  double capex = 0.0;       // currency per unit capacity
  double opex_fixed = 0.0;  // currency per unit capacity per year
  int lifetime_phases = 1;  // 1..7
  double potential_max = 0.0;
  double addition_limit_per_phase = 0.0;
  TechnologyFlags flags;
  std::optional<StorageSpec> storage;

  bool operator==(const Technology&) const = default;
};

struct Resource {
  std::string name;
  std::string layer;
  double price = 0.0;          // currency per energy unit
  double ghg_intensity = 0.0;  // ktCO2eq per energy unit
  std::map<int, double> availability_per_year;
  ImportGroup import_group = ImportGroup::none;

  bool operator==(const Resource&) const = default;
};

struct Demand {
  std::string layer;
  std::map<int, double> baseline_per_year;
  std::vector<double> slice_profile;  // fractions summing to 1

  bool operator==(const Demand&) const = default;
};

struct GhgTrajectory {
  double limit_2020 = 0.0;
  double limit_2050 = 0.0;

  bool operator==(const GhgTrajectory&) const = default;
};

// Exact linear interpolation between the two anchors. Throws on a year
// outside [2020, 2050].
double ghg_limit(const GhgTrajectory& traj, int year);

struct Slice {
  std::string id;
  double hours = 0.0;

  bool operator==(const Slice&) const = default;
};

struct EnergySystemDataset {
  std::vector<Technology> technologies;
  std::vector<Resource> resources;
  std::vector<Demand> demands;
  std::vector<Slice> slices;
  GhgTrajectory ghg;
  std::map<std::string, double> initial_capacities;

  bool operator==(const EnergySystemDataset&) const = default;

  const Technology* find_technology(const std::string& name) const;
  // All layers referenced by technologies, resources or demands, sorted.
  std::vector<std::string> layers() const;
  double initial_capacity(const std::string& tech) const;
};

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Loads and fully validates a dataset file (see data/schema.md). Throws
// DatasetError naming the offending field or rule.
EnergySystemDataset load_dataset(const std::string& path);
EnergySystemDataset parse_dataset(const std::string& json_text);

std::string serialize_dataset(const EnergySystemDataset& ds);
void save_dataset(const EnergySystemDataset& ds, const std::string& path);

// Runs every invariant check; load_dataset calls this itself.
void validate_dataset(const EnergySystemDataset& ds);

std::string to_string(RenewableClass c);
std::string to_string(NuclearClass c);
std::string to_string(UnicornClass c);
std::string to_string(HeatingClass c);
std::string to_string(MobilityClass c);
std::string to_string(ImportGroup g);

}  // namespace pathways::model
