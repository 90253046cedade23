#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathways/dataset.hpp"

namespace pathways::scen {

inline constexpr int kNumParams = 47;
inline constexpr int kMaxSobolDim = 64;

// Impact years for the 40 phase-sampled parameters.
inline constexpr std::array<int, 4> kImpactYears = {2035, 2040, 2045, 2050};

// Parameter groups in the Table-1 ordering. Indices 0..39 are ten groups of
// four (one value per impact year), 40..45 the unicorn arrivals, 46 the
// nuclear phase-out.
enum class ParamGroup { T, U, N };

ParamGroup param_group(int index);
std::string param_name(int index);  // "p00".."p46"
// Human-readable label, e.g. "efuel_availability_2050".
std::string param_label(int index);
// Allowed discrete levels for a parameter index.
const std::vector<double>& param_levels(int index);
double snap_to_level(int index, double value);

// First 40 indices: group offsets.
inline constexpr int kEfuelBase = 0;
inline constexpr int kBiofuelBase = 4;
inline constexpr int kElecImportBase = 8;
inline constexpr int kMobilityBase = 12;
inline constexpr int kHeatingBase = 16;
inline constexpr int kPvBase = 20;
inline constexpr int kWindOnBase = 24;
inline constexpr int kWindOffBase = 28;
inline constexpr int kExchangeBase = 32;
inline constexpr int kDemandBase = 36;
inline constexpr int kUnicornBase = 40;  // nh3_ccgt, nh3_crack, dac, smr, ccs, geothermal
inline constexpr int kNuclearIndex = 46;

struct ScenarioVector {
  std::int64_t scenario_id = 0;
  std::array<double, kNumParams> values{};

  double operator[](int i) const { return values[std::size_t(i)]; }
};

// Throws std::invalid_argument if any value is off its discrete level set.
void validate_scenario(const ScenarioVector& v);

// Deterministic unscrambled Sobol points (Joe-Kuo direction numbers),
// skipping the first seed_skip points of the sequence.
std::vector<std::vector<double>> sobol_points(std::int64_t n, int dim, std::int64_t seed_skip);

// Nearest-level mapping of a raw sample: floor(s*6)/5 for T, floor(s*5)/4
// for N, floor(s*4)/3 for U, each clamped to 1.
double discretize(double s, int index);

// n discretized scenarios with ids 1..n (ids offset by seed_skip - 1 when
// skipping more than the origin).
std::vector<ScenarioVector> generate_scenarios(std::int64_t n, std::int64_t seed_skip = 1);

// Concrete per-year modifications induced by a scenario. Factors default to
// the no-impact values for years before 2035.
struct EventSchedule {
  // import group -> year -> multiplicative availability factor (1 - v).
  std::map<model::ImportGroup, std::map<int, double>> availability_factor;
  // year -> (1 - v) scaling on the base turnover caps.
  std::map<int, double> heating_turnover_factor;
  std::map<int, double> mobility_turnover_factor;
  // renewable class -> year -> (1 - v) scaling on addition_limit_per_phase.
  std::map<model::RenewableClass, std::map<int, double>> addition_factor;
  // year -> capex multiplier for imported technologies, 1 + 0.4 v.
  std::map<int, double> imported_capex_multiplier;
  // year -> demand multiplier, 1 + 0.15 * cumulative v up to that year.
  std::map<int, double> demand_multiplier;
  // unicorn class -> arrival year (nullopt = never). No impact = 2040.
  std::map<model::UnicornClass, std::optional<int>> unicorn_arrival;
  // nullopt = no phase-out.
  std::optional<int> nuclear_phaseout;

  bool operator==(const EventSchedule&) const = default;

  static EventSchedule identity();

  double availability(model::ImportGroup g, int year) const;
  double addition(model::RenewableClass c, int year) const;
  double heating_turnover(int year) const;
  double mobility_turnover(int year) const;
  double capex_multiplier(int year) const;
  double demand(int year) const;
  bool unicorn_available(model::UnicornClass c, int year) const;
  bool nuclear_available(int year) const;
};

EventSchedule build_schedule(const ScenarioVector& v);

// The schedule as known at `now`: years <= now carry the true values, later
// years the expected (no-impact) ones. A unicorn that has not arrived by
// `now` is expected at the next phase (never before 2040); a phase-out that
// has not happened is not expected at all.
EventSchedule reveal(const EventSchedule& schedule, int now);

// Scenario matrix CSV: header scenario_id,p00,...,p46; values with at most
// six decimals. Reading snaps values back onto the discrete level sets.
void write_scenario_csv(std::ostream& out, const std::vector<ScenarioVector>& scenarios);
std::vector<ScenarioVector> read_scenario_csv(std::istream& in);
void write_scenario_file(const std::string& path, const std::vector<ScenarioVector>& scenarios);
std::vector<ScenarioVector> read_scenario_file(const std::string& path);

}  // namespace pathways::scen
