#include "pathways/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pathways::scen {

namespace {
#include "sobol_directions.inc"

constexpr int kSobolBits = 32;

// Direction integers scaled by 2^32 for one dimension (1-based bit index).
std::array<std::uint32_t, kSobolBits + 1> direction_vector(int dim) {
  std::array<std::uint32_t, kSobolBits + 1> v{};
  if (dim == 1) {
    for (int k = 1; k <= kSobolBits; ++k) v[std::size_t(k)] = 1u << (kSobolBits - k);
    return v;
  }
  const SobolDirectionRow& row = kSobolDirections[dim - 2];
  const int s = int(row.degree);
  for (int k = 1; k <= s && k <= kSobolBits; ++k) {
    v[std::size_t(k)] = row.m[k - 1] << (kSobolBits - k);
  }
  for (int k = s + 1; k <= kSobolBits; ++k) {
    std::uint32_t val = v[std::size_t(k - s)] ^ (v[std::size_t(k - s)] >> s);
    for (int j = 1; j < s; ++j) {
      if ((row.poly >> (s - j)) & 1u) val ^= v[std::size_t(k - j)];
    }
    v[std::size_t(k)] = val;
  }
  return v;
}

int rightmost_zero_bit(std::uint64_t n) {
  int b = 0;
  while (n & 1u) {
    n >>= 1;
    ++b;
  }
  return b;
}

const std::vector<double> kLevelsT = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
const std::vector<double> kLevelsU = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
const std::vector<double> kLevelsN = {0.0, 0.25, 0.5, 0.75, 1.0};

const char* kGroupLabels[10] = {"efuel_availability",   "biofuel_availability",
                                "elec_import_availability", "mobility_resistance",
                                "heating_resistance",   "pv_resistance",
                                "wind_on_resistance",   "wind_off_resistance",
                                "exchange_rate",        "demand_increase"};
const char* kUnicornLabels[6] = {"nh3_ccgt", "nh3_crack", "dac", "smr", "ccs", "geothermal"};

// Guard against representable-decimal artifacts such as 0.6 * 5 ->
// 2.9999999999999996; legitimate inputs sit much farther from the grid.
double robust_floor(double x) { return std::floor(x + 1e-9); }

int level_count(int index) {
  switch (param_group(index)) {
    case ParamGroup::T:
      return 6;
    case ParamGroup::U:
      return 4;
    case ParamGroup::N:
      return 5;
  }
  return 0;
}

}  // namespace

ParamGroup param_group(int index) {
  if (index < 0 || index >= kNumParams) {
    throw std::invalid_argument("parameter index out of range: " + std::to_string(index));
  }
  if (index < kUnicornBase) return ParamGroup::T;
  if (index < kNuclearIndex) return ParamGroup::U;
  return ParamGroup::N;
}

std::string param_name(int index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "p%02d", index);
  return buf;
}

std::string param_label(int index) {
  param_group(index);
  if (index < kUnicornBase) {
    return std::string(kGroupLabels[index / 4]) + "_" + std::to_string(kImpactYears[std::size_t(index % 4)]);
  }
  if (index < kNuclearIndex) return std::string("unicorn_") + kUnicornLabels[index - kUnicornBase];
  return "nuclear_phaseout";
}

const std::vector<double>& param_levels(int index) {
  switch (param_group(index)) {
    case ParamGroup::U:
      return kLevelsU;
    case ParamGroup::N:
      return kLevelsN;
    case ParamGroup::T:
    default:
      return kLevelsT;
  }
}

double snap_to_level(int index, double value) {
  const auto& levels = param_levels(index);
  double best = levels[0];
  double best_d = std::abs(value - best);
  for (double l : levels) {
    const double d = std::abs(value - l);
    if (d < best_d) {
      best = l;
      best_d = d;
    }
  }
  return best;
}

void validate_scenario(const ScenarioVector& v) {
  for (int i = 0; i < kNumParams; ++i) {
    const double x = v.values[std::size_t(i)];
    if (std::abs(x - snap_to_level(i, x)) > 1e-9) {
      throw std::invalid_argument("scenario " + std::to_string(v.scenario_id) + ": value " +
                                  std::to_string(x) + " at " + param_name(i) +
                                  " is not an allowed level");
    }
  }
}

std::vector<std::vector<double>> sobol_points(std::int64_t n, int dim, std::int64_t seed_skip) {
  if (n < 1) throw std::invalid_argument("sobol_points: n must be >= 1");
  if (dim < 1 || dim > kMaxSobolDim) {
    throw std::invalid_argument("sobol_points: dimension " + std::to_string(dim) +
                                " exceeds supported direction numbers (max " +
                                std::to_string(kMaxSobolDim) + ")");
  }
  if (seed_skip < 0) throw std::invalid_argument("sobol_points: seed_skip must be >= 0");

  std::vector<std::array<std::uint32_t, kSobolBits + 1>> dirs;
  dirs.reserve(std::size_t(dim));
  for (int d = 1; d <= dim; ++d) dirs.push_back(direction_vector(d));

  std::vector<std::uint32_t> state(std::size_t(dim), 0u);
  // Seek to index seed_skip via the Gray code of the index.
  const std::uint64_t gray = std::uint64_t(seed_skip) ^ (std::uint64_t(seed_skip) >> 1);
  for (int b = 0; b < kSobolBits; ++b) {
    if ((gray >> b) & 1u) {
      for (int d = 0; d < dim; ++d) state[std::size_t(d)] ^= dirs[std::size_t(d)][std::size_t(b + 1)];
    }
  }

  std::vector<std::vector<double>> points;
  points.reserve(std::size_t(n));
  const double scale = std::ldexp(1.0, -kSobolBits);
  for (std::int64_t j = 0; j < n; ++j) {
    std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
    for (int d = 0; d < dim; ++d) p[std::size_t(d)] = double(state[std::size_t(d)]) * scale;
    points.push_back(std::move(p));
    const int bit = rightmost_zero_bit(std::uint64_t(seed_skip + j));
    if (bit + 1 > kSobolBits) throw std::invalid_argument("sobol_points: sequence exhausted");
    for (int d = 0; d < dim; ++d) {
      state[std::size_t(d)] ^= dirs[std::size_t(d)][std::size_t(bit + 1)];
    }
  }
  return points;
}

double discretize(double s, int index) {
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("discretize: sample outside [0, 1]");
  const int levels = level_count(index);
  const double raw = robust_floor(s * levels) / double(levels - 1);
  return std::min(raw, 1.0);
}

std::vector<ScenarioVector> generate_scenarios(std::int64_t n, std::int64_t seed_skip) {
  const auto pts = sobol_points(n, kNumParams, seed_skip);
  std::vector<ScenarioVector> out;
  out.reserve(std::size_t(n));
  for (std::int64_t j = 0; j < n; ++j) {
    ScenarioVector v;
    v.scenario_id = seed_skip + j;
    for (int i = 0; i < kNumParams; ++i) {
      v.values[std::size_t(i)] = discretize(pts[std::size_t(j)][std::size_t(i)], i);
    }
    out.push_back(v);
  }
  return out;
}

EventSchedule EventSchedule::identity() {
  EventSchedule s;
  for (int y : model::phase_years()) {
    for (auto g : {model::ImportGroup::electrofuel, model::ImportGroup::biofuel,
                   model::ImportGroup::electricity}) {
      s.availability_factor[g][y] = 1.0;
    }
    s.heating_turnover_factor[y] = 1.0;
    s.mobility_turnover_factor[y] = 1.0;
    for (auto c : {model::RenewableClass::pv, model::RenewableClass::wind_on,
                   model::RenewableClass::wind_off}) {
      s.addition_factor[c][y] = 1.0;
    }
    s.imported_capex_multiplier[y] = 1.0;
    s.demand_multiplier[y] = 1.0;
  }
  for (auto u : {model::UnicornClass::nh3_ccgt, model::UnicornClass::nh3_crack,
                 model::UnicornClass::dac, model::UnicornClass::smr, model::UnicornClass::ccs,
                 model::UnicornClass::geothermal}) {
    s.unicorn_arrival[u] = 2040;
  }
  s.nuclear_phaseout = std::nullopt;
  return s;
}

namespace {

int unicorn_arrival_from_value(double v) {
  // {0, 1/3, 2/3, 1} -> {2040, 2045, 2050, never}
  return int(std::lround(v * 3.0));
}

int nuclear_step_from_value(double v) {
  // {0, .25, .5, .75, 1} -> {never, 2050, 2045, 2040, 2035}
  return int(std::lround(v * 4.0));
}

}  // namespace

EventSchedule build_schedule(const ScenarioVector& v) {
  validate_scenario(v);
  EventSchedule s = EventSchedule::identity();

  const std::map<model::ImportGroup, int> import_bases = {
      {model::ImportGroup::electrofuel, kEfuelBase},
      {model::ImportGroup::biofuel, kBiofuelBase},
      {model::ImportGroup::electricity, kElecImportBase}};
  for (std::size_t yi = 0; yi < kImpactYears.size(); ++yi) {
    const int year = kImpactYears[yi];
    for (const auto& [group, base] : import_bases) {
      s.availability_factor[group][year] = 1.0 - v[base + int(yi)];
    }
    s.mobility_turnover_factor[year] = 1.0 - v[kMobilityBase + int(yi)];
    s.heating_turnover_factor[year] = 1.0 - v[kHeatingBase + int(yi)];
    s.addition_factor[model::RenewableClass::pv][year] = 1.0 - v[kPvBase + int(yi)];
    s.addition_factor[model::RenewableClass::wind_on][year] = 1.0 - v[kWindOnBase + int(yi)];
    s.addition_factor[model::RenewableClass::wind_off][year] = 1.0 - v[kWindOffBase + int(yi)];
    s.imported_capex_multiplier[year] = 1.0 + 0.4 * v[kExchangeBase + int(yi)];
  }
  // Demand rises cumulatively: each phase adds up to 15 %.
  double cumulative = 0.0;
  for (std::size_t yi = 0; yi < kImpactYears.size(); ++yi) {
    cumulative += v[kDemandBase + int(yi)];
    s.demand_multiplier[kImpactYears[yi]] = 1.0 + 0.15 * cumulative;
  }

  const model::UnicornClass unicorns[6] = {model::UnicornClass::nh3_ccgt,
                                           model::UnicornClass::nh3_crack,
                                           model::UnicornClass::dac,
                                           model::UnicornClass::smr,
                                           model::UnicornClass::ccs,
                                           model::UnicornClass::geothermal};
  for (int u = 0; u < 6; ++u) {
    switch (unicorn_arrival_from_value(v[kUnicornBase + u])) {
      case 0:
        s.unicorn_arrival[unicorns[u]] = 2040;
        break;
      case 1:
        s.unicorn_arrival[unicorns[u]] = 2045;
        break;
      case 2:
        s.unicorn_arrival[unicorns[u]] = 2050;
        break;
      default:
        s.unicorn_arrival[unicorns[u]] = std::nullopt;
        break;
    }
  }
  switch (nuclear_step_from_value(v[kNuclearIndex])) {
    case 0:
      s.nuclear_phaseout = std::nullopt;
      break;
    case 1:
      s.nuclear_phaseout = 2050;
      break;
    case 2:
      s.nuclear_phaseout = 2045;
      break;
    case 3:
      s.nuclear_phaseout = 2040;
      break;
    default:
      s.nuclear_phaseout = 2035;
      break;
  }
  return s;
}

EventSchedule reveal(const EventSchedule& schedule, int now) {
  if (!model::is_phase_year(now)) {
    throw std::invalid_argument("reveal: now must be a phase year");
  }
  EventSchedule view = EventSchedule::identity();
  auto copy_known = [&](const std::map<int, double>& truth, std::map<int, double>& dst) {
    for (const auto& [y, val] : truth) {
      if (y <= now) dst[y] = val;
    }
  };
  for (const auto& [g, m] : schedule.availability_factor) copy_known(m, view.availability_factor[g]);
  copy_known(schedule.heating_turnover_factor, view.heating_turnover_factor);
  copy_known(schedule.mobility_turnover_factor, view.mobility_turnover_factor);
  for (const auto& [c, m] : schedule.addition_factor) copy_known(m, view.addition_factor[c]);
  copy_known(schedule.imported_capex_multiplier, view.imported_capex_multiplier);
  // Demand already realized stays; the known multiplier is held flat beyond
  // `now` (no further rises expected).
  for (const auto& [y, val] : schedule.demand_multiplier) {
    if (y <= now) {
      view.demand_multiplier[y] = val;
    } else {
      view.demand_multiplier[y] = schedule.demand(now);
    }
  }
  for (const auto& [u, arrival] : schedule.unicorn_arrival) {
    if (arrival && *arrival <= now) {
      view.unicorn_arrival[u] = arrival;  // observed arrival
    } else {
      // Not arrived yet: expected at the next phase, never before 2040 and
      // never beyond the horizon.
      const int expected = std::max(2040, now + model::kYearStep);
      view.unicorn_arrival[u] =
          expected > model::kLastYear ? std::optional<int>() : std::optional<int>(expected);
    }
  }
  if (schedule.nuclear_phaseout && *schedule.nuclear_phaseout <= now) {
    view.nuclear_phaseout = schedule.nuclear_phaseout;
  } else {
    view.nuclear_phaseout = std::nullopt;
  }
  return view;
}

namespace {
double factor_at(const std::map<int, double>& m, int year, double fallback) {
  auto it = m.find(year);
  return it == m.end() ? fallback : it->second;
}
}  // namespace

double EventSchedule::availability(model::ImportGroup g, int year) const {
  auto it = availability_factor.find(g);
  if (it == availability_factor.end()) return 1.0;
  return factor_at(it->second, year, 1.0);
}

double EventSchedule::addition(model::RenewableClass c, int year) const {
  auto it = addition_factor.find(c);
  if (it == addition_factor.end()) return 1.0;
  return factor_at(it->second, year, 1.0);
}

double EventSchedule::heating_turnover(int year) const {
  return factor_at(heating_turnover_factor, year, 1.0);
}

double EventSchedule::mobility_turnover(int year) const {
  return factor_at(mobility_turnover_factor, year, 1.0);
}

double EventSchedule::capex_multiplier(int year) const {
  return factor_at(imported_capex_multiplier, year, 1.0);
}

double EventSchedule::demand(int year) const { return factor_at(demand_multiplier, year, 1.0); }

bool EventSchedule::unicorn_available(model::UnicornClass c, int year) const {
  auto it = unicorn_arrival.find(c);
  if (it == unicorn_arrival.end()) return true;
  return it->second.has_value() && year >= *it->second;
}

bool EventSchedule::nuclear_available(int year) const {
  return !(nuclear_phaseout && year >= *nuclear_phaseout);
}

namespace {

// At most six decimals, trailing zeros trimmed.
std::string format_level(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioVector>& scenarios) {
  out << "scenario_id";
  for (int i = 0; i < kNumParams; ++i) out << "," << param_name(i);
  out << "\n";
  for (const auto& v : scenarios) {
    out << v.scenario_id;
    for (int i = 0; i < kNumParams; ++i) out << "," << format_level(v[i]);
    out << "\n";
  }
}

std::vector<ScenarioVector> read_scenario_csv(std::istream& in) {
  std::vector<ScenarioVector> out;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("scenario csv: empty file");
  std::string expected = "scenario_id";
  for (int i = 0; i < kNumParams; ++i) expected += "," + param_name(i);
  if (line != expected) throw std::runtime_error("scenario csv: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    ScenarioVector v;
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("scenario csv: bad row");
    v.scenario_id = std::stoll(cell);
    for (int i = 0; i < kNumParams; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("scenario csv: row " + std::to_string(v.scenario_id) +
                                 " has too few columns");
      }
      v.values[std::size_t(i)] = snap_to_level(i, std::stod(cell));
    }
    out.push_back(v);
  }
  return out;
}

void write_scenario_file(const std::string& path, const std::vector<ScenarioVector>& scenarios) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  write_scenario_csv(out, scenarios);
}

std::vector<ScenarioVector> read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return read_scenario_csv(in);
}

}  // namespace pathways::scen
