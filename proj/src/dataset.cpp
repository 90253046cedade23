#include "pathways/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pathways::model {

using nlohmann::ordered_json;

Phase Phase::from_year(int year) {
  if (!is_phase_year(year)) {
    throw DatasetError("invalid phase year " + std::to_string(year));
  }
  return Phase{year, (year - kFirstYear) / kYearStep};
}

double ghg_limit(const GhgTrajectory& traj, int year) {
  if (year < kFirstYear || year > kLastYear) {
    throw DatasetError("ghg_limit: year " + std::to_string(year) + " outside 2020-2050");
  }
  const double t = double(year - kFirstYear) / double(kLastYear - kFirstYear);
  return traj.limit_2020 + t * (traj.limit_2050 - traj.limit_2020);
}

const Technology* EnergySystemDataset::find_technology(const std::string& name) const {
  for (const auto& t : technologies) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::string> EnergySystemDataset::layers() const {
  std::set<std::string> out;
  for (const auto& t : technologies) {
    for (const auto& [l, _] : t.layer_outputs) out.insert(l);
    for (const auto& [l, _] : t.layer_inputs) out.insert(l);
    if (t.storage) out.insert(t.storage->layer);
  }
  for (const auto& r : resources) out.insert(r.layer);
  for (const auto& d : demands) out.insert(d.layer);
  return {out.begin(), out.end()};
}

double EnergySystemDataset::initial_capacity(const std::string& tech) const {
  auto it = initial_capacities.find(tech);
  return it == initial_capacities.end() ? 0.0 : it->second;
}

namespace {

template <class E>
E parse_enum(const std::string& s, const std::vector<std::pair<std::string, E>>& table,
             const std::string& field) {
  for (const auto& [name, v] : table) {
    if (name == s) return v;
  }
  throw DatasetError("schema violation: " + field + ": unknown value '" + s + "'");
}

const std::vector<std::pair<std::string, RenewableClass>> kRenewableNames = {
    {"none", RenewableClass::none},
    {"pv", RenewableClass::pv},
    {"wind_on", RenewableClass::wind_on},
    {"wind_off", RenewableClass::wind_off}};
const std::vector<std::pair<std::string, NuclearClass>> kNuclearNames = {
    {"none", NuclearClass::none},
    {"conventional", NuclearClass::conventional},
    {"smr", NuclearClass::smr}};
const std::vector<std::pair<std::string, UnicornClass>> kUnicornNames = {
    {"none", UnicornClass::none},     {"nh3_ccgt", UnicornClass::nh3_ccgt},
    {"nh3_crack", UnicornClass::nh3_crack}, {"dac", UnicornClass::dac},
    {"smr", UnicornClass::smr},       {"ccs", UnicornClass::ccs},
    {"geothermal", UnicornClass::geothermal}};
const std::vector<std::pair<std::string, HeatingClass>> kHeatingNames = {
    {"none", HeatingClass::none},
    {"lt_decentral", HeatingClass::lt_decentral},
    {"lt_dhn", HeatingClass::lt_dhn},
    {"ht", HeatingClass::ht}};
const std::vector<std::pair<std::string, MobilityClass>> kMobilityNames = {
    {"none", MobilityClass::none},
    {"passenger", MobilityClass::passenger},
    {"freight", MobilityClass::freight}};
const std::vector<std::pair<std::string, ImportGroup>> kImportNames = {
    {"none", ImportGroup::none},
    {"electrofuel", ImportGroup::electrofuel},
    {"biofuel", ImportGroup::biofuel},
    {"electricity", ImportGroup::electricity}};

template <class E>
std::string enum_name(E v, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, e] : table) {
    if (e == v) return name;
  }
  return "none";
}

double require_number(const ordered_json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw DatasetError("schema violation: " + ctx + "." + key + " missing or not a number");
  }
  return j[key].get<double>();
}

std::string require_string(const ordered_json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw DatasetError("schema violation: " + ctx + "." + key + " missing or not a string");
  }
  return j[key].get<std::string>();
}

std::map<int, double> parse_year_map(const ordered_json& j, const std::string& ctx) {
  if (!j.is_object()) throw DatasetError("schema violation: " + ctx + " must map year -> value");
  std::map<int, double> out;
  for (const auto& [k, v] : j.items()) {
    int year = 0;
    try {
      year = std::stoi(k);
    } catch (const std::exception&) {
      throw DatasetError("schema violation: " + ctx + ": bad year key '" + k + "'");
    }
    if (!is_phase_year(year)) {
      throw DatasetError("schema violation: " + ctx + ": year " + k + " not on the 5-year grid");
    }
    if (!v.is_number()) throw DatasetError("schema violation: " + ctx + "[" + k + "] not a number");
    out[year] = v.get<double>();
  }
  for (int y : phase_years()) {
    if (!out.count(y)) {
      throw DatasetError("schema violation: " + ctx + " missing year " + std::to_string(y));
    }
  }
  return out;
}

Technology parse_technology(const ordered_json& j, std::size_t idx, std::size_t n_slices) {
  const std::string ctx = "technologies[" + std::to_string(idx) + "]";
  Technology t;
  t.name = require_string(j, "name", ctx);
  if (!j.contains("layer_outputs") || !j["layer_outputs"].is_object()) {
    throw DatasetError("schema violation: " + ctx + ".layer_outputs missing");
  }
  for (const auto& [layer, coefs] : j["layer_outputs"].items()) {
    std::vector<double> per_slice;
    if (coefs.is_number()) {
      per_slice.assign(n_slices, coefs.get<double>());
    } else if (coefs.is_array()) {
      if (coefs.size() != n_slices) {
        throw DatasetError("schema violation: " + ctx + ".layer_outputs." + layer +
                           " must have one value per slice");
      }
      for (const auto& c : coefs) per_slice.push_back(c.get<double>());
    } else {
      throw DatasetError("schema violation: " + ctx + ".layer_outputs." + layer);
    }
    t.layer_outputs[layer] = std::move(per_slice);
  }
  if (j.contains("layer_inputs")) {
    for (const auto& [layer, c] : j["layer_inputs"].items()) {
      if (!c.is_number()) throw DatasetError("schema violation: " + ctx + ".layer_inputs." + layer);
      t.layer_inputs[layer] = c.get<double>();
    }
  }
  t.capex = require_number(j, "capex", ctx);
  t.opex_fixed = require_number(j, "opex_fixed", ctx);
  t.lifetime_phases = int(require_number(j, "lifetime_phases", ctx));
  t.potential_max = require_number(j, "potential_max", ctx);
  t.addition_limit_per_phase = require_number(j, "addition_limit_per_phase", ctx);
  if (j.contains("flags")) {
    const auto& f = j["flags"];
    t.flags.imported = f.value("imported", false);
    t.flags.renewable_class =
        parse_enum(f.value("renewable_class", "none"), kRenewableNames, ctx + ".renewable_class");
    t.flags.nuclear_class =
        parse_enum(f.value("nuclear_class", "none"), kNuclearNames, ctx + ".nuclear_class");
    t.flags.unicorn_class =
        parse_enum(f.value("unicorn_class", "none"), kUnicornNames, ctx + ".unicorn_class");
    t.flags.heating_class =
        parse_enum(f.value("heating_class", "none"), kHeatingNames, ctx + ".heating_class");
    t.flags.mobility_class =
        parse_enum(f.value("mobility_class", "none"), kMobilityNames, ctx + ".mobility_class");
  }
  if (j.contains("storage")) {
    StorageSpec s;
    s.layer = require_string(j["storage"], "layer", ctx + ".storage");
    s.charge_efficiency = require_number(j["storage"], "charge_efficiency", ctx + ".storage");
    s.discharge_efficiency = require_number(j["storage"], "discharge_efficiency", ctx + ".storage");
    t.storage = s;
  }
  return t;
}

ordered_json technology_to_json(const Technology& t) {
  ordered_json j;
  j["name"] = t.name;
  ordered_json outs = ordered_json::object();
  for (const auto& [layer, coefs] : t.layer_outputs) outs[layer] = coefs;
  j["layer_outputs"] = outs;
  ordered_json ins = ordered_json::object();
  for (const auto& [layer, c] : t.layer_inputs) ins[layer] = c;
  j["layer_inputs"] = ins;
  j["capex"] = t.capex;
  j["opex_fixed"] = t.opex_fixed;
  j["lifetime_phases"] = t.lifetime_phases;
  j["potential_max"] = t.potential_max;
  j["addition_limit_per_phase"] = t.addition_limit_per_phase;
  j["flags"] = {{"imported", t.flags.imported},
                {"renewable_class", enum_name(t.flags.renewable_class, kRenewableNames)},
                {"nuclear_class", enum_name(t.flags.nuclear_class, kNuclearNames)},
                {"unicorn_class", enum_name(t.flags.unicorn_class, kUnicornNames)},
                {"heating_class", enum_name(t.flags.heating_class, kHeatingNames)},
                {"mobility_class", enum_name(t.flags.mobility_class, kMobilityNames)}};
  if (t.storage) {
    j["storage"] = {{"layer", t.storage->layer},
                    {"charge_efficiency", t.storage->charge_efficiency},
                    {"discharge_efficiency", t.storage->discharge_efficiency}};
  }
  return j;
}

ordered_json year_map_to_json(const std::map<int, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [y, v] : m) j[std::to_string(y)] = v;
  return j;
}

}  // namespace

EnergySystemDataset parse_dataset(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw DatasetError(std::string("schema violation: not valid JSON: ") + e.what());
  }
  EnergySystemDataset ds;
  if (!j.contains("slices") || !j["slices"].is_array()) {
    throw DatasetError("schema violation: slices missing");
  }
  for (std::size_t i = 0; i < j["slices"].size(); ++i) {
    const auto& s = j["slices"][i];
    const std::string ctx = "slices[" + std::to_string(i) + "]";
    ds.slices.push_back({require_string(s, "id", ctx), require_number(s, "hours", ctx)});
  }
  if (!j.contains("technologies") || !j["technologies"].is_array()) {
    throw DatasetError("schema violation: technologies missing");
  }
  for (std::size_t i = 0; i < j["technologies"].size(); ++i) {
    ds.technologies.push_back(parse_technology(j["technologies"][i], i, ds.slices.size()));
  }
  if (!j.contains("resources") || !j["resources"].is_array()) {
    throw DatasetError("schema violation: resources missing");
  }
  for (std::size_t i = 0; i < j["resources"].size(); ++i) {
    const auto& rj = j["resources"][i];
    const std::string ctx = "resources[" + std::to_string(i) + "]";
    Resource r;
    r.name = require_string(rj, "name", ctx);
    r.layer = require_string(rj, "layer", ctx);
    r.price = require_number(rj, "price", ctx);
    r.ghg_intensity = require_number(rj, "ghg_intensity", ctx);
    if (!rj.contains("availability_per_year")) {
      throw DatasetError("schema violation: " + ctx + ".availability_per_year missing");
    }
    r.availability_per_year =
        parse_year_map(rj["availability_per_year"], ctx + ".availability_per_year");
    r.import_group =
        parse_enum(rj.value("import_group", "none"), kImportNames, ctx + ".import_group");
    ds.resources.push_back(std::move(r));
  }
  if (!j.contains("demands") || !j["demands"].is_array()) {
    throw DatasetError("schema violation: demands missing");
  }
  for (std::size_t i = 0; i < j["demands"].size(); ++i) {
    const auto& dj = j["demands"][i];
    const std::string ctx = "demands[" + std::to_string(i) + "]";
    Demand d;
    d.layer = require_string(dj, "layer", ctx);
    if (!dj.contains("baseline_per_year")) {
      throw DatasetError("schema violation: " + ctx + ".baseline_per_year missing");
    }
    d.baseline_per_year = parse_year_map(dj["baseline_per_year"], ctx + ".baseline_per_year");
    if (!dj.contains("slice_profile") || !dj["slice_profile"].is_array() ||
        dj["slice_profile"].size() != ds.slices.size()) {
      throw DatasetError("schema violation: " + ctx + ".slice_profile must have one value per slice");
    }
    for (const auto& p : dj["slice_profile"]) d.slice_profile.push_back(p.get<double>());
    ds.demands.push_back(std::move(d));
  }
  if (!j.contains("ghg") || !j["ghg"].is_object()) {
    throw DatasetError("schema violation: ghg missing");
  }
  ds.ghg.limit_2020 = require_number(j["ghg"], "limit_2020", "ghg");
  ds.ghg.limit_2050 = require_number(j["ghg"], "limit_2050", "ghg");
  if (j.contains("initial_capacities")) {
    for (const auto& [name, v] : j["initial_capacities"].items()) {
      if (!v.is_number()) {
        throw DatasetError("schema violation: initial_capacities." + name + " not a number");
      }
      ds.initial_capacities[name] = v.get<double>();
    }
  }
  validate_dataset(ds);
  return ds;
}

EnergySystemDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string serialize_dataset(const EnergySystemDataset& ds) {
  ordered_json j;
  ordered_json slices = ordered_json::array();
  for (const auto& s : ds.slices) slices.push_back({{"id", s.id}, {"hours", s.hours}});
  j["slices"] = slices;
  ordered_json techs = ordered_json::array();
  for (const auto& t : ds.technologies) techs.push_back(technology_to_json(t));
  j["technologies"] = techs;
  ordered_json ress = ordered_json::array();
  for (const auto& r : ds.resources) {
    ress.push_back({{"name", r.name},
                    {"layer", r.layer},
                    {"price", r.price},
                    {"ghg_intensity", r.ghg_intensity},
                    {"availability_per_year", year_map_to_json(r.availability_per_year)},
                    {"import_group", enum_name(r.import_group, kImportNames)}});
  }
  j["resources"] = ress;
  ordered_json dems = ordered_json::array();
  for (const auto& d : ds.demands) {
    dems.push_back({{"layer", d.layer},
                    {"baseline_per_year", year_map_to_json(d.baseline_per_year)},
                    {"slice_profile", d.slice_profile}});
  }
  j["demands"] = dems;
  j["ghg"] = {{"limit_2020", ds.ghg.limit_2020}, {"limit_2050", ds.ghg.limit_2050}};
  ordered_json init = ordered_json::object();
  for (const auto& [name, v] : ds.initial_capacities) init[name] = v;
  j["initial_capacities"] = init;
  return j.dump(2) + "\n";
}

void save_dataset(const EnergySystemDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset file: " + path);
  out << serialize_dataset(ds);
}

void validate_dataset(const EnergySystemDataset& ds) {
  if (ds.slices.empty()) throw DatasetError("invariant violation: no slices");
  double hours = 0.0;
  for (const auto& s : ds.slices) {
    if (s.hours <= 0) throw DatasetError("invariant violation: slice weights: non-positive hours");
    hours += s.hours;
  }
  if (std::abs(hours - kHoursPerYear) > 1e-6) {
    throw DatasetError("invariant violation: slice weights must sum to 8760, got " +
                       std::to_string(hours));
  }
  std::set<std::string> slice_ids, tech_names, res_names;
  for (const auto& s : ds.slices) {
    if (!slice_ids.insert(s.id).second) {
      throw DatasetError("invariant violation: duplicate slice id '" + s.id + "'");
    }
  }

  // Layers that receive supply: technology outputs, resources, storage discharge.
  std::set<std::string> declared;
  for (const auto& t : ds.technologies) {
    for (const auto& [l, _] : t.layer_outputs) declared.insert(l);
    if (t.storage) declared.insert(t.storage->layer);
  }
  for (const auto& r : ds.resources) declared.insert(r.layer);

  for (const auto& t : ds.technologies) {
    const std::string ctx = "technology '" + t.name + "'";
    if (!tech_names.insert(t.name).second) {
      throw DatasetError("invariant violation: duplicate technology '" + t.name + "'");
    }
    if (t.capex < 0 || t.opex_fixed < 0) {
      throw DatasetError("invariant violation: " + ctx + ": negative cost");
    }
    if (t.potential_max < 0) {
      throw DatasetError("invariant violation: " + ctx + ": negative potential_max");
    }
    if (t.addition_limit_per_phase < 0) {
      throw DatasetError("invariant violation: " + ctx + ": negative addition_limit_per_phase");
    }
    if (t.lifetime_phases < 1 || t.lifetime_phases > kNumYears) {
      throw DatasetError("invariant violation: lifetime_phases of " + ctx + " must be in [1, 7]");
    }
    for (const auto& [layer, coefs] : t.layer_outputs) {
      for (double c : coefs) {
        if (c < 0) throw DatasetError("invariant violation: " + ctx + ": negative output on " + layer);
      }
    }
    for (const auto& [layer, c] : t.layer_inputs) {
      if (c < 0) throw DatasetError("invariant violation: " + ctx + ": negative input on " + layer);
      if (!declared.count(layer)) {
        throw DatasetError("invariant violation: " + ctx + " consumes undeclared layer '" + layer +
                           "' (no producer, resource or storage supplies it)");
      }
    }
    // CCS and DAC supply captured CO2 as a feedstock only; they must not
    // touch any other output layer (no negative-emissions accounting).
    if (t.flags.unicorn_class == UnicornClass::ccs || t.flags.unicorn_class == UnicornClass::dac) {
      for (const auto& [layer, _] : t.layer_outputs) {
        if (layer != "co2_captured") {
          throw DatasetError("invariant violation: " + ctx +
                             ": ccs/dac outputs must feed only the co2_captured layer");
        }
      }
    }
    if (t.storage) {
      if (t.storage->charge_efficiency <= 0 || t.storage->charge_efficiency > 1 ||
          t.storage->discharge_efficiency <= 0 || t.storage->discharge_efficiency > 1) {
        throw DatasetError("invariant violation: " + ctx + ": storage efficiencies must be in (0, 1]");
      }
    }
  }
  for (const auto& r : ds.resources) {
    if (!res_names.insert(r.name).second) {
      throw DatasetError("invariant violation: duplicate resource '" + r.name + "'");
    }
    for (const auto& [y, v] : r.availability_per_year) {
      if (v < 0) {
        throw DatasetError("invariant violation: resource '" + r.name +
                           "': negative availability at " + std::to_string(y));
      }
    }
    // Electrofuel-group imports ramp linearly between the 2030 and 2050 anchors.
    if (r.import_group == ImportGroup::electrofuel) {
      const double a30 = r.availability_per_year.at(2030);
      const double a50 = r.availability_per_year.at(2050);
      for (int y = 2035; y <= 2045; y += kYearStep) {
        const double expect = a30 + (a50 - a30) * double(y - 2030) / 20.0;
        if (std::abs(r.availability_per_year.at(y) - expect) > 1e-6 * std::max(1.0, std::abs(expect))) {
          throw DatasetError("invariant violation: resource '" + r.name +
                             "': electrofuel availability must rise linearly 2030->2050");
        }
      }
    }
  }
  for (const auto& d : ds.demands) {
    if (!declared.count(d.layer)) {
      throw DatasetError("invariant violation: demand layer '" + d.layer + "' has no supplier");
    }
    double sum = 0.0;
    for (double p : d.slice_profile) {
      if (p < 0) throw DatasetError("invariant violation: demand '" + d.layer + "': negative profile");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DatasetError("invariant violation: demand '" + d.layer + "': profile must sum to 1");
    }
    for (const auto& [y, v] : d.baseline_per_year) {
      if (v < 0) {
        throw DatasetError("invariant violation: demand '" + d.layer + "': negative baseline at " +
                           std::to_string(y));
      }
    }
  }
  if (ds.ghg.limit_2050 > ds.ghg.limit_2020) {
    throw DatasetError("invariant violation: ghg limit_2050 must not exceed limit_2020");
  }
  for (const auto& [name, cap] : ds.initial_capacities) {
    const Technology* t = ds.find_technology(name);
    if (!t) throw DatasetError("invariant violation: initial capacity for unknown technology '" + name + "'");
    if (cap < 0) throw DatasetError("invariant violation: negative initial capacity for '" + name + "'");
    if (cap > t->potential_max + 1e-9) {
      throw DatasetError("invariant violation: initial capacity of '" + name +
                         "' exceeds potential_max");
    }
  }
}

std::string to_string(RenewableClass c) { return enum_name(c, kRenewableNames); }
std::string to_string(NuclearClass c) { return enum_name(c, kNuclearNames); }
std::string to_string(UnicornClass c) { return enum_name(c, kUnicornNames); }
std::string to_string(HeatingClass c) { return enum_name(c, kHeatingNames); }
std::string to_string(MobilityClass c) { return enum_name(c, kMobilityNames); }
std::string to_string(ImportGroup g) { return enum_name(g, kImportNames); }

}  // namespace pathways::model
