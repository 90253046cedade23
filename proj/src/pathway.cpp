#include "pathways/pathway.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pathways::opt {

using model::EnergySystemDataset;
using model::Technology;
using scen::EventSchedule;

std::string to_string(Mode m) { return m == Mode::perfect ? "perfect" : "myopic"; }

int Commitments::last_year() const {
  int last = model::kFirstYear - model::kYearStep;
  for (const auto& [_, per_year] : capacity) {
    for (const auto& [y, __] : per_year) last = std::max(last, y);
  }
  return last;
}

int BuiltLp::var(const std::string& name) const {
  auto it = var_index.find(name);
  if (it == var_index.end()) throw std::invalid_argument("unknown LP variable " + name);
  return it->second;
}

std::optional<int> BuiltLp::find_var(const std::string& name) const {
  auto it = var_index.find(name);
  if (it == var_index.end()) return std::nullopt;
  return it->second;
}

namespace {

constexpr const char* kHydrogenLayer = "h2";
constexpr const char* kElectricityLayer = "elec";

std::string key2(const char* p, const std::string& a, int y) {
  return std::string(p) + "." + a + "." + std::to_string(y);
}
std::string key3(const char* p, const std::string& a, int y, const std::string& s) {
  return key2(p, a, y) + "." + s;
}
std::string keyd(const std::string& tech, int vintage, int year) {
  return "D." + tech + "." + std::to_string(vintage) + "." + std::to_string(year);
}

bool outputs_layer(const Technology& t, const std::string& layer) {
  auto it = t.layer_outputs.find(layer);
  if (it == t.layer_outputs.end()) return false;
  for (double c : it->second) {
    if (c > 0.0) return true;
  }
  return false;
}

bool consumes_layer(const Technology& t, const std::string& layer) {
  auto it = t.layer_inputs.find(layer);
  return it != t.layer_inputs.end() && it->second > 0.0;
}

bool slice_active(const Technology& t, std::size_t s) {
  for (const auto& [_, coefs] : t.layer_outputs) {
    if (coefs[s] != 0.0) return true;
  }
  return false;
}

bool is_lt_heating(const Technology& t) {
  return t.flags.heating_class == model::HeatingClass::lt_decentral ||
         t.flags.heating_class == model::HeatingClass::lt_dhn;
}

// Fraction of a vintage's lifetime that falls inside the horizon.
double used_fraction(int vintage, int lifetime_phases) {
  const int horizon_phases = (model::kLastYear - vintage) / model::kYearStep + 1;
  return double(std::min(lifetime_phases, horizon_phases)) / double(lifetime_phases);
}

int alive_phases_in_horizon(int vintage, int lifetime_phases) {
  const int horizon_phases = (model::kLastYear - vintage) / model::kYearStep + 1;
  return std::min(lifetime_phases, horizon_phases);
}

bool vintage_alive(int vintage, int lifetime_phases, int year) {
  return vintage <= year && year < vintage + lifetime_phases * model::kYearStep;
}

class Builder {
 public:
  Builder(const EnergySystemDataset& ds, const EventSchedule& sched, const Policy& policy,
          const std::vector<int>& window, const Commitments& committed, const SolveConfig& config)
      : ds_(ds), sched_(sched), policy_(policy), window_(window), committed_(committed),
        config_(config) {}

  BuiltLp build();

 private:
  double discount(int year) const {
    return config_.discount_rate == 0.0
               ? 1.0
               : std::pow(1.0 + config_.discount_rate, -double(year - model::kFirstYear));
  }

  bool in_window(int year) const {
    return std::find(window_.begin(), window_.end(), year) != window_.end();
  }

  bool capacity_allowed(const Technology& t, int year) const {
    if (t.flags.unicorn_class != model::UnicornClass::none &&
        !sched_.unicorn_available(t.flags.unicorn_class, year)) {
      return false;
    }
    if (t.flags.nuclear_class != model::NuclearClass::none && !sched_.nuclear_available(year)) {
      return false;
    }
    return true;
  }

  double committed_capacity(const std::string& tech, int year) const {
    auto ti = committed_.capacity.find(tech);
    if (ti == committed_.capacity.end() || !ti->second.count(year)) {
      throw std::invalid_argument("build_lp: committed capacities do not cover " + tech + " at " +
                                  std::to_string(year));
    }
    return ti->second.at(year);
  }

  // Vintage size as a constant, for vintages decided before the window.
  double committed_vintage(const std::string& tech, int vintage) const {
    if (vintage == model::kFirstYear) return ds_.initial_capacity(tech);
    auto ti = committed_.additions.find(tech);
    if (ti == committed_.additions.end() || !ti->second.count(vintage)) return 0.0;
    return ti->second.at(vintage);
  }

  double committed_decommission(const std::string& tech, int vintage, int year) const {
    auto ti = committed_.decommissions.find(tech);
    if (ti == committed_.decommissions.end()) return 0.0;
    auto it = ti->second.find({vintage, year});
    return it == ti->second.end() ? 0.0 : it->second;
  }

  int add_var(const std::string& name, double lb, double ub, double obj, const char* kind) {
    const int idx = built_.lp.add_variable(name, lb, ub, obj, kind);
    built_.var_index.emplace(name, idx);
    return idx;
  }

  void add_capacity_vars();
  void add_addition_vars();
  void add_decommission_vars();
  void add_operation_vars();
  void add_resource_vars();
  void add_storage_vars();
  void add_continuity_rows();
  void add_vintage_rows();
  void add_capacity_link_rows();
  void add_balance_rows();
  void add_availability_rows();
  void add_ghg_rows();
  void add_potential_rows();
  void add_resistance_rows();
  void add_turnover_rows();
  void add_storage_rows();
  void add_policy_rows();

  const EnergySystemDataset& ds_;
  const EventSchedule& sched_;
  const Policy& policy_;
  const std::vector<int>& window_;
  const Commitments& committed_;
  const SolveConfig& config_;
  BuiltLp built_;
};

void Builder::add_capacity_vars() {
  for (const auto& t : ds_.technologies) {
    for (int y : window_) {
      double lb = 0.0, ub = t.potential_max;
      if (y == model::kFirstYear) lb = ub = ds_.initial_capacity(t.name);
      add_var(key2("F", t.name, y), lb, ub, 0.0, "capacity");
    }
  }
}

void Builder::add_addition_vars() {
  // Fixed O&M is committed per vintage for its whole in-horizon life; early
  // decommissioning surrenders the capacity at zero salvage and refunds
  // nothing, so it carries no objective term.
  for (const auto& t : ds_.technologies) {
    for (int y : window_) {
      if (y == model::kFirstYear) continue;
      double capex = t.capex;
      if (t.flags.imported) capex *= sched_.capex_multiplier(y);
      if (config_.salvage_linear) capex *= used_fraction(y, t.lifetime_phases);
      double opex = 0.0;
      for (int k = 0; k < alive_phases_in_horizon(y, t.lifetime_phases); ++k) {
        opex += t.opex_fixed * model::kYearStep * discount(y + k * model::kYearStep);
      }
      add_var(key2("A", t.name, y), 0.0, t.addition_limit_per_phase, capex * discount(y) + opex,
              "addition");
    }
  }
}

void Builder::add_decommission_vars() {
  // D is indexed by build vintage so end-of-life retirement only removes
  // capacity that is still standing. The epsilon keeps degenerate optima
  // from scrapping capacity for no gain; it is far below every reported
  // cost tolerance and excluded from cost extraction.
  constexpr double kDecommissionNudge = 1e-4;
  for (const auto& t : ds_.technologies) {
    const int life = t.lifetime_phases * model::kYearStep;
    for (int v = model::kFirstYear; v < window_.back(); v += model::kYearStep) {
      for (int p : window_) {
        if (p <= v || p >= v + life || p == model::kFirstYear) continue;
        add_var(keyd(t.name, v, p), 0.0, lp::kInf, kDecommissionNudge, "decommission");
      }
    }
  }
}

void Builder::add_operation_vars() {
  for (const auto& t : ds_.technologies) {
    for (int y : window_) {
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        if (!slice_active(t, s)) continue;
        add_var(key3("O", t.name, y, ds_.slices[s].id), 0.0, lp::kInf, 0.0, "operation");
      }
    }
  }
}

void Builder::add_resource_vars() {
  for (const auto& r : ds_.resources) {
    for (int y : window_) {
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        const double cost = r.price * ds_.slices[s].hours * model::kYearStep * discount(y);
        add_var(key3("R", r.name, y, ds_.slices[s].id), 0.0, lp::kInf, cost, "resource");
      }
    }
  }
}

void Builder::add_storage_vars() {
  for (const auto& t : ds_.technologies) {
    if (!t.storage) continue;
    for (int y : window_) {
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        const std::string& sid = ds_.slices[s].id;
        add_var(key3("SC", t.name, y, sid), 0.0, lp::kInf, 0.0, "storage_charge");
        add_var(key3("SD", t.name, y, sid), 0.0, lp::kInf, 0.0, "storage_discharge");
        add_var(key3("SL", t.name, y, sid), 0.0, lp::kInf, 0.0, "storage_level");
      }
    }
  }
}

void Builder::add_continuity_rows() {
  for (const auto& t : ds_.technologies) {
    const int life = t.lifetime_phases * model::kYearStep;
    for (int y : window_) {
      if (y == model::kFirstYear) continue;
      std::vector<lp::RowEntry> entries;
      double rhs = 0.0;
      entries.push_back({built_.var(key2("F", t.name, y)), 1.0});
      if (auto prev = built_.find_var(key2("F", t.name, y - model::kYearStep))) {
        entries.push_back({*prev, -1.0});
      } else {
        rhs += committed_capacity(t.name, y - model::kYearStep);
      }
      entries.push_back({built_.var(key2("A", t.name, y)), -1.0});
      // Early decommissioning of any vintage still standing at y.
      for (int v = model::kFirstYear; v < y; v += model::kYearStep) {
        if (v + life <= y) continue;
        if (auto d = built_.find_var(keyd(t.name, v, y))) {
          entries.push_back({*d, 1.0});
        } else {
          rhs -= committed_decommission(t.name, v, y);
        }
      }
      // End-of-life retirement of the vintage built exactly one lifetime ago,
      // net of what was already decommissioned.
      const int vr = y - life;
      if (vr >= model::kFirstYear) {
        if (vr != model::kFirstYear && in_window(vr)) {
          entries.push_back({built_.var(key2("A", t.name, vr)), 1.0});
        } else {
          rhs -= committed_vintage(t.name, vr);
        }
        for (int p = vr + model::kYearStep; p < y; p += model::kYearStep) {
          if (auto d = built_.find_var(keyd(t.name, vr, p))) {
            entries.push_back({*d, -1.0});
          } else {
            rhs += committed_decommission(t.name, vr, p);
          }
        }
      }
      built_.lp.add_row(key2("cont", t.name, y), lp::Sense::eq, rhs, std::move(entries),
                        "continuity");
    }
  }
}

void Builder::add_vintage_rows() {
  // Total decommissioning of a vintage cannot exceed its size.
  for (const auto& t : ds_.technologies) {
    const int life = t.lifetime_phases * model::kYearStep;
    for (int v = model::kFirstYear; v < window_.back(); v += model::kYearStep) {
      std::vector<lp::RowEntry> entries;
      double rhs = 0.0;
      bool any = false;
      for (int p : window_) {
        if (auto d = built_.find_var(keyd(t.name, v, p))) {
          entries.push_back({*d, 1.0});
          any = true;
        }
      }
      if (!any) continue;
      if (v != model::kFirstYear && in_window(v)) {
        entries.push_back({built_.var(key2("A", t.name, v)), -1.0});
      } else {
        rhs += committed_vintage(t.name, v);
      }
      for (int p = v + model::kYearStep; p < v + life && p <= model::kLastYear;
           p += model::kYearStep) {
        if (!in_window(p)) rhs -= committed_decommission(t.name, v, p);
      }
      built_.lp.add_row(key2("vint", t.name, v), lp::Sense::le, rhs, std::move(entries), "vintage");
    }
  }
}

void Builder::add_capacity_link_rows() {
  for (const auto& t : ds_.technologies) {
    for (int y : window_) {
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        if (!slice_active(t, s)) continue;
        built_.lp.add_row(key3("oplim", t.name, y, ds_.slices[s].id), lp::Sense::le, 0.0,
                          {{built_.var(key3("O", t.name, y, ds_.slices[s].id)), 1.0},
                           {built_.var(key2("F", t.name, y)), -1.0}},
                          "capacity_link");
      }
    }
  }
}

void Builder::add_balance_rows() {
  // Supply >= use + demand per layer, year and slice; surplus is curtailed.
  const auto layers = ds_.layers();
  for (const auto& layer : layers) {
    for (int y : window_) {
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        const double h = ds_.slices[s].hours;
        std::vector<lp::RowEntry> entries;
        for (const auto& t : ds_.technologies) {
          if (!slice_active(t, s)) continue;
          double coef = 0.0;
          if (auto it = t.layer_outputs.find(layer); it != t.layer_outputs.end()) {
            coef += it->second[s];
          }
          if (auto it = t.layer_inputs.find(layer); it != t.layer_inputs.end()) {
            coef -= it->second;
          }
          if (coef != 0.0) {
            entries.push_back({built_.var(key3("O", t.name, y, ds_.slices[s].id)), coef * h});
          }
        }
        for (const auto& r : ds_.resources) {
          if (r.layer != layer) continue;
          entries.push_back({built_.var(key3("R", r.name, y, ds_.slices[s].id)), h});
        }
        for (const auto& t : ds_.technologies) {
          if (!t.storage || t.storage->layer != layer) continue;
          entries.push_back({built_.var(key3("SD", t.name, y, ds_.slices[s].id)), h});
          entries.push_back({built_.var(key3("SC", t.name, y, ds_.slices[s].id)), -h});
        }
        double demand = 0.0;
        for (const auto& d : ds_.demands) {
          if (d.layer != layer) continue;
          demand += d.baseline_per_year.at(y) * sched_.demand(y) * d.slice_profile[s];
        }
        if (entries.empty() && demand <= 0.0) continue;
        built_.lp.add_row(key3("bal", layer, y, ds_.slices[s].id), lp::Sense::ge, demand,
                          std::move(entries), "balance");
      }
    }
  }
}

void Builder::add_availability_rows() {
  for (const auto& r : ds_.resources) {
    for (int y : window_) {
      std::vector<lp::RowEntry> entries;
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        entries.push_back(
            {built_.var(key3("R", r.name, y, ds_.slices[s].id)), ds_.slices[s].hours});
      }
      const double avail = r.availability_per_year.at(y) * sched_.availability(r.import_group, y);
      built_.lp.add_row(key2("avail", r.name, y), lp::Sense::le, avail, std::move(entries),
                        "availability");
    }
  }
}

void Builder::add_ghg_rows() {
  for (int y : window_) {
    std::vector<lp::RowEntry> entries;
    for (const auto& r : ds_.resources) {
      if (r.ghg_intensity == 0.0) continue;
      for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
        entries.push_back({built_.var(key3("R", r.name, y, ds_.slices[s].id)),
                           r.ghg_intensity * ds_.slices[s].hours});
      }
    }
    built_.lp.add_row("ghg." + std::to_string(y), lp::Sense::le, model::ghg_limit(ds_.ghg, y),
                      std::move(entries), "ghg");
  }
}

void Builder::add_potential_rows() {
  // Unicorn arrival and nuclear phase-out caps; row structure is fixed, the
  // right-hand side carries the schedule.
  for (const auto& t : ds_.technologies) {
    if (t.flags.unicorn_class == model::UnicornClass::none &&
        t.flags.nuclear_class == model::NuclearClass::none) {
      continue;
    }
    for (int y : window_) {
      const double cap = capacity_allowed(t, y) ? t.potential_max : 0.0;
      built_.lp.add_row(key2("cap", t.name, y), lp::Sense::le, cap,
                        {{built_.var(key2("F", t.name, y)), 1.0}}, "potential");
    }
  }
}

void Builder::add_resistance_rows() {
  for (const auto& t : ds_.technologies) {
    if (t.flags.renewable_class == model::RenewableClass::none) continue;
    for (int y : scen::kImpactYears) {
      if (!in_window(y)) continue;
      const double cap = t.addition_limit_per_phase * sched_.addition(t.flags.renewable_class, y);
      built_.lp.add_row(key2("resist", t.name, y), lp::Sense::le, cap,
                        {{built_.var(key2("A", t.name, y)), 1.0}}, "resistance");
    }
  }
}

void Builder::add_turnover_rows() {
  struct Group {
    const char* name;
    double base;
    std::vector<const Technology*> techs;
    double factor(const EventSchedule& s, int y) const {
      return std::string(name) == "heating" ? s.heating_turnover(y) : s.mobility_turnover(y);
    }
  };
  Group heating{"heating", kHeatingTurnoverBase, {}};
  Group passenger{"passenger", kMobilityTurnoverBase, {}};
  Group freight{"freight", kMobilityTurnoverBase, {}};
  for (const auto& t : ds_.technologies) {
    if (is_lt_heating(t)) heating.techs.push_back(&t);
    if (t.flags.mobility_class == model::MobilityClass::passenger) passenger.techs.push_back(&t);
    if (t.flags.mobility_class == model::MobilityClass::freight) freight.techs.push_back(&t);
  }
  for (const Group& g : {heating, passenger, freight}) {
    if (g.techs.empty()) continue;
    for (int y : window_) {
      if (y == model::kFirstYear) continue;
      const double frac = g.base * g.factor(sched_, y);
      std::vector<lp::RowEntry> entries;
      double rhs = 0.0;
      for (const Technology* t : g.techs) {
        entries.push_back({built_.var(key2("A", t->name, y)), 1.0});
      }
      for (const Technology* t : g.techs) {
        if (auto prev = built_.find_var(key2("F", t->name, y - model::kYearStep))) {
          entries.push_back({*prev, -frac});
        } else {
          rhs += frac * committed_capacity(t->name, y - model::kYearStep);
        }
      }
      built_.lp.add_row(key2("turnover", g.name, y), lp::Sense::le, rhs, std::move(entries),
                        "turnover");
    }
  }
}

void Builder::add_storage_rows() {
  for (const auto& t : ds_.technologies) {
    if (!t.storage) continue;
    const std::size_t n = ds_.slices.size();
    for (int y : window_) {
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t next = (s + 1) % n;
        const double h = ds_.slices[s].hours;
        built_.lp.add_row(
            key3("slevel", t.name, y, ds_.slices[s].id), lp::Sense::eq, 0.0,
            {{built_.var(key3("SL", t.name, y, ds_.slices[next].id)), 1.0},
             {built_.var(key3("SL", t.name, y, ds_.slices[s].id)), -1.0},
             {built_.var(key3("SC", t.name, y, ds_.slices[s].id)),
              -t.storage->charge_efficiency * h},
             {built_.var(key3("SD", t.name, y, ds_.slices[s].id)),
              h / t.storage->discharge_efficiency}},
            "storage_cycle");
        built_.lp.add_row(key3("scap", t.name, y, ds_.slices[s].id), lp::Sense::le, 0.0,
                          {{built_.var(key3("SL", t.name, y, ds_.slices[s].id)), 1.0},
                           {built_.var(key2("F", t.name, y)), -1.0}},
                          "storage_cap");
      }
    }
  }
}

void Builder::add_policy_rows() {
  int n = 0;
  for (const auto& c : policy_.constraints) {
    ++n;
    const std::string tag = "policy." + policy_.name + "." + std::to_string(n);
    switch (c.kind) {
      case PolicyConstraint::Kind::fix_capacity:
        if (in_window(c.year)) {
          built_.lp.add_row(tag + ".fix." + c.techs.front(), lp::Sense::eq, c.value,
                            {{built_.var(key2("F", c.techs.front(), c.year)), 1.0}}, "policy");
        }
        break;
      case PolicyConstraint::Kind::addition_bound:
        if (in_window(c.year)) {
          built_.lp.add_row(tag + ".add." + c.techs.front(), lp::Sense::le, c.value,
                            {{built_.var(key2("A", c.techs.front(), c.year)), 1.0}}, "policy");
        }
        break;
      case PolicyConstraint::Kind::capacity_zero_from:
        for (int y : window_) {
          if (y < c.year) continue;
          built_.lp.add_row(tag + ".zero." + c.techs.front() + "." + std::to_string(y),
                            lp::Sense::le, 0.0,
                            {{built_.var(key2("F", c.techs.front(), y)), 1.0}}, "policy");
        }
        break;
      case PolicyConstraint::Kind::min_capacity_sum:
        if (in_window(c.year)) {
          std::vector<lp::RowEntry> entries;
          for (const auto& tech : c.techs) {
            entries.push_back({built_.var(key2("F", tech, c.year)), 1.0});
          }
          built_.lp.add_row(tag + ".mincap", lp::Sense::ge, c.value, std::move(entries), "policy");
        }
        break;
      case PolicyConstraint::Kind::min_output_share:
        if (in_window(c.year)) {
          std::vector<lp::RowEntry> entries;
          for (const auto& tech : c.techs) {
            const Technology* t = ds_.find_technology(tech);
            const auto& coefs = t->layer_outputs.at(c.layer);
            for (std::size_t s = 0; s < ds_.slices.size(); ++s) {
              if (!slice_active(*t, s) || coefs[s] == 0.0) continue;
              entries.push_back({built_.var(key3("O", tech, c.year, ds_.slices[s].id)),
                                 coefs[s] * ds_.slices[s].hours});
            }
          }
          double demand = 0.0;
          for (const auto& d : ds_.demands) {
            if (d.layer == c.layer) demand += d.baseline_per_year.at(c.year) * sched_.demand(c.year);
          }
          built_.lp.add_row(tag + ".share." + c.layer, lp::Sense::ge, c.value * demand,
                            std::move(entries), "policy");
        }
        break;
    }
  }
}

BuiltLp Builder::build() {
  if (window_.empty()) throw std::invalid_argument("build_lp: empty window");
  for (std::size_t i = 0; i < window_.size(); ++i) {
    if (!model::is_phase_year(window_[i]) ||
        (i > 0 && window_[i] != window_[i - 1] + model::kYearStep)) {
      throw std::invalid_argument("build_lp: window must be contiguous phase years");
    }
  }
  if (window_.front() > model::kFirstYear) {
    // Committed decisions must reach up to the window.
    for (const auto& t : ds_.technologies) committed_capacity(t.name, window_.front() - model::kYearStep);
  }
  built_.window = window_;

  add_capacity_vars();
  add_addition_vars();
  add_decommission_vars();
  add_operation_vars();
  add_resource_vars();
  add_storage_vars();

  add_continuity_rows();
  add_vintage_rows();
  add_capacity_link_rows();
  add_balance_rows();
  add_availability_rows();
  add_ghg_rows();
  add_potential_rows();
  add_resistance_rows();
  add_turnover_rows();
  add_storage_rows();
  add_policy_rows();

  built_.lp.check();
  return std::move(built_);
}

}  // namespace

BuiltLp build_lp(const EnergySystemDataset& ds, const EventSchedule& schedule,
                 const Policy& policy, const std::vector<int>& window,
                 const Commitments& committed, const SolveConfig& config) {
  Builder b(ds, schedule, policy, window, committed, config);
  return b.build();
}

Policy apply_policy(const std::string& name, const EnergySystemDataset& ds) {
  Policy p;
  p.name = name;
  if (name == "baseline") return p;
  if (name == "accelerate_renewables") {
    for (const auto& t : ds.technologies) {
      if (t.flags.renewable_class == model::RenewableClass::none) continue;
      p.constraints.push_back({PolicyConstraint::Kind::fix_capacity,
                               {t.name},
                               kPolicyYear,
                               t.potential_max,
                               {}});
    }
    return p;
  }
  if (name == "delay_renewables") {
    for (const auto& t : ds.technologies) {
      if (t.flags.renewable_class == model::RenewableClass::none) continue;
      p.constraints.push_back(
          {PolicyConstraint::Kind::addition_bound, {t.name}, kPolicyYear, 0.0, {}});
    }
    return p;
  }
  if (name == "nuclear_phaseout_2030") {
    for (const auto& t : ds.technologies) {
      if (t.flags.nuclear_class == model::NuclearClass::none) continue;
      p.constraints.push_back(
          {PolicyConstraint::Kind::capacity_zero_from, {t.name}, kPolicyYear, 0.0, {}});
    }
    return p;
  }
  if (name == "hydrogen_route") {
    std::vector<std::string> electrolyzers;
    for (const auto& t : ds.technologies) {
      if (outputs_layer(t, kHydrogenLayer) && consumes_layer(t, kElectricityLayer)) {
        electrolyzers.push_back(t.name);
      }
    }
    if (electrolyzers.empty()) {
      throw std::invalid_argument(
          "hydrogen_route: dataset has no electricity-fed producer on layer 'h2'");
    }
    p.constraints.push_back({PolicyConstraint::Kind::min_capacity_sum, electrolyzers, kPolicyYear,
                             kElectrolyzerMinCapacity, {}});

    // Hydrogen shares: one constraint per demand layer served by the
    // hydrogen-fed technologies of each class.
    auto add_share = [&](auto&& member, double share) {
      std::map<std::string, std::vector<std::string>> per_layer;
      for (const auto& t : ds.technologies) {
        if (!member(t) || !consumes_layer(t, kHydrogenLayer)) continue;
        for (const auto& d : ds.demands) {
          if (outputs_layer(t, d.layer)) per_layer[d.layer].push_back(t.name);
        }
      }
      for (auto& [layer, techs] : per_layer) {
        p.constraints.push_back(
            {PolicyConstraint::Kind::min_output_share, techs, kPolicyYear, share, layer});
      }
    };
    add_share([](const Technology& t) { return t.flags.mobility_class != model::MobilityClass::none; },
              kH2MobilityShare);
    add_share([](const Technology& t) { return is_lt_heating(t); }, kH2HeatShare);
    return p;
  }
  throw std::invalid_argument("unknown policy: " + name);
}

namespace {

struct YearValues {
  std::map<std::string, double> capacity;
  std::map<std::string, double> additions;
  std::map<std::string, std::map<int, double>> decommissions;  // tech -> vintage -> D
  std::map<std::string, double> resource_use;                  // annual energy
  double emissions = 0.0;
};

YearValues extract_year(const EnergySystemDataset& ds, const BuiltLp& built,
                        const lp::Solution& sol, int year) {
  YearValues out;
  auto value = [&](const std::string& name) {
    auto idx = built.find_var(name);
    return idx ? std::max(0.0, sol.x[std::size_t(*idx)]) : 0.0;
  };
  for (const auto& t : ds.technologies) {
    out.capacity[t.name] = value(key2("F", t.name, year));
    if (year != model::kFirstYear) {
      out.additions[t.name] = value(key2("A", t.name, year));
      for (int v = model::kFirstYear; v < year; v += model::kYearStep) {
        if (auto idx = built.find_var(keyd(t.name, v, year))) {
          out.decommissions[t.name][v] = std::max(0.0, sol.x[std::size_t(*idx)]);
        }
      }
    }
  }
  for (const auto& r : ds.resources) {
    double annual = 0.0;
    for (std::size_t s = 0; s < ds.slices.size(); ++s) {
      annual += ds.slices[s].hours * value(key3("R", r.name, year, ds.slices[s].id));
    }
    out.resource_use[r.name] = annual;
    out.emissions += r.ghg_intensity * annual;
  }
  return out;
}

// Cost of one committed phase under the given (true) schedule: fixed O&M on
// every vintage still within its lifetime (decommissioned or not), capex on
// the phase's additions, resource purchases. Summed over all years this
// reproduces the perfect-foresight objective plus the initial stock's O&M.
double year_cost(const EnergySystemDataset& ds, const EventSchedule& sched,
                 const SolveConfig& config, int year,
                 const std::map<std::string, std::map<int, double>>& additions_history,
                 const YearValues& vals) {
  const double delta = config.discount_rate == 0.0
                           ? 1.0
                           : std::pow(1.0 + config.discount_rate,
                                      -double(year - model::kFirstYear));
  double cost = 0.0;
  for (const auto& t : ds.technologies) {
    double alive = vintage_alive(model::kFirstYear, t.lifetime_phases, year)
                       ? ds.initial_capacity(t.name)
                       : 0.0;
    if (auto it = additions_history.find(t.name); it != additions_history.end()) {
      for (const auto& [v, a] : it->second) {
        if (vintage_alive(v, t.lifetime_phases, year)) alive += a;
      }
    }
    cost += t.opex_fixed * model::kYearStep * delta * alive;
    if (year != model::kFirstYear) {
      double capex = t.capex;
      if (t.flags.imported) capex *= sched.capex_multiplier(year);
      if (config.salvage_linear) capex *= used_fraction(year, t.lifetime_phases);
      cost += capex * delta * vals.additions.at(t.name);
    }
  }
  for (const auto& r : ds.resources) {
    cost += r.price * model::kYearStep * delta * vals.resource_use.at(r.name);
  }
  return cost;
}

void record_year(PathwayOutcome& outcome, const EnergySystemDataset& ds, int year,
                 const YearValues& vals) {
  outcome.emissions_per_year[year] = vals.emissions;
  for (const auto& t : ds.technologies) outcome.capacities[t.name][year] = vals.capacity.at(t.name);
  for (const auto& r : ds.resources) {
    outcome.resource_use[r.name][year] = vals.resource_use.at(r.name);
  }
}

}  // namespace

PathwayOutcome solve_perfect_foresight(const EnergySystemDataset& ds,
                                       const EventSchedule& schedule, const Policy& policy,
                                       const SolveConfig& config) {
  PathwayOutcome outcome;
  outcome.mode = Mode::perfect;
  outcome.policy = policy.name;
  const auto window = model::phase_years();
  BuiltLp built = build_lp(ds, schedule, policy, window, {}, config);
  lp::SolveOptions opts;
  opts.tol = config.lp_tol;
  const lp::Solution sol = lp::lp_solve(built.lp, opts);
  if (sol.status == lp::SolveStatus::infeasible) {
    outcome.status = PathwayOutcome::Status::infeasible;
    return outcome;
  }
  if (sol.status != lp::SolveStatus::optimal) {
    outcome.status = PathwayOutcome::Status::error;
    outcome.message = sol.status == lp::SolveStatus::unbounded ? "lp unbounded"
                                                               : "lp iteration limit";
    return outcome;
  }
  outcome.status = PathwayOutcome::Status::feasible;
  std::map<int, YearValues> per_year;
  std::map<std::string, std::map<int, double>> additions_history;
  for (int y : window) {
    per_year[y] = extract_year(ds, built, sol, y);
    for (const auto& [tech, a] : per_year[y].additions) additions_history[tech][y] = a;
  }
  double total = 0.0;
  for (int y : window) {
    record_year(outcome, ds, y, per_year[y]);
    total += year_cost(ds, schedule, config, y, additions_history, per_year[y]);
  }
  outcome.total_cost = total;
  return outcome;
}

PathwayOutcome solve_myopic(const EnergySystemDataset& ds, const EventSchedule& schedule,
                            const Policy& policy, const SolveConfig& config) {
  if (config.lookahead_phases < 1) {
    throw std::invalid_argument("solve_myopic: lookahead_phases must be >= 1");
  }
  PathwayOutcome outcome;
  outcome.mode = Mode::myopic;
  outcome.policy = policy.name;

  Commitments committed;
  double total = 0.0;
  for (int now : model::phase_years()) {
    const EventSchedule view = scen::reveal(schedule, now);
    std::vector<int> window;
    const int last = std::min(model::kLastYear, now + config.lookahead_phases * model::kYearStep);
    for (int y = now; y <= last; y += model::kYearStep) window.push_back(y);

    BuiltLp built = build_lp(ds, view, policy, window, committed, config);
    lp::SolveOptions opts;
    opts.tol = config.lp_tol;
    const lp::Solution sol = lp::lp_solve(built.lp, opts);
    if (sol.status == lp::SolveStatus::infeasible) {
      outcome.status = PathwayOutcome::Status::infeasible;
      outcome.fail_year = now;
      return outcome;
    }
    if (sol.status != lp::SolveStatus::optimal) {
      outcome.status = PathwayOutcome::Status::error;
      outcome.fail_year = now;
      outcome.message = sol.status == lp::SolveStatus::unbounded ? "lp unbounded"
                                                                 : "lp iteration limit";
      return outcome;
    }

    // Commit only the current phase; later window years are provisional.
    const YearValues vals = extract_year(ds, built, sol, now);
    record_year(outcome, ds, now, vals);
    for (const auto& t : ds.technologies) {
      committed.capacity[t.name][now] = vals.capacity.at(t.name);
      if (now != model::kFirstYear) {
        committed.additions[t.name][now] = vals.additions.at(t.name);
        if (auto it = vals.decommissions.find(t.name); it != vals.decommissions.end()) {
          for (const auto& [v, d] : it->second) committed.decommissions[t.name][{v, now}] = d;
        }
      }
    }
    total += year_cost(ds, schedule, config, now, committed.additions, vals);
  }
  outcome.status = PathwayOutcome::Status::feasible;
  outcome.total_cost = total;
  return outcome;
}

double baseline_cost(const EnergySystemDataset& ds, const SolveConfig& config) {
  const Policy baseline = apply_policy("baseline", ds);
  const PathwayOutcome out =
      solve_perfect_foresight(ds, EventSchedule::identity(), baseline, config);
  if (!out.feasible()) {
    throw std::runtime_error("baseline_cost: no-event perfect-foresight run is not feasible");
  }
  return out.total_cost;
}

void normalize_outcome(PathwayOutcome& outcome, double c_base) {
  if (outcome.feasible() && c_base > 0.0) {
    outcome.cost_normalized = outcome.total_cost / c_base * 100.0;
  }
}

}  // namespace pathways::opt
