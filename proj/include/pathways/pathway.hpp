#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathways/dataset.hpp"
#include "pathways/lp.hpp"
#include "pathways/scenario.hpp"

namespace pathways::opt {

enum class Mode { perfect, myopic };
std::string to_string(Mode m);

// Turnover base caps: low-temperature heating renovates over 15 years (a
// third of the stock per phase), the mobility fleet over 10 years (half).
inline constexpr double kHeatingTurnoverBase = 1.0 / 3.0;
inline constexpr double kMobilityTurnoverBase = 0.5;

// Early-stage decision anchors (desk-scale analogues).
inline constexpr int kPolicyYear = 2030;
inline constexpr double kElectrolyzerMinCapacity = 0.15;
inline constexpr double kH2MobilityShare = 0.10;
inline constexpr double kH2HeatShare = 0.10;

struct PolicyConstraint {
  enum class Kind {
    fix_capacity,       // F[tech, year] = value
    addition_bound,     // A[tech, year] <= value
    capacity_zero_from, // F[tech, y] <= 0 for y >= year
    min_capacity_sum,   // sum_t F[t, year] >= value
    min_output_share,   // annual output on `layer` >= value * demand(layer, year)
  };
  Kind kind;
  std::vector<std::string> techs;
  int year = 0;
  double value = 0.0;
  std::string layer;
};

struct Policy {
  std::string name;
  std::vector<PolicyConstraint> constraints;
};

// Named early-stage policies; constraints touch only years <= 2030.
// Throws std::invalid_argument for an unknown name.
Policy apply_policy(const std::string& name, const model::EnergySystemDataset& ds);

// Decisions fixed by earlier rolling-horizon steps (and the 2020 stock).
struct Commitments {
  // tech -> year -> value for every committed year.
  std::map<std::string, std::map<int, double>> capacity;
  std::map<std::string, std::map<int, double>> additions;
  // tech -> (vintage year, decommission year) -> amount.
  std::map<std::string, std::map<std::pair<int, int>, double>> decommissions;

  bool empty() const { return capacity.empty(); }
  int last_year() const;
};

struct BuiltLp {
  lp::LinearProgram lp;
  std::vector<int> window;
  std::map<std::string, int> var_index;  // "F.tech.year", "A.tech.year", "O.tech.year.slice", ...

  int var(const std::string& name) const;
  std::optional<int> find_var(const std::string& name) const;
};

struct SolveConfig {
  int lookahead_phases = 1;
  double lp_tol = 1e-9;
  double discount_rate = 0.0;   // applied as (1+r)^-(y-2020); 0 keeps sums exact
  bool salvage_linear = false;  // credit capex of phases beyond the horizon
};

// Assembles the multi-phase transition LP on a contiguous run of phase
// years. `committed` must cover all years before the window.
BuiltLp build_lp(const model::EnergySystemDataset& ds, const scen::EventSchedule& schedule,
                 const Policy& policy, const std::vector<int>& window,
                 const Commitments& committed, const SolveConfig& config = {});

struct PathwayOutcome {
  std::int64_t scenario_id = 0;
  Mode mode = Mode::perfect;
  std::string policy = "baseline";
  enum class Status { feasible, infeasible, error };
  Status status = Status::error;
  std::optional<int> fail_year;  // first failing step (myopic)
  std::string message;
  double total_cost = 0.0;
  double cost_normalized = 0.0;  // percent of the no-event perfect-foresight cost
  std::map<int, double> emissions_per_year;
  std::map<std::string, std::map<int, double>> capacities;    // tech -> year -> F
  std::map<std::string, std::map<int, double>> resource_use;  // resource -> year -> annual energy

  bool feasible() const { return status == Status::feasible; }
};

PathwayOutcome solve_perfect_foresight(const model::EnergySystemDataset& ds,
                                       const scen::EventSchedule& schedule, const Policy& policy,
                                       const SolveConfig& config = {});

// Rolling horizon: iterates the phase years, re-optimizing a short window on
// the schedule as revealed so far and committing only the current phase.
PathwayOutcome solve_myopic(const model::EnergySystemDataset& ds,
                            const scen::EventSchedule& schedule, const Policy& policy,
                            const SolveConfig& config = {});

// No-event perfect-foresight cost used to normalize every other outcome.
double baseline_cost(const model::EnergySystemDataset& ds, const SolveConfig& config = {});

void normalize_outcome(PathwayOutcome& outcome, double c_base);

}  // namespace pathways::opt
