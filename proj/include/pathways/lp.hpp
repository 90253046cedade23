#pragma once

#include <limits>
#include <string>
#include <vector>

namespace pathways::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, eq, ge };

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  double obj = 0.0;
  std::string kind;  // assembly tag, e.g. "capacity"; not used by the solver
};

struct RowEntry {
  int col = 0;
  double value = 0.0;
};

struct Row {
  std::string name;
  Sense sense = Sense::le;
  double rhs = 0.0;
  std::vector<RowEntry> entries;
  std::string kind;
};

// Minimization problem over bounded variables with sparse rows.
class LinearProgram {
 public:
  int add_variable(std::string name, double lb, double ub, double obj, std::string kind = {});
  int add_row(std::string name, Sense sense, double rhs, std::vector<RowEntry> entries,
              std::string kind = {});

  int num_variables() const { return int(variables_.size()); }
  int num_rows() const { return int(rows_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Row>& rows() const { return rows_; }
  Variable& variable(int j) { return variables_[std::size_t(j)]; }
  const Variable& variable(int j) const { return variables_[std::size_t(j)]; }
  const Row& row(int i) const { return rows_[std::size_t(i)]; }

  // Throws std::invalid_argument on non-finite coefficients or bad indices.
  void check() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Row> rows_;
};

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural variables only
  long iterations = 0;
  // Rows still violated at the end of phase 1 (infeasible problems only).
  std::vector<std::string> infeasible_rows;

  bool optimal() const { return status == SolveStatus::optimal; }
};

struct SolveOptions {
  double tol = 1e-9;            // feasibility / reduced-cost tolerance scale
  long max_iterations = 200000;
  int refactor_interval = 60;
};

// Two-phase bounded-variable revised simplex. Deterministic for a fixed
// input: fixed pivot rules, index-order tie-breaking.
Solution lp_solve(const LinearProgram& p, const SolveOptions& opts = {});
Solution lp_solve(const LinearProgram& p, double tol);

}  // namespace pathways::lp
