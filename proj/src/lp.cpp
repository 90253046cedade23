#include "pathways/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace pathways::lp {

int LinearProgram::add_variable(std::string name, double lb, double ub, double obj,
                                std::string kind) {
  variables_.push_back({std::move(name), lb, ub, obj, std::move(kind)});
  return int(variables_.size()) - 1;
}

int LinearProgram::add_row(std::string name, Sense sense, double rhs, std::vector<RowEntry> entries,
                           std::string kind) {
  rows_.push_back({std::move(name), sense, rhs, std::move(entries), std::move(kind)});
  return int(rows_.size()) - 1;
}

void LinearProgram::check() const {
  for (const auto& v : variables_) {
    if (std::isnan(v.lb) || std::isnan(v.ub) || !std::isfinite(v.obj)) {
      throw std::invalid_argument("lp: bad bounds/objective on variable " + v.name);
    }
    if (v.lb > v.ub) throw std::invalid_argument("lp: lb > ub on variable " + v.name);
  }
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) throw std::invalid_argument("lp: non-finite rhs on row " + r.name);
    for (const auto& e : r.entries) {
      if (e.col < 0 || e.col >= num_variables()) {
        throw std::invalid_argument("lp: row " + r.name + " references unknown variable");
      }
      if (!std::isfinite(e.value)) {
        throw std::invalid_argument("lp: non-finite coefficient in row " + r.name);
      }
    }
  }
}

namespace {

struct Column {
  std::vector<int> rows;
  std::vector<double> vals;
};

// Product-form update of the basis inverse: B_new = B_old * E with
// E = I + (w - e_r) e_r^T, w = B_old^{-1} a_entering.
struct Eta {
  int r = 0;
  std::vector<int> idx;     // nonzeros of w excluding position r
  std::vector<double> val;
  double wr = 1.0;
};

enum class VarState : unsigned char { at_lower, at_upper, basic };

constexpr double kPivotTol = 1e-9;
constexpr double kZeroStep = 1e-12;

class Simplex {
 public:
  Simplex(const LinearProgram& p, const SolveOptions& opts) : p_(p), opts_(opts) {
    n_ = p.num_variables();
    m_ = p.num_rows();
    build_columns();
  }

  Solution run();

 private:
  void build_columns();
  void setup_start();
  void refactorize();
  void ftran(Eigen::VectorXd& v);
  void btran(Eigen::VectorXd& v);
  void recompute_basic_values();
  double phase1_objective() const;
  bool is_free(int j) const {
    return !std::isfinite(lb_[std::size_t(j)]) && !std::isfinite(ub_[std::size_t(j)]);
  }
  // Returns optimal/unbounded/iteration_limit for the given cost vector.
  SolveStatus iterate(const std::vector<double>& cost, double cost_scale);

  const LinearProgram& p_;
  SolveOptions opts_;
  int n_ = 0, m_ = 0, total_ = 0;

  std::vector<Column> cols_;
  std::vector<double> lb_, ub_, cost_;
  std::vector<double> value_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  std::vector<double> rhs_;
  std::vector<int> artificial_row_;  // owning row per artificial column

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::vector<Eta> etas_;
  long iterations_ = 0;
};

void Simplex::build_columns() {
  total_ = n_ + m_;
  cols_.assign(std::size_t(total_), {});
  lb_.assign(std::size_t(total_), 0.0);
  ub_.assign(std::size_t(total_), kInf);
  cost_.assign(std::size_t(total_), 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& v = p_.variable(j);
    lb_[std::size_t(j)] = v.lb;
    ub_[std::size_t(j)] = v.ub;
    cost_[std::size_t(j)] = v.obj;
  }
  rhs_.resize(std::size_t(m_));
  for (int i = 0; i < m_; ++i) {
    const auto& r = p_.row(i);
    rhs_[std::size_t(i)] = r.rhs;
    for (const auto& e : r.entries) {
      if (e.value == 0.0) continue;
      cols_[std::size_t(e.col)].rows.push_back(i);
      cols_[std::size_t(e.col)].vals.push_back(e.value);
    }
    const int sj = n_ + i;  // slack
    cols_[std::size_t(sj)].rows.push_back(i);
    cols_[std::size_t(sj)].vals.push_back(1.0);
    switch (r.sense) {
      case Sense::le:
        lb_[std::size_t(sj)] = 0.0;
        ub_[std::size_t(sj)] = kInf;
        break;
      case Sense::ge:
        lb_[std::size_t(sj)] = -kInf;
        ub_[std::size_t(sj)] = 0.0;
        break;
      case Sense::eq:
        lb_[std::size_t(sj)] = 0.0;
        ub_[std::size_t(sj)] = 0.0;
        break;
    }
  }
}

void Simplex::setup_start() {
  value_.assign(std::size_t(total_), 0.0);
  state_.assign(std::size_t(total_), VarState::at_lower);
  for (int j = 0; j < total_; ++j) {
    if (std::isfinite(lb_[std::size_t(j)])) {
      value_[std::size_t(j)] = lb_[std::size_t(j)];
      state_[std::size_t(j)] = VarState::at_lower;
    } else if (std::isfinite(ub_[std::size_t(j)])) {
      value_[std::size_t(j)] = ub_[std::size_t(j)];
      state_[std::size_t(j)] = VarState::at_upper;
    } else {
      value_[std::size_t(j)] = 0.0;
      state_[std::size_t(j)] = VarState::at_lower;  // free, parked at 0
    }
  }

  std::vector<double> resid = rhs_;
  for (int j = 0; j < n_; ++j) {
    const double xv = value_[std::size_t(j)];
    if (xv == 0.0) continue;
    const auto& c = cols_[std::size_t(j)];
    for (std::size_t k = 0; k < c.rows.size(); ++k) resid[std::size_t(c.rows[k])] -= c.vals[k] * xv;
  }

  basis_.assign(std::size_t(m_), -1);
  for (int i = 0; i < m_; ++i) {
    const int sj = n_ + i;
    const double s = resid[std::size_t(i)];
    if (s >= lb_[std::size_t(sj)] && s <= ub_[std::size_t(sj)]) {
      basis_[std::size_t(i)] = sj;
      state_[std::size_t(sj)] = VarState::basic;
      value_[std::size_t(sj)] = s;
    } else {
      const double sb = (s < lb_[std::size_t(sj)]) ? lb_[std::size_t(sj)] : ub_[std::size_t(sj)];
      value_[std::size_t(sj)] = sb;
      state_[std::size_t(sj)] = (sb == lb_[std::size_t(sj)]) ? VarState::at_lower : VarState::at_upper;
      const double gap = s - sb;
      const int aj = int(cols_.size());
      cols_.push_back({{i}, {gap > 0 ? 1.0 : -1.0}});
      artificial_row_.push_back(i);
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      value_.push_back(std::abs(gap));
      state_.push_back(VarState::basic);
      basis_[std::size_t(i)] = aj;
    }
  }
  total_ = int(cols_.size());
  refactorize();
}

void Simplex::refactorize() {
  Eigen::SparseMatrix<double> B(m_, m_);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m_; ++i) {
    const auto& c = cols_[std::size_t(basis_[std::size_t(i)])];
    for (std::size_t k = 0; k < c.rows.size(); ++k) trips.emplace_back(c.rows[k], i, c.vals[k]);
  }
  B.setFromTriplets(trips.begin(), trips.end());
  B.makeCompressed();
  lu_.compute(B);
  if (lu_.info() != Eigen::Success) {
    throw std::runtime_error("lp: singular basis during refactorization");
  }
  etas_.clear();
  recompute_basic_values();
}

void Simplex::ftran(Eigen::VectorXd& v) {
  Eigen::VectorXd z = lu_.solve(v);
  for (const auto& e : etas_) {
    const double zr = z[e.r] / e.wr;
    if (zr != 0.0) {
      for (std::size_t k = 0; k < e.idx.size(); ++k) z[e.idx[k]] -= e.val[k] * zr;
    }
    z[e.r] = zr;
  }
  v = std::move(z);
}

void Simplex::btran(Eigen::VectorXd& v) {
  // Row-vector application of E^{-1} in reverse creation order, then one
  // transposed LU solve.
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double dot = 0.0;
    for (std::size_t k = 0; k < it->idx.size(); ++k) dot += v[it->idx[k]] * it->val[k];
    v[it->r] = (v[it->r] - dot) / it->wr;
  }
  v = lu_.transpose().solve(v).eval();
}

void Simplex::recompute_basic_values() {
  Eigen::VectorXd resid(m_);
  for (int i = 0; i < m_; ++i) resid[i] = rhs_[std::size_t(i)];
  for (int j = 0; j < total_; ++j) {
    if (state_[std::size_t(j)] == VarState::basic) continue;
    const double xv = value_[std::size_t(j)];
    if (xv == 0.0) continue;
    const auto& c = cols_[std::size_t(j)];
    for (std::size_t k = 0; k < c.rows.size(); ++k) resid[c.rows[k]] -= c.vals[k] * xv;
  }
  ftran(resid);
  for (int i = 0; i < m_; ++i) value_[std::size_t(basis_[std::size_t(i)])] = resid[i];
}

double Simplex::phase1_objective() const {
  double obj = 0.0;
  for (int j = n_ + m_; j < total_; ++j) obj += value_[std::size_t(j)];
  return obj;
}

SolveStatus Simplex::iterate(const std::vector<double>& cost, double cost_scale) {
  const double d_tol = opts_.tol * (1.0 + cost_scale);
  int stall = 0;
  bool bland = false;
  int since_refactor = 0;

  Eigen::VectorXd y(m_), w(m_);
  while (true) {
    if (++iterations_ > opts_.max_iterations) return SolveStatus::iteration_limit;

    // Duals for the current basis.
    for (int i = 0; i < m_; ++i) y[i] = cost[std::size_t(basis_[std::size_t(i)])];
    btran(y);

    // Pricing: most negative improvement direction (Dantzig), or Bland when
    // stalling. Entering variable moves up from lower or down from upper.
    int entering = -1;
    int direction = +1;
    double best = d_tol;
    for (int j = 0; j < total_; ++j) {
      if (state_[std::size_t(j)] == VarState::basic) continue;
      if (lb_[std::size_t(j)] == ub_[std::size_t(j)]) continue;  // fixed
      const auto& c = cols_[std::size_t(j)];
      double d = cost[std::size_t(j)];
      for (std::size_t k = 0; k < c.rows.size(); ++k) d -= y[c.rows[k]] * c.vals[k];
      double viol = 0.0;
      int dir = 0;
      if (is_free(j)) {
        if (d < -d_tol) {
          viol = -d;
          dir = +1;
        } else if (d > d_tol) {
          viol = d;
          dir = -1;
        }
      } else if (state_[std::size_t(j)] == VarState::at_lower && d < -d_tol) {
        viol = -d;
        dir = +1;
      } else if (state_[std::size_t(j)] == VarState::at_upper && d > d_tol) {
        viol = d;
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        break;
      }
      if (viol > best) {
        best = viol;
        entering = j;
        direction = dir;
      }
    }
    if (entering < 0) return SolveStatus::optimal;

    // Ftran: direction of basic values per unit move of the entering column.
    w.setZero();
    {
      const auto& c = cols_[std::size_t(entering)];
      for (std::size_t k = 0; k < c.rows.size(); ++k) w[c.rows[k]] = c.vals[k];
    }
    ftran(w);

    // Ratio test. Basic i changes at rate -direction * w_i.
    double limit = kInf;
    if (std::isfinite(lb_[std::size_t(entering)]) && std::isfinite(ub_[std::size_t(entering)])) {
      limit = ub_[std::size_t(entering)] - lb_[std::size_t(entering)];
    }
    int leaving_pos = -1;     // position in basis, -1 = bound flip
    double leaving_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double wi = w[i];
      if (std::abs(wi) <= kPivotTol) continue;
      const int bj = basis_[std::size_t(i)];
      const double rate = -direction * wi;
      double room;
      if (rate > 0.0) {
        if (!std::isfinite(ub_[std::size_t(bj)])) continue;
        room = (ub_[std::size_t(bj)] - value_[std::size_t(bj)]) / rate;
      } else {
        if (!std::isfinite(lb_[std::size_t(bj)])) continue;
        room = (value_[std::size_t(bj)] - lb_[std::size_t(bj)]) / (-rate);
      }
      const double cand = std::max(room, 0.0);  // clamp tiny bound drift
      if (cand < limit - 1e-12) {
        limit = cand;
        leaving_pos = i;
        leaving_pivot = wi;
      } else if (leaving_pos >= 0 && cand < limit + 1e-12) {
        // Tie among basics: prefer the larger pivot for stability, the
        // lowest basis index under Bland's rule.
        const bool take = bland ? basis_[std::size_t(i)] < basis_[std::size_t(leaving_pos)]
                                : std::abs(wi) > std::abs(leaving_pivot);
        if (take) {
          leaving_pos = i;
          leaving_pivot = wi;
        }
      }
    }

    if (!std::isfinite(limit)) {
      return SolveStatus::unbounded;
    }

    const double step = limit;
    // Move the entering variable and adjust basics.
    value_[std::size_t(entering)] += direction * step;
    if (step != 0.0) {
      for (int i = 0; i < m_; ++i) {
        if (w[i] != 0.0) {
          const int bj = basis_[std::size_t(i)];
          value_[std::size_t(bj)] -= direction * w[i] * step;
        }
      }
    }

    if (leaving_pos < 0) {
      // Bound flip: entering traversed its whole range; no basis change.
      state_[std::size_t(entering)] =
          (state_[std::size_t(entering)] == VarState::at_lower) ? VarState::at_upper
                                                                : VarState::at_lower;
    } else {
      const int leaving = basis_[std::size_t(leaving_pos)];
      const double rate = -direction * w[leaving_pos];
      state_[std::size_t(leaving)] = rate > 0.0 ? VarState::at_upper : VarState::at_lower;
      value_[std::size_t(leaving)] =
          rate > 0.0 ? ub_[std::size_t(leaving)] : lb_[std::size_t(leaving)];
      basis_[std::size_t(leaving_pos)] = entering;
      state_[std::size_t(entering)] = VarState::basic;

      Eta e;
      e.r = leaving_pos;
      e.wr = w[leaving_pos];
      for (int i = 0; i < m_; ++i) {
        if (i != leaving_pos && w[i] != 0.0) {
          e.idx.push_back(i);
          e.val.push_back(w[i]);
        }
      }
      etas_.push_back(std::move(e));
      if (++since_refactor >= opts_.refactor_interval) {
        refactorize();
        since_refactor = 0;
      }
    }

    if (step <= kZeroStep) {
      if (++stall > 80) bland = true;
    } else {
      stall = 0;
      bland = false;
    }
  }
}

Solution Simplex::run() {
  if (m_ == 0) {
    // No rows: every variable sits at its cheapest bound.
    Solution sol;
    sol.x.resize(std::size_t(n_));
    for (int j = 0; j < n_; ++j) {
      const auto& v = p_.variable(j);
      double x;
      if (v.obj > 0.0) {
        x = v.lb;
      } else if (v.obj < 0.0) {
        x = v.ub;
      } else {
        x = std::isfinite(v.lb) ? v.lb : (std::isfinite(v.ub) ? v.ub : 0.0);
      }
      if (!std::isfinite(x)) return {SolveStatus::unbounded, 0.0, {}, 0};
      sol.x[std::size_t(j)] = x;
      sol.objective += v.obj * x;
    }
    sol.status = SolveStatus::optimal;
    return sol;
  }
  setup_start();

  // Phase 1: drive artificial infeasibility to zero.
  double max_rhs = 1.0;
  for (double b : rhs_) max_rhs = std::max(max_rhs, std::abs(b));
  if (total_ > n_ + m_) {
    std::vector<double> phase_cost(std::size_t(total_), 0.0);
    for (int j = n_ + m_; j < total_; ++j) phase_cost[std::size_t(j)] = 1.0;
    const SolveStatus st = iterate(phase_cost, 1.0);
    if (st == SolveStatus::iteration_limit) return {SolveStatus::iteration_limit, 0.0, {}, iterations_};
    if (st == SolveStatus::unbounded) {
      throw std::runtime_error("lp: phase-1 reported unbounded");
    }
    recompute_basic_values();
    if (phase1_objective() > 1e-7 * max_rhs) {
      Solution sol;
      sol.status = SolveStatus::infeasible;
      sol.objective = phase1_objective();
      sol.iterations = iterations_;
      for (int j = n_ + m_; j < total_; ++j) {
        if (value_[std::size_t(j)] > 1e-7 * max_rhs) {
          sol.infeasible_rows.push_back(p_.row(artificial_row_[std::size_t(j - n_ - m_)]).name);
        }
      }
      return sol;
    }
    // Pin artificials at zero for phase 2.
    for (int j = n_ + m_; j < total_; ++j) {
      ub_[std::size_t(j)] = 0.0;
      if (state_[std::size_t(j)] != VarState::basic) {
        value_[std::size_t(j)] = 0.0;
        state_[std::size_t(j)] = VarState::at_lower;
      }
    }
  }

  double cost_scale = 1.0;
  for (int j = 0; j < n_; ++j) cost_scale = std::max(cost_scale, std::abs(cost_[std::size_t(j)]));
  const SolveStatus st = iterate(cost_, cost_scale);
  if (st == SolveStatus::iteration_limit) return {SolveStatus::iteration_limit, 0.0, {}, iterations_};
  if (st == SolveStatus::unbounded) return {SolveStatus::unbounded, 0.0, {}, iterations_};

  recompute_basic_values();
  // A vanished-but-nonzero artificial would mean the final point drifted off
  // the feasible set.
  if (total_ > n_ + m_ && phase1_objective() > 1e-6 * max_rhs) {
    return {SolveStatus::infeasible, phase1_objective(), {}, iterations_};
  }

  Solution sol;
  sol.status = SolveStatus::optimal;
  sol.iterations = iterations_;
  sol.x.resize(std::size_t(n_));
  for (int j = 0; j < n_; ++j) sol.x[std::size_t(j)] = value_[std::size_t(j)];
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += cost_[std::size_t(j)] * value_[std::size_t(j)];
  sol.objective = obj;
  return sol;
}

}  // namespace

Solution lp_solve(const LinearProgram& p, const SolveOptions& opts) {
  p.check();
  Simplex s(p, opts);
  return s.run();
}

Solution lp_solve(const LinearProgram& p, double tol) {
  SolveOptions o;
  o.tol = tol;
  return lp_solve(p, o);
}

}  // namespace pathways::lp
