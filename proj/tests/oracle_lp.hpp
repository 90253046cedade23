// Test-only LP oracle: exhaustive vertex enumeration over dense problems
// with finite variable bounds. Independent of the simplex implementation.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pathways/lp.hpp"

namespace testutil {

struct DenseLp {
  int n = 0, m = 0;
  std::vector<double> lb, ub, obj;
  std::vector<std::vector<double>> a;
  std::vector<pathways::lp::Sense> sense;
  std::vector<double> rhs;
};

struct VertexResult {
  bool feasible = false;
  double objective = 0.0;
};

// Gaussian elimination with partial pivoting; returns false if singular.
inline bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
  const int n = int(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[std::size_t(r)][std::size_t(col)]) >
          std::abs(a[std::size_t(piv)][std::size_t(col)])) {
        piv = r;
      }
    }
    if (std::abs(a[std::size_t(piv)][std::size_t(col)]) < 1e-10) return false;
    std::swap(a[std::size_t(piv)], a[std::size_t(col)]);
    std::swap(b[std::size_t(piv)], b[std::size_t(col)]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[std::size_t(r)][std::size_t(col)] / a[std::size_t(col)][std::size_t(col)];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) {
        a[std::size_t(r)][std::size_t(c)] -= f * a[std::size_t(col)][std::size_t(c)];
      }
      b[std::size_t(r)] -= f * b[std::size_t(col)];
    }
  }
  x.assign(std::size_t(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[std::size_t(r)];
    for (int c = r + 1; c < n; ++c) s -= a[std::size_t(r)][std::size_t(c)] * x[std::size_t(c)];
    x[std::size_t(r)] = s / a[std::size_t(r)][std::size_t(r)];
  }
  return true;
}

// Minimum objective over all basic feasible points: every choice of n tight
// hyperplanes (rows or variable bounds) defines a candidate vertex. Works
// because all variable bounds are finite, so the feasible set is a polytope.
inline VertexResult vertex_enumerate(const DenseLp& p) {
  const int n = p.n;
  // Hyperplane pool: all rows as equalities, then both bounds per variable.
  struct Plane {
    std::vector<double> coef;
    double rhs;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < p.m; ++i) planes.push_back({p.a[std::size_t(i)], p.rhs[std::size_t(i)]});
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(std::size_t(n), 0.0);
    e[std::size_t(j)] = 1.0;
    planes.push_back({e, p.lb[std::size_t(j)]});
    planes.push_back({e, p.ub[std::size_t(j)]});
  }

  VertexResult best;
  std::vector<int> pick(static_cast<std::size_t>(n), 0);
  const int total = int(planes.size());
  // Iterate all n-combinations of the plane pool.
  std::vector<int> comb(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) comb[std::size_t(i)] = i;
  auto advance = [&]() {
    int i = n - 1;
    while (i >= 0 && comb[std::size_t(i)] == total - n + i) --i;
    if (i < 0) return false;
    ++comb[std::size_t(i)];
    for (int k = i + 1; k < n; ++k) comb[std::size_t(k)] = comb[std::size_t(k - 1)] + 1;
    return true;
  };
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i = 0; i < n; ++i) {
      a.push_back(planes[std::size_t(comb[std::size_t(i)])].coef);
      b.push_back(planes[std::size_t(comb[std::size_t(i)])].rhs);
    }
    std::vector<double> x;
    if (!solve_square(a, b, x)) continue;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      ok = x[std::size_t(j)] >= p.lb[std::size_t(j)] - 1e-7 &&
           x[std::size_t(j)] <= p.ub[std::size_t(j)] + 1e-7;
    }
    for (int i = 0; i < p.m && ok; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += p.a[std::size_t(i)][std::size_t(j)] * x[std::size_t(j)];
      switch (p.sense[std::size_t(i)]) {
        case pathways::lp::Sense::le:
          ok = lhs <= p.rhs[std::size_t(i)] + 1e-7;
          break;
        case pathways::lp::Sense::ge:
          ok = lhs >= p.rhs[std::size_t(i)] - 1e-7;
          break;
        case pathways::lp::Sense::eq:
          ok = std::abs(lhs - p.rhs[std::size_t(i)]) <= 1e-7;
          break;
      }
    }
    if (!ok) continue;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += p.obj[std::size_t(j)] * x[std::size_t(j)];
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
    }
  } while (advance());
  (void)pick;
  return best;
}

inline DenseLp random_dense_lp(std::mt19937& gen, int n, int m) {
  DenseLp p;
  p.n = n;
  p.m = m;
  std::uniform_int_distribution<int> coef(-2, 5);
  std::uniform_int_distribution<int> rhs_le(2, 18);
  std::uniform_int_distribution<int> rhs_ge(-2, 7);
  std::uniform_int_distribution<int> sense_pick(0, 2);
  std::uniform_real_distribution<double> cost(-3.0, 3.0);
  for (int j = 0; j < n; ++j) {
    p.lb.push_back(0.0);
    p.ub.push_back(4.0);
    p.obj.push_back(cost(gen));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> row;
    for (int j = 0; j < n; ++j) row.push_back(double(coef(gen)));
    p.a.push_back(std::move(row));
    const bool ge = sense_pick(gen) == 2;
    p.sense.push_back(ge ? pathways::lp::Sense::ge : pathways::lp::Sense::le);
    p.rhs.push_back(double(ge ? rhs_ge(gen) : rhs_le(gen)));
  }
  return p;
}

}  // namespace testutil
