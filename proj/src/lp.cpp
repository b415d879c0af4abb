// Copyright 2026 The capax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "capax/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capax/error.hpp"

namespace capax::lp {
namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0), b_(rows, 0.0),
        basis_(rows, 0), z_(cols, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double& rhs(std::size_t i) { return b_[i]; }
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  // Reduced costs r_j = c_j - sum_i c_{basis(i)} a_ij, and the objective.
  void price(const std::vector<double>& cost) {
    cost_ = cost;
    for (std::size_t j = 0; j < cols_; ++j) {
      double r = cost[j];
      for (std::size_t i = 0; i < rows_; ++i) r -= cost[basis_[i]] * at(i, j);
      z_[j] = r;
    }
  }

  double objective() const {
    double v = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) v += cost_[basis_[i]] * b_[i];
    return v;
  }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j < cols_; ++j) at(r, j) /= p;
    b_[r] /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) at(i, j) -= f * at(r, j);
      b_[i] -= f * b_[r];
      if (std::abs(b_[i]) < 1e-300) b_[i] = 0.0;
    }
    const double f = z_[c];
    for (std::size_t j = 0; j < cols_; ++j) z_[j] -= f * at(r, j);
    basis_[r] = c;
  }

  // Bland's rule; columns at or beyond `limit` never enter.
  Status run(double tol, std::size_t limit, int& pivots) {
    constexpr int kMaxPivots = 200000;
    for (; pivots < kMaxPivots; ++pivots) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < limit; ++j)
        if (z_[j] > tol) {
          enter = j;
          break;
        }
      if (enter == cols_) return Status::Optimal;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        const double aij = at(i, enter);
        if (aij <= tol) continue;
        const double ratio = b_[i] / aij;
        if (ratio < best - 1e-14 ||
            (ratio <= best + 1e-14 && leave < rows_ && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == rows_) return Status::Unbounded;
      pivot(leave, enter);
    }
    raise(ErrorKind::MaxIterations, "simplex pivot limit reached");
  }

  void drop_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) at(r, j) = 0.0;
    b_[r] = 0.0;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<std::size_t> basis_;
  std::vector<double> z_;
  std::vector<double> cost_;
};

}  // namespace

Solution solve(const Problem& problem, double tol) {
  const std::size_t nv = problem.num_vars;
  const std::size_t nr = problem.rows.size();
  if (problem.objective.size() != nv || problem.rel.size() != nr ||
      problem.rhs.size() != nr)
    raise(ErrorKind::DimensionMismatch, "inconsistent LP description");

  // Normalize to rhs >= 0.
  std::vector<std::vector<double>> rows = problem.rows;
  std::vector<Relation> rel = problem.rel;
  std::vector<double> rhs = problem.rhs;
  for (std::size_t i = 0; i < nr; ++i) {
    if (rows[i].size() != nv)
      raise(ErrorKind::DimensionMismatch, "LP row has wrong length");
    if (rhs[i] < 0.0) {
      for (double& v : rows[i]) v = -v;
      rhs[i] = -rhs[i];
      if (rel[i] == Relation::LessEq)
        rel[i] = Relation::GreaterEq;
      else if (rel[i] == Relation::GreaterEq)
        rel[i] = Relation::LessEq;
    }
  }

  std::size_t slacks = 0, artificials = 0;
  for (Relation r : rel) {
    if (r != Relation::Equal) ++slacks;
    if (r != Relation::LessEq) ++artificials;
  }
  // Columns: [structural | slack/surplus | artificial]
  const std::size_t art0 = nv + slacks;
  const std::size_t cols = art0 + artificials;
  Tableau t(nr, cols);
  std::size_t s = nv, a = art0;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nv; ++j) t.at(i, j) = rows[i][j];
    t.rhs(i) = rhs[i];
    if (rel[i] == Relation::LessEq) {
      t.at(i, s) = 1.0;
      t.basis(i) = s++;
    } else {
      if (rel[i] == Relation::GreaterEq) t.at(i, s++) = -1.0;
      t.at(i, a) = 1.0;
      t.basis(i) = a++;
    }
  }

  Solution sol;
  if (artificials > 0) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t j = art0; j < cols; ++j) cost[j] = -1.0;
    t.price(cost);
    t.run(tol, cols, sol.pivots);
    double scale = 1.0;
    for (double b : rhs) scale = std::max(scale, std::abs(b));
    if (t.objective() < -tol * scale) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Pivot artificials out of the basis; rows with no other support are
    // redundant and get cleared.
    for (std::size_t i = 0; i < nr; ++i) {
      if (t.basis(i) < art0) continue;
      std::size_t best = cols;
      double mag = tol;
      for (std::size_t j = 0; j < art0; ++j)
        if (std::abs(t.at(i, j)) > mag) {
          mag = std::abs(t.at(i, j));
          best = j;
        }
      if (best < cols)
        t.pivot(i, best);
      else
        t.drop_row(i);
    }
  }

  std::vector<double> cost(cols, 0.0);
  std::copy(problem.objective.begin(), problem.objective.end(), cost.begin());
  t.price(cost);
  sol.status = t.run(tol, art0, sol.pivots);
  if (sol.status != Status::Optimal) return sol;
  sol.x.assign(nv, 0.0);
  for (std::size_t i = 0; i < nr; ++i)
    if (t.basis(i) < nv) sol.x[t.basis(i)] = t.rhs(i);
  sol.value = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.value += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace capax::lp
