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

#ifndef CAPAX_LP_HPP_
#define CAPAX_LP_HPP_

// Dense two-phase simplex with Bland's rule. Meant for the few-hundred-
// variable feasibility problems that arise in hull classification; no
// sparsity, no presolve.

#include <cstddef>
#include <vector>

namespace capax::lp {

enum class Relation { LessEq, Equal, GreaterEq };

// maximize objective . x  subject to  rows[i] . x (rel[i]) rhs[i],  x >= 0
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> rel;
  std::vector<double> rhs;

  void add_row(std::vector<double> coeffs, Relation r, double b) {
    rows.push_back(std::move(coeffs));
    rel.push_back(r);
    rhs.push_back(b);
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

Solution solve(const Problem& problem, double tol = 1e-9);

}  // namespace capax::lp

#endif  // CAPAX_LP_HPP_
