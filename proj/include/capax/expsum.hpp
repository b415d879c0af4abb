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

#ifndef CAPAX_EXPSUM_HPP_
#define CAPAX_EXPSUM_HPP_

// Weighted exponential sums
//
//   Phi_d(y) = sum_j d_j exp(<y, u_j>),   Psi(d) = inf_y Phi_d(y),
//
// with d >= 0. Whether the infimum is zero, attained, or approached only
// at infinity is decided by where the origin sits relative to the convex
// hull of the supported u_j; psi_minimize classifies first and then runs
// damped Newton on log Phi restricted to the face that carries the origin.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capax/coeffs.hpp"

namespace capax {

class ExpSumProblem {
 public:
  // Throws DimensionMismatch on ragged input and ParseError on negative or
  // non-finite weights.
  ExpSumProblem(std::vector<std::vector<double>> u, std::vector<double> d);

  // u_j = j - (m/n) 1_n over J_{n,m}; negative roundoff in d is clamped.
  static ExpSumProblem from_coefficients(const CoeffVector& d);

  std::size_t dim() const { return dim_; }
  std::size_t terms() const { return d_.size(); }
  std::span<const double> u(std::size_t j) const {
    return {u_.data() + j * dim_, dim_};
  }
  std::span<const double> u_flat() const { return u_; }
  std::span<const double> d() const { return d_; }

  // Same problem with every u_j replaced by u_j - theta.
  ExpSumProblem shifted(std::span<const double> theta) const;
  ExpSumProblem with_weights(std::vector<double> d) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> u_;
  std::vector<double> d_;
};

double phi_eval(const ExpSumProblem& p, std::span<const double> y);
// log Phi_d(y); -inf when every weight is zero.
double log_phi(const ExpSumProblem& p, std::span<const double> y);

struct GradHess {
  std::vector<double> gradient;
  std::vector<double> hessian;  // dim x dim row-major
};
// Derivatives of Phi_d itself (not log Phi_d).
GradHess grad_hess(const ExpSumProblem& p, std::span<const double> y);

enum class HullTag { InteriorZero, BoundaryZero, ExteriorZero };
std::string_view to_string(HullTag tag);

struct HullClassification {
  HullTag tag = HullTag::ExteriorZero;
  std::vector<std::size_t> support;      // j with d_j > support_eps
  std::vector<std::size_t> active_face;  // j whose u_j lie on the minimal
                                         // face containing 0 (empty when
                                         // ExteriorZero)
};

// support_eps < 0 selects the default 1e-14 * ||d||_inf. Throws
// EmptySupport.
HullClassification classify_hull(const ExpSumProblem& p, double support_eps = -1.0);

// A direction w with <w, u_j> = 0 on the active face and <w, u_j> <= -1 on
// the rest of the support. Only meaningful for BoundaryZero.
std::vector<double> recession_direction(const ExpSumProblem& p,
                                        const HullClassification& hull);

struct PsiResult {
  double value = 0.0;
  std::optional<std::vector<double>> minimizer;  // InteriorZero only
  std::vector<double> face_minimizer;  // minimizer of the face problem
                                       // (empty when ExteriorZero)
  HullClassification classification;
  double grad_residual = 0.0;
  int iterations = 0;
  bool max_iterations_hit = false;
};

struct PsiOptions {
  double tol = 1e-10;
  int max_iterations = 200;
  double support_eps = -1.0;
};

PsiResult psi_minimize(const ExpSumProblem& p, const PsiOptions& opts = {});

struct NearMinimizer {
  std::vector<double> y;
  double norm_inf = 0.0;
  double value = 0.0;  // Phi_d(y)
};

// y with Phi_d(y) <= Psi(d) + delta. Throws NotSupported for ExteriorZero
// problems.
NearMinimizer near_minimizer(const ExpSumProblem& p, double delta,
                             const PsiOptions& opts = {});

struct SemicontinuityCheck {
  bool holds = false;
  double psi_d = 0.0;      // Psi(d)
  double psi_base = 0.0;   // Psi(d~)
  double bound = 0.0;      // (1 - delta / delta0) Psi(d~)
  double delta0 = 0.0;
  double slack = 0.0;      // psi_d - bound
};

// Checks Psi(d) >= (1 - delta/delta0) Psi(d~), delta0 = min_{d~_j > 0} d~_j.
// Throws DeltaTooLarge unless ||d - d~||_inf < delta < delta0.
SemicontinuityCheck semicontinuity_bound(const ExpSumProblem& base,
                                         std::span<const double> d,
                                         double delta,
                                         const PsiOptions& opts = {});

struct EntropyDual {
  std::vector<double> p;      // maximizer, aligned with the problem's terms
  double value = 0.0;         // sum_j p_j log(d_j / p_j)
  double dual_value = 0.0;    // inf_y log sum_j d_j exp(<y, u_j - theta>)
  double gap = 0.0;
  std::vector<double> moment_residual;  // sum_j p_j u_j - theta
};

// Maximum entropy program with moment constraint sum_j p_j u_j = theta,
// solved through its dual. Throws InfeasibleMoment for theta outside the
// hull of the supported u_j.
EntropyDual entropy_dual(const ExpSumProblem& p, std::span<const double> theta,
                         const PsiOptions& opts = {});

// sum_j p_j log(p_j / d_j) with 0 log 0 = 0. Throws SupportViolation.
double kl_divergence(std::span<const double> p, std::span<const double> d);

std::string to_json(const PsiResult& r);
std::string to_json(const EntropyDual& r);
ExpSumProblem problem_from_json(std::string_view text);
std::string to_json(const ExpSumProblem& p);

}  // namespace capax

#endif  // CAPAX_EXPSUM_HPP_
