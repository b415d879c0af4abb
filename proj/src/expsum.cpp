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

#include "capax/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "capax/error.hpp"
#include "capax/kernels.hpp"
#include "capax/lp.hpp"

namespace capax {

ExpSumProblem::ExpSumProblem(std::vector<std::vector<double>> u,
                             std::vector<double> d)
    : d_(std::move(d)) {
  if (u.size() != d_.size())
    raise(ErrorKind::DimensionMismatch,
          std::to_string(u.size()) + " vectors but " + std::to_string(d_.size()) +
              " weights");
  if (u.empty()) raise(ErrorKind::DimensionMismatch, "problem has no terms");
  dim_ = u.front().size();
  u_.reserve(u.size() * dim_);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j].size() != dim_)
      raise(ErrorKind::DimensionMismatch,
            "u[" + std::to_string(j) + "] has dimension " +
                std::to_string(u[j].size()) + ", expected " + std::to_string(dim_));
    for (double x : u[j]) {
      if (!std::isfinite(x))
        raise(ErrorKind::ParseError, "u[" + std::to_string(j) + "] is not finite");
      u_.push_back(x);
    }
    if (!std::isfinite(d_[j]) || d_[j] < 0.0)
      raise(ErrorKind::ParseError,
            "d[" + std::to_string(j) + "] must be finite and nonnegative");
  }
}

ExpSumProblem ExpSumProblem::from_coefficients(const CoeffVector& d) {
  const double shift = static_cast<double>(d.m) / static_cast<double>(d.n);
  const double floor = -1e-9 * std::max(1.0, d.max_abs());
  std::vector<std::vector<double>> u(d.size(), std::vector<double>(d.n));
  std::vector<double> w(d.size());
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t l = 0; l < d.n; ++l) u[r][l] = d.index[r][l] - shift;
    if (d.values[r] < floor)
      raise(ErrorKind::ParseError,
            "coefficient " + std::to_string(r) + " is negative (" +
                std::to_string(d.values[r]) + ")");
    w[r] = std::max(0.0, d.values[r]);
  }
  return ExpSumProblem(std::move(u), std::move(w));
}

ExpSumProblem ExpSumProblem::shifted(std::span<const double> theta) const {
  if (theta.size() != dim_)
    raise(ErrorKind::DimensionMismatch, "theta must have the problem dimension");
  std::vector<std::vector<double>> u(terms(), std::vector<double>(dim_));
  for (std::size_t j = 0; j < terms(); ++j)
    for (std::size_t c = 0; c < dim_; ++c) u[j][c] = u_[j * dim_ + c] - theta[c];
  return ExpSumProblem(std::move(u), d_);
}

ExpSumProblem ExpSumProblem::with_weights(std::vector<double> d) const {
  std::vector<std::vector<double>> u(terms(), std::vector<double>(dim_));
  for (std::size_t j = 0; j < terms(); ++j)
    for (std::size_t c = 0; c < dim_; ++c) u[j][c] = u_[j * dim_ + c];
  return ExpSumProblem(std::move(u), std::move(d));
}

namespace {

std::vector<double> exponents(const ExpSumProblem& p, std::span<const double> y) {
  if (y.size() != p.dim())
    raise(ErrorKind::DimensionMismatch, "y must have the problem dimension");
  std::vector<double> s(p.terms());
  kernels::active().dot_rows(p.u_flat().data(), p.terms(), p.dim(), y.data(),
                             s.data());
  return s;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Problem restricted to a subset of terms, in coordinates of an orthonormal
// basis of span{u_j : j in subset}.
struct FaceProblem {
  std::size_t rank = 0;
  std::vector<double> basis;      // dim x rank, column-major by basis vector
  std::vector<double> projected;  // terms x rank
  std::vector<double> log_d;      // terms
};

FaceProblem make_face(const ExpSumProblem& p, const std::vector<std::size_t>& face) {
  const std::size_t n = p.dim();
  FaceProblem f;
  double scale = 0.0;
  for (std::size_t j : face) scale = std::max(scale, norm2(p.u(j)));
  std::vector<std::vector<double>> q;
  for (std::size_t j : face) {
    std::vector<double> v(p.u(j).begin(), p.u(j).end());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : q) {
        double dot = 0.0;
        for (std::size_t c = 0; c < n; ++c) dot += b[c] * v[c];
        for (std::size_t c = 0; c < n; ++c) v[c] -= dot * b[c];
      }
    const double nv = norm2(v);
    if (nv > 1e-9 * std::max(scale, 1.0)) {
      for (double& x : v) x /= nv;
      q.push_back(std::move(v));
    }
    if (q.size() == n) break;
  }
  f.rank = q.size();
  f.basis.resize(n * f.rank);
  for (std::size_t r = 0; r < f.rank; ++r)
    for (std::size_t c = 0; c < n; ++c) f.basis[r * n + c] = q[r][c];
  f.projected.resize(face.size() * f.rank);
  f.log_d.resize(face.size());
  for (std::size_t t = 0; t < face.size(); ++t) {
    const auto uj = p.u(face[t]);
    for (std::size_t r = 0; r < f.rank; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += q[r][c] * uj[c];
      f.projected[t * f.rank + r] = dot;
    }
    f.log_d[t] = std::log(p.d()[face[t]]);
  }
  return f;
}

// g(z) = log sum_t exp(log_d_t + <z, v_t>) with Gibbs weights, gradient and
// Hessian (covariance of v under the weights).
struct LogSumExp {
  double value;
  std::vector<double> grad;
  std::vector<double> hess;
};

LogSumExp face_eval(const FaceProblem& f, std::span<const double> z, bool derivs) {
  const std::size_t terms = f.log_d.size();
  const std::size_t r = f.rank;
  std::vector<double> s(terms, 0.0);
  if (r > 0) kernels::active().dot_rows(f.projected.data(), terms, r, z.data(), s.data());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < terms; ++t) {
    s[t] += f.log_d[t];
    mx = std::max(mx, s[t]);
  }
  double z0 = 0.0;
  for (std::size_t t = 0; t < terms; ++t) {
    s[t] = std::exp(s[t] - mx);
    z0 += s[t];
  }
  LogSumExp out{mx + std::log(z0), {}, {}};
  if (!derivs || r == 0) {
    out.grad.assign(r, 0.0);
    out.hess.assign(r * r, 0.0);
    return out;
  }
  for (double& w : s) w /= z0;
  out.grad.resize(r);
  out.hess.resize(r * r);
  kernels::active().weighted_row_sum(s.data(), f.projected.data(), terms, r,
                                     out.grad.data());
  kernels::active().weighted_gram(s.data(), f.projected.data(), terms, r,
                                  out.hess.data());
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) out.hess[a * r + b] -= out.grad[a] * out.grad[b];
  return out;
}

// Solves H x = rhs for symmetric positive semidefinite H, adding a ridge if
// the Cholesky factorization breaks down.
std::vector<double> solve_spd(std::vector<double> h, std::vector<double> rhs,
                              std::size_t r) {
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < r; ++i) diag_scale = std::max(diag_scale, h[i * r + i]);
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    std::vector<double> l(r * r, 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < r && ok; ++j) {
      double dj = h[j * r + j] + ridge;
      for (std::size_t k = 0; k < j; ++k) dj -= l[j * r + k] * l[j * r + k];
      if (!(dj > 1e-300)) {
        ok = false;
        break;
      }
      l[j * r + j] = std::sqrt(dj);
      for (std::size_t i = j + 1; i < r; ++i) {
        double s = h[i * r + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * r + k] * l[j * r + k];
        l[i * r + j] = s / l[j * r + j];
      }
    }
    if (ok) {
      std::vector<double> x = rhs;
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < i; ++k) x[i] -= l[i * r + k] * x[k];
        x[i] /= l[i * r + i];
      }
      for (std::size_t i = r; i-- > 0;) {
        for (std::size_t k = i + 1; k < r; ++k) x[i] -= l[k * r + i] * x[k];
        x[i] /= l[i * r + i];
      }
      return x;
    }
    ridge = ridge == 0.0 ? 1e-12 * std::max(diag_scale, 1e-300) : ridge * 10.0;
  }
  // -gradient fallback
  for (double& v : rhs) v /= std::max(diag_scale, 1.0);
  return rhs;
}

struct FaceMinimum {
  std::vector<double> y;  // full coordinates
  double log_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool hit_limit = false;
};

FaceMinimum minimize_face(const ExpSumProblem& p, const std::vector<std::size_t>& face,
                          const PsiOptions& opts) {
  const FaceProblem f = make_face(p, face);
  const std::size_t r = f.rank;
  std::vector<double> z(r, 0.0);
  FaceMinimum out;
  LogSumExp cur = face_eval(f, z, true);
  int it = 0;
  for (;; ++it) {
    out.grad_norm = norm2(cur.grad);
    if (out.grad_norm <= opts.tol || r == 0) break;
    if (it >= opts.max_iterations) {
      out.hit_limit = true;
      break;
    }
    std::vector<double> neg(r);
    for (std::size_t a = 0; a < r; ++a) neg[a] = -cur.grad[a];
    std::vector<double> step = solve_spd(cur.hess, neg, r);
    double slope = 0.0;
    for (std::size_t a = 0; a < r; ++a) slope += cur.grad[a] * step[a];
    if (slope >= 0.0) {
      step = neg;
      slope = -out.grad_norm * out.grad_norm;
    }
    double t = 1.0;
    std::vector<double> trial(r);
    LogSumExp next{};
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t a = 0; a < r; ++a) trial[a] = z[a] + t * step[a];
      next = face_eval(f, trial, true);
      if (next.value <= cur.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No further decrease at double precision; take the tiny step if it
      // did not increase the objective, then stop.
      if (next.value <= cur.value) {
        z = trial;
        cur = next;
      }
      out.grad_norm = norm2(cur.grad);
      break;
    }
    z = trial;
    cur = next;
  }
  out.iterations = it;
  out.log_value = cur.value;
  out.y.assign(p.dim(), 0.0);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t c = 0; c < p.dim(); ++c) out.y[c] += z[a] * f.basis[a * p.dim() + c];
  return out;
}

}  // namespace

double log_phi(const ExpSumProblem& p, std::span<const double> y) {
  const std::vector<double> s = exponents(p, y);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.terms(); ++j)
    if (p.d()[j] > 0.0) mx = std::max(mx, s[j] + std::log(p.d()[j]));
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (std::size_t j = 0; j < p.terms(); ++j)
    if (p.d()[j] > 0.0) acc += std::exp(s[j] + std::log(p.d()[j]) - mx);
  return mx + std::log(acc);
}

double phi_eval(const ExpSumProblem& p, std::span<const double> y) {
  return std::exp(log_phi(p, y));
}

GradHess grad_hess(const ExpSumProblem& p, std::span<const double> y) {
  std::vector<double> w = exponents(p, y);
  for (std::size_t j = 0; j < p.terms(); ++j)
    w[j] = p.d()[j] > 0.0 ? p.d()[j] * std::exp(w[j]) : 0.0;
  GradHess out;
  out.gradient.resize(p.dim());
  out.hessian.resize(p.dim() * p.dim());
  kernels::active().weighted_row_sum(w.data(), p.u_flat().data(), p.terms(),
                                     p.dim(), out.gradient.data());
  kernels::active().weighted_gram(w.data(), p.u_flat().data(), p.terms(), p.dim(),
                                  out.hessian.data());
  return out;
}

std::string_view to_string(HullTag tag) {
  switch (tag) {
    case HullTag::InteriorZero: return "InteriorZero";
    case HullTag::BoundaryZero: return "BoundaryZero";
    case HullTag::ExteriorZero: return "ExteriorZero";
  }
  return "Unknown";
}

HullClassification classify_hull(const ExpSumProblem& p, double support_eps) {
  const double dmax = norm_inf(p.d());
  const double eps = support_eps >= 0.0 ? support_eps : 1e-14 * dmax;
  HullClassification out;
  for (std::size_t j = 0; j < p.terms(); ++j)
    if (p.d()[j] > eps) out.support.push_back(j);
  if (out.support.empty()) raise(ErrorKind::EmptySupport, "no weight above support_eps");

  // maximize sum s_j  s.t.  sum_j (s_j + b_j) u_j = 0,  0 <= s_j <= 1, b >= 0.
  // Any nonnegative combination of the support vanishing at 0 can be scaled
  // up, so at the optimum s_j = 1 exactly for the j that carry positive
  // weight in some representation of 0, i.e. for u_j on the minimal face
  // containing 0, and s_j = 0 otherwise.
  const std::size_t k = out.support.size();
  const std::size_t n = p.dim();
  lp::Problem lpp;
  lpp.num_vars = 2 * k;
  lpp.objective.assign(2 * k, 0.0);
  for (std::size_t t = 0; t < k; ++t) lpp.objective[t] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> row(2 * k);
    bool nonzero = false;
    for (std::size_t t = 0; t < k; ++t) {
      const double v = p.u(out.support[t])[c];
      row[t] = v;
      row[k + t] = v;
      nonzero = nonzero || v != 0.0;
    }
    if (nonzero) lpp.add_row(std::move(row), lp::Relation::Equal, 0.0);
  }
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<double> row(2 * k, 0.0);
    row[t] = 1.0;
    lpp.add_row(std::move(row), lp::Relation::LessEq, 1.0);
  }
  const lp::Solution sol = lp::solve(lpp);
  if (sol.status != lp::Status::Optimal)
    raise(ErrorKind::NoConvergence, "hull classification LP did not solve");
  for (std::size_t t = 0; t < k; ++t)
    if (sol.x[t] > 0.5) out.active_face.push_back(out.support[t]);

  if (out.active_face.empty())
    out.tag = HullTag::ExteriorZero;
  else if (out.active_face.size() == k)
    out.tag = HullTag::InteriorZero;
  else
    out.tag = HullTag::BoundaryZero;
  return out;
}

std::vector<double> recession_direction(const ExpSumProblem& p,
                                        const HullClassification& hull) {
  const std::size_t n = p.dim();
  std::vector<bool> on_face(p.terms(), false);
  for (std::size_t j : hull.active_face) on_face[j] = true;
  // w = wp - wm; minimize ||wp||_1 + ||wm||_1.
  lp::Problem lpp;
  lpp.num_vars = 2 * n;
  lpp.objective.assign(2 * n, -1.0);
  for (std::size_t j : hull.support) {
    std::vector<double> row(2 * n);
    for (std::size_t c = 0; c < n; ++c) {
      row[c] = p.u(j)[c];
      row[n + c] = -p.u(j)[c];
    }
    if (on_face[j])
      lpp.add_row(std::move(row), lp::Relation::Equal, 0.0);
    else
      lpp.add_row(std::move(row), lp::Relation::LessEq, -1.0);
  }
  const lp::Solution sol = lp::solve(lpp);
  if (sol.status != lp::Status::Optimal)
    raise(ErrorKind::NoConvergence, "no supporting direction for the active face");
  std::vector<double> w(n);
  for (std::size_t c = 0; c < n; ++c) w[c] = sol.x[c] - sol.x[n + c];
  return w;
}

PsiResult psi_minimize(const ExpSumProblem& p, const PsiOptions& opts) {
  PsiResult res;
  res.classification = classify_hull(p, opts.support_eps);
  if (res.classification.tag == HullTag::ExteriorZero) {
    res.value = 0.0;
    return res;
  }
  // Off-face terms vanish along the recession direction, so the infimum is
  // the infimum of the face problem, which is attained.
  const FaceMinimum fm = minimize_face(p, res.classification.active_face, opts);
  res.face_minimizer = fm.y;
  res.grad_residual = fm.grad_norm;
  res.iterations = fm.iterations;
  res.max_iterations_hit = fm.hit_limit;
  if (res.classification.tag == HullTag::InteriorZero) {
    res.value = phi_eval(p, fm.y);
    res.minimizer = fm.y;
  } else {
    res.value = std::exp(fm.log_value);
  }
  return res;
}

NearMinimizer near_minimizer(const ExpSumProblem& p, double delta,
                             const PsiOptions& opts) {
  if (!(delta > 0.0)) raise(ErrorKind::DeltaTooLarge, "delta must be positive");
  const PsiResult psi = psi_minimize(p, opts);
  NearMinimizer out;
  const HullTag tag = psi.classification.tag;
  if (tag == HullTag::ExteriorZero)
    raise(ErrorKind::NotSupported, "near-minimizers need 0 in the hull of the support");
  if (tag == HullTag::InteriorZero) {
    out.y = *psi.minimizer;
  } else {
    const double target = psi.value + delta;
    const std::vector<double> zero(p.dim(), 0.0);
    if (phi_eval(p, zero) <= target) {
      out.y = zero;
    } else {
      const std::vector<double> w = recession_direction(p, psi.classification);
      const std::vector<double>& base = psi.face_minimizer;
      auto along = [&](double t) {
        std::vector<double> y(p.dim());
        for (std::size_t c = 0; c < p.dim(); ++c) y[c] = base[c] + t * w[c];
        return y;
      };
      double lo = 0.0, hi = 1.0;
      if (phi_eval(p, base) <= target) {
        hi = 0.0;
      } else {
        int doublings = 0;
        while (phi_eval(p, along(hi)) > target) {
          lo = hi;
          hi *= 2.0;
          if (++doublings > 80)
            raise(ErrorKind::NoConvergence, "recession ray does not reach Psi + delta");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          if (phi_eval(p, along(mid)) > target)
            lo = mid;
          else
            hi = mid;
        }
      }
      out.y = along(hi);
    }
  }
  out.value = phi_eval(p, out.y);
  out.norm_inf = norm_inf(out.y);
  return out;
}

SemicontinuityCheck semicontinuity_bound(const ExpSumProblem& base,
                                         std::span<const double> d, double delta,
                                         const PsiOptions& opts) {
  if (d.size() != base.terms())
    raise(ErrorKind::DimensionMismatch, "perturbed weights have the wrong length");
  SemicontinuityCheck out;
  out.delta0 = std::numeric_limits<double>::infinity();
  double dist = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (base.d()[j] > 0.0) out.delta0 = std::min(out.delta0, base.d()[j]);
    dist = std::max(dist, std::abs(d[j] - base.d()[j]));
  }
  if (!(dist < delta) || !(delta < out.delta0))
    raise(ErrorKind::DeltaTooLarge,
          "need ||d - d~|| < delta < delta0; got distance " + std::to_string(dist) +
              ", delta " + std::to_string(delta) + ", delta0 " +
              std::to_string(out.delta0));
  const ExpSumProblem perturbed = base.with_weights(std::vector<double>(d.begin(), d.end()));
  out.psi_base = psi_minimize(base, opts).value;
  out.psi_d = psi_minimize(perturbed, opts).value;
  out.bound = (1.0 - delta / out.delta0) * out.psi_base;
  out.slack = out.psi_d - out.bound;
  // Both Psi values carry the solver's relative accuracy.
  out.holds = out.slack >= -1e-9 * std::max(out.psi_base, 1e-300);
  return out;
}

EntropyDual entropy_dual(const ExpSumProblem& p, std::span<const double> theta,
                         const PsiOptions& opts) {
  const ExpSumProblem sp = p.shifted(theta);
  HullClassification hull;
  try {
    hull = classify_hull(sp, opts.support_eps);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::EmptySupport)
      raise(ErrorKind::InfeasibleMoment, "weights are all zero");
    throw;
  }
  if (hull.tag == HullTag::ExteriorZero)
    raise(ErrorKind::InfeasibleMoment, "theta lies outside the hull of the supported u_j");
  const FaceMinimum fm = minimize_face(sp, hull.active_face, opts);

  EntropyDual out;
  out.p.assign(p.terms(), 0.0);
  const std::vector<double> s = exponents(sp, fm.y);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j : hull.active_face) mx = std::max(mx, s[j] + std::log(p.d()[j]));
  double z = 0.0;
  for (std::size_t j : hull.active_face) {
    out.p[j] = std::exp(s[j] + std::log(p.d()[j]) - mx);
    z += out.p[j];
  }
  for (std::size_t j : hull.active_face) out.p[j] /= z;
  out.dual_value = mx + std::log(z);
  out.value = 0.0;
  for (std::size_t j : hull.active_face)
    if (out.p[j] > 0.0) out.value += out.p[j] * (std::log(p.d()[j]) - std::log(out.p[j]));
  out.gap = std::abs(out.value - out.dual_value);
  out.moment_residual.assign(p.dim(), 0.0);
  for (std::size_t j : hull.active_face)
    for (std::size_t c = 0; c < p.dim(); ++c)
      out.moment_residual[c] += out.p[j] * sp.u(j)[c];
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> d) {
  if (p.size() != d.size())
    raise(ErrorKind::DimensionMismatch, "p and d have different lengths");
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (!(d[j] > 0.0))
      raise(ErrorKind::SupportViolation,
            "p[" + std::to_string(j) + "] > 0 where d vanishes");
    s += p[j] * std::log(p[j] / d[j]);
  }
  return s;
}

// ---------------------------------------------------------------------------

using nlohmann::json;

std::string to_json(const PsiResult& r) {
  json doc;
  doc["value"] = r.value;
  doc["classification"] = std::string(to_string(r.classification.tag));
  doc["minimizer"] = r.minimizer ? json(*r.minimizer) : json(nullptr);
  doc["active_face"] = r.classification.active_face;
  doc["grad_residual"] = r.grad_residual;
  doc["iterations"] = r.iterations;
  json flags = json::array();
  if (r.max_iterations_hit) flags.push_back("MaxIterations");
  doc["flags"] = flags;
  return doc.dump();
}

std::string to_json(const EntropyDual& r) {
  json doc;
  doc["p"] = r.p;
  doc["value"] = r.value;
  doc["dual_value"] = r.dual_value;
  doc["gap"] = r.gap;
  doc["moment_residual"] = r.moment_residual;
  return doc.dump();
}

std::string to_json(const ExpSumProblem& p) {
  json u = json::array();
  for (std::size_t j = 0; j < p.terms(); ++j)
    u.push_back(std::vector<double>(p.u(j).begin(), p.u(j).end()));
  json doc;
  doc["u"] = u;
  doc["d"] = std::vector<double>(p.d().begin(), p.d().end());
  return doc.dump();
}

ExpSumProblem problem_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("u") || !doc.contains("d"))
    raise(ErrorKind::ParseError, "expected an object with fields \"u\" and \"d\"");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "u" && it.key() != "d")
      raise(ErrorKind::ParseError, it.key() + ": unknown field");
  std::vector<std::vector<double>> u;
  std::vector<double> d;
  try {
    u = doc["u"].get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    raise(ErrorKind::ParseError, "u: expected an array of numeric arrays");
  }
  try {
    d = doc["d"].get<std::vector<double>>();
  } catch (const json::exception&) {
    raise(ErrorKind::ParseError, "d: expected a numeric array");
  }
  return ExpSumProblem(std::move(u), std::move(d));
}

}  // namespace capax
