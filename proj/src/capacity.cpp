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

#include "capax/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "capax/coeffs.hpp"
#include "capax/error.hpp"

namespace capax {

std::string_view to_string(CapMethod method) {
  switch (method) {
    case CapMethod::PsiDiagonal: return "PsiDiagonal";
    case CapMethod::PsiUnitary: return "PsiUnitary";
    case CapMethod::DirectPD: return "DirectPD";
    case CapMethod::Scaling: return "Scaling";
  }
  return "Unknown";
}

bool CapacityReport::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double capacity_ratio(const CPOperator& t, const CMatrix& x) {
  const cd num = det(apply(t, x));
  const cd den = det(x);
  if (!(num.real() > 0.0)) return 0.0;
  return std::pow(num.real(), 1.0 / static_cast<double>(t.m())) /
         std::pow(den.real(), 1.0 / static_cast<double>(t.n()));
}

// ---------------------------------------------------------------------------
// Diagonal capacity through the exponential sum.

namespace {

struct DiagonalResult {
  double value = 0.0;
  PsiResult psi;
};

DiagonalResult diagonal_capacity(const CPOperator& t, const CapacityOptions& opts) {
  const CoeffVector d = d_leibniz(t);
  const ExpSumProblem problem = ExpSumProblem::from_coefficients(d);
  DiagonalResult out;
  PsiOptions po;
  po.tol = opts.tol;
  try {
    out.psi = psi_minimize(problem, po);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptySupport) throw;
    // det T(D) vanishes identically.
    out.psi.classification.tag = HullTag::ExteriorZero;
    out.psi.value = 0.0;
  }
  out.value = std::pow(std::max(out.psi.value, 0.0), 1.0 / static_cast<double>(t.m()));
  return out;
}

CMatrix diag_exp(std::span<const double> y) {
  std::vector<double> lam(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) lam[i] = std::exp(y[i]);
  return CMatrix::diagonal(std::span<const double>(lam));
}

}  // namespace

CapacityReport cap0(const CPOperator& t, const CapacityOptions& opts) {
  const DiagonalResult dr = diagonal_capacity(t, opts);
  CapacityReport r;
  r.method = CapMethod::PsiDiagonal;
  r.value = dr.value;
  r.residual = dr.psi.grad_residual;
  r.iterations = dr.psi.iterations;
  switch (dr.psi.classification.tag) {
    case HullTag::ExteriorZero: r.flags.push_back("Degenerate"); break;
    case HullTag::BoundaryZero: r.flags.push_back("NotAttained"); break;
    case HullTag::InteriorZero: r.witness.x = diag_exp(*dr.psi.minimizer); break;
  }
  if (dr.psi.max_iterations_hit) r.flags.push_back("MaxIterations");
  return r;
}

// ---------------------------------------------------------------------------
// Unitary search.

namespace {

// exp(i s G) for Hermitian G from a cached eigendecomposition.
struct UnitaryGenerator {
  EigenDecomposition eig;

  CMatrix exp_i(double s) const {
    const std::size_t n = eig.values.size();
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        cd acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          acc += eig.vectors(i, k) * std::polar(1.0, s * eig.values[k]) *
                 std::conj(eig.vectors(j, k));
        out(i, j) = acc;
      }
    return out;
  }
};

// Off-diagonal Hermitian generators. Diagonal ones commute with every
// diagonal input and leave cap0(T_U) unchanged.
std::vector<UnitaryGenerator> offdiagonal_generators(std::size_t n) {
  std::vector<UnitaryGenerator> gens;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      HermitianMatrix re(n), im(n);
      re.set(l, k, 1.0);
      im.set(l, k, cd(0.0, -1.0));  // i (E_kl - E_lk) has (l, k) entry -i
      gens.push_back({eigh(re)});
      gens.push_back({eigh(im)});
    }
  return gens;
}

struct SearchResult {
  CMatrix u;
  double value;
  int evaluations;
};

SearchResult pattern_search(const CPOperator& t, CMatrix u,
                            const std::vector<UnitaryGenerator>& gens,
                            const CapacityOptions& opts) {
  auto eval = [&](const CMatrix& v) {
    return diagonal_capacity(conjugate_unitary(t, v), opts).value;
  };
  double best = eval(u);
  int evals = 1;
  double step = 0.5;
  constexpr double kMinStep = 1e-7;
  constexpr int kMaxEvals = 20000;
  // Per-generator last successful sign, tried first on the next sweep.
  std::vector<double> sign(gens.size(), 1.0);
  while (step > kMinStep && evals < kMaxEvals && gens.size() > 0) {
    bool improved = false;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      for (int attempt = 0; attempt < 2; ++attempt) {
        const double sgn = attempt == 0 ? sign[g] : -sign[g];
        CMatrix trial = u * gens[g].exp_i(sgn * step);
        const double v = eval(trial);
        ++evals;
        if (v < best) {
          // Keep going in the same direction while it pays.
          best = v;
          u = std::move(trial);
          sign[g] = sgn;
          improved = true;
          for (int stretch = 0; stretch < 20; ++stretch) {
            CMatrix further = u * gens[g].exp_i(sgn * step);
            const double fv = eval(further);
            ++evals;
            if (!(fv < best)) break;
            best = fv;
            u = std::move(further);
          }
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {u, best, evals};
}

}  // namespace

CapacityReport cap_unitary_search(const CPOperator& t, const CapacityOptions& opts) {
  const std::size_t n = t.n();
  const auto gens = offdiagonal_generators(n);
  Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<CMatrix> starts{CMatrix::identity(n)};
  for (int r = 0; r < opts.unitary_restarts; ++r) starts.push_back(haar_unitary(n, rng));

  CapacityReport rep;
  rep.method = CapMethod::PsiUnitary;
  double best = std::numeric_limits<double>::infinity();
  CMatrix best_u;
  for (const CMatrix& u0 : starts) {
    const SearchResult sr = pattern_search(t, u0, gens, opts);
    rep.iterations += sr.evaluations;
    if (sr.value < best) {
      best = sr.value;
      best_u = sr.u;
    }
  }
  rep.value = best;
  rep.witness.unitary = best_u;
  const DiagonalResult dr = diagonal_capacity(conjugate_unitary(t, best_u), opts);
  rep.residual = dr.psi.grad_residual;
  if (dr.psi.classification.tag == HullTag::InteriorZero) {
    rep.witness.x = best_u * diag_exp(*dr.psi.minimizer) * best_u.adjoint();
  } else if (dr.psi.classification.tag == HullTag::BoundaryZero) {
    rep.flags.push_back("NotAttained");
  } else {
    rep.flags.push_back("Degenerate");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Direct minimization over positive definite X = exp(H), tr H = 0.

std::vector<CMatrix> detail::traceless_basis(std::size_t n) {
  std::vector<CMatrix> basis;
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      CMatrix a(n, n), b(n, n);
      a(k, l) = r2;
      a(l, k) = r2;
      b(k, l) = cd(0.0, r2);
      b(l, k) = cd(0.0, -r2);
      basis.push_back(std::move(a));
      basis.push_back(std::move(b));
    }
  for (std::size_t k = 1; k < n; ++k) {
    CMatrix d(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) d(i, i) = s;
    d(k, k) = -static_cast<double>(k) * s;
    basis.push_back(std::move(d));
  }
  return basis;
}

namespace {

struct DirectEval {
  double f = 0.0;
  std::vector<double> grad;
  CMatrix x;
  bool singular = false;
};

class DirectObjective {
 public:
  explicit DirectObjective(const CPOperator& t)
      : t_(t), basis_(detail::traceless_basis(t.n())) {}

  std::size_t dim() const { return basis_.size(); }

  CMatrix hermitian(std::span<const double> theta) const {
    const std::size_t n = t_.n();
    CMatrix h(n, n);
    for (std::size_t a = 0; a < basis_.size(); ++a) {
      CMatrix term = basis_[a];
      term *= theta[a];
      h += term;
    }
    return h;
  }

  // f(H) = (1/m) log det T(exp H) with its gradient in the basis. With
  // H = U diag(lam) U^*, the Frechet derivative of exp acts as the Hadamard
  // product with the divided differences of exp in the eigenbasis, so
  //   df/dH = (1/m) U (Gamma o (U^* T^*(T(X)^{-1}) U)) U^*.
  DirectEval eval(std::span<const double> theta, bool with_grad) const {
    const std::size_t n = t_.n();
    const double m = static_cast<double>(t_.m());
    DirectEval out;
    const EigenDecomposition e = eigh(HermitianMatrix::from_matrix(hermitian(theta)));
    std::vector<double> ex(n);
    for (std::size_t i = 0; i < n; ++i) ex[i] = std::exp(e.values[i]);
    const CMatrix& u = e.vectors;
    out.x = u * CMatrix::diagonal(std::span<const double>(ex)) * u.adjoint();
    out.x = HermitianMatrix::from_matrix(out.x).to_matrix();
    const CMatrix q = apply(t_, out.x);
    try {
      out.f = log_det_hpd(q) / m;
    } catch (const Error&) {
      out.singular = true;
      out.f = std::numeric_limits<double>::infinity();
      return out;
    }
    if (!with_grad) return out;
    const CMatrix qi =
        spectral_apply(HermitianMatrix::from_matrix(q), [](double v) { return 1.0 / v; })
            .to_matrix();
    const CMatrix mt = u.adjoint() * dual_apply(t_, qi) * u;
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double di = e.values[i], dj = e.values[j];
        const double diff = di - dj;
        const double gamma = std::abs(diff) < 1e-12
                                 ? std::exp(0.5 * (di + dj))
                                 : std::exp(dj) * std::expm1(diff) / diff;
        g(i, j) = gamma * mt(i, j);
      }
    const CMatrix w = u * g * u.adjoint();
    out.grad.resize(basis_.size());
    for (std::size_t a = 0; a < basis_.size(); ++a)
      out.grad[a] = hs_inner(basis_[a], w).real() / m;
    return out;
  }

 private:
  const CPOperator& t_;
  std::vector<CMatrix> basis_;
};

struct DirectRun {
  double f = std::numeric_limits<double>::infinity();
  CMatrix x;
  double grad_norm = 0.0;
  int iterations = 0;
  bool degenerate = false;
  bool radius_reached = false;
  bool hit_limit = false;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

DirectRun bfgs(const DirectObjective& obj, std::vector<double> theta,
               const CapacityOptions& opts) {
  const std::size_t k = obj.dim();
  DirectRun run;
  DirectEval cur = obj.eval(theta, true);
  if (cur.singular) {
    run.degenerate = true;
    return run;
  }
  std::vector<double> hinv(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) hinv[i * k + i] = 1.0;
  const double gtol = std::max(opts.tol, 1e-14);

  int it = 0;
  int stalled = 0;
  for (; it < opts.max_iterations; ++it) {
    run.grad_norm = std::sqrt(dot(cur.grad, cur.grad));
    if (run.grad_norm <= gtol || k == 0) break;
    if (cur.f < opts.degenerate_floor) {
      run.degenerate = true;
      break;
    }
    if (std::sqrt(dot(theta, theta)) > opts.radius) {
      run.radius_reached = true;
      break;
    }
    std::vector<double> p(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) p[i] -= hinv[i * k + j] * cur.grad[j];
    double slope = dot(p, cur.grad);
    if (slope >= 0.0) {
      std::fill(hinv.begin(), hinv.end(), 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        hinv[i * k + i] = 1.0;
        p[i] = -cur.grad[i];
      }
      slope = -run.grad_norm * run.grad_norm;
    }
    // Cap the first trial step so one update cannot leave the floating
    // range of exp(H).
    double step = std::min(1.0, 5.0 / std::sqrt(dot(p, p)));
    std::vector<double> trial(k);
    DirectEval next;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = theta[i] + step * p[i];
      next = obj.eval(trial, true);
      if (!next.singular && next.f <= cur.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable descent left

    std::vector<double> s(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
      s[i] = trial[i] - theta[i];
      y[i] = next.grad[i] - cur.grad[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y)) && sy > 0.0) {
      if (it == 0) {
        const double gamma = sy / dot(y, y);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) hinv[i * k + j] = (i == j) ? gamma : 0.0;
      }
      std::vector<double> hy(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) hy[i] += hinv[i * k + j] * y[j];
      const double yhy = dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          hinv[i * k + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                             rho * (hy[i] * s[j] + s[i] * hy[j]);
    }
    stalled = cur.f - next.f <= 1e-15 * std::max(1.0, std::abs(cur.f)) ? stalled + 1 : 0;
    theta = trial;
    cur = next;
    if (stalled >= 5) break;
  }
  if (it >= opts.max_iterations) run.hit_limit = true;
  if (cur.f < opts.degenerate_floor) run.degenerate = true;
  run.iterations = it;
  run.f = cur.f;
  run.x = cur.x;
  run.grad_norm = std::sqrt(dot(cur.grad, cur.grad));
  return run;
}

}  // namespace

double detail::direct_objective(const CPOperator& t, std::span<const double> theta,
                                std::vector<double>* grad) {
  const DirectObjective obj(t);
  if (theta.size() != obj.dim())
    raise(ErrorKind::DimensionMismatch, "theta must have n^2 - 1 entries");
  DirectEval e = obj.eval(theta, grad != nullptr);
  if (e.singular) raise(ErrorKind::SingularEvaluation, "T(exp H) is not positive definite");
  if (grad) *grad = std::move(e.grad);
  return e.f;
}

CapacityReport cap_direct_pd(const CPOperator& t, const CapacityOptions& opts) {
  const DirectObjective obj(t);
  CapacityReport rep;
  rep.method = CapMethod::DirectPD;

  Rng rng(opts.seed ^ 0xd1b54a32d192ed03ULL);
  std::normal_distribution<double> normal(0.0, 0.5);
  std::vector<std::vector<double>> starts{std::vector<double>(obj.dim(), 0.0)};
  for (int r = 0; r < opts.direct_restarts; ++r) {
    std::vector<double> th(obj.dim());
    for (double& v : th) v = normal(rng);
    starts.push_back(std::move(th));
  }

  DirectRun best;
  bool degenerate = false;
  for (const auto& s : starts) {
    DirectRun run = bfgs(obj, s, opts);
    rep.iterations += run.iterations;
    if (run.degenerate) {
      degenerate = true;
      break;
    }
    if (run.f < best.f) best = std::move(run);
  }
  if (degenerate) {
    rep.value = 0.0;
    rep.flags.push_back("Degenerate");
    return rep;
  }
  rep.value = std::exp(best.f);
  rep.residual = best.grad_norm;
  rep.witness.x = best.x;
  if (best.radius_reached) rep.flags.push_back("RadiusReached");
  if (best.hit_limit) rep.flags.push_back("MaxIterations");
  return rep;
}

// ---------------------------------------------------------------------------
// Operator scaling.

namespace {

void update_residuals(ScalingState& s) {
  const std::size_t n = s.current.n(), m = s.current.m();
  s.row_residual = (apply(s.current, CMatrix::identity(n)) - CMatrix::identity(m))
                       .frobenius_norm();
  CMatrix target = CMatrix::identity(n);
  target *= static_cast<double>(m) / static_cast<double>(n);
  s.col_residual = (dual_apply(s.current, CMatrix::identity(m)) - target).frobenius_norm();
}

}  // namespace

ScalingState::ScalingState(CPOperator t) : current(std::move(t)) {
  update_residuals(*this);
}

ScalingState scaling_step(const ScalingState& s, ScalingSide side) {
  const CPOperator& t = s.current;
  const bool row = side == ScalingSide::Row;
  const CMatrix marginal = row ? apply(t, CMatrix::identity(t.n()))
                               : dual_apply(t, CMatrix::identity(t.m()));
  const HermitianMatrix h = HermitianMatrix::from_matrix(marginal);
  double scale = 0.0;
  for (const cd& z : marginal.entries()) scale = std::max(scale, std::abs(z));
  HermitianMatrix inv_sqrt;
  double logdet = 0.0;
  try {
    inv_sqrt = psd_inv_sqrt(h, std::max(1e-13 * scale, 1e-300));
    logdet = log_det_hpd(h.to_matrix());
  } catch (const Error&) {
    raise(ErrorKind::SingularMarginal,
          std::string(row ? "T(I)" : "T*(I)") + " is not positive definite");
  }
  const CMatrix r = inv_sqrt.to_matrix();
  std::vector<CMatrix> kraus;
  kraus.reserve(t.kraus().size());
  for (const CMatrix& a : t.kraus()) kraus.push_back(row ? r * a : a * r);

  ScalingState next(CPOperator(t.n(), t.m(), std::move(kraus)));
  next.log_correction =
      s.log_correction + logdet / static_cast<double>(row ? t.m() : t.n());
  next.step = s.step + 1;
  return next;
}

CapacityReport cap_via_scaling(const CPOperator& t, const CapacityOptions& opts) {
  if (t.n() != t.m())
    raise(ErrorKind::NotSupported, "operator scaling needs n = m");
  CapacityReport rep;
  rep.method = CapMethod::Scaling;
  ScalingState state(t);
  try {
    while (state.step < opts.max_steps &&
           std::max(state.row_residual, state.col_residual) > opts.residual_tol) {
      const ScalingSide side =
          state.row_residual >= state.col_residual ? ScalingSide::Row : ScalingSide::Col;
      state = scaling_step(state, side);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularMarginal) throw;
    rep.value = 0.0;
    rep.flags.push_back("Degenerate");
    rep.iterations = state.step;
    return rep;
  }
  rep.value = std::exp(state.log_correction);
  rep.iterations = state.step;
  rep.residual = std::max(state.row_residual, state.col_residual);
  if (rep.residual > opts.residual_tol) rep.flags.push_back("NoConvergence");
  return rep;
}

// ---------------------------------------------------------------------------

CapacityReport cap(const CPOperator& t, const CapacityOptions& opts) {
  CapacityReport rep = cap_direct_pd(t, opts);
  auto rel = [&](double other) {
    return rep.value > 0.0 ? (other - rep.value) / rep.value : other;
  };
  if (opts.cross_psi) rep.cross_checks["PsiUnitary"] = rel(cap_unitary_search(t, opts).value);
  if (opts.cross_scaling && t.n() == t.m())
    rep.cross_checks["Scaling"] = rel(cap_via_scaling(t, opts).value);
  return rep;
}

namespace {

nlohmann::json matrix_json(const CMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < a.cols(); ++j)
      row.push_back(nlohmann::json::array({a(i, j).real(), a(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string to_json(const CapacityReport& r) {
  nlohmann::json doc;
  doc["value"] = r.value;
  doc["method"] = std::string(to_string(r.method));
  doc["residual"] = r.residual;
  doc["iterations"] = r.iterations;
  if (r.witness.unitary || r.witness.x) {
    nlohmann::json w = nlohmann::json::object();
    if (r.witness.unitary) w["unitary"] = matrix_json(*r.witness.unitary);
    if (r.witness.x) w["x"] = matrix_json(*r.witness.x);
    doc["witness"] = std::move(w);
  }
  doc["flags"] = r.flags;
  if (!r.cross_checks.empty()) doc["cross_checks"] = r.cross_checks;
  return doc.dump();
}

}  // namespace capax
