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

#include "capax/holderlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "capax/error.hpp"

namespace capax {

std::string_view to_string(DirectionKind kind) {
  switch (kind) {
    case DirectionKind::Random: return "random";
    case DirectionKind::Scaling: return "scaling";
    case DirectionKind::Unitary: return "unitary";
  }
  return "unknown";
}

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::RandomKraus: return "RandomKraus";
    case FamilyKind::UnitaryChannels: return "UnitaryChannels";
    case FamilyKind::ScaledIdentity: return "ScaledIdentity";
  }
  return "Unknown";
}

namespace {

void normalize(std::vector<CMatrix>& delta) {
  double sq = 0.0;
  for (const CMatrix& d : delta) sq += d.frobenius_norm() * d.frobenius_norm();
  if (!(sq > 0.0)) raise(ErrorKind::DimensionMismatch, "zero perturbation direction");
  const double inv = 1.0 / std::sqrt(sq);
  for (CMatrix& d : delta) d *= inv;
}

// exp(i t G) for Hermitian G.
CMatrix unitary_exp(const CMatrix& g, double t) {
  const EigenDecomposition e = eigh(HermitianMatrix::from_matrix(g));
  const std::size_t n = e.values.size();
  std::vector<cd> phases(n);
  for (std::size_t k = 0; k < n; ++k) phases[k] = std::polar(1.0, t * e.values[k]);
  return e.vectors * CMatrix::diagonal(std::span<const cd>(phases)) * e.vectors.adjoint();
}

}  // namespace

ProbeDirection random_direction(const CPOperator& base, Rng& rng) {
  ProbeDirection dir{DirectionKind::Random, {}};
  for (std::size_t k = 0; k < base.kraus().size(); ++k)
    dir.delta.push_back(random_gaussian(base.m(), base.n(), 1.0, rng));
  normalize(dir.delta);
  return dir;
}

ProbeDirection scaling_direction(const CPOperator& base) {
  ProbeDirection dir{DirectionKind::Scaling, base.kraus()};
  normalize(dir.delta);
  return dir;
}

ProbeDirection unitary_direction(const CPOperator& base, Rng& rng) {
  ProbeDirection dir{DirectionKind::Unitary, {}};
  for (std::size_t k = 0; k < base.kraus().size(); ++k)
    dir.delta.push_back(random_hermitian(base.n(), 1.0, rng).to_matrix());
  normalize(dir.delta);
  return dir;
}

CPOperator perturb(const CPOperator& base, const ProbeDirection& dir, double t) {
  if (dir.delta.size() != base.kraus().size())
    raise(ErrorKind::DimensionMismatch, "direction length differs from Kraus count");
  std::vector<CMatrix> kraus;
  kraus.reserve(dir.delta.size());
  for (std::size_t k = 0; k < dir.delta.size(); ++k) {
    const CMatrix& a = base.kraus()[k];
    if (dir.kind == DirectionKind::Unitary) {
      kraus.push_back(a * unitary_exp(dir.delta[k], t));
    } else {
      CMatrix step = dir.delta[k];
      step *= t;
      kraus.push_back(a + step);
    }
  }
  return CPOperator(base.n(), base.m(), std::move(kraus));
}

std::vector<double> dyadic_scales(int from, int to) {
  std::vector<double> s;
  for (int e = from; e <= to; ++e) s.push_back(std::ldexp(1.0, -e));
  return s;
}

double capacity_value(const CPOperator& t, const ProbeConfig& config) {
  switch (config.method) {
    case CapMethod::PsiDiagonal: return cap0(t, config.capacity).value;
    case CapMethod::PsiUnitary: return cap_unitary_search(t, config.capacity).value;
    case CapMethod::Scaling: return cap_via_scaling(t, config.capacity).value;
    case CapMethod::DirectPD: break;
  }
  return cap_direct_pd(t, config.capacity).value;
}

std::pair<double, double> probe_pair(const CPOperator& t, const CPOperator& t2,
                                     const ProbeConfig& config) {
  const double dist = distance(t, t2);
  if (dist == 0.0) return {0.0, 0.0};
  return {dist, std::abs(capacity_value(t, config) - capacity_value(t2, config))};
}

void fit_run(ProbeRun& run, double noise_floor) {
  std::vector<double> xs, ys;
  for (const ProbeSample& s : run.samples) {
    if (s.dcap > noise_floor && s.dist > 0.0) {
      xs.push_back(std::log(s.dist));
      ys.push_back(std::log(s.dcap));
    }
  }
  run.fitted_alpha.reset();
  run.fitted_logC.reset();
  run.r_squared.reset();
  if (xs.size() < 4) {
    if (std::find(run.flags.begin(), run.flags.end(), "Flat") == run.flags.end())
      run.flags.push_back("Flat");
    return;
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) {
    run.flags.push_back("Flat");
    return;
  }
  const double alpha = sxy / sxx;
  const double logc = my - alpha * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (alpha * xs[i] + logc);
    ss_res += r * r;
  }
  run.fitted_alpha = alpha;
  run.fitted_logC = logc;
  run.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
}

ProbeRun run_probe(const CPOperator& base, const ProbeDirection& direction,
                   const std::vector<double>& scales, const ProbeConfig& config) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || (i > 0 && !(scales[i] < scales[i - 1])))
      raise(ErrorKind::ConfigError, "probe scales must be positive and strictly decreasing");
  }
  ProbeRun run;
  run.base = base;
  run.direction = direction;
  run.scales = scales;
  run.base_cap = capacity_value(base, config);
  bool all_zero = true;
  for (double t : scales) {
    const CPOperator moved = perturb(base, direction, t);
    ProbeSample s;
    s.scale = t;
    s.dist = distance(base, moved);
    s.dcap = std::abs(capacity_value(moved, config) - run.base_cap);
    if (s.dcap != 0.0) all_zero = false;
    run.samples.push_back(s);
  }
  if (run.base_cap == 0.0 && all_zero)
    raise(ErrorKind::DegenerateBase, "capacity vanishes at the base and along the probe");
  fit_run(run, config.noise_floor);
  return run;
}

std::vector<CPOperator> sample_family(const CompactFamily& f) {
  if (f.count < 1 || f.n < 1 || f.m < 1 || f.kraus_count < 1)
    raise(ErrorKind::ConfigError, "family needs positive sizes and count");
  const double bound = f.norm_bound - f.max_scale;
  if (!(bound > 0.0)) raise(ErrorKind::ConfigError, "norm bound leaves no room for probes");
  Rng rng(f.seed);
  std::vector<CPOperator> out;
  switch (f.kind) {
    case FamilyKind::RandomKraus: {
      const double entry = bound / (std::sqrt(static_cast<double>(f.n)) +
                                    std::sqrt(static_cast<double>(f.m)));
      int attempts = 0;
      while (static_cast<int>(out.size()) < f.count) {
        if (++attempts > 10000 * f.count)
          raise(ErrorKind::MaxIterations, "norm-bound rejection sampling stalled");
        std::vector<CMatrix> kraus;
        bool ok = true;
        for (std::size_t k = 0; k < f.kraus_count && ok; ++k) {
          kraus.push_back(random_gaussian(f.m, f.n, entry, rng));
          ok = max_singular_value(kraus.back()) <= bound;
        }
        if (ok) out.emplace_back(f.n, f.m, std::move(kraus));
      }
      break;
    }
    case FamilyKind::UnitaryChannels: {
      if (f.n != f.m) raise(ErrorKind::NotSupported, "unitary channels need n = m");
      const double w = 1.0 / std::sqrt(static_cast<double>(f.kraus_count));
      for (int i = 0; i < f.count; ++i) {
        std::vector<CMatrix> kraus;
        for (std::size_t k = 0; k < f.kraus_count; ++k) {
          CMatrix u = haar_unitary(f.n, rng);
          u *= w;
          kraus.push_back(std::move(u));
        }
        out.emplace_back(f.n, f.m, std::move(kraus));
      }
      break;
    }
    case FamilyKind::ScaledIdentity: {
      if (f.n != f.m) raise(ErrorKind::NotSupported, "scaled identity needs n = m");
      const double lo = std::min(0.5, 0.5 * bound);
      std::uniform_real_distribution<double> root(lo, bound);
      for (int i = 0; i < f.count; ++i) {
        CMatrix a = CMatrix::identity(f.n);
        a *= root(rng);
        out.emplace_back(f.n, f.m, std::vector<CMatrix>{std::move(a)});
      }
      break;
    }
  }
  return out;
}

double FamilySummary::good_fraction(double min_alpha, double min_r2) const {
  int total = 0, good = 0;
  for (const ProbeRun& r : runs) {
    if (!r.fitted_alpha) continue;
    ++total;
    if (*r.fitted_alpha >= min_alpha && *r.r_squared >= min_r2) ++good;
  }
  return total == 0 ? 0.0 : static_cast<double>(good) / total;
}

FamilySummary estimate_family_modulus(const CompactFamily& family, int pairs,
                                      const ProbeConfig& config,
                                      const std::vector<double>& scales) {
  const std::vector<CPOperator> bases = sample_family(family);
  if (pairs < 1) raise(ErrorKind::ConfigError, "need at least one probe");
  if (!scales.empty() && scales.front() > family.max_scale)
    raise(ErrorKind::ConfigError, "largest scale exceeds the family margin");

  const std::size_t total = static_cast<std::size_t>(pairs);
  std::vector<std::optional<ProbeRun>> results(total);
  std::vector<bool> degenerate(total, false);
  std::vector<std::exception_ptr> failures(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t p = next++; p < total; p = next++) {
      try {
        const CPOperator& base = bases[p % bases.size()];
        Rng rng(family.seed + 0x632be59bd9b4e019ULL * (p + 1));
        const ProbeDirection dir =
            family.kind == FamilyKind::UnitaryChannels ? unitary_direction(base, rng)
            : family.kind == FamilyKind::ScaledIdentity ? scaling_direction(base)
                                                        : random_direction(base, rng);
        results[p] = run_probe(base, dir, scales, config);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateBase) {
          degenerate[p] = true;
        } else {
          failures[p] = std::current_exception();
        }
      } catch (...) {
        failures[p] = std::current_exception();
      }
    }
  };

  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(total));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& f : failures)
    if (f) std::rethrow_exception(f);

  FamilySummary summary;
  for (std::size_t p = 0; p < total; ++p) {
    if (degenerate[p]) {
      ++summary.degenerate;
      continue;
    }
    ProbeRun& run = *results[p];
    if (run.fitted_alpha) {
      ++summary.fitted;
      summary.exponent = summary.exponent ? std::min(*summary.exponent, *run.fitted_alpha)
                                          : *run.fitted_alpha;
    } else {
      ++summary.flat;
    }
    summary.runs.push_back(std::move(run));
  }
  if (summary.fitted == 0) {
    summary.flags.push_back("AllFlat");
    return summary;
  }
  double modulus = 0.0;
  for (const ProbeRun& run : summary.runs) {
    if (!run.fitted_alpha) continue;
    double own = 0.0;
    for (const ProbeSample& s : run.samples) {
      if (s.dist <= 0.0) continue;
      own = std::max(own, s.dcap / std::pow(s.dist, *run.fitted_alpha));
      modulus = std::max(modulus, s.dcap / std::pow(s.dist, *summary.exponent));
    }
    summary.ratios.push_back(own);
  }
  summary.modulus = modulus;
  return summary;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows(std::ostream& os, const ProbeRun& run) {
  for (const ProbeSample& s : run.samples)
    os << fmt(s.scale) << ',' << fmt(s.dist) << ',' << fmt(s.dcap) << '\n';
}

void write_fit(std::ostream& os, const ProbeRun& run) {
  if (!run.fitted_alpha) return;
  os << "# alpha=" << fmt(*run.fitted_alpha) << ", logC=" << fmt(*run.fitted_logC)
     << ", r2=" << fmt(*run.r_squared);
}

template <typename T>
void export_to_file(const std::string& path, const T& value) {
  std::ofstream os(path);
  if (!os) raise(ErrorKind::IoError, "cannot open " + path);
  export_csv(os, value);
  os.flush();
  if (!os) raise(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace

void export_csv(std::ostream& os, const ProbeRun& run) {
  os << "scale,dist,dcap\n";
  write_rows(os, run);
  if (run.fitted_alpha) {
    write_fit(os, run);
    os << '\n';
  }
}

void export_csv(std::ostream& os, const FamilySummary& summary) {
  os << "scale,dist,dcap\n";
  for (const ProbeRun& run : summary.runs) write_rows(os, run);
  for (std::size_t p = 0; p < summary.runs.size(); ++p) {
    const ProbeRun& run = summary.runs[p];
    os << "# probe=" << p << ", samples=" << run.samples.size();
    if (run.fitted_alpha) {
      os << ", ";
      write_fit(os, run);
    } else {
      os << ", flat";
    }
    os << '\n';
  }
  if (summary.exponent)
    os << "# exponent=" << fmt(*summary.exponent) << ", modulus=" << fmt(*summary.modulus)
       << '\n';
  else
    os << "# exponent=undefined, AllFlat\n";
}

void export_csv(const std::string& path, const ProbeRun& run) { export_to_file(path, run); }

void export_csv(const std::string& path, const FamilySummary& summary) {
  export_to_file(path, summary);
}

ParsedProbeCsv parse_probe_csv(std::istream& is) {
  ParsedProbeCsv out;
  std::string line;
  if (!std::getline(is, line) || line != "scale,dist,dcap")
    raise(ErrorKind::ParseError, "missing header scale,dist,dcap");
  int lineno = 1;
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty())
      raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad number '" + text + "'");
    return v;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string field;
      while (std::getline(ss, field, ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        const std::string val = field.substr(eq + 1);
        if (key == "alpha") out.alpha = number(val);
        else if (key == "logC") out.logC = number(val);
        else if (key == "r2") out.r2 = number(val);
      }
      continue;
    }
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      raise(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected 3 fields");
    out.samples.push_back({number(a), number(b), number(c)});
  }
  return out;
}

}  // namespace capax
