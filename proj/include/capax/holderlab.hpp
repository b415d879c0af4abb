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

#ifndef CAPAX_HOLDERLAB_HPP_
#define CAPAX_HOLDERLAB_HPP_

// Perturbation campaigns measuring |cap(T) - cap(T')| against ||T - T'||
// and fitting log |dcap| = alpha log dist + log C.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capax/capacity.hpp"

namespace capax {

enum class DirectionKind { Random, Scaling, Unitary };
std::string_view to_string(DirectionKind kind);

// Random / Scaling: A_i <- A_i + t delta_i with sum ||delta_i||_F^2 = 1.
// Unitary: A_i <- A_i exp(i t delta_i), delta_i Hermitian, same normalization.
struct ProbeDirection {
  DirectionKind kind = DirectionKind::Random;
  std::vector<CMatrix> delta;
};

ProbeDirection random_direction(const CPOperator& base, Rng& rng);
ProbeDirection scaling_direction(const CPOperator& base);
ProbeDirection unitary_direction(const CPOperator& base, Rng& rng);

CPOperator perturb(const CPOperator& base, const ProbeDirection& dir, double t);

struct ProbeSample {
  double scale = 0.0;
  double dist = 0.0;
  double dcap = 0.0;
};

struct ProbeConfig {
  CapacityOptions capacity;
  CapMethod method = CapMethod::DirectPD;
  double noise_floor = 1e-9;
  int jobs = 0;  // 0: hardware concurrency
};

struct ProbeRun {
  std::optional<CPOperator> base;
  ProbeDirection direction;
  std::vector<double> scales;
  std::vector<ProbeSample> samples;
  double base_cap = 0.0;
  std::optional<double> fitted_alpha;
  std::optional<double> fitted_logC;
  std::optional<double> r_squared;
  std::vector<std::string> flags;  // Flat: fewer than 4 samples above the floor
};

// 2^-from, ..., 2^-to.
std::vector<double> dyadic_scales(int from = 2, int to = 12);

// Capacity with the configured method.
double capacity_value(const CPOperator& t, const ProbeConfig& config);

// (distance(T, T2), |cap(T) - cap(T2)|)
std::pair<double, double> probe_pair(const CPOperator& t, const CPOperator& t2,
                                     const ProbeConfig& config);

// Throws DegenerateBase when cap(base) = 0 and every sample is 0.
ProbeRun run_probe(const CPOperator& base, const ProbeDirection& direction,
                   const std::vector<double>& scales, const ProbeConfig& config);

// Least squares of log dcap on log dist over samples above the floor. Fills
// the fitted fields, or adds the Flat flag.
void fit_run(ProbeRun& run, double noise_floor);

enum class FamilyKind { RandomKraus, UnitaryChannels, ScaledIdentity };
std::string_view to_string(FamilyKind kind);

struct CompactFamily {
  FamilyKind kind = FamilyKind::RandomKraus;
  std::size_t n = 2;
  std::size_t m = 2;
  std::size_t kraus_count = 2;
  double norm_bound = 2.0;  // spectral norm bound on every Kraus factor
  int count = 10;
  std::uint64_t seed = 0;
  double max_scale = 0.25;  // perturbations up to this size stay in the family
};

std::vector<CPOperator> sample_family(const CompactFamily& family);

struct FamilySummary {
  std::vector<ProbeRun> runs;
  std::optional<double> exponent;  // minimum fitted alpha
  std::optional<double> modulus;   // max dcap / dist^exponent
  std::vector<double> ratios;      // per fitted probe: max dcap / dist^alpha
  int fitted = 0;
  int flat = 0;
  int degenerate = 0;
  std::vector<std::string> flags;  // AllFlat

  // Share of non-flat probes with alpha >= min_alpha and r^2 >= min_r2.
  double good_fraction(double min_alpha, double min_r2) const;
};

FamilySummary estimate_family_modulus(const CompactFamily& family, int pairs,
                                      const ProbeConfig& config,
                                      const std::vector<double>& scales = dyadic_scales());

// CSV: header "scale,dist,dcap", one row per sample, then comment footers.
void export_csv(std::ostream& os, const ProbeRun& run);
void export_csv(std::ostream& os, const FamilySummary& summary);
void export_csv(const std::string& path, const ProbeRun& run);
void export_csv(const std::string& path, const FamilySummary& summary);

struct ParsedProbeCsv {
  std::vector<ProbeSample> samples;
  std::optional<double> alpha;
  std::optional<double> logC;
  std::optional<double> r2;
};

ParsedProbeCsv parse_probe_csv(std::istream& is);

}  // namespace capax

#endif  // CAPAX_HOLDERLAB_HPP_
