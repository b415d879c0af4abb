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

#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "capax/capacity.hpp"
#include "capax/coeffs.hpp"
#include "capax/cpop.hpp"
#include "capax/error.hpp"
#include "capax/expsum.hpp"
#include "capax/holderlab.hpp"
#include "cli.hpp"

namespace capax::cli {

namespace {

using nlohmann::json;

// Flags bound to config keys. Only flags actually given on the command line
// are forwarded, so file values survive when a flag is absent.
class FlagSet {
 public:
  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *store, help);
    collect_.push_back([opt, store, key](json& out) {
      if (opt->count() > 0) out[key] = *store;
    });
  }

  json values() const {
    json out = json::object();
    for (const auto& c : collect_) c(out);
    return out;
  }

 private:
  std::vector<std::function<void(json&)>> collect_;
};

struct Verb {
  CLI::App* app = nullptr;
  FlagSet flags;
  std::string input;
  std::string config_path;
  std::string output;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Writes to the -o path when given, otherwise to out.
void emit(const Verb& v, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (v.output.empty()) {
    write(out);
    return;
  }
  std::ofstream os(v.output, std::ios::binary);
  if (!os) raise(ErrorKind::IoError, "cannot open " + v.output);
  write(os);
  os.flush();
  if (!os) raise(ErrorKind::IoError, "write failed for " + v.output);
}

Config load(const Verb& v) {
  return config_load(v.config_path.empty() ? std::nullopt
                                           : std::optional<std::string>(v.config_path),
                     v.flags.values());
}

CapacityOptions capacity_options(const Config& c) {
  CapacityOptions o;
  o.tol = c.tol;
  o.unitary_restarts = c.restarts;
  o.direct_restarts = c.direct_restarts;
  o.seed = c.seed.value_or(0);
  o.max_iterations = c.max_iterations;
  o.max_steps = c.max_steps;
  o.residual_tol = c.residual_tol;
  return o;
}

CPOperator load_operator(const Verb& v, std::ostream& err) {
  CPOperator t = from_json(read_file(v.input));
  if (auto w = size_warning(t)) err << "warning: " << *w << '\n';
  return t;
}

void require_method(const std::string& method, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (method == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  raise(ErrorKind::ConfigError, "method '" + method + "' is not one of " + list);
}

int do_cap(const Verb& v, std::ostream& out, std::ostream& err) {
  Config c = load(v);
  if (c.method.empty()) c.method = "direct";
  require_method(c.method, {"direct", "psi", "scaling", "all"});
  const CPOperator t = load_operator(v, err);
  CapacityOptions o = capacity_options(c);
  CapacityReport r;
  if (c.method == "direct") {
    r = cap_direct_pd(t, o);
  } else if (c.method == "psi") {
    r = cap_unitary_search(t, o);
  } else if (c.method == "scaling") {
    r = cap_via_scaling(t, o);
  } else {
    o.cross_psi = true;
    o.cross_scaling = t.n() == t.m();
    r = cap(t, o);
  }
  emit(v, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return 0;
}

int do_cap0(const Verb& v, std::ostream& out, std::ostream& err) {
  const Config c = load(v);
  const CPOperator t = load_operator(v, err);
  const CapacityReport r = cap0(t, capacity_options(c));
  emit(v, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return 0;
}

int do_coeffs(const Verb& v, std::ostream& out, std::ostream& err) {
  Config c = load(v);
  if (c.method.empty()) c.method = "leibniz";
  require_method(c.method, {"leibniz", "cb", "interp", "all"});
  const CPOperator t = load_operator(v, err);
  const std::uint64_t grid_seed = c.seed.value_or(0x5eed);
  if (c.method != "all") {
    const CoeffVector d = c.method == "leibniz" ? d_leibniz(t)
                          : c.method == "cb"    ? d_cauchy_binet(t)
                                                : d_interpolate(t.matrix_rep(), grid_seed).coeffs;
    emit(v, out, [&](std::ostream& os) { write_csv(os, d); });
    return 0;
  }
  const CoeffVector a = d_leibniz(t);
  const CoeffVector b = d_cauchy_binet(t);
  const CoeffVector i = d_interpolate(t.matrix_rep(), grid_seed).coeffs;
  emit(v, out, [&](std::ostream& os) {
    for (std::size_t l = 0; l < t.n(); ++l) os << "j_" << (l + 1) << ',';
    os << "leibniz,cauchy_binet,interpolate\n";
    char buf[96];
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (int e : a.index[k]) os << e << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", a.values[k], b.values[k],
                    i.values[k]);
      os << buf << '\n';
    }
  });
  return 0;
}

int do_psi(const Verb& v, std::ostream& out) {
  const Config c = load(v);
  const ExpSumProblem p = problem_from_json(read_file(v.input));
  PsiOptions o;
  o.tol = c.tol;
  const PsiResult r = psi_minimize(p, o);
  emit(v, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return 0;
}

int do_entropy(const Verb& v, std::ostream& out) {
  const Config c = load(v);
  const ExpSumProblem p = problem_from_json(read_file(v.input));
  std::vector<double> theta = c.theta;
  if (theta.empty()) theta.assign(p.dim(), 0.0);
  if (theta.size() != p.dim())
    raise(ErrorKind::ConfigError, "theta needs " + std::to_string(p.dim()) + " entries");
  PsiOptions o;
  o.tol = c.tol;
  const EntropyDual r = entropy_dual(p, theta, o);
  emit(v, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return 0;
}

int do_scale(const Verb& v, std::ostream& out, std::ostream& err) {
  const Config c = load(v);
  const CPOperator t = load_operator(v, err);
  const CapacityReport r = cap_via_scaling(t, capacity_options(c));
  emit(v, out, [&](std::ostream& os) { os << to_json(r) << '\n'; });
  return 0;
}

int do_probe(const Verb& v, std::ostream& out, std::ostream& err) {
  Config c = load(v);
  if (!c.seed) raise(ErrorKind::ConfigError, "probe requires --seed");
  if (c.method.empty()) c.method = "direct";
  require_method(c.method, {"direct", "psi", "scaling"});
  require_method(c.direction, {"random", "scaling", "unitary"});
  const CPOperator t = load_operator(v, err);
  ProbeConfig pc;
  pc.capacity = capacity_options(c);
  pc.method = c.method == "direct" ? CapMethod::DirectPD
              : c.method == "psi"  ? CapMethod::PsiUnitary
                                   : CapMethod::Scaling;
  pc.noise_floor = c.noise_floor;
  pc.jobs = c.jobs;
  Rng rng(*c.seed);
  const ProbeDirection dir = c.direction == "random"    ? random_direction(t, rng)
                             : c.direction == "scaling" ? scaling_direction(t)
                                                        : unitary_direction(t, rng);
  const ProbeRun run = run_probe(t, dir, dyadic_scales(c.scales_from, c.scales_to), pc);
  emit(v, out, [&](std::ostream& os) { export_csv(os, run); });
  return 0;
}

void add_common(Verb& v, const std::string& input_help) {
  v.app->add_option("input", v.input, input_help)->required();
  v.app->add_option("--config", v.config_path, "JSON settings file (flags take precedence)");
  v.app->add_option("-o,--output", v.output, "write the result here instead of stdout");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"capax: capacity of completely positive operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "capax 1.0.0");

  Verb cap_v, cap0_v, coeffs_v, psi_v, entropy_v, scale_v, probe_v;
  cap_v.app = app.add_subcommand("cap", "capacity of an operator (JSON report)");
  cap0_v.app = app.add_subcommand("cap0", "diagonal capacity of an operator (JSON report)");
  coeffs_v.app = app.add_subcommand("coeffs", "coefficients of det T(diag lambda) (CSV)");
  psi_v.app = app.add_subcommand("psi", "infimum of an exponential sum (JSON)");
  entropy_v.app = app.add_subcommand("entropy", "maximum entropy dual at a moment (JSON)");
  scale_v.app = app.add_subcommand("scale", "capacity by operator scaling, n = m (JSON)");
  probe_v.app = app.add_subcommand("probe", "perturbation probe of the capacity (CSV)");

  for (Verb* v : {&cap_v, &cap0_v, &scale_v, &probe_v, &coeffs_v})
    add_common(*v, "operator JSON file");
  for (Verb* v : {&psi_v, &entropy_v}) add_common(*v, "problem JSON file");

  auto tol = [](Verb& v) { v.flags.add<double>(v.app, "--tol", "tol", "solver tolerance"); };
  auto seed = [](Verb& v, const char* help) {
    v.flags.add<std::uint64_t>(v.app, "--seed", "seed", help);
  };
  for (Verb* v : {&cap_v, &cap0_v, &psi_v, &entropy_v, &probe_v}) tol(*v);

  cap_v.flags.add<std::string>(cap_v.app, "--method", "method", "direct|psi|scaling|all");
  seed(cap_v, "multi-start seed (default 0)");
  cap_v.flags.add<int>(cap_v.app, "--restarts", "restarts", "Haar restarts of the unitary search");
  cap_v.flags.add<int>(cap_v.app, "--direct-restarts", "direct_restarts",
                       "random restarts of the direct minimization");
  cap_v.flags.add<int>(cap_v.app, "--max-iterations", "max_iterations",
                       "iteration limit per direct run");
  cap_v.flags.add<int>(cap_v.app, "--max-steps", "max_steps", "scaling step limit");

  coeffs_v.flags.add<std::string>(coeffs_v.app, "--method", "method", "leibniz|cb|interp|all");
  seed(coeffs_v, "interpolation grid seed");

  entropy_v.flags.add<std::string>(entropy_v.app, "--theta", "theta",
                                   "moment, comma separated (default 0)");

  scale_v.flags.add<int>(scale_v.app, "--max-steps", "max_steps", "scaling step limit");
  scale_v.flags.add<double>(scale_v.app, "--residual-tol", "residual_tol",
                            "stop when both marginals are this close");

  probe_v.flags.add<std::string>(probe_v.app, "--direction", "direction",
                                 "random|scaling|unitary");
  seed(probe_v, "direction and multi-start seed (required)");
  probe_v.flags.add<std::string>(probe_v.app, "--method", "method", "direct|psi|scaling");
  probe_v.flags.add<int>(probe_v.app, "--scales-from", "scales_from", "largest scale 2^-k");
  probe_v.flags.add<int>(probe_v.app, "--scales-to", "scales_to", "smallest scale 2^-k");
  probe_v.flags.add<double>(probe_v.app, "--noise-floor", "noise_floor",
                            "minimum |dcap| used in the fit");
  probe_v.flags.add<int>(probe_v.app, "--jobs", "jobs", "worker cap (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ExtrasError& e) {
    err << "ConfigError: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*cap_v.app) return do_cap(cap_v, out, err);
    if (*cap0_v.app) return do_cap0(cap0_v, out, err);
    if (*coeffs_v.app) return do_coeffs(coeffs_v, out, err);
    if (*psi_v.app) return do_psi(psi_v, out);
    if (*entropy_v.app) return do_entropy(entropy_v, out);
    if (*scale_v.app) return do_scale(scale_v, out, err);
    if (*probe_v.app) return do_probe(probe_v, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace capax::cli
