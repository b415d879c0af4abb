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

#ifndef CAPAX_TOOLS_CLI_HPP_
#define CAPAX_TOOLS_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace capax::cli {

struct Config {
  double tol = 1e-10;
  int restarts = 8;
  int direct_restarts = 4;
  std::optional<std::uint64_t> seed;
  std::string method;  // empty: verb default
  int max_steps = 500;
  double residual_tol = 1e-12;
  int max_iterations = 2000;
  int jobs = 0;
  int scales_from = 2;  // probe scales 2^-scales_from ... 2^-scales_to
  int scales_to = 12;
  double noise_floor = 1e-9;
  std::string direction = "random";
  std::vector<double> theta;
};

// Applies one JSON object of settings. Unknown keys and ill-typed values
// raise ConfigError.
void config_apply(Config& c, const nlohmann::json& settings, const std::string& origin);

// defaults, then the file (if any), then flag overrides.
Config config_load(const std::optional<std::string>& path, const nlohmann::json& flags);

// 0 success, 1 domain error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace capax::cli

#endif  // CAPAX_TOOLS_CLI_HPP_
