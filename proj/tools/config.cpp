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
#include <sstream>

#include "capax/error.hpp"
#include "cli.hpp"

namespace capax::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& origin, const std::string& key, const char* want) {
  raise(ErrorKind::ConfigError, origin + ": '" + key + "' must be " + want);
}

double positive(const json& v, const std::string& origin, const std::string& key) {
  if (!v.is_number() || !(v.get<double>() > 0.0)) bad(origin, key, "a positive number");
  return v.get<double>();
}

int integer(const json& v, const std::string& origin, const std::string& key, int lo) {
  if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > 1'000'000'000)
    bad(origin, key, lo == 0 ? "a nonnegative integer" : "a positive integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& origin, const std::string& key) {
  if (!v.is_string()) bad(origin, key, "a string");
  return v.get<std::string>();
}

std::vector<double> parse_theta(const json& v, const std::string& origin) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const json& x : v) {
      if (!x.is_number()) bad(origin, "theta", "a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (!v.is_string()) bad(origin, "theta", "a list of numbers");
  std::stringstream ss(v.get<std::string>());
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && item[used] == ' ') ++used;
    if (used != item.size() || item.empty()) bad(origin, "theta", "comma-separated numbers");
  }
  return out;
}

}  // namespace

void config_apply(Config& c, const json& settings, const std::string& origin) {
  if (!settings.is_object()) raise(ErrorKind::ConfigError, origin + ": expected a JSON object");
  for (const auto& [key, v] : settings.items()) {
    if (key == "tol") c.tol = positive(v, origin, key);
    else if (key == "restarts") c.restarts = integer(v, origin, key, 0);
    else if (key == "direct_restarts") c.direct_restarts = integer(v, origin, key, 0);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) bad(origin, key, "a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    }
    else if (key == "method") c.method = text(v, origin, key);
    else if (key == "max_steps") c.max_steps = integer(v, origin, key, 1);
    else if (key == "residual_tol") c.residual_tol = positive(v, origin, key);
    else if (key == "max_iterations") c.max_iterations = integer(v, origin, key, 1);
    else if (key == "jobs") c.jobs = integer(v, origin, key, 0);
    else if (key == "scales_from") c.scales_from = integer(v, origin, key, 0);
    else if (key == "scales_to") c.scales_to = integer(v, origin, key, 0);
    else if (key == "noise_floor") {
      if (!v.is_number() || v.get<double>() < 0.0) bad(origin, key, "a nonnegative number");
      c.noise_floor = v.get<double>();
    }
    else if (key == "direction") c.direction = text(v, origin, key);
    else if (key == "theta") c.theta = parse_theta(v, origin);
    else raise(ErrorKind::ConfigError, origin + ": unknown key '" + key + "'");
  }
  if (c.scales_to < c.scales_from)
    raise(ErrorKind::ConfigError, origin + ": scales_to must not be below scales_from");
}

Config config_load(const std::optional<std::string>& path, const json& flags) {
  Config c;
  if (path) {
    std::ifstream is(*path);
    if (!is) raise(ErrorKind::IoError, "cannot open config " + *path);
    json doc;
    try {
      doc = json::parse(is);
    } catch (const json::parse_error& e) {
      raise(ErrorKind::ConfigError, *path + ": " + e.what());
    }
    config_apply(c, doc, *path);
  }
  config_apply(c, flags, "flags");
  return c;
}

}  // namespace capax::cli
