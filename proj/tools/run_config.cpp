// Copyright 2026 The annealvq Authors
//
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

#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "annealvq/errors.hpp"

namespace avq {
namespace {

using annealvq::InputError;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig()
    : values_{
          {"anchors", "1000"},     {"base", ""},          {"batches", ""},
          {"beam", "10"},          {"clusters", "64"},    {"codebook", ""},
          {"codes", ""},           {"codes_out", ""},     {"d", "32"},
          {"depth", "100"},        {"distribution", "mixture"},
          {"estimator", "grassberger"},                   {"exhaustive", "false"},
          {"ground_truth", ""},    {"k", "256"},          {"l0", "8"},
          {"learn", ""},           {"ls", "2"},           {"m", "8"},
          {"max_iters", "30"},     {"mode", "scratch"},   {"n", "10000"},
          {"neighbors", "10"},     {"out", ""},           {"queries", ""},
          {"r", "100"},            {"rel_tol", "0.001"},  {"sample_cap", "100000"},
          {"schedule", "10"},      {"seed", "0"},         {"spread", "0.05"},
          {"stream", "0"},         {"sweeps", "5"},       {"threads", "0"},
          {"tree", ""},
      } {}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (!values_.contains(key)) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    values_[key] = trim(body.substr(eq + 1));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) throw InputError("unknown setting '" + key + "'");
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return !text(key).empty(); }

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown setting '" + key + "'");
  return it->second;
}

std::string RunConfig::require(const std::string& key) const {
  if (!has(key)) throw InputError("missing required setting '" + key + "'");
  return text(key);
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const std::string& s = text(key);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw InputError("setting '" + key + "' must be a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::size_t RunConfig::size(const std::string& key) const {
  return static_cast<std::size_t>(u64(key));
}

double RunConfig::real(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && !std::isnan(v)) return v;
  } catch (const std::exception&) {
  }
  throw InputError("setting '" + key + "' must be a number, got '" + s + "'");
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no" || s.empty()) return false;
  throw InputError("setting '" + key + "' must be true or false, got '" + s + "'");
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  const std::string& s = text(key);
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string::npos ? comma : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace avq
