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

#include "annealvq/reports.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace annealvq {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string recall_field(const EvalReport& r, std::size_t cutoff) {
  const auto it = r.recall.find(cutoff);
  return it == r.recall.end() ? std::string() : num(it->second);
}

std::string param(const EvalReport& r, const std::string& key) {
  const auto it = r.parameters.find(key);
  return it == r.parameters.end() ? std::string() : it->second;
}

}  // namespace

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

void write_csv_echo(std::ostream& out, const ConfigEcho& echo) {
  out << "# schema_version=" << kReportSchemaVersion << "\r\n";
  for (const auto& [key, value] : echo) out << "# " << key << '=' << value << "\r\n";
}

void write_train_report_csv(std::ostream& out, const TrainReport& report, const ConfigEcho& echo) {
  write_csv_echo(out, echo);
  out << "# initial_distortion=" << num(report.initial_distortion) << "\r\n";
  const std::vector<std::string> header{"sweep", "dictionary", "distortion", "seconds"};
  write_csv_row(out, header);
  for (const TrainStep& s : report.steps) {
    const std::vector<std::string> row{std::to_string(s.sweep), std::to_string(s.dictionary),
                                       num(s.distortion), num(s.seconds)};
    write_csv_row(out, row);
  }
}

void write_eval_csv(std::ostream& out, std::span<const EvalReport> reports, const ConfigEcho& echo) {
  write_csv_echo(out, echo);
  const std::vector<std::string> header{
      "method", "l0", "ls", "budgets", "R", "recall_at_1", "recall_at_10", "recall_at_100",
      "recall_at_R", "mean_latency_ms", "median_latency_ms", "mean_nodes_visited",
      "max_nodes_visited", "distortion"};
  write_csv_row(out, header);
  for (const EvalReport& r : reports) {
    const std::vector<std::string> row{
        r.method, param(r, "l0"), param(r, "ls"), param(r, "budgets"), std::to_string(r.results),
        recall_field(r, 1), recall_field(r, 10), recall_field(r, 100),
        recall_field(r, r.results), num(r.mean_latency_ms), num(r.median_latency_ms),
        num(r.mean_nodes_visited), std::to_string(r.max_nodes_visited),
        r.distortion ? num(*r.distortion) : std::string()};
    write_csv_row(out, row);
  }
}

void write_mi_csv(std::ostream& out, const MiMatrix& mi) {
  std::vector<std::string> row{"part"};
  for (std::size_t b = 0; b < mi.m_count; ++b) row.push_back(std::to_string(b));
  write_csv_row(out, row);
  for (std::size_t a = 0; a < mi.m_count; ++a) {
    row = {std::to_string(a)};
    for (std::size_t b = 0; b < mi.m_count; ++b) row.push_back(num(mi(a, b)));
    write_csv_row(out, row);
  }
}

void write_locality_csv(std::ostream& out, const LocalityProfile& profile, const ConfigEcho& echo) {
  write_csv_echo(out, echo);
  out << "# population=" << profile.population << "\r\n";
  const std::vector<std::string> header{"layer", "conditional_entropy_bits", "prefix_entropy_bits"};
  write_csv_row(out, header);
  for (std::size_t m = 0; m < profile.conditional_entropy.size(); ++m) {
    const std::vector<std::string> row{std::to_string(m + 1), num(profile.conditional_entropy[m]),
                                       num(profile.prefix_entropy[m])};
    write_csv_row(out, row);
  }
}

std::string eval_json(std::span<const EvalReport> reports, const ConfigEcho& echo) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = echo;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const EvalReport& r : reports) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["R"] = r.results;
    nlohmann::ordered_json recall = nlohmann::ordered_json::object();
    for (const auto& [cutoff, value] : r.recall) recall[std::to_string(cutoff)] = value;
    j["recall"] = recall;
    j["mean_latency_ms"] = r.mean_latency_ms;
    j["median_latency_ms"] = r.median_latency_ms;
    j["mean_nodes_visited"] = r.mean_nodes_visited;
    j["max_nodes_visited"] = r.max_nodes_visited;
    j["distortion"] = r.distortion ? nlohmann::ordered_json(*r.distortion) : nlohmann::ordered_json();
    j["parameters"] = r.parameters;
    doc["reports"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string diagnostics_json(const MiMatrix& mi, const LocalityProfile* locality,
                             const ConfigEcho& echo) {
  auto matrix = [](const MiMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < m.m_count; ++a) {
      std::vector<double> row(m.values.begin() + static_cast<std::ptrdiff_t>(a * m.m_count),
                              m.values.begin() + static_cast<std::ptrdiff_t>((a + 1) * m.m_count));
      rows.push_back(row);
    }
    return nlohmann::ordered_json{{"samples", m.samples}, {"bits", rows}};
  };
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = echo;
  doc["mi"] = matrix(mi);
  if (locality) {
    doc["locality"] = {{"population", locality->population},
                       {"conditional_entropy_bits", locality->conditional_entropy},
                       {"prefix_entropy_bits", locality->prefix_entropy},
                       {"local_mi", matrix(locality->local_mi)}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace annealvq
