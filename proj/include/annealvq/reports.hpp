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

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annealvq/annealing.hpp"
#include "annealvq/diagnostics.hpp"
#include "annealvq/evaluation.hpp"

namespace annealvq {

inline constexpr int kReportSchemaVersion = 1;

using ConfigEcho = std::map<std::string, std::string>;

/// RFC-4180 field quoting.
std::string csv_field(std::string_view value);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

/// "# key=value" provenance lines placed ahead of a CSV header.
void write_csv_echo(std::ostream& out, const ConfigEcho& echo);

void write_train_report_csv(std::ostream& out, const TrainReport& report, const ConfigEcho& echo);
void write_eval_csv(std::ostream& out, std::span<const EvalReport> reports, const ConfigEcho& echo);
void write_mi_csv(std::ostream& out, const MiMatrix& mi);
void write_locality_csv(std::ostream& out, const LocalityProfile& profile, const ConfigEcho& echo);

std::string eval_json(std::span<const EvalReport> reports, const ConfigEcho& echo);
std::string diagnostics_json(const MiMatrix& mi, const LocalityProfile* locality,
                             const ConfigEcho& echo);

}  // namespace annealvq
