/*
   Copyright 2026 The kgrefine Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

// Subcommands behind the CLI. Each reads its inputs from RunConfig, writes
// its outputs under paths.out, and returns a one-line JSON summary.

#ifndef KGREFINE_COMMANDS_HPP_
#define KGREFINE_COMMANDS_HPP_

#include <json.hpp>
#include <string>
#include <vector>

#include "config.hpp"

namespace kgrefine {

inline const std::vector<std::string> kCommands{"prepare", "infer", "train", "iterate", "eval", "ablate", "heatmap"};

std::string run_command(const std::string& name, const RunConfig& config);

// Input KG for a command: the synthetic generator (noised unless `clean`),
// explicit files, or a directory in write_kg layout.
KnowledgeGraph load_input(const RunConfig& config, bool clean = false);

nlohmann::json report_json(const EvalReport& r);
nlohmann::json report_json(const IterationReport& r);
std::string render_reports(const std::vector<IterationReport>& reports);

}  // namespace kgrefine

#endif  // KGREFINE_COMMANDS_HPP_
