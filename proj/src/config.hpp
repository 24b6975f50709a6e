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

// Run configuration: one nested JSON document, merged section by section.
// Later documents (CLI overrides) win over earlier ones (config files).

#ifndef KGREFINE_CONFIG_HPP_
#define KGREFINE_CONFIG_HPP_

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "kg.hpp"
#include "noise.hpp"
#include "pipeline.hpp"
#include "psl.hpp"
#include "synthetic.hpp"

namespace kgrefine {

struct RunPaths {
  std::string kg;        // directory in write_kg layout
  std::string triples;   // explicit files override the kg directory
  std::string labels;
  std::string ontology;
  std::string truth;
  std::string compat;
  std::string out = "out";
  std::string model;     // checkpoint to read
};

struct RunConfig {
  std::uint64_t seed = 0;
  RunPaths paths;
  std::string type_relation;
  RuleWeights weights;
  SolverConfig solver;
  ModelConfig model;
  FeedbackConfig feedback;
  SplitSpec split;
  NoiseSpec noise;
  SyntheticSpec synthetic;
  bool use_synthetic = false;
  std::size_t sameent_k = 0;
  std::vector<std::string> ablations;
  std::vector<double> heatmap_pos = kDefaultHeatmapGrid;
  std::vector<double> heatmap_neg = kDefaultHeatmapGrid;

  // Applies `j` on top of this config. Unknown keys and wrong types throw
  // ConfigError naming the key. A top-level "seed" re-seeds every section
  // that does not name its own seed in the same document.
  void merge(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

RunConfig load_run_config(const std::string& path);

std::vector<std::string> default_ablations();

}  // namespace kgrefine

#endif  // KGREFINE_CONFIG_HPP_
