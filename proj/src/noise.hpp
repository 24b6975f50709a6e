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

#ifndef KGREFINE_NOISE_HPP_
#define KGREFINE_NOISE_HPP_

#include <string>
#include <vector>

#include "kg.hpp"

namespace kgrefine {

struct NoiseSpec {
  double corrupt_fraction = 0.25;
  double type_compatible_fraction = 0.5;
  double clean_mean = 0.7;
  double clean_std = 0.2;
  double noise_mean = 0.3;
  double noise_std = 0.2;
  std::uint64_t seed = 0;
  // Label (typeOf) facts join the corruption population.
  bool corrupt_labels = true;

  void validate() const;
};

inline constexpr double kScoreFloor = 0.01;
inline constexpr double kScoreCeil = 0.99;

struct CorruptionStats {
  std::size_t population = 0;
  std::size_t corrupted = 0;
  std::size_t corrupted_facts = 0;
  std::size_t corrupted_labels = 0;
  std::size_t compatible_requested = 0;
  std::size_t type_compatible = 0;
  std::size_t fallbacks = 0;
  std::vector<std::string> warnings;
};

struct CorruptionResult {
  KnowledgeGraph kg;
  CorruptionStats stats;
};

// Entity typing derived from the KG's candidate labels, closed upward over
// SUB. Answers the DOM/RNG compatibility checks used by the noise model.
class TypeIndex {
 public:
  explicit TypeIndex(const KnowledgeGraph& kg);

  bool has_label(EntityId e, LabelId l) const;
  // True when the relation has no DOM, or the entity carries the DOM label.
  bool subject_compatible(EntityId e, RelationId r) const;
  bool object_compatible(EntityId e, RelationId r) const;

 private:
  const Ontology* ontology_;
  std::vector<std::vector<std::uint32_t>> labels_;  // sorted per entity
};

CorruptionResult corrupt_kg(const KnowledgeGraph& kg, const NoiseSpec& spec);

// Replaces every confidence with a clamped Gaussian draw selected by the
// fact's gold label. Labels without a label-truth entry count as clean.
KnowledgeGraph assign_extraction_scores(const KnowledgeGraph& kg, const NoiseSpec& spec);

}  // namespace kgrefine

#endif  // KGREFINE_NOISE_HPP_
