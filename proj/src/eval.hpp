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

// Classification metrics, threshold and alpha tuning, noise recall, and
// ontology ablation.

#ifndef KGREFINE_EVAL_HPP_
#define KGREFINE_EVAL_HPP_

#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kg.hpp"

namespace kgrefine {

struct EvalReport {
  double pos_f1 = 0.0;
  double neg_f1 = 0.0;
  double wf1 = 0.0;
  double w1 = 0.0;  // gold positive fraction
  double w0 = 0.0;  // gold negative fraction
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Per-class F1 with F1 = 0 when precision + recall = 0, weighted by gold
// class fractions.
EvalReport weighted_f1(std::span<const int> predictions, std::span<const int> gold);
// Keyed form; throws DataError naming the first gold item without a
// prediction.
EvalReport weighted_f1(const std::unordered_map<Triple, int, TripleHash>& predictions, const EvalSet& gold,
                       const KnowledgeGraph* names = nullptr);

// score >= threshold is positive.
std::vector<int> classify(std::span<const double> scores, double threshold);

inline constexpr int kThresholdSteps = 1000;  // grid {0.000, 0.001, ..., 1.000}
inline double threshold_at(int i) { return static_cast<double>(i) / kThresholdSteps; }

struct ThresholdResult {
  double threshold = 0.0;
  double wf1 = 0.0;
};

// Grid threshold maximizing wF1; ties go to the smallest threshold.
ThresholdResult tune_threshold(std::span<const double> scores, std::span<const int> gold);

std::vector<int> gold_labels(const EvalSet& set);

double alpha_combine(double psl_score, double model_score, double alpha);

struct AlphaResult {
  double alpha = 0.0;
  double threshold = 0.0;
  double wf1 = 0.0;
};

// Grid {0.0, 0.1, ..., 1.0}. Among alphas tied on validation wF1 the one with
// the lowest Brier score against gold wins, then the smallest alpha.
AlphaResult tune_alpha(std::span<const double> psl_scores, std::span<const double> model_scores,
                       std::span<const int> gold);

struct NoiseRecall {
  double compatible = 0.0;
  double incompatible = 0.0;
  std::size_t n_compatible = 0;
  std::size_t n_incompatible = 0;
};

// Negative-class recall on gold-negative items, split by the compatibility
// flag. An empty partition reports recall 0 with count 0.
NoiseRecall noise_recall(std::span<const int> predictions, const EvalSet& gold, const CompatMap& compat);

// (|now| - |original|) / |original|; DataError when original is 0.
double size_normalized(std::size_t now, std::size_t original);

// ---- Ontology ablation ----------------------------------------------------

enum class OntologyComponent { kDom, kRng, kSub, kRsub, kMut, kRmut, kInv, kSameEnt };
inline constexpr OntologyComponent kAllComponents[] = {
    OntologyComponent::kDom, OntologyComponent::kRng,  OntologyComponent::kSub, OntologyComponent::kRsub,
    OntologyComponent::kMut, OntologyComponent::kRmut, OntologyComponent::kInv, OntologyComponent::kSameEnt};

const char* component_name(OntologyComponent c);
OntologyComponent parse_component(std::string_view s);

enum class AblationMode { kAll, kNone, kWithout, kOnly };

struct Ablation {
  AblationMode mode = AblationMode::kAll;
  std::set<OntologyComponent> components;

  // "all", "none", "without:RNG", "only:DOM+RNG".
  static Ablation parse(std::string_view s);
  std::string name() const;
};

Ontology ablate_ontology(const Ontology& ontology, const Ablation& ablation);

}  // namespace kgrefine

#endif  // KGREFINE_EVAL_HPP_
