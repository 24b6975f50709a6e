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

// The refinement loop: rule inference, threshold tuning, filtering, type
// generation, typed embedding training, and feedback selection.

#ifndef KGREFINE_PIPELINE_HPP_
#define KGREFINE_PIPELINE_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "embedding.hpp"
#include "eval.hpp"
#include "kg.hpp"
#include "psl.hpp"

namespace kgrefine {

// Inferred facts enter with their PSL score under source "psl-iter-<k>".
// Original facts keep their confidences. Throws ContractError when the result
// lacks a score for some kg fact.
KnowledgeGraph filter_kg(const KnowledgeGraph& kg, const InferenceResult& result, double t_best,
                         int iteration = 1);

// Most specific surviving label per entity (ties: higher score, then smaller
// id). Entities without a label at or above t_best are absent (UNK). Throws
// DataError on a SUB cycle.
TypeAssignment generate_types(const InferenceResult& result,
                              const std::set<std::pair<LabelId, LabelId>>& sub, double t_best);

struct FeedbackConfig {
  double phi1 = 0.5;
  double phi2 = 0.75;
  double feedback_weight = 1.0;
  int max_iter = 6;
  double size_cap = 3.0;
  bool enabled = true;

  void validate() const;
};

struct ScoredTriple {
  Triple triple;
  double score = 0.0;
};

struct PredictionPartition {
  double t1 = 0.0;
  std::vector<ScoredTriple> positive;  // score >= t1
  std::vector<ScoredTriple> negative;
  double mean_p = 0.0;  // 0 for an empty set
  double mean_n = 0.0;

  static PredictionPartition make(std::span<const ScoredTriple> scored, double t1);
};

struct FeedbackThresholds {
  double t2 = 0.0;
  double t3 = 0.0;
};

// t2 = t1 + phi1 * mean(P1), t3 = t1 - phi2 * mean(N1). An infinite phi
// contributes nothing when the matching mean is 0.
FeedbackThresholds feedback_thresholds(const PredictionPartition& partition, const FeedbackConfig& config);

// positive: score > t2, negative: score < t3.
FeedbackEvidence select_feedback(std::span<const ScoredTriple> scored, double t2, double t3, int iteration);

struct StageMetrics {
  EvalReport valid;
  EvalReport test;
};

struct IterationReport {
  int iteration = 0;
  double t_best = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  StageMetrics psl;
  StageMetrics model;
  double normalized_size = 0.0;
  NoiseRecall noise_recall;      // model stage, test set
  NoiseRecall psl_noise_recall;  // PSL stage, test set
  std::size_t facts_kept = 0;     // original facts at or above t_best
  std::size_t inferred_kept = 0;  // new facts at or above t_best
  std::size_t training_positives = 0;
  std::size_t typed_entities = 0;
  std::size_t feedback_positive = 0;
  std::size_t feedback_negative = 0;
  std::size_t kg_size = 0;
  double psl_objective = 0.0;
  int psl_iterations = 0;
  bool halted = false;  // size cap exceeded after this iteration
};

struct PipelineSplits {
  EvalSet valid;
  EvalSet test;
};

struct PipelineConfig {
  RuleWeights weights;
  SolverConfig solver;
  ModelConfig model;
  FeedbackConfig feedback;
};

struct IterationArtifacts {
  int iteration = 0;
  const InferenceResult& inference;
  const FeedbackEvidence& feedback;  // selected this iteration
  const EmbeddingModel& model;
};

using ArtifactSink = std::function<void(const IterationArtifacts&)>;

// `kg` is the full noisy candidate graph including valid/test facts; PSL
// sees it every round together with the accumulated feedback (latest score
// per triple wins). The embedding model trains on kept facts that are not
// evaluation items. Feedback is drawn from model predictions over the
// grounded relation atoms outside the evaluation sets.
std::vector<IterationReport> iterate_refinement(const KnowledgeGraph& kg, const PipelineSplits& splits,
                                                const PipelineConfig& config, const ArtifactSink& sink = {});

// Trains a model on `positives`, tunes a threshold on valid, reports both.
struct ModelRun {
  EmbeddingModel model;
  double threshold = 0.0;
  StageMetrics metrics;
  std::vector<double> valid_scores;
  std::vector<double> test_scores;
};

ModelRun train_and_evaluate(const KnowledgeGraph& kg, std::vector<Triple> positives, const TypeAssignment& types,
                            const ModelConfig& config, const PipelineSplits& splits);

// Training facts of `kg` minus every evaluation item.
std::vector<Triple> training_positives(const KnowledgeGraph& kg, const PipelineSplits& splits);

struct EnsembleResult {
  double stage1_threshold = 0.0;
  std::size_t stage1_kept = 0;
  EvalReport test;
};

// Stage 1 filters the training facts by its own predictions at its
// validation-tuned threshold (or `stage1_threshold` when given); stage 2
// trains on what survives and is evaluated on test.
EnsembleResult two_stage_ensemble(const KnowledgeGraph& kg, const ModelConfig& stage1, const ModelConfig& stage2,
                                  const PipelineSplits& splits,
                                  std::optional<double> stage1_threshold = std::nullopt);

// ---- Threshold heatmap ----------------------------------------------------

inline const std::vector<double> kDefaultHeatmapGrid{0, 1, 2, 5, 10, 20, 50, 100};

struct HeatmapCell {
  double pos_percent = 0.0;
  double neg_percent = 0.0;
  std::size_t feedback_positive = 0;
  std::size_t feedback_negative = 0;
  double wf1 = 0.0;              // PSL test wF1 after the rerun
  double normalized_size = 0.0;  // base KG plus positive feedback
};

// Top p% of `scored` (by score, ties by triple) become positive feedback and
// the bottom n% negative feedback; the two never overlap. Each cell reruns
// one PSL round on `kg` and tunes its threshold on valid.
std::vector<HeatmapCell> threshold_heatmap(const KnowledgeGraph& kg, const PipelineSplits& splits,
                                           std::span<const ScoredTriple> scored,
                                           const std::vector<Triple>& base_kg, const PipelineConfig& config,
                                           const std::vector<double>& pos_grid = kDefaultHeatmapGrid,
                                           const std::vector<double>& neg_grid = kDefaultHeatmapGrid);

// Picks the feedback sets a heatmap cell uses.
FeedbackEvidence percent_feedback(std::span<const ScoredTriple> scored, double pos_percent, double neg_percent,
                                  int iteration);

std::string render_feedback(const KnowledgeGraph& kg, const FeedbackEvidence& feedback);
std::string render_heatmap_csv(const std::vector<HeatmapCell>& cells);

}  // namespace kgrefine

#endif  // KGREFINE_PIPELINE_HPP_
