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

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace kgrefine {

KnowledgeGraph filter_kg(const KnowledgeGraph& kg, const InferenceResult& result, double t_best, int iteration) {
  std::vector<CandidateFact> kept;
  for (const auto& f : kg.facts()) {
    auto s = result.rel_score(f.triple);
    if (!s) throw ContractError("inference result has no score for " + kg.describe(f.triple));
    if (*s >= t_best) kept.push_back(f);
  }
  const std::string source = "psl-iter-" + std::to_string(iteration);
  for (const auto& [t, s] : result.rel_scores) {
    if (s >= t_best && !kg.contains(t)) kept.push_back({t, {{source, s}}});
  }
  std::optional<TruthMap> truth;
  if (kg.truth()) {
    truth.emplace();
    for (const auto& f : kept) {
      auto it = kg.truth()->find(f.triple);
      if (it != kg.truth()->end()) truth->emplace(f.triple, it->second);
    }
  }
  CompatMap compat;
  for (const auto& f : kept) {
    auto it = kg.compat().find(f.triple);
    if (it != kg.compat().end()) compat.emplace(*it);
  }
  std::vector<CandidateLabel> labels(kg.labels().begin(), kg.labels().end());
  return KnowledgeGraph(kg.vocab_ptr(), std::move(kept), std::move(labels), kg.ontology(), std::move(truth),
                        kg.label_truth(), std::move(compat));
}

TypeAssignment generate_types(const InferenceResult& result, const std::set<std::pair<LabelId, LabelId>>& sub,
                              double t_best) {
  std::map<LabelId, std::vector<LabelId>> parents;
  for (const auto& [child, parent] : sub) parents[child].push_back(parent);

  // Strict ancestors per label, memoized; a grey mark on re-entry is a cycle.
  std::map<LabelId, std::set<LabelId>> ancestors;
  std::set<LabelId> visiting;
  std::function<const std::set<LabelId>&(LabelId)> walk = [&](LabelId l) -> const std::set<LabelId>& {
    if (auto it = ancestors.find(l); it != ancestors.end()) return it->second;
    if (!visiting.insert(l).second) throw DataError("SUB cycle through label id " + std::to_string(l.value));
    std::set<LabelId> out;
    if (auto it = parents.find(l); it != parents.end()) {
      for (auto p : it->second) {
        out.insert(p);
        const auto& up = walk(p);
        out.insert(up.begin(), up.end());
      }
    }
    visiting.erase(l);
    return ancestors[l] = std::move(out);
  };
  for (const auto& [child, parent] : sub) walk(child);

  std::map<EntityId, std::vector<std::pair<LabelId, double>>> surviving;
  for (const auto& [key, s] : result.lbl_scores) {
    if (s >= t_best) surviving[key.first].emplace_back(key.second, s);
  }
  TypeAssignment out;
  for (const auto& [e, labels] : surviving) {
    std::set<LabelId> dominated;
    for (const auto& [l, s] : labels) {
      const auto& up = walk(l);
      dominated.insert(up.begin(), up.end());
    }
    std::optional<std::pair<LabelId, double>> best;
    for (const auto& [l, s] : labels) {
      if (dominated.contains(l)) continue;
      if (!best || s > best->second || (s == best->second && l < best->first)) best = {l, s};
    }
    if (best) out[e] = best->first;
  }
  return out;
}

void FeedbackConfig::validate() const {
  if (!(phi1 >= 0.0) || !(phi2 >= 0.0)) throw ConfigError("phi1 and phi2 must be >= 0");
  if (!(feedback_weight >= 0.0) || !std::isfinite(feedback_weight)) {
    throw ConfigError("feedback_weight must be a finite nonnegative number");
  }
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(size_cap > 0.0)) throw ConfigError("size_cap must be positive");
}

PredictionPartition PredictionPartition::make(std::span<const ScoredTriple> scored, double t1) {
  PredictionPartition p;
  p.t1 = t1;
  double sp = 0.0, sn = 0.0;
  for (const auto& s : scored) {
    if (s.score >= t1) {
      p.positive.push_back(s);
      sp += s.score;
    } else {
      p.negative.push_back(s);
      sn += s.score;
    }
  }
  if (!p.positive.empty()) p.mean_p = sp / static_cast<double>(p.positive.size());
  if (!p.negative.empty()) p.mean_n = sn / static_cast<double>(p.negative.size());
  return p;
}

FeedbackThresholds feedback_thresholds(const PredictionPartition& partition, const FeedbackConfig& config) {
  auto term = [](double phi, double mean) { return mean == 0.0 ? 0.0 : phi * mean; };
  return {partition.t1 + term(config.phi1, partition.mean_p), partition.t1 - term(config.phi2, partition.mean_n)};
}

FeedbackEvidence select_feedback(std::span<const ScoredTriple> scored, double t2, double t3, int iteration) {
  FeedbackEvidence fb;
  fb.iteration = iteration;
  for (const auto& s : scored) {
    if (s.score > t2) {
      fb.positive.push_back({s.triple, s.score, iteration});
    } else if (s.score < t3) {
      fb.negative.push_back({s.triple, s.score, iteration});
    }
  }
  return fb;
}

namespace {

std::vector<double> psl_scores(const InferenceResult& r, const EvalSet& set, const KnowledgeGraph& kg) {
  std::vector<double> out;
  out.reserve(set.items.size());
  for (const auto& item : set.items) {
    auto s = r.rel_score(item.fact.triple);
    if (!s) throw ContractError("no PSL score for evaluation item " + kg.describe(item.fact.triple));
    out.push_back(*s);
  }
  return out;
}

std::vector<Triple> triples_of(const EvalSet& set) {
  std::vector<Triple> out;
  out.reserve(set.items.size());
  for (const auto& i : set.items) out.push_back(i.fact.triple);
  return out;
}

StageMetrics stage_metrics(std::span<const double> valid_scores, std::span<const double> test_scores,
                           const PipelineSplits& splits, double threshold) {
  return {weighted_f1(classify(valid_scores, threshold), gold_labels(splits.valid)),
          weighted_f1(classify(test_scores, threshold), gold_labels(splits.test))};
}

std::unordered_set<Triple, TripleHash> eval_triples(const PipelineSplits& splits) {
  std::unordered_set<Triple, TripleHash> out;
  for (const auto* set : {&splits.valid, &splits.test}) {
    for (const auto& i : set->items) out.insert(i.fact.triple);
  }
  return out;
}

FeedbackEvidence merged_feedback(const std::map<Triple, std::pair<bool, FeedbackItem>>& acc, int iteration) {
  FeedbackEvidence fb;
  fb.iteration = iteration;
  for (const auto& [t, entry] : acc) (entry.first ? fb.positive : fb.negative).push_back(entry.second);
  return fb;
}

}  // namespace

std::vector<Triple> training_positives(const KnowledgeGraph& kg, const PipelineSplits& splits) {
  const auto held_out = eval_triples(splits);
  std::vector<Triple> out;
  for (const auto& f : kg.facts()) {
    if (!held_out.contains(f.triple)) out.push_back(f.triple);
  }
  return out;
}

ModelRun train_and_evaluate(const KnowledgeGraph& kg, std::vector<Triple> positives, const TypeAssignment& types,
                            const ModelConfig& config, const PipelineSplits& splits) {
  const ModelShape shape{kg.num_entities(), kg.num_relations(), kg.num_labels()};
  auto trained = train(TrainingSet(std::move(positives)), types, config, shape);
  ModelRun run;
  run.model = std::move(trained.model);
  run.valid_scores = predict(run.model, triples_of(splits.valid));
  run.test_scores = predict(run.model, triples_of(splits.test));
  run.threshold = tune_threshold(run.valid_scores, gold_labels(splits.valid)).threshold;
  run.metrics = stage_metrics(run.valid_scores, run.test_scores, splits, run.threshold);
  return run;
}

std::vector<IterationReport> iterate_refinement(const KnowledgeGraph& kg, const PipelineSplits& splits,
                                                const PipelineConfig& config, const ArtifactSink& sink) {
  config.feedback.validate();
  config.model.validate();
  RuleWeights weights = config.weights;
  weights.feedback = config.feedback.feedback_weight;
  weights.validate();
  if (kg.facts().empty()) throw DataError("cannot refine an empty KG");

  const auto held_out = eval_triples(splits);
  const std::size_t original_size = kg.facts().size();
  std::map<Triple, std::pair<bool, FeedbackItem>> accumulated;  // latest score per triple wins
  std::vector<IterationReport> reports;

  for (int k = 1; k <= config.feedback.max_iter; ++k) {
    IterationReport rep;
    rep.iteration = k;
    try {
      const auto evidence = merged_feedback(accumulated, k - 1);
      const auto inference = infer(kg, weights, evidence.empty() ? nullptr : &evidence, config.solver);
      rep.psl_objective = inference.objective;
      rep.psl_iterations = inference.iterations;

      const auto psl_valid = psl_scores(inference, splits.valid, kg);
      const auto psl_test = psl_scores(inference, splits.test, kg);
      rep.t_best = tune_threshold(psl_valid, gold_labels(splits.valid)).threshold;
      rep.psl = stage_metrics(psl_valid, psl_test, splits, rep.t_best);
      if (!kg.compat().empty()) {
        rep.psl_noise_recall = noise_recall(classify(psl_test, rep.t_best), splits.test, kg.compat());
      }

      const auto clean = filter_kg(kg, inference, rep.t_best, k);
      for (const auto& f : clean.facts()) (kg.contains(f.triple) ? rep.facts_kept : rep.inferred_kept)++;
      const auto types = generate_types(inference, kg.ontology().sub, rep.t_best);
      rep.typed_entities = types.size();

      auto positives = training_positives(clean, splits);
      rep.training_positives = positives.size();
      if (positives.empty()) throw DataError("no training facts survive the PSL threshold");
      auto run = train_and_evaluate(kg, std::move(positives), types, config.model, splits);
      rep.t1 = run.threshold;
      rep.model = run.metrics;
      if (!kg.compat().empty()) {
        rep.noise_recall = noise_recall(classify(run.test_scores, rep.t1), splits.test, kg.compat());
      }

      std::vector<Triple> universe;
      for (const auto& [t, s] : inference.rel_scores) {
        if (!held_out.contains(t)) universe.push_back(t);
      }
      const auto predictions = predict(run.model, universe);
      std::vector<ScoredTriple> scored(universe.size());
      for (std::size_t i = 0; i < universe.size(); ++i) scored[i] = {universe[i], predictions[i]};

      FeedbackEvidence selected;
      selected.iteration = k;
      if (config.feedback.enabled) {
        const auto partition = PredictionPartition::make(scored, rep.t1);
        const auto th = feedback_thresholds(partition, config.feedback);
        rep.t2 = th.t2;
        rep.t3 = th.t3;
        selected = select_feedback(scored, th.t2, th.t3, k);
      } else {
        rep.t2 = INFINITY;
        rep.t3 = -INFINITY;
      }
      rep.feedback_positive = selected.positive.size();
      rep.feedback_negative = selected.negative.size();
      for (const auto& f : selected.positive) accumulated[f.triple] = {true, f};
      for (const auto& f : selected.negative) accumulated[f.triple] = {false, f};

      // Refined KG: kept facts plus positive feedback not already kept.
      std::unordered_set<Triple, TripleHash> refined;
      for (const auto& f : clean.facts()) refined.insert(f.triple);
      for (const auto& [t, entry] : accumulated) {
        if (entry.first) refined.insert(t);
      }
      rep.kg_size = refined.size();
      rep.normalized_size = size_normalized(refined.size(), original_size);
      rep.halted = rep.normalized_size > config.feedback.size_cap;

      if (sink) sink(IterationArtifacts{k, inference, selected, run.model});
    } catch (const Error& e) {
      throw Error(e.kind(), "iteration " + std::to_string(k) + ": " + e.what());
    }
    reports.push_back(rep);
    if (reports.back().halted) break;
  }
  return reports;
}

EnsembleResult two_stage_ensemble(const KnowledgeGraph& kg, const ModelConfig& stage1, const ModelConfig& stage2,
                                  const PipelineSplits& splits, std::optional<double> stage1_threshold) {
  const auto positives = training_positives(kg, splits);
  EnsembleResult res;
  auto first = train_and_evaluate(kg, positives, {}, stage1, splits);
  res.stage1_threshold = stage1_threshold.value_or(first.threshold);
  const auto scores = predict(first.model, positives);
  std::vector<Triple> kept;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (scores[i] >= res.stage1_threshold) kept.push_back(positives[i]);
  }
  res.stage1_kept = kept.size();
  res.test = train_and_evaluate(kg, std::move(kept), {}, stage2, splits).metrics.test;
  return res;
}

FeedbackEvidence percent_feedback(std::span<const ScoredTriple> scored, double pos_percent, double neg_percent,
                                  int iteration) {
  if (!(pos_percent >= 0 && pos_percent <= 100 && neg_percent >= 0 && neg_percent <= 100)) {
    throw ConfigError("heatmap percentages must lie in [0,100]");
  }
  std::vector<ScoredTriple> order(scored.begin(), scored.end());
  std::sort(order.begin(), order.end(), [](const ScoredTriple& a, const ScoredTriple& b) {
    return a.score != b.score ? a.score > b.score : a.triple < b.triple;
  });
  const auto n = order.size();
  const auto n_pos = static_cast<std::size_t>(std::floor(pos_percent / 100.0 * static_cast<double>(n)));
  const auto n_neg =
      std::min(n - n_pos, static_cast<std::size_t>(std::floor(neg_percent / 100.0 * static_cast<double>(n))));
  FeedbackEvidence fb;
  fb.iteration = iteration;
  for (std::size_t i = 0; i < n_pos; ++i) fb.positive.push_back({order[i].triple, order[i].score, iteration});
  for (std::size_t i = 0; i < n_neg; ++i) {
    const auto& s = order[n - 1 - i];
    fb.negative.push_back({s.triple, s.score, iteration});
  }
  return fb;
}

std::vector<HeatmapCell> threshold_heatmap(const KnowledgeGraph& kg, const PipelineSplits& splits,
                                           std::span<const ScoredTriple> scored,
                                           const std::vector<Triple>& base_kg, const PipelineConfig& config,
                                           const std::vector<double>& pos_grid,
                                           const std::vector<double>& neg_grid) {
  if (kg.facts().empty()) throw DataError("heatmap needs a non-empty KG");
  RuleWeights weights = config.weights;
  weights.feedback = config.feedback.feedback_weight;
  const std::unordered_set<Triple, TripleHash> base(base_kg.begin(), base_kg.end());
  std::vector<HeatmapCell> cells;
  for (double p : pos_grid) {
    for (double n : neg_grid) {
      const auto fb = percent_feedback(scored, p, n, 1);
      const auto inference = infer(kg, weights, fb.empty() ? nullptr : &fb, config.solver);
      const auto valid = psl_scores(inference, splits.valid, kg);
      const auto test = psl_scores(inference, splits.test, kg);
      const double t = tune_threshold(valid, gold_labels(splits.valid)).threshold;
      HeatmapCell cell;
      cell.pos_percent = p;
      cell.neg_percent = n;
      cell.feedback_positive = fb.positive.size();
      cell.feedback_negative = fb.negative.size();
      cell.wf1 = weighted_f1(classify(test, t), gold_labels(splits.test)).wf1;
      auto grown = base;
      for (const auto& f : fb.positive) grown.insert(f.triple);
      cell.normalized_size = size_normalized(grown.size(), kg.facts().size());
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string render_feedback(const KnowledgeGraph& kg, const FeedbackEvidence& feedback) {
  std::ostringstream out;
  const auto& v = kg.vocab();
  auto row = [&](const char* polarity, const FeedbackItem& f) {
    out << polarity << '\t' << v.entities.name(f.triple.subject.value) << '\t'
        << v.relations.name(f.triple.relation.value) << '\t' << v.entities.name(f.triple.object.value) << '\t'
        << format_double(f.score) << '\t' << f.iteration << '\n';
  };
  for (const auto& f : feedback.positive) row("+", f);
  for (const auto& f : feedback.negative) row("-", f);
  return out.str();
}

std::string render_heatmap_csv(const std::vector<HeatmapCell>& cells) {
  std::ostringstream out;
  out << "pos_percent,neg_percent,feedback_positive,feedback_negative,wf1,normalized_size\n";
  for (const auto& c : cells) {
    out << format_double(c.pos_percent) << ',' << format_double(c.neg_percent) << ',' << c.feedback_positive
        << ',' << c.feedback_negative << ',' << format_double(c.wf1) << ',' << format_double(c.normalized_size)
        << '\n';
  }
  return out.str();
}

}  // namespace kgrefine
