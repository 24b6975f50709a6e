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

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "io.hpp"
#include "noise.hpp"
#include "synthetic.hpp"

namespace kgrefine {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path optional_file(const fs::path& p) { return fs::exists(p) ? p : fs::path(); }

KnowledgeGraph noisy(const KnowledgeGraph& clean, const NoiseSpec& spec) {
  return assign_extraction_scores(corrupt_kg(clean, spec).kg, spec);
}

struct Prepared {
  KnowledgeGraph kg;
  PipelineSplits splits;
};

KnowledgeGraph with_sameent(const KnowledgeGraph& kg, std::size_t k) {
  if (k == 0) return kg;
  Ontology onto = kg.ontology();
  auto pairs = generate_sameent(kg, k);
  onto.sameent.insert(onto.sameent.end(), pairs.begin(), pairs.end());
  return kg.with_ontology(std::move(onto));
}

Prepared prepare_inputs(const RunConfig& config) {
  auto kg = with_sameent(load_input(config), config.sameent_k);
  if (!kg.truth()) throw DataError("evaluation needs truth labels (truth.tsv)");
  auto split = split_kg(kg, config.split);
  return {std::move(kg), {std::move(split.valid), std::move(split.test)}};
}

PipelineConfig pipeline_config(const RunConfig& config) {
  return {config.weights, config.solver, config.model, config.feedback};
}

std::string summary(const std::string& command, json fields) {
  json j{{"command", command}, {"status", "ok"}};
  j.update(fields);
  return j.dump();
}

// Best iteration by model validation wF1; ties keep the earliest.
const IterationReport& best_iteration(const std::vector<IterationReport>& reports) {
  const IterationReport* best = &reports.front();
  for (const auto& r : reports) {
    if (r.model.valid.wf1 > best->model.valid.wf1) best = &r;
  }
  return *best;
}

// Observed labels as a typing: the most specific label whose best source
// confidence reaches 0.5.
TypeAssignment observed_types(const KnowledgeGraph& kg) {
  InferenceResult r;
  std::map<LabelKey, double> best;
  for (const auto& l : kg.labels()) {
    double m = 0.0;
    for (const auto& c : l.confidences) m = std::max(m, c.value);
    auto& slot = best[{l.entity, l.label}];
    slot = std::max(slot, m);
  }
  r.lbl_scores.assign(best.begin(), best.end());
  return generate_types(r, kg.ontology().sub, 0.5);
}

json stage_json(const StageMetrics& m) { return {{"valid", report_json(m.valid)}, {"test", report_json(m.test)}}; }

json recall_json(const NoiseRecall& r) {
  return {{"compatible", r.compatible},
          {"incompatible", r.incompatible},
          {"n_compatible", r.n_compatible},
          {"n_incompatible", r.n_incompatible}};
}

std::vector<double> psl_eval_scores(const InferenceResult& r, const EvalSet& set) {
  std::vector<double> out;
  for (const auto& item : set.items) out.push_back(r.rel_score(item.fact.triple).value_or(0.0));
  return out;
}

// ---- prepare --------------------------------------------------------------

std::string cmd_prepare(const RunConfig& config) {
  const auto clean = load_input(config, true);
  const auto corrupted = corrupt_kg(clean, config.noise);
  const auto kg = assign_extraction_scores(corrupted.kg, config.noise);
  const fs::path out = config.paths.out;
  write_kg(kg, out);

  double clean_sum = 0, noisy_sum = 0;
  std::size_t clean_n = 0, noisy_n = 0;
  for (const auto& f : kg.facts()) {
    const double v = f.max_confidence();
    if (kg.truth()->at(f.triple) == 1) {
      clean_sum += v;
      ++clean_n;
    } else {
      noisy_sum += v;
      ++noisy_n;
    }
  }
  const auto& st = corrupted.stats;
  json stats{{"entities", kg.num_entities()},
             {"relations", kg.num_relations()},
             {"labels", kg.num_labels()},
             {"facts", kg.facts().size()},
             {"label_facts", kg.labels().size()},
             {"population", st.population},
             {"corrupted", st.corrupted},
             {"corrupted_facts", st.corrupted_facts},
             {"corrupted_labels", st.corrupted_labels},
             {"compatible_requested", st.compatible_requested},
             {"type_compatible", st.type_compatible},
             {"fallbacks", st.fallbacks},
             {"compatibility_rate", st.corrupted ? double(st.type_compatible) / double(st.corrupted) : 0.0},
             {"clean_score_mean", clean_n ? clean_sum / double(clean_n) : 0.0},
             {"noisy_score_mean", noisy_n ? noisy_sum / double(noisy_n) : 0.0},
             {"warnings", st.warnings}};
  write_file_atomic(out / "stats.json", stats.dump(2) + "\n");
  return summary("prepare", {{"out", out.string()},
                             {"facts", kg.facts().size()},
                             {"corrupted", st.corrupted},
                             {"type_compatible", st.type_compatible},
                             {"fallbacks", st.fallbacks}});
}

// ---- infer ----------------------------------------------------------------

std::string cmd_infer(const RunConfig& config) {
  const auto kg = with_sameent(load_input(config), config.sameent_k);
  const auto result = infer(kg, config.weights, nullptr, config.solver);
  const fs::path out = config.paths.out;
  write_file_atomic(out / "inferred.tsv", render_inferred(kg, result));
  return summary("infer", {{"out", (out / "inferred.tsv").string()},
                           {"rel_atoms", result.rel_scores.size()},
                           {"lbl_atoms", result.lbl_scores.size()},
                           {"objective", result.objective},
                           {"iterations", result.iterations}});
}

// ---- train ----------------------------------------------------------------

std::string cmd_train(const RunConfig& config) {
  const auto [kg, splits] = prepare_inputs(config);
  const auto types = observed_types(kg);
  auto positives = training_positives(kg, splits);
  const auto n = positives.size();
  if (positives.empty()) throw DataError("no training facts");
  const auto run = train_and_evaluate(kg, std::move(positives), types, config.model, splits);
  const fs::path out = config.paths.out;
  save_checkpoint(run.model, kg.vocab(), out / "model.bin");
  json report{{"threshold", run.threshold},
              {"training_positives", n},
              {"typed_entities", types.size()},
              {"metrics", stage_json(run.metrics)},
              {"config", config.to_json()["model"]}};
  write_file_atomic(out / "train.json", report.dump(2) + "\n");
  return summary("train", {{"out", (out / "model.bin").string()},
                           {"threshold", run.threshold},
                           {"valid_wf1", run.metrics.valid.wf1},
                           {"test_wf1", run.metrics.test.wf1}});
}

// ---- iterate --------------------------------------------------------------

std::string cmd_iterate(const RunConfig& config) {
  const auto [kg, splits] = prepare_inputs(config);
  const fs::path out = config.paths.out;
  std::optional<EmbeddingModel> last;
  auto sink = [&](const IterationArtifacts& a) {
    const auto dir = out / ("iter-" + std::to_string(a.iteration));
    write_file_atomic(dir / "inferred.tsv", render_inferred(kg, a.inference));
    write_file_atomic(dir / "feedback.tsv", render_feedback(kg, a.feedback));
    last = a.model;
  };
  const auto reports = iterate_refinement(kg, splits, pipeline_config(config), sink);
  write_file_atomic(out / "reports.json", render_reports(reports));
  save_checkpoint(*last, kg.vocab(), out / "model.bin");
  const auto& best = best_iteration(reports);
  return summary("iterate", {{"out", (out / "reports.json").string()},
                             {"iterations", reports.size()},
                             {"halted", reports.back().halted},
                             {"best_iteration", best.iteration},
                             {"best_test_wf1", best.model.test.wf1}});
}

// ---- eval -----------------------------------------------------------------

std::string cmd_eval(const RunConfig& config) {
  const auto [kg, splits] = prepare_inputs(config);
  std::vector<double> psl_valid, psl_test;
  auto sink = [&](const IterationArtifacts& a) {
    if (a.iteration != 1) return;
    psl_valid = psl_eval_scores(a.inference, splits.valid);
    psl_test = psl_eval_scores(a.inference, splits.test);
  };
  const auto reports = iterate_refinement(kg, splits, pipeline_config(config), sink);
  const auto& best = best_iteration(reports);

  ModelConfig plain_cfg = config.model;
  plain_cfg.mode = TypeMode::kPlain;
  ModelConfig implicit_cfg = config.model;
  implicit_cfg.mode = TypeMode::kImplicit;
  ModelConfig stage1_cfg = plain_cfg;
  stage1_cfg.base = BaseModel::kDistMult;

  const auto positives = training_positives(kg, splits);
  const auto plain = train_and_evaluate(kg, positives, {}, plain_cfg, splits);
  const auto implicit = train_and_evaluate(kg, positives, {}, implicit_cfg, splits);

  const auto alpha = tune_alpha(psl_valid, plain.valid_scores, gold_labels(splits.valid));
  std::vector<double> mixed_valid, mixed_test;
  for (std::size_t i = 0; i < psl_valid.size(); ++i) {
    mixed_valid.push_back(alpha_combine(psl_valid[i], plain.valid_scores[i], alpha.alpha));
  }
  for (std::size_t i = 0; i < psl_test.size(); ++i) {
    mixed_test.push_back(alpha_combine(psl_test[i], plain.test_scores[i], alpha.alpha));
  }
  const StageMetrics alpha_metrics{weighted_f1(classify(mixed_valid, alpha.threshold), gold_labels(splits.valid)),
                                   weighted_f1(classify(mixed_test, alpha.threshold), gold_labels(splits.test))};

  const auto ensemble = two_stage_ensemble(kg, stage1_cfg, plain_cfg, splits);

  json baselines;
  baselines["psl-only"] = stage_json(reports.front().psl);
  baselines["plain"] = stage_json(plain.metrics);
  baselines["implicit"] = stage_json(implicit.metrics);
  baselines["alpha"] = stage_json(alpha_metrics);
  baselines["alpha"]["alpha"] = alpha.alpha;
  baselines["two-stage"] = {{"test", report_json(ensemble.test)},
                            {"stage1_threshold", ensemble.stage1_threshold},
                            {"stage1_kept", ensemble.stage1_kept}};
  baselines["refined"] = stage_json(best.model);
  baselines["refined"]["iteration"] = best.iteration;

  json doc{{"baselines", baselines}, {"iterations", json::parse(render_reports(reports))}};
  const fs::path out = config.paths.out;
  write_file_atomic(out / "reports.json", doc.dump(2) + "\n");
  return summary("eval", {{"out", (out / "reports.json").string()},
                          {"refined_test_wf1", best.model.test.wf1},
                          {"plain_test_wf1", plain.metrics.test.wf1},
                          {"psl_test_wf1", reports.front().psl.test.wf1}});
}

// ---- ablate ---------------------------------------------------------------

std::string cmd_ablate(const RunConfig& config) {
  const auto [kg, splits] = prepare_inputs(config);
  const auto names = config.ablations.empty() ? default_ablations() : config.ablations;
  std::string csv = "ablation,psl_pos_f1,psl_neg_f1,psl_wf1,model_pos_f1,model_neg_f1,model_wf1,best_iteration\n";
  for (const auto& name : names) {
    const auto ablation = Ablation::parse(name);
    const auto variant = kg.with_ontology(ablate_ontology(kg.ontology(), ablation));
    const auto reports = iterate_refinement(variant, splits, pipeline_config(config));
    const auto& psl = reports.front().psl.test;
    const auto& best = best_iteration(reports);
    csv += ablation.name() + ',' + format_double(psl.pos_f1) + ',' + format_double(psl.neg_f1) + ',' +
           format_double(psl.wf1) + ',' + format_double(best.model.test.pos_f1) + ',' +
           format_double(best.model.test.neg_f1) + ',' + format_double(best.model.test.wf1) + ',' +
           std::to_string(best.iteration) + '\n';
  }
  const fs::path out = config.paths.out;
  write_file_atomic(out / "ablation.csv", csv);
  return summary("ablate", {{"out", (out / "ablation.csv").string()}, {"rows", names.size()}});
}

// ---- heatmap --------------------------------------------------------------

std::string cmd_heatmap(const RunConfig& config) {
  const auto [kg, splits] = prepare_inputs(config);
  auto pc = pipeline_config(config);
  pc.feedback.max_iter = 1;
  std::unordered_set<Triple, TripleHash> held_out;
  for (const auto* set : {&splits.valid, &splits.test}) {
    for (const auto& i : set->items) held_out.insert(i.fact.triple);
  }
  std::vector<ScoredTriple> scored;
  std::vector<std::pair<Triple, double>> rel_scores;
  auto sink = [&](const IterationArtifacts& a) {
    rel_scores = a.inference.rel_scores;
    std::vector<Triple> universe;
    for (const auto& [t, s] : rel_scores) {
      if (!held_out.contains(t)) universe.push_back(t);
    }
    const auto p = predict(a.model, universe);
    for (std::size_t i = 0; i < universe.size(); ++i) scored.push_back({universe[i], p[i]});
  };
  const double t_best = iterate_refinement(kg, splits, pc, sink).front().t_best;
  std::vector<Triple> base;
  for (const auto& [t, s] : rel_scores) {
    if (s >= t_best) base.push_back(t);
  }
  const auto cells = threshold_heatmap(kg, splits, scored, base, pc, config.heatmap_pos, config.heatmap_neg);
  const fs::path out = config.paths.out;
  write_file_atomic(out / "heatmap.csv", render_heatmap_csv(cells));
  return summary("heatmap", {{"out", (out / "heatmap.csv").string()}, {"cells", cells.size()}});
}

}  // namespace

KnowledgeGraph load_input(const RunConfig& config, bool clean) {
  const auto& p = config.paths;
  if (config.use_synthetic) {
    auto kg = generate_synthetic_kg(config.synthetic);
    return clean ? kg : noisy(kg, config.noise);
  }
  LoadOptions options;
  options.type_relation = config.type_relation;
  if (!p.triples.empty()) {
    options.truth = p.truth;
    options.compat = p.compat;
    return load_kg(p.triples, p.labels, p.ontology, options);
  }
  if (p.kg.empty()) throw ConfigError("no input: set paths.kg, paths.triples, or use the synthetic generator");
  const fs::path dir = p.kg;
  if (!fs::is_directory(dir)) throw IoError("KG directory " + dir.string() + " does not exist");
  options.truth = p.truth.empty() ? optional_file(dir / "truth.tsv") : fs::path(p.truth);
  options.compat = p.compat.empty() ? optional_file(dir / "noise.tsv") : fs::path(p.compat);
  const fs::path labels = p.labels.empty() ? optional_file(dir / "labels.tsv") : fs::path(p.labels);
  const fs::path onto = p.ontology.empty() ? dir / "ontology" : fs::path(p.ontology);
  return load_kg(dir / "triples.tsv", labels, onto, options);
}

json report_json(const EvalReport& r) {
  return {{"pos_f1", r.pos_f1}, {"neg_f1", r.neg_f1}, {"wf1", r.wf1}, {"w1", r.w1}, {"w0", r.w0},
          {"tp", r.tp},         {"fp", r.fp},         {"tn", r.tn},   {"fn", r.fn}};
}

json report_json(const IterationReport& r) {
  // Non-finite cutoffs (feedback disabled) serialize as null.
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"iteration", r.iteration},
          {"t_best", r.t_best},
          {"t1", r.t1},
          {"t2", finite(r.t2)},
          {"t3", finite(r.t3)},
          {"psl", stage_json(r.psl)},
          {"model", stage_json(r.model)},
          {"normalized_size", r.normalized_size},
          {"noise_recall", recall_json(r.noise_recall)},
          {"psl_noise_recall", recall_json(r.psl_noise_recall)},
          {"facts_kept", r.facts_kept},
          {"inferred_kept", r.inferred_kept},
          {"training_positives", r.training_positives},
          {"typed_entities", r.typed_entities},
          {"feedback_positive", r.feedback_positive},
          {"feedback_negative", r.feedback_negative},
          {"kg_size", r.kg_size},
          {"psl_objective", r.psl_objective},
          {"psl_iterations", r.psl_iterations},
          {"halted", r.halted}};
}

std::string render_reports(const std::vector<IterationReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

std::string run_command(const std::string& name, const RunConfig& config) {
  config.validate();
  if (name == "prepare") return cmd_prepare(config);
  if (name == "infer") return cmd_infer(config);
  if (name == "train") return cmd_train(config);
  if (name == "iterate") return cmd_iterate(config);
  if (name == "eval") return cmd_eval(config);
  if (name == "ablate") return cmd_ablate(config);
  if (name == "heatmap") return cmd_heatmap(config);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace kgrefine
