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

#include "eval.hpp"

#include <algorithm>
#include <cmath>

namespace kgrefine {

namespace {

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const auto denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

EvalReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  const double n = static_cast<double>(tp + fp + tn + fn);
  r.w1 = static_cast<double>(tp + fn) / n;
  r.w0 = static_cast<double>(tn + fp) / n;
  r.pos_f1 = f1(tp, fp, fn);
  r.neg_f1 = f1(tn, fn, fp);
  r.wf1 = r.w1 * r.pos_f1 + r.w0 * r.neg_f1;
  return r;
}

void check_binary(int v, const char* what) {
  if (v != 0 && v != 1) throw DataError(std::string(what) + " must be 0 or 1");
}

}  // namespace

EvalReport weighted_f1(std::span<const int> predictions, std::span<const int> gold) {
  if (predictions.size() != gold.size()) throw ContractError("weighted_f1: predictions and gold differ in length");
  if (gold.empty()) throw DataError("weighted_f1 needs a non-empty evaluation set");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    check_binary(predictions[i], "prediction");
    check_binary(gold[i], "gold label");
    if (gold[i] == 1) {
      (predictions[i] == 1 ? tp : fn)++;
    } else {
      (predictions[i] == 1 ? fp : tn)++;
    }
  }
  return report_from_counts(tp, fp, tn, fn);
}

EvalReport weighted_f1(const std::unordered_map<Triple, int, TripleHash>& predictions, const EvalSet& gold,
                       const KnowledgeGraph* names) {
  std::vector<int> p, g;
  p.reserve(gold.items.size());
  g.reserve(gold.items.size());
  for (const auto& item : gold.items) {
    auto it = predictions.find(item.fact.triple);
    if (it == predictions.end()) {
      const auto& t = item.fact.triple;
      throw DataError("no prediction for " + (names != nullptr ? names->describe(t)
                                                                : "(" + std::to_string(t.subject.value) + ", " +
                                                                      std::to_string(t.relation.value) + ", " +
                                                                      std::to_string(t.object.value) + ")"));
    }
    p.push_back(it->second);
    g.push_back(item.gold);
  }
  return weighted_f1(p, g);
}

std::vector<int> classify(std::span<const double> scores, double threshold) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s >= threshold ? 1 : 0);
  return out;
}

ThresholdResult tune_threshold(std::span<const double> scores, std::span<const int> gold) {
  if (scores.size() != gold.size()) throw ContractError("tune_threshold: scores and gold differ in length");
  if (scores.empty()) throw DataError("tune_threshold needs a non-empty evaluation set");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    check_binary(gold[i], "gold label");
    if (!std::isfinite(scores[i])) throw NumericError("tune_threshold: non-finite score");
    (gold[i] == 1 ? pos : neg).push_back(scores[i]);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto at_least = [](const std::vector<double>& v, double t) {
    return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), t));
  };
  ThresholdResult best{0.0, -1.0};
  for (int i = 0; i <= kThresholdSteps; ++i) {
    const double t = threshold_at(i);
    const auto tp = at_least(pos, t);
    const auto fp = at_least(neg, t);
    const double w = report_from_counts(tp, fp, neg.size() - fp, pos.size() - tp).wf1;
    if (w > best.wf1) best = {t, w};
  }
  return best;
}

std::vector<int> gold_labels(const EvalSet& set) {
  std::vector<int> out;
  out.reserve(set.items.size());
  for (const auto& i : set.items) out.push_back(i.gold);
  return out;
}

double alpha_combine(double psl_score, double model_score, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
  return alpha * psl_score + (1.0 - alpha) * model_score;
}

AlphaResult tune_alpha(std::span<const double> psl_scores, std::span<const double> model_scores,
                       std::span<const int> gold) {
  if (psl_scores.size() != gold.size() || model_scores.size() != gold.size()) {
    throw ContractError("tune_alpha: score lists and gold differ in length");
  }
  AlphaResult best{0.0, 0.0, -1.0};
  double best_brier = INFINITY;
  std::vector<double> combined(gold.size());
  for (int k = 0; k <= 10; ++k) {
    const double alpha = k / 10.0;
    double brier = 0.0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      combined[i] = alpha_combine(psl_scores[i], model_scores[i], alpha);
      brier += (combined[i] - gold[i]) * (combined[i] - gold[i]);
    }
    const auto t = tune_threshold(combined, gold);
    if (t.wf1 > best.wf1 || (t.wf1 == best.wf1 && brier < best_brier)) {
      best = {alpha, t.threshold, t.wf1};
      best_brier = brier;
    }
  }
  return best;
}

NoiseRecall noise_recall(std::span<const int> predictions, const EvalSet& gold, const CompatMap& compat) {
  if (predictions.size() != gold.items.size()) throw ContractError("noise_recall: predictions and gold differ in length");
  std::size_t hit_c = 0, hit_i = 0;
  NoiseRecall r;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& item = gold.items[i];
    if (item.gold != 0) continue;
    auto it = compat.find(item.fact.triple);
    if (it == compat.end()) throw DataError("no compatibility flag for a gold-negative item");
    if (it->second) {
      ++r.n_compatible;
      hit_c += predictions[i] == 0;
    } else {
      ++r.n_incompatible;
      hit_i += predictions[i] == 0;
    }
  }
  if (r.n_compatible > 0) r.compatible = static_cast<double>(hit_c) / static_cast<double>(r.n_compatible);
  if (r.n_incompatible > 0) r.incompatible = static_cast<double>(hit_i) / static_cast<double>(r.n_incompatible);
  return r;
}

double size_normalized(std::size_t now, std::size_t original) {
  if (original == 0) throw DataError("size normalization needs a non-empty original KG");
  return (static_cast<double>(now) - static_cast<double>(original)) / static_cast<double>(original);
}

const char* component_name(OntologyComponent c) {
  switch (c) {
    case OntologyComponent::kDom: return "DOM";
    case OntologyComponent::kRng: return "RNG";
    case OntologyComponent::kSub: return "SUB";
    case OntologyComponent::kRsub: return "RSUB";
    case OntologyComponent::kMut: return "MUT";
    case OntologyComponent::kRmut: return "RMUT";
    case OntologyComponent::kInv: return "INV";
    case OntologyComponent::kSameEnt: return "SAMEENT";
  }
  return "?";
}

OntologyComponent parse_component(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (auto c : kAllComponents) {
    if (up == component_name(c)) return c;
  }
  throw ConfigError("unknown ontology component '" + std::string(s) + "'");
}

Ablation Ablation::parse(std::string_view s) {
  if (s == "all") return {AblationMode::kAll, {}};
  if (s == "none") return {AblationMode::kNone, {}};
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ConfigError("ablation must be all, none, without:X or only:X+Y");
  const auto head = s.substr(0, colon);
  Ablation a;
  if (head == "without") {
    a.mode = AblationMode::kWithout;
  } else if (head == "only") {
    a.mode = AblationMode::kOnly;
  } else {
    throw ConfigError("unknown ablation mode '" + std::string(head) + "'");
  }
  auto rest = s.substr(colon + 1);
  while (!rest.empty()) {
    const auto plus = rest.find('+');
    a.components.insert(parse_component(rest.substr(0, plus)));
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 1);
  }
  if (a.components.empty()) throw ConfigError("ablation needs at least one component");
  return a;
}

std::string Ablation::name() const {
  switch (mode) {
    case AblationMode::kAll: return "all";
    case AblationMode::kNone: return "none";
    default: break;
  }
  std::string out = mode == AblationMode::kWithout ? "without:" : "only:";
  bool first = true;
  for (auto c : components) {
    if (!first) out += '+';
    out += component_name(c);
    first = false;
  }
  return out;
}

Ontology ablate_ontology(const Ontology& ontology, const Ablation& ablation) {
  Ontology out = ontology;
  auto clear = [&](OntologyComponent c) {
    switch (c) {
      case OntologyComponent::kDom: out.dom.clear(); break;
      case OntologyComponent::kRng: out.rng.clear(); break;
      case OntologyComponent::kSub: out.sub.clear(); break;
      case OntologyComponent::kRsub: out.rsub.clear(); break;
      case OntologyComponent::kMut: out.mut.clear(); break;
      case OntologyComponent::kRmut: out.rmut.clear(); break;
      case OntologyComponent::kInv: out.inv.clear(); break;
      case OntologyComponent::kSameEnt: out.sameent.clear(); break;
    }
  };
  for (auto c : kAllComponents) {
    const bool named = ablation.components.contains(c);
    switch (ablation.mode) {
      case AblationMode::kAll: break;
      case AblationMode::kNone: clear(c); break;
      case AblationMode::kWithout:
        if (named) clear(c);
        break;
      case AblationMode::kOnly:
        if (!named) clear(c);
        break;
    }
  }
  return out;
}

}  // namespace kgrefine
