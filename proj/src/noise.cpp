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

#include "noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace kgrefine {

void NoiseSpec::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(corrupt_fraction) || !unit(type_compatible_fraction)) {
    throw ConfigError("noise fractions must lie in [0,1]");
  }
  if (!(clean_std >= 0.0) || !(noise_std >= 0.0)) {
    throw ConfigError("noise score standard deviations must be non-negative");
  }
}

TypeIndex::TypeIndex(const KnowledgeGraph& kg) : ontology_(&kg.ontology()), labels_(kg.num_entities()) {
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> parents;
  for (const auto& [c, p] : kg.ontology().sub) {
    parents[c.value].push_back(p.value);
  }
  for (const auto& l : kg.labels()) {
    // Walk ancestors; the visited set also guards against SUB cycles.
    std::vector<std::uint32_t> stack{l.label.value};
    auto& out = labels_[l.entity.value];
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (std::find(out.begin(), out.end(), cur) != out.end()) continue;
      out.push_back(cur);
      if (auto it = parents.find(cur); it != parents.end()) {
        stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
    }
  }
  for (auto& v : labels_) std::sort(v.begin(), v.end());
}

bool TypeIndex::has_label(EntityId e, LabelId l) const {
  const auto& v = labels_.at(e.value);
  return std::binary_search(v.begin(), v.end(), l.value);
}

bool TypeIndex::subject_compatible(EntityId e, RelationId r) const {
  auto it = ontology_->dom.find(r);
  return it == ontology_->dom.end() || has_label(e, it->second);
}

bool TypeIndex::object_compatible(EntityId e, RelationId r) const {
  auto it = ontology_->rng.find(r);
  return it == ontology_->rng.end() || has_label(e, it->second);
}

namespace {

constexpr int kMaxAttempts = 100;

enum class Slot { kSubject, kRelation, kObject };

struct FactCorruptor {
  const KnowledgeGraph& kg;
  const TypeIndex& types;
  Rng& rng;
  std::unordered_set<Triple, TripleHash>& existing;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  Triple swap(const Triple& t, Slot slot) {
    Triple out = t;
    switch (slot) {
      case Slot::kSubject:
        out.subject = EntityId{static_cast<std::uint32_t>(pick(kg.num_entities()))};
        break;
      case Slot::kObject:
        out.object = EntityId{static_cast<std::uint32_t>(pick(kg.num_entities()))};
        break;
      case Slot::kRelation:
        out.relation = RelationId{static_cast<std::uint32_t>(pick(kg.num_relations()))};
        break;
    }
    return out;
  }

  bool compatible_at(const Triple& t, Slot slot) const {
    return slot == Slot::kSubject ? types.subject_compatible(t.subject, t.relation)
                                  : types.object_compatible(t.object, t.relation);
  }

  bool fresh(const Triple& cand, const Triple& orig) const { return cand != orig && !existing.contains(cand); }

  // Entity swap whose replacement passes (want_compatible) or fails the
  // DOM/RNG check for the swapped slot.
  std::optional<Triple> typed_swap(const Triple& t, Slot slot, bool want_compatible) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Triple cand = swap(t, slot);
      if (fresh(cand, t) && compatible_at(cand, slot) == want_compatible) {
        return cand;
      }
    }
    return std::nullopt;
  }

  std::optional<Triple> any_swap(const Triple& t) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Triple cand = swap(t, static_cast<Slot>(pick(3)));
      if (fresh(cand, t)) return cand;
    }
    return std::nullopt;
  }
};

}  // namespace

CorruptionResult corrupt_kg(const KnowledgeGraph& kg, const NoiseSpec& spec) {
  spec.validate();
  CorruptionStats stats;
  const std::size_t n_facts = kg.facts().size();
  const std::size_t n_labels = spec.corrupt_labels ? kg.labels().size() : 0;
  stats.population = n_facts + n_labels;

  std::vector<CandidateFact> facts(kg.facts().begin(), kg.facts().end());
  std::vector<CandidateLabel> labels(kg.labels().begin(), kg.labels().end());
  TruthMap truth;
  for (const auto& f : facts) truth[f.triple] = 1;
  LabelTruthMap label_truth;
  for (const auto& l : labels) label_truth[{l.entity, l.label}] = 1;

  if (stats.population == 0) {
    if (spec.corrupt_fraction > 0) {
      stats.warnings.push_back("corruption requested on an empty KG; nothing to do");
    }
    return {KnowledgeGraph(kg.vocab_ptr(), std::move(facts), std::move(labels), kg.ontology(), std::move(truth),
                           std::move(label_truth)),
            stats};
  }

  auto rng = make_stream(spec.seed, "noise");
  std::vector<std::size_t> order(stats.population);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_corrupt =
      static_cast<std::size_t>(std::llround(spec.corrupt_fraction * static_cast<double>(stats.population)));
  stats.compatible_requested =
      static_cast<std::size_t>(std::llround(spec.type_compatible_fraction * static_cast<double>(n_corrupt)));

  TypeIndex types(kg);
  std::unordered_set<Triple, TripleHash> existing;
  for (const auto& f : facts) existing.insert(f.triple);
  std::set<LabelKey> existing_labels;
  for (const auto& l : labels) existing_labels.insert({l.entity, l.label});

  FactCorruptor corruptor{kg, types, rng, existing};
  CompatMap compat;
  std::size_t compat_assigned = 0;

  for (std::size_t k = 0; k < n_corrupt; ++k) {
    const auto idx = order[k];
    if (idx < n_facts) {
      auto& fact = facts[idx];
      const Triple orig = fact.triple;
      std::optional<Triple> result;
      bool compatible = false;
      if (compat_assigned < stats.compatible_requested) {
        ++compat_assigned;
        Slot slot = corruptor.pick(2) == 0 ? Slot::kSubject : Slot::kObject;
        result = corruptor.typed_swap(orig, slot, true);
        compatible = result.has_value();
      } else {
        auto slot = static_cast<Slot>(corruptor.pick(3));
        if (slot == Slot::kRelation) {
          if (kg.num_relations() > 1) {
            for (int attempt = 0; attempt < kMaxAttempts && !result; ++attempt) {
              Triple cand = corruptor.swap(orig, slot);
              if (corruptor.fresh(cand, orig)) result = cand;
            }
          }
        } else {
          result = corruptor.typed_swap(orig, slot, false);
        }
      }
      if (!result) {
        ++stats.fallbacks;
        stats.warnings.push_back("fallback to unconstrained corruption for " + kg.describe(orig));
        result = corruptor.any_swap(orig);
        if (!result) {
          stats.warnings.push_back("could not corrupt " + kg.describe(orig) + " without collision");
          continue;
        }
      }
      existing.erase(orig);
      existing.insert(*result);
      truth.erase(orig);
      truth[*result] = 0;
      compat[*result] = compatible;
      fact.triple = *result;
      ++stats.corrupted;
      ++stats.corrupted_facts;
      if (compatible) ++stats.type_compatible;
    } else {
      auto& label = labels[idx - n_facts];
      const LabelKey orig{label.entity, label.label};
      std::optional<LabelKey> result;
      for (int attempt = 0; attempt < kMaxAttempts && !result; ++attempt) {
        LabelKey cand = orig;
        if (corruptor.pick(2) == 0 || kg.num_labels() < 2) {
          cand.first = EntityId{static_cast<std::uint32_t>(corruptor.pick(kg.num_entities()))};
        } else {
          cand.second = LabelId{static_cast<std::uint32_t>(corruptor.pick(kg.num_labels()))};
        }
        if (cand != orig && !existing_labels.contains(cand)) result = cand;
      }
      if (!result) {
        stats.warnings.push_back("could not corrupt a label without collision");
        continue;
      }
      existing_labels.erase(orig);
      existing_labels.insert(*result);
      label_truth.erase(orig);
      label_truth[*result] = 0;
      label.entity = result->first;
      label.label = result->second;
      ++stats.corrupted;
      ++stats.corrupted_labels;
    }
  }

  return {KnowledgeGraph(kg.vocab_ptr(), std::move(facts), std::move(labels), kg.ontology(), std::move(truth),
                         std::move(label_truth), std::move(compat)),
          stats};
}

KnowledgeGraph assign_extraction_scores(const KnowledgeGraph& kg, const NoiseSpec& spec) {
  spec.validate();
  if (!kg.truth()) {
    throw DataError("extraction scores need gold truth labels");
  }
  auto rng = make_stream(spec.seed, "scores");
  auto draw = [&](bool clean) {
    const double mean = clean ? spec.clean_mean : spec.noise_mean;
    const double sd = clean ? spec.clean_std : spec.noise_std;
    double v = mean;
    if (sd > 0) {
      v = std::normal_distribution<double>(mean, sd)(rng);
    }
    return std::clamp(v, kScoreFloor, kScoreCeil);
  };

  std::vector<CandidateFact> facts;
  facts.reserve(kg.facts().size());
  for (const auto& f : kg.facts()) {
    auto it = kg.truth()->find(f.triple);
    if (it == kg.truth()->end()) {
      throw DataError("no truth label for fact " + kg.describe(f.triple));
    }
    facts.push_back({f.triple, {{"extraction", draw(it->second == 1)}}});
  }
  std::vector<CandidateLabel> labels;
  for (const auto& l : kg.labels()) {
    auto it = kg.label_truth().find({l.entity, l.label});
    bool clean = it == kg.label_truth().end() || it->second == 1;
    labels.push_back({l.entity, l.label, {{"extraction", draw(clean)}}});
  }
  return KnowledgeGraph(kg.vocab_ptr(), std::move(facts), std::move(labels), kg.ontology(), kg.truth(),
                        kg.label_truth(), kg.compat());
}

}  // namespace kgrefine
