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

#include <algorithm>
#include <cmath>

#include "psl.hpp"

namespace kgrefine {

const char* template_name(RuleTemplate t) {
  switch (t) {
    case RuleTemplate::kCandidateRel: return "CANDREL";
    case RuleTemplate::kCandidateLbl: return "CANDLBL";
    case RuleTemplate::kSameEntLbl: return "SAMEENT-LBL";
    case RuleTemplate::kSameEntRelSubject: return "SAMEENT-REL-SUBJ";
    case RuleTemplate::kSameEntRelObject: return "SAMEENT-REL-OBJ";
    case RuleTemplate::kInverse: return "INV";
    case RuleTemplate::kDomain: return "DOM";
    case RuleTemplate::kRange: return "RNG";
    case RuleTemplate::kSubclass: return "SUB";
    case RuleTemplate::kSubproperty: return "RSUB";
    case RuleTemplate::kMutex: return "MUT";
    case RuleTemplate::kRelMutex: return "RMUT";
    case RuleTemplate::kFeedbackPositive: return "FEEDBACK+";
    case RuleTemplate::kFeedbackNegative: return "FEEDBACK-";
    case RuleTemplate::kPrior: return "PRIOR";
  }
  return "?";
}

void RuleWeights::validate() const {
  auto ok = [](double w) { return std::isfinite(w) && w >= 0.0; };
  for (const auto& [s, w] : candidate_rel) {
    if (!ok(w)) throw ConfigError("candidate weight for source '" + s + "' must be >= 0");
  }
  for (const auto& [s, w] : candidate_lbl) {
    if (!ok(w)) throw ConfigError("label candidate weight for source '" + s + "' must be >= 0");
  }
  for (double w : {default_candidate, entity_resolution, inverse, selectional, subsumption, mutual_exclusion,
                   negative_prior, feedback}) {
    if (!ok(w)) throw ConfigError("rule weights must be finite and >= 0");
  }
  if (hinge_power != 1 && hinge_power != 2) {
    throw ConfigError("hinge_power must be 1 or 2");
  }
}

double RuleWeights::rel_source(const std::string& source) const {
  auto it = candidate_rel.find(source);
  return it == candidate_rel.end() ? default_candidate : it->second;
}

double RuleWeights::lbl_source(const std::string& source) const {
  auto it = candidate_lbl.find(source);
  return it == candidate_lbl.end() ? default_candidate : it->second;
}

std::uint32_t GroundProgram::atom(const AtomKey& key) {
  auto [it, inserted] = index_.emplace(key, static_cast<std::uint32_t>(atoms_.size()));
  if (inserted) {
    atoms_.push_back(key);
  }
  return it->second;
}

std::optional<std::uint32_t> GroundProgram::find(const AtomKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GroundProgram::add_rule(GroundRule rule) {
  if (!(rule.weight > 0.0) || !std::isfinite(rule.weight)) {
    throw ContractError(std::string("ground rule ") + template_name(rule.tmpl) + " needs a positive weight");
  }
  if (rule.observed.empty() && rule.body.empty()) {
    throw ContractError(std::string("ground rule ") + template_name(rule.tmpl) + " has an empty body");
  }
  for (auto a : rule.body) {
    if (a >= atoms_.size()) throw ContractError("ground rule references a missing atom");
  }
  if (rule.head >= atoms_.size()) throw ContractError("ground rule references a missing atom");
  rules_.push_back(std::move(rule));
}

namespace {

template <class K, class V>
using Adjacency = std::unordered_map<K, std::vector<V>>;

// Lazy grounding state: a worklist of free atoms; each popped atom fires the
// positive-head templates that take it as their single free body atom.
class Grounder {
 public:
  Grounder(const KnowledgeGraph& kg, const RuleWeights& w) : kg_(kg), w_(w) {
    const auto& o = kg.ontology();
    for (const auto& [r, s] : o.inv) inv_[r.value].push_back(s.value);
    for (const auto& [r, s] : o.rsub) rsub_[r.value].push_back(s.value);
    for (const auto& [c, p] : o.sub) sub_[c.value].push_back(p.value);
    for (const auto& [a, b] : o.mut) {
      mut_[a.value].push_back(b.value);
      mut_[b.value].push_back(a.value);
    }
    for (const auto& [a, b] : o.rmut) {
      rmut_[a.value].push_back(b.value);
      rmut_[b.value].push_back(a.value);
    }
    for (const auto& s : o.sameent) {
      if (s.first == s.second) continue;
      same_[s.first.value].push_back({s.second.value, s.score});
      same_[s.second.value].push_back({s.first.value, s.score});
    }
  }

  GroundProgram run(const FeedbackEvidence* feedback) {
    prog_.hinge_power = w_.hinge_power;
    for (const auto& f : kg_.facts()) {
      auto head = prog_.atom(AtomKey::rel(f.triple));
      for (const auto& c : f.confidences) {
        emit(RuleTemplate::kCandidateRel, {c.value}, {}, head, false, w_.rel_source(c.source));
      }
    }
    for (const auto& l : kg_.labels()) {
      auto head = prog_.atom(AtomKey::lbl(l.entity, l.label));
      for (const auto& c : l.confidences) {
        emit(RuleTemplate::kCandidateLbl, {c.value}, {}, head, false, w_.lbl_source(c.source));
      }
    }
    if (feedback != nullptr) {
      for (const auto& item : feedback->positive) {
        auto head = prog_.atom(AtomKey::rel(item.triple));
        emit(RuleTemplate::kFeedbackPositive, {item.score}, {}, head, false, w_.feedback);
      }
      for (const auto& item : feedback->negative) {
        auto head = prog_.atom(AtomKey::rel(item.triple));
        emit(RuleTemplate::kFeedbackNegative, {1.0 - item.score}, {}, head, true, w_.feedback);
      }
    }

    for (std::uint32_t next = 0; next < prog_.num_atoms(); ++next) {
      const AtomKey key = prog_.atoms()[next];
      if (key.kind == AtomKind::kRel) {
        expand_rel(next, key);
      } else {
        expand_lbl(next, key);
      }
    }

    const auto n = static_cast<std::uint32_t>(prog_.num_atoms());
    for (std::uint32_t i = 0; i < n; ++i) {
      const AtomKey key = prog_.atoms()[i];
      if (key.kind == AtomKind::kRel) {
        for (auto s : lookup(rmut_, key.b)) {
          if (auto h = prog_.find({AtomKind::kRel, key.a, s, key.c})) {
            emit(RuleTemplate::kRelMutex, {1.0}, {i}, *h, true, w_.mutual_exclusion);
          }
        }
      } else {
        for (auto l2 : lookup(mut_, key.b)) {
          if (auto h = prog_.find({AtomKind::kLbl, key.a, l2, 0})) {
            emit(RuleTemplate::kMutex, {1.0}, {i}, *h, true, w_.mutual_exclusion);
          }
        }
      }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      emit(RuleTemplate::kPrior, {1.0}, {}, i, true, w_.negative_prior);
    }
    return std::move(prog_);
  }

 private:
  template <class M>
  static const std::vector<typename M::mapped_type::value_type>& lookup(const M& m, std::uint32_t k) {
    static const std::vector<typename M::mapped_type::value_type> kEmpty;
    auto it = m.find(k);
    return it == m.end() ? kEmpty : it->second;
  }

  void emit(RuleTemplate t, std::vector<double> observed, std::vector<std::uint32_t> body, std::uint32_t head,
            bool negated, double weight) {
    if (weight <= 0.0) return;
    prog_.add_rule({t, std::move(observed), std::move(body), head, negated, weight});
  }

  // Positive-head rule with one observed ontology atom and one free body
  // atom. A head equal to the body is trivially satisfied and skipped.
  void implication(RuleTemplate t, double observed, std::uint32_t body, const AtomKey& head_key, double weight) {
    if (weight <= 0.0) return;
    if (prog_.atoms()[body] == head_key) return;
    auto head = prog_.atom(head_key);
    emit(t, {observed}, {body}, head, false, weight);
  }

  void expand_rel(std::uint32_t idx, const AtomKey& k) {
    const auto& o = kg_.ontology();
    const std::uint32_t s = k.a, r = k.b, obj = k.c;
    for (auto inv : lookup(inv_, r)) {
      implication(RuleTemplate::kInverse, 1.0, idx, {AtomKind::kRel, obj, inv, s}, w_.inverse);
    }
    if (auto it = o.dom.find(RelationId{r}); it != o.dom.end()) {
      implication(RuleTemplate::kDomain, 1.0, idx, {AtomKind::kLbl, s, it->second.value, 0}, w_.selectional);
    }
    if (auto it = o.rng.find(RelationId{r}); it != o.rng.end()) {
      implication(RuleTemplate::kRange, 1.0, idx, {AtomKind::kLbl, obj, it->second.value, 0}, w_.selectional);
    }
    for (auto sup : lookup(rsub_, r)) {
      implication(RuleTemplate::kSubproperty, 1.0, idx, {AtomKind::kRel, s, sup, obj}, w_.subsumption);
    }
    for (auto [other, score] : lookup(same_, s)) {
      implication(RuleTemplate::kSameEntRelSubject, score, idx, {AtomKind::kRel, other, r, obj},
                  w_.entity_resolution);
    }
    for (auto [other, score] : lookup(same_, obj)) {
      implication(RuleTemplate::kSameEntRelObject, score, idx, {AtomKind::kRel, s, r, other},
                  w_.entity_resolution);
    }
  }

  void expand_lbl(std::uint32_t idx, const AtomKey& k) {
    for (auto parent : lookup(sub_, k.b)) {
      implication(RuleTemplate::kSubclass, 1.0, idx, {AtomKind::kLbl, k.a, parent, 0}, w_.subsumption);
    }
    for (auto [other, score] : lookup(same_, k.a)) {
      implication(RuleTemplate::kSameEntLbl, score, idx, {AtomKind::kLbl, other, k.b, 0}, w_.entity_resolution);
    }
  }

  const KnowledgeGraph& kg_;
  const RuleWeights& w_;
  GroundProgram prog_;
  Adjacency<std::uint32_t, std::uint32_t> inv_, rsub_, sub_, mut_, rmut_;
  Adjacency<std::uint32_t, std::pair<std::uint32_t, double>> same_;
};

}  // namespace

GroundProgram ground(const KnowledgeGraph& kg, const RuleWeights& weights, const FeedbackEvidence* feedback) {
  weights.validate();
  if (feedback != nullptr) {
    for (const auto* set : {&feedback->positive, &feedback->negative}) {
      for (const auto& item : *set) {
        const auto& t = item.triple;
        if (t.subject.value >= kg.num_entities() || t.object.value >= kg.num_entities() ||
            t.relation.value >= kg.num_relations()) {
          throw ReferenceError("feedback references an unknown id");
        }
        if (!(item.score >= 0.0 && item.score <= 1.0)) {
          throw DataError("feedback score outside [0,1] for " + kg.describe(t));
        }
      }
    }
  }
  return Grounder(kg, weights).run(feedback);
}

std::string render_inferred(const KnowledgeGraph& kg, const InferenceResult& result) {
  const auto& v = kg.vocab();
  std::string out;
  for (const auto& [t, score] : result.rel_scores) {
    out += "REL\t" + v.entities.name(t.subject.value) + '\t' + v.relations.name(t.relation.value) + '\t' +
           v.entities.name(t.object.value) + '\t' + format_double(score) + '\n';
  }
  for (const auto& [k, score] : result.lbl_scores) {
    out += "LBL\t" + v.entities.name(k.first.value) + '\t' + v.labels.name(k.second.value) + '\t' +
           format_double(score) + '\n';
  }
  return out;
}

}  // namespace kgrefine
