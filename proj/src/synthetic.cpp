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

#include "synthetic.hpp"

#include <array>
#include <unordered_set>

namespace kgrefine {

namespace {

struct LabelDef {
  const char* name;
  const char* parent;  // nullptr for roots
  double share;        // fraction of entities, leaves only
};

constexpr std::array<LabelDef, 8> kLabels{{
    {"person", nullptr, 0.0},
    {"athlete", "person", 0.25},
    {"politician", "person", 0.15},
    {"organization", nullptr, 0.0},
    {"team", "organization", 0.10},
    {"company", "organization", 0.15},
    {"location", nullptr, 0.0},
    {"city", "location", 0.35},
}};

struct RelationDef {
  const char* name;
  const char* inverse;
  const char* dom;
  const char* rng;
};

constexpr std::array<RelationDef, 5> kRelations{{
    {"plays_for", "has_player", "athlete", "team"},
    {"born_in", "birthplace_of", "person", "city"},
    {"located_in", "hosts", "organization", "city"},
    {"employs", "works_for", "company", "person"},
    {"represents", "represented_by", "politician", "city"},
}};

constexpr std::array<std::pair<const char*, const char*>, 5> kExclusive{{
    {"person", "organization"},
    {"person", "location"},
    {"organization", "location"},
    {"athlete", "politician"},
    {"team", "company"},
}};

}  // namespace

void SyntheticSpec::validate() const {
  if (entities < 20) throw ConfigError("synthetic KG needs at least 20 entities");
  if (regions < 1) throw ConfigError("synthetic KG needs at least one region");
  if (!(locality >= 0 && locality <= 1) || !(inverse_rate >= 0 && inverse_rate <= 1)) {
    throw ConfigError("locality and inverse_rate must lie in [0,1]");
  }
}

KnowledgeGraph generate_synthetic_kg(const SyntheticSpec& spec) {
  spec.validate();
  auto vocab = std::make_shared<Vocabulary>();
  Ontology onto;
  for (const auto& l : kLabels) vocab->label(l.name);
  for (const auto& l : kLabels) {
    if (l.parent != nullptr) onto.sub.insert({vocab->label(l.name), vocab->label(l.parent)});
  }
  for (const auto& [a, b] : kExclusive) {
    auto x = vocab->label(a), y = vocab->label(b);
    onto.mut.insert({std::min(x, y), std::max(x, y)});
  }
  std::vector<RelationId> forward, backward;
  for (const auto& r : kRelations) {
    auto f = vocab->relation(r.name);
    auto b = vocab->relation(r.inverse);
    forward.push_back(f);
    backward.push_back(b);
    onto.inv.insert({f, b});
    onto.dom[f] = vocab->label(r.dom);
    onto.rng[f] = vocab->label(r.rng);
    onto.dom[b] = vocab->label(r.rng);
    onto.rng[b] = vocab->label(r.dom);
  }

  // Leaf label per entity, in contiguous blocks; regions interleave.
  auto rng = make_stream(spec.seed, "synthetic");
  std::vector<LabelId> leaf;
  std::vector<std::size_t> region;
  std::vector<CandidateLabel> labels;
  std::size_t next = 0;
  for (std::size_t li = 0; li < kLabels.size(); ++li) {
    if (kLabels[li].share == 0.0) continue;
    auto count = static_cast<std::size_t>(kLabels[li].share * static_cast<double>(spec.entities) + 0.5);
    if (li == kLabels.size() - 1) count = spec.entities - next;
    for (std::size_t i = 0; i < count; ++i, ++next) {
      auto e = vocab->entity(std::string(kLabels[li].name) + "_" + std::to_string(i));
      leaf.push_back(LabelId{static_cast<std::uint32_t>(li)});
      region.push_back(i % spec.regions);
      labels.push_back({e, leaf.back(), {{"gold", 1.0}}});
    }
  }

  auto is_a = [&](std::size_t e, LabelId want) {
    LabelId l = leaf[e];
    if (l == want) return true;
    for (const auto& [child, parent] : onto.sub) {
      if (child == l && parent == want) return true;
    }
    return false;
  };
  auto pool = [&](LabelId l) {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < leaf.size(); ++e) {
      if (is_a(e, l)) out.push_back(e);
    }
    return out;
  };

  std::vector<CandidateFact> facts;
  std::unordered_set<Triple, TripleHash> seen;
  auto add = [&](const Triple& t) {
    if (facts.size() < spec.facts && seen.insert(t).second) facts.push_back({t, {{"gold", 1.0}}});
  };
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const std::size_t max_attempts = 100 * spec.facts + 1000;
  for (std::size_t attempt = 0; facts.size() < spec.facts; ++attempt) {
    if (attempt >= max_attempts) throw DataError("synthetic generator could not reach the requested fact count");
    const auto ri = std::uniform_int_distribution<std::size_t>(0, forward.size() - 1)(rng);
    const auto subjects = pool(onto.dom[forward[ri]]);
    const auto objects = pool(onto.rng[forward[ri]]);
    const auto s = subjects[std::uniform_int_distribution<std::size_t>(0, subjects.size() - 1)(rng)];
    std::vector<std::size_t> candidates;
    if (coin(rng) < spec.locality) {
      for (auto o : objects) {
        if (region[o] == region[s] && o != s) candidates.push_back(o);
      }
    }
    if (candidates.empty()) {
      for (auto o : objects) {
        if (o != s) candidates.push_back(o);
      }
    }
    const auto o = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    const EntityId se{static_cast<std::uint32_t>(s)}, oe{static_cast<std::uint32_t>(o)};
    if (seen.contains({se, forward[ri], oe})) continue;
    add({se, forward[ri], oe});
    if (coin(rng) < spec.inverse_rate) add({oe, backward[ri], se});
  }
  return KnowledgeGraph(vocab, std::move(facts), std::move(labels), std::move(onto));
}

}  // namespace kgrefine
