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

#ifndef KGREFINE_KG_HPP_
#define KGREFINE_KG_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace kgrefine {

// Bijection between seen strings and dense ids starting at 0.
class Interner {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Vocabulary {
  Interner entities;
  Interner relations;
  Interner labels;

  EntityId entity(std::string_view n) { return EntityId{entities.intern(n)}; }
  RelationId relation(std::string_view n) { return RelationId{relations.intern(n)}; }
  LabelId label(std::string_view n) { return LabelId{labels.intern(n)}; }
};

struct SourceConfidence {
  std::string source;
  double value = 0.0;
  bool operator==(const SourceConfidence&) const = default;
};

struct CandidateFact {
  Triple triple;
  std::vector<SourceConfidence> confidences;

  double max_confidence() const;
  double mean_confidence() const;
};

struct CandidateLabel {
  EntityId entity;
  LabelId label;
  std::vector<SourceConfidence> confidences;
};

struct SameEntity {
  EntityId first;
  EntityId second;
  double score = 0.0;
  auto operator<=>(const SameEntity&) const = default;
};

// Ontological components. Unordered pairs (mut, rmut) are stored with the
// smaller id first.
struct Ontology {
  std::map<RelationId, LabelId> dom;
  std::map<RelationId, LabelId> rng;
  std::set<std::pair<LabelId, LabelId>> sub;  // (child, parent)
  std::set<std::pair<RelationId, RelationId>> rsub;
  std::set<std::pair<LabelId, LabelId>> mut;
  std::set<std::pair<RelationId, RelationId>> rmut;
  std::set<std::pair<RelationId, RelationId>> inv;
  std::vector<SameEntity> sameent;

  bool empty() const;
  bool operator==(const Ontology&) const = default;
};

using TruthMap = std::unordered_map<Triple, int, TripleHash>;
using LabelKey = std::pair<EntityId, LabelId>;
using LabelTruthMap = std::map<LabelKey, int>;
// Per-noise-fact flag: true when the corruption was type compatible.
using CompatMap = std::unordered_map<Triple, bool, TripleHash>;

// Immutable graded knowledge graph. Derived graphs share the vocabulary, so
// ids stay stable across filtering, corruption, and refinement.
class KnowledgeGraph {
 public:
  KnowledgeGraph() : vocab_(std::make_shared<Vocabulary>()) {}

  // Merges duplicate (s,r,o) facts and duplicate (e,l) labels by appending
  // confidence lists. Throws DataError on out-of-range confidences and
  // ReferenceError on ids the vocabulary does not know.
  KnowledgeGraph(std::shared_ptr<const Vocabulary> vocab, std::vector<CandidateFact> facts,
                 std::vector<CandidateLabel> labels, Ontology ontology,
                 std::optional<TruthMap> truth = std::nullopt, LabelTruthMap label_truth = {},
                 CompatMap compat = {});

  const Vocabulary& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const { return vocab_; }

  std::span<const CandidateFact> facts() const { return facts_; }
  std::span<const CandidateLabel> labels() const { return labels_; }
  const Ontology& ontology() const { return ontology_; }
  const std::optional<TruthMap>& truth() const { return truth_; }
  const LabelTruthMap& label_truth() const { return label_truth_; }
  const CompatMap& compat() const { return compat_; }

  std::size_t num_entities() const { return vocab_->entities.size(); }
  std::size_t num_relations() const { return vocab_->relations.size(); }
  std::size_t num_labels() const { return vocab_->labels.size(); }

  const CandidateFact* find(const Triple& t) const;
  bool contains(const Triple& t) const { return find(t) != nullptr; }

  KnowledgeGraph with_facts(std::vector<CandidateFact> facts) const;
  KnowledgeGraph with_ontology(Ontology ontology) const;

  std::string describe(const Triple& t) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<CandidateFact> facts_;
  std::vector<CandidateLabel> labels_;
  Ontology ontology_;
  std::optional<TruthMap> truth_;
  LabelTruthMap label_truth_;
  CompatMap compat_;
  std::unordered_map<Triple, std::size_t, TripleHash> index_;
};

// ---- File formats ---------------------------------------------------------

struct LoadOptions {
  std::filesystem::path truth;   // optional truth.tsv
  std::filesystem::path compat;  // optional noise.tsv (s r o compatible)
  // Triples with this relation name become labels instead of facts.
  std::string type_relation;
};

// Ontology files are optional individually; a missing directory means an
// empty ontology. An empty labels path means no labels.
KnowledgeGraph load_kg(const std::filesystem::path& triples, const std::filesystem::path& labels,
                       const std::filesystem::path& ontology_dir, const LoadOptions& options = {});

// Writes triples.tsv, labels.tsv, ontology/, and truth.tsv / noise.tsv when
// present. Each file is written atomically.
void write_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir);

std::string render_triples(const KnowledgeGraph& kg);
std::string render_labels(const KnowledgeGraph& kg);
std::string render_truth(const KnowledgeGraph& kg);
std::string render_compat(const KnowledgeGraph& kg);
void write_ontology(const KnowledgeGraph& kg, const std::filesystem::path& dir);

// ---- Evaluation splits ----------------------------------------------------

struct EvalItem {
  CandidateFact fact;
  int gold = 0;
};

struct EvalSet {
  std::vector<EvalItem> items;
  std::size_t positives() const;
  std::size_t negatives() const { return items.size() - positives(); }
};

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

struct KgSplit {
  KnowledgeGraph train;
  EvalSet valid;
  EvalSet test;
};

KgSplit split_kg(const KnowledgeGraph& kg, const SplitSpec& spec);

// Splits an evaluation set into two halves with equal class balance.
std::pair<EvalSet, EvalSet> split_halves_stratified(const EvalSet& set, std::uint64_t seed);

// ---- SAMEENT generation ---------------------------------------------------

double jaccard_sameent(const KnowledgeGraph& kg, EntityId a, EntityId b);

// The k highest-scoring pairs with positive score, ties by (min id, max id).
std::vector<SameEntity> generate_sameent(const KnowledgeGraph& kg, std::size_t k);

}  // namespace kgrefine

#endif  // KGREFINE_KG_HPP_
