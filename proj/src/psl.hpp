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

// Hinge-loss MRF over the twelve ontological rule templates: grounding into
// weighted potentials over [0,1]-valued REL/LBL atoms and convex MAP
// inference.

#ifndef KGREFINE_PSL_HPP_
#define KGREFINE_PSL_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kg.hpp"

namespace kgrefine {

enum class RuleTemplate : std::uint8_t {
  kCandidateRel,       // CANDREL_T(E1,E2,R) => REL(E1,E2,R)
  kCandidateLbl,       // CANDLBL_T(E,L) => LBL(E,L)
  kSameEntLbl,         // SAMEENT(E1,E2) & LBL(E1,L) => LBL(E2,L)
  kSameEntRelSubject,  // SAMEENT(E1,E2) & REL(E1,E,R) => REL(E2,E,R)
  kSameEntRelObject,   // SAMEENT(E1,E2) & REL(E,E1,R) => REL(E,E2,R)
  kInverse,            // INV(R,S) & REL(E1,E2,R) => REL(E2,E1,S)
  kDomain,             // DOM(R,L) & REL(E1,E2,R) => LBL(E1,L)
  kRange,              // RNG(R,L) & REL(E1,E2,R) => LBL(E2,L)
  kSubclass,           // SUB(L,P) & LBL(E,L) => LBL(E,P)
  kSubproperty,        // RSUB(R,S) & REL(E1,E2,R) => REL(E1,E2,S)
  kMutex,              // MUT(L1,L2) & LBL(E,L1) => !LBL(E,L2)
  kRelMutex,           // RMUT(R,S) & REL(E1,E2,R) => !REL(E1,E2,S)
  kFeedbackPositive,   // FEEDBACK_k(E1,E2,R) => REL(E1,E2,R)
  kFeedbackNegative,   // !FEEDBACK_k(E1,E2,R) => !REL(E1,E2,R)
  kPrior,              // => !atom
};

inline constexpr int kNumOntologyTemplates = 12;

const char* template_name(RuleTemplate t);

enum class AtomKind : std::uint8_t { kRel, kLbl };

struct AtomKey {
  AtomKind kind = AtomKind::kRel;
  std::uint32_t a = 0;  // REL: subject, LBL: entity
  std::uint32_t b = 0;  // REL: relation, LBL: label
  std::uint32_t c = 0;  // REL: object, LBL: unused
  auto operator<=>(const AtomKey&) const = default;

  static AtomKey rel(const Triple& t) { return {AtomKind::kRel, t.subject.value, t.relation.value, t.object.value}; }
  static AtomKey lbl(EntityId e, LabelId l) { return {AtomKind::kLbl, e.value, l.value, 0}; }
  Triple triple() const { return {EntityId{a}, RelationId{b}, EntityId{c}}; }
};

struct AtomKeyHash {
  std::size_t operator()(const AtomKey& k) const noexcept {
    return TripleHash{}(Triple{EntityId{k.a}, RelationId{k.b}, EntityId{k.c}}) ^
           (static_cast<std::size_t>(k.kind) * 0x9E3779B97F4A7C15ULL);
  }
};

struct GroundRule {
  RuleTemplate tmpl = RuleTemplate::kCandidateRel;
  std::vector<double> observed;     // observed body atom values
  std::vector<std::uint32_t> body;  // free body atoms
  std::uint32_t head = 0;
  bool negated_head = false;
  double weight = 1.0;
};

struct RuleWeights {
  std::map<std::string, double> candidate_rel;  // per source; default_candidate otherwise
  std::map<std::string, double> candidate_lbl;
  double default_candidate = 1.0;
  double entity_resolution = 1.0;
  double inverse = 1.0;
  double selectional = 1.0;
  double subsumption = 1.0;
  double mutual_exclusion = 1.0;
  double negative_prior = 0.05;
  double feedback = 1.0;
  int hinge_power = 1;

  void validate() const;
  double rel_source(const std::string& source) const;
  double lbl_source(const std::string& source) const;
};

enum class SolverMethod { kSubgradient, kAdmm };

struct SolverConfig {
  SolverMethod method = SolverMethod::kAdmm;
  int max_iterations = 2500;
  double tolerance = 1e-5;
  // Stop once the best objective improved by less than `tolerance` over
  // this many consecutive iterations.
  int patience = 200;
  double step_size = 0.5;  // subgradient: step_size / sqrt(k)
  double admm_rho = 1.0;
};

class GroundProgram {
 public:
  std::uint32_t atom(const AtomKey& key);  // find or create
  std::optional<std::uint32_t> find(const AtomKey& key) const;
  void add_rule(GroundRule rule);  // validates weight and atom references

  std::span<const AtomKey> atoms() const { return atoms_; }
  std::span<const GroundRule> rules() const { return rules_; }
  std::size_t num_atoms() const { return atoms_.size(); }

  int hinge_power = 1;
  SolverConfig solver;

 private:
  std::vector<AtomKey> atoms_;
  std::unordered_map<AtomKey, std::uint32_t, AtomKeyHash> index_;
  std::vector<GroundRule> rules_;
};

struct FeedbackItem {
  Triple triple;
  double score = 0.0;
  int iteration = 0;
  bool operator==(const FeedbackItem&) const = default;
};

struct FeedbackEvidence {
  std::vector<FeedbackItem> positive;
  std::vector<FeedbackItem> negative;
  int iteration = 0;
  bool empty() const { return positive.empty() && negative.empty(); }
};

struct InferenceResult {
  std::vector<std::pair<Triple, double>> rel_scores;    // sorted by triple
  std::vector<std::pair<LabelKey, double>> lbl_scores;  // sorted by key
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // best objective after each iteration

  std::optional<double> rel_score(const Triple& t) const;
  std::optional<double> lbl_score(EntityId e, LabelId l) const;
};

// Lukasiewicz conjunction max(0, sum(v) - (n-1)). Empty input is a
// contract violation.
double lukasiewicz_body(std::span<const double> values);

// Distance to satisfaction max(0, body - head_value), with head_value
// flipped for negated heads.
double hinge_distance(const GroundRule& rule, std::span<const double> assignment);

double program_objective(const GroundProgram& program, std::span<const double> assignment);

// A subgradient of the objective (the gradient when hinge_power == 2).
void program_subgradient(const GroundProgram& program, std::span<const double> assignment,
                         std::span<double> out);

GroundProgram ground(const KnowledgeGraph& kg, const RuleWeights& weights,
                     const FeedbackEvidence* feedback = nullptr);

InferenceResult map_inference(const GroundProgram& program);

InferenceResult infer(const KnowledgeGraph& kg, const RuleWeights& weights, const FeedbackEvidence* feedback,
                      const SolverConfig& solver);

// Renders inferred.tsv: kind<TAB>args...<TAB>score for every grounded atom.
std::string render_inferred(const KnowledgeGraph& kg, const InferenceResult& result);

}  // namespace kgrefine

#endif  // KGREFINE_PSL_HPP_
