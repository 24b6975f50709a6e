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

#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "psl.hpp"

using namespace kgrefine;

namespace {

GroundRule rule(RuleTemplate t, std::vector<double> obs, std::vector<std::uint32_t> body, std::uint32_t head,
                bool neg, double w = 1.0) {
  return {t, std::move(obs), std::move(body), head, neg, w};
}

GroundProgram single_candidate(double conf, double prior) {
  GroundProgram p;
  auto a = p.atom({AtomKind::kRel, 0, 0, 1});
  p.add_rule(rule(RuleTemplate::kCandidateRel, {conf}, {}, a, false, 1.0));
  p.add_rule(rule(RuleTemplate::kPrior, {1.0}, {}, a, true, prior));
  return p;
}

}  // namespace

TEST_CASE("lukasiewicz conjunction") {
  CHECK(lukasiewicz_body(std::vector<double>{1.0, 1.0}) == 1.0);
  CHECK(lukasiewicz_body(std::vector<double>{1.0, 0.8}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(lukasiewicz_body(std::vector<double>{0.4, 0.4}) == 0.0);
  CHECK_THROWS_AS(lukasiewicz_body(std::vector<double>{}), ContractError);
}

TEST_CASE("hinge distance") {
  std::vector<double> x{1.0, 1.0};
  CHECK(hinge_distance(rule(RuleTemplate::kInverse, {1.0}, {0}, 1, false), x) == 0.0);

  x = {0.8, 0.3};  // REL, LBL
  CHECK(hinge_distance(rule(RuleTemplate::kDomain, {1.0}, {0}, 1, false), x) == doctest::Approx(0.5));

  x = {0.9, 0.2};
  CHECK(hinge_distance(rule(RuleTemplate::kMutex, {1.0}, {0}, 1, true), x) == doctest::Approx(0.1));
}

TEST_CASE("program validation") {
  GroundProgram p;
  auto a = p.atom({AtomKind::kRel, 0, 0, 0});
  CHECK(p.atom({AtomKind::kRel, 0, 0, 0}) == a);
  CHECK_THROWS_AS(p.add_rule(rule(RuleTemplate::kPrior, {1.0}, {}, a, true, 0.0)), ContractError);
  CHECK_THROWS_AS(p.add_rule(rule(RuleTemplate::kPrior, {}, {}, a, true)), ContractError);
  CHECK_THROWS_AS(p.add_rule(rule(RuleTemplate::kDomain, {1.0}, {7}, a, false)), ContractError);
}

TEST_CASE("empty program") {
  GroundProgram p;
  auto r = map_inference(p);
  CHECK(r.rel_scores.empty());
  CHECK(r.lbl_scores.empty());
  CHECK(r.objective == 0.0);
}

TEST_CASE("single candidate with prior") {
  for (auto method : {SolverMethod::kSubgradient, SolverMethod::kAdmm}) {
    auto p = single_candidate(0.9, 0.1);
    p.solver.method = method;
    auto r = map_inference(p);
    REQUIRE(r.rel_scores.size() == 1);
    CHECK(r.rel_scores[0].second == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(r.objective == doctest::Approx(0.09).epsilon(1e-3));
  }
}

TEST_CASE("grounding: minimal and inverse") {
  auto v = std::make_shared<Vocabulary>();
  auto a = v->entity("a"), b = v->entity("b");
  auto r = v->relation("r"), s = v->relation("s");
  KnowledgeGraph kg(v, {{{a, r, b}, {{"x", 0.9}}}}, {}, Ontology{});
  auto p = ground(kg, RuleWeights{});
  CHECK(p.num_atoms() == 1);
  CHECK(p.rules().size() == 2);

  Ontology o;
  o.inv.insert({r, s});
  auto p2 = ground(kg.with_ontology(o), RuleWeights{});
  CHECK(p2.num_atoms() == 2);
  auto inv_head = p2.find(AtomKey::rel({b, s, a}));
  REQUIRE(inv_head);
  bool found = false;
  for (const auto& g : p2.rules()) {
    if (g.tmpl == RuleTemplate::kInverse && g.head == *inv_head && g.body == std::vector<std::uint32_t>{0}) found = true;
  }
  CHECK(found);
}

TEST_CASE("grounding matches the naive enumerator") {
  auto kg = fixtures::toy_kg();
  RuleWeights w;
  w.candidate_rel["y"] = 2.5;
  w.inverse = 0.7;
  w.mutual_exclusion = 3.0;
  auto program = ground(kg, w);
  auto lazy = oracle::canonical_rules(program);
  auto naive = oracle::naive_ground(kg, w);
  CHECK(lazy == naive);

  std::set<RuleTemplate> seen;
  for (const auto& r : program.rules()) seen.insert(r.tmpl);
  CHECK(seen.size() == kNumOntologyTemplates + 1);  // plus the prior

  FeedbackEvidence fb;
  fb.positive.push_back({{EntityId{2}, RelationId{1}, EntityId{3}}, 0.95, 1});
  fb.negative.push_back({{EntityId{0}, RelationId{3}, EntityId{1}}, 0.1, 1});
  CHECK(oracle::canonical_rules(ground(kg, w, &fb)) == oracle::naive_ground(kg, w, &fb));
}

TEST_CASE("grounding rejects bad feedback") {
  auto kg = fixtures::toy_kg();
  FeedbackEvidence fb;
  fb.positive.push_back({{EntityId{99}, RelationId{0}, EntityId{0}}, 0.9, 1});
  CHECK_THROWS_AS(ground(kg, RuleWeights{}, &fb), ReferenceError);
  fb.positive = {{{EntityId{0}, RelationId{0}, EntityId{1}}, 1.5, 1}};
  CHECK_THROWS_AS(ground(kg, RuleWeights{}, &fb), DataError);
}

TEST_CASE("solver matches the grid oracle on random programs") {
  std::mt19937_64 rng(20261016);
  for (auto method : {SolverMethod::kSubgradient, SolverMethod::kAdmm}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto p = oracle::random_program(rng, 1 + trial % 2);
      p.solver.method = method;
      auto r = map_inference(p);
      const double grid = oracle::grid_minimum(p);
      INFO("method " << static_cast<int>(method) << " trial " << trial);
      CHECK(r.objective <= grid + 1e-3);
      for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
        REQUIRE(r.objective_trace[k] <= r.objective_trace[k - 1]);
      }
      for (const auto& [t, v] : r.rel_scores) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("squared hinge gradient matches finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> interior(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = oracle::random_program(rng, 2, 6);
    std::vector<double> x(p.num_atoms());
    for (auto& v : x) v = interior(rng);
    std::vector<double> g(p.num_atoms());
    program_subgradient(p, x, g);
    const double eps = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += eps;
      xm[i] -= eps;
      const double fd = (program_objective(p, xp) - program_objective(p, xm)) / (2 * eps);
      CHECK(std::abs(fd - g[i]) < 1e-5);
    }
  }
}

TEST_CASE("positive feedback never lowers the atom's value") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = oracle::random_program(rng, 1);
    const auto target = static_cast<std::uint32_t>(trial % p.num_atoms());
    auto base = map_inference(p);
    auto q = p;
    q.add_rule(rule(RuleTemplate::kFeedbackPositive, {unit(rng)}, {}, target, false, 1.0));
    auto boosted = map_inference(q);
    CHECK(boosted.rel_scores[target].second >= base.rel_scores[target].second - 1e-3);
  }
}

TEST_CASE("infer without ontology keeps extraction confidence") {
  auto v = std::make_shared<Vocabulary>();
  std::vector<CandidateFact> facts;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 10; ++i) {
    facts.push_back({{v->entity("e" + std::to_string(i)), v->relation("r"), v->entity("f" + std::to_string(i))},
                     {{"x", unit(rng)}}});
  }
  KnowledgeGraph kg(v, facts, {}, Ontology{});
  auto r = infer(kg, RuleWeights{}, nullptr, SolverConfig{});
  for (const auto& f : kg.facts()) {
    CHECK(*r.rel_score(f.triple) >= f.confidences[0].value - 1e-3);
  }
  auto again = infer(kg, RuleWeights{}, nullptr, SolverConfig{});
  CHECK(again.rel_scores == r.rel_scores);
}

TEST_CASE("relation mutex pulls down the weaker fact") {
  auto v = std::make_shared<Vocabulary>();
  auto a = v->entity("a"), b = v->entity("b");
  auto r = v->relation("r"), s = v->relation("s");
  Ontology o;
  o.rmut.insert({r, s});
  RuleWeights w;
  w.candidate_rel["strong"] = 5.0;
  KnowledgeGraph kg(v, {{{a, r, b}, {{"strong", 0.95}}}, {{a, s, b}, {{"weak", 0.8}}}}, {}, o);
  auto program = ground(kg, w);
  auto res = map_inference(program);
  CHECK(res.objective <= oracle::grid_minimum(program) + 1e-3);
  CHECK(*res.rel_score({a, s, b}) < 0.5);
  CHECK(*res.rel_score({a, r, b}) > 0.9);
}
