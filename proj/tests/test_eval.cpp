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

#include <doctest.h>

#include <random>

#include "eval.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace kgrefine;

namespace {

EvalSet make_set(const std::vector<int>& gold) {
  EvalSet s;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    s.items.push_back({{{EntityId{static_cast<std::uint32_t>(i)}, RelationId{0}, EntityId{0}}, {{"x", 0.5}}},
                       gold[i]});
  }
  return s;
}

std::vector<int> random_bits(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution b(p);
  std::vector<int> out(n);
  for (auto& v : out) v = b(rng) ? 1 : 0;
  return out;
}

}  // namespace

TEST_CASE("weighted_f1 hand example") {
  // 8 gold positives (6 TP, 2 FN), 2 gold negatives (1 TN, 1 FP).
  std::vector<int> gold{1, 1, 1, 1, 1, 1, 1, 1, 0, 0};
  std::vector<int> pred{1, 1, 1, 1, 1, 1, 0, 0, 0, 1};
  auto r = weighted_f1(pred, gold);
  CHECK(r.pos_f1 == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.neg_f1 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.wf1 == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(r.wf1 == r.w1 * r.pos_f1 + r.w0 * r.neg_f1);
  CHECK(r.tp == 6);
  CHECK(r.fn == 2);
  CHECK(r.tn == 1);
  CHECK(r.fp == 1);
}

TEST_CASE("weighted_f1 perfect and empty-class cases") {
  std::vector<int> gold{1, 0, 1, 0};
  auto r = weighted_f1(gold, gold);
  CHECK(r.pos_f1 == 1.0);
  CHECK(r.neg_f1 == 1.0);
  CHECK(r.wf1 == 1.0);

  std::vector<int> all_pos{1, 1, 1};
  std::vector<int> pred{1, 0, 1};
  auto e = weighted_f1(pred, all_pos);
  CHECK(e.w0 == 0.0);
  CHECK(e.neg_f1 == 0.0);
  CHECK(e.wf1 == doctest::Approx(0.8));

  CHECK_THROWS_AS(weighted_f1(std::vector<int>{}, std::vector<int>{}), DataError);
  CHECK_THROWS_AS(weighted_f1(std::vector<int>{1}, std::vector<int>{1, 0}), ContractError);
  CHECK_THROWS_AS(weighted_f1(std::vector<int>{2}, std::vector<int>{1}), DataError);
}

TEST_CASE("weighted_f1 matches an independent confusion-matrix implementation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    const auto gold = random_bits(rng, n, std::uniform_real_distribution<double>(0, 1)(rng));
    const auto pred = random_bits(rng, n, 0.5);
    auto r = weighted_f1(pred, gold);
    auto o = oracle::confusion_wf1(pred, gold);
    REQUIRE(r.wf1 == doctest::Approx(o.wf1).epsilon(1e-12));
    REQUIRE(r.pos_f1 == doctest::Approx(o.pos_f1).epsilon(1e-12));
    REQUIRE(r.neg_f1 == doctest::Approx(o.neg_f1).epsilon(1e-12));
    REQUIRE(r.wf1 == r.w1 * r.pos_f1 + r.w0 * r.neg_f1);
    REQUIRE(r.w1 + r.w0 == doctest::Approx(1.0));
  }
}

TEST_CASE("keyed weighted_f1 reports uncovered items") {
  auto kg = fixtures::toy_kg();
  auto set = make_set({1, 0});
  std::unordered_map<Triple, int, TripleHash> preds;
  preds[set.items[0].fact.triple] = 1;
  CHECK_THROWS_WITH_AS(weighted_f1(preds, set, &kg), doctest::Contains("no prediction for"), DataError);
  preds[set.items[1].fact.triple] = 0;
  CHECK(weighted_f1(preds, set).wf1 == 1.0);
}

TEST_CASE("tune_threshold tie rule and separation") {
  std::vector<double> scores{0.1, 0.2, 0.8, 0.9, 0.85};
  std::vector<int> gold{0, 0, 1, 1, 1};
  auto r = tune_threshold(scores, gold);
  CHECK(r.threshold == doctest::Approx(0.201));
  CHECK(r.wf1 == 1.0);

  std::vector<double> flat{0.4, 0.4, 0.4};
  std::vector<int> mixed{1, 0, 1};
  CHECK(tune_threshold(flat, mixed).threshold == 0.0);

  CHECK_THROWS_AS(tune_threshold(std::vector<double>{}, std::vector<int>{}), DataError);
}

TEST_CASE("tune_threshold equals the exhaustive grid scan") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = trial == 0 ? 10 : std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    std::vector<double> scores(n);
    // Coarse scores so that grid points coincide with scores.
    for (auto& s : scores) s = std::round(u(rng) * 200) / 200;
    const auto gold = random_bits(rng, n, 0.6);
    auto got = tune_threshold(scores, gold);
    auto want = oracle::scan_threshold(scores, gold);
    REQUIRE(got.threshold == want.first);
    REQUIRE(got.wf1 == doctest::Approx(want.second).epsilon(1e-12));
  }
}

TEST_CASE("alpha_combine endpoints and monotonicity") {
  CHECK(alpha_combine(0.7, 0.2, 1.0) == 0.7);
  CHECK(alpha_combine(0.7, 0.2, 0.0) == 0.2);
  CHECK_THROWS_AS(alpha_combine(0.5, 0.5, 1.5), ConfigError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng), m = u(rng), a = u(rng), b = u(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (p > m) {
      CHECK(alpha_combine(p, m, lo) <= alpha_combine(p, m, hi));
    } else {
      CHECK(alpha_combine(p, m, lo) >= alpha_combine(p, m, hi));
    }
  }
}

TEST_CASE("tune_alpha picks the perfect source") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  const auto gold = random_bits(rng, 40, 0.7);
  std::vector<double> exact(gold.begin(), gold.end()), noise(gold.size());
  for (auto& v : noise) v = u(rng);
  CHECK(tune_alpha(noise, exact, gold).alpha == 0.0);
  CHECK(tune_alpha(exact, noise, gold).alpha == 1.0);
}

TEST_CASE("tune_alpha equals the double-grid scan") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 12;
    std::vector<double> psl(n), model(n);
    for (auto& v : psl) v = u(rng);
    for (auto& v : model) v = u(rng);
    const auto gold = random_bits(rng, n, 0.6);
    auto got = tune_alpha(psl, model, gold);
    auto want = oracle::scan_alpha(psl, model, gold);
    REQUIRE(got.alpha == want.alpha);
    REQUIRE(got.threshold == want.threshold);
    REQUIRE(got.wf1 == doctest::Approx(want.wf1).epsilon(1e-12));
  }
}

TEST_CASE("noise_recall counts") {
  // 4 compatible noise items (2 rejected), 3 incompatible (all rejected),
  // plus 2 clean items that must not count.
  auto set = make_set({0, 0, 0, 0, 0, 0, 0, 1, 1});
  CompatMap compat;
  for (std::size_t i = 0; i < 7; ++i) compat[set.items[i].fact.triple] = i < 4;
  std::vector<int> pred{0, 0, 1, 1, 0, 0, 0, 1, 0};
  auto r = noise_recall(pred, set, compat);
  CHECK(r.compatible == 0.5);
  CHECK(r.incompatible == 1.0);
  CHECK(r.n_compatible == 4);
  CHECK(r.n_incompatible == 3);

  std::vector<int> all_rejected(9, 0);
  auto a = noise_recall(all_rejected, set, compat);
  CHECK(a.compatible == 1.0);
  CHECK(a.incompatible == 1.0);

  CompatMap partial{{set.items[0].fact.triple, true}};
  CHECK_THROWS_AS(noise_recall(pred, set, partial), DataError);
}

TEST_CASE("noise_recall mixes into the overall negative recall") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gold = random_bits(rng, 30, 0.5);
    const auto pred = random_bits(rng, 30, 0.5);
    auto set = make_set(gold);
    CompatMap compat;
    const auto flags = random_bits(rng, 30, 0.5);
    for (std::size_t i = 0; i < 30; ++i) compat[set.items[i].fact.triple] = flags[i] == 1;
    auto r = noise_recall(pred, set, compat);
    REQUIRE(r.compatible >= 0.0);
    REQUIRE(r.incompatible <= 1.0);
    const auto negatives = r.n_compatible + r.n_incompatible;
    if (negatives == 0) continue;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < 30; ++i) rejected += gold[i] == 0 && pred[i] == 0;
    const double mixed = (r.compatible * r.n_compatible + r.incompatible * r.n_incompatible) / negatives;
    REQUIRE(mixed == doctest::Approx(static_cast<double>(rejected) / negatives));
  }
}

TEST_CASE("size_normalized") {
  CHECK(size_normalized(100, 100) == 0.0);
  CHECK(size_normalized(120, 100) == doctest::Approx(0.2));
  CHECK(size_normalized(0, 10) == -1.0);
  CHECK_THROWS_AS(size_normalized(5, 0), DataError);
}

TEST_CASE("ontology ablation modes") {
  const auto onto = fixtures::toy_kg().ontology();
  CHECK(ablate_ontology(onto, Ablation::parse("all")) == onto);
  CHECK(ablate_ontology(onto, Ablation::parse("none")).empty());

  Ontology composed = onto;
  for (auto c : kAllComponents) {
    composed = ablate_ontology(composed, Ablation{AblationMode::kWithout, {c}});
  }
  CHECK(composed == ablate_ontology(onto, Ablation::parse("none")));

  auto without = ablate_ontology(onto, Ablation::parse("without:RNG"));
  CHECK(without.rng.empty());
  CHECK(without.dom == onto.dom);
  CHECK(without.inv == onto.inv);

  auto only = ablate_ontology(onto, Ablation::parse("only:DOM+RNG"));
  CHECK(only.dom == onto.dom);
  CHECK(only.rng == onto.rng);
  CHECK(only.sub.empty());
  CHECK(only.inv.empty());
  CHECK(only.sameent.empty());

  CHECK(Ablation::parse("only:rng+DOM").name() == "only:DOM+RNG");
  CHECK(Ablation::parse("without:SAMEENT").name() == "without:SAMEENT");
  CHECK_THROWS_AS(Ablation::parse("without:FOO"), ConfigError);
  CHECK_THROWS_AS(Ablation::parse("sometimes:DOM"), ConfigError);
  CHECK_THROWS_AS(Ablation::parse("only:"), ConfigError);
  CHECK_THROWS_AS(Ablation::parse("bogus"), ConfigError);
}
