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

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "kg.hpp"
#include "noise.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace kgrefine;
using fixtures::TempDir;

namespace {

std::set<std::string> fact_strings(const KnowledgeGraph& kg) {
  std::set<std::string> out;
  for (const auto& f : kg.facts()) {
    std::string row = kg.describe(f.triple);
    for (const auto& c : f.confidences) row += " " + c.source + "=" + format_double(c.value);
    out.insert(row);
  }
  return out;
}

std::vector<std::uint32_t> role_set(const KnowledgeGraph& kg, EntityId e, bool head) {
  std::set<std::uint32_t> s;
  for (const auto& f : kg.facts()) {
    if ((head ? f.triple.subject : f.triple.object) == e) s.insert(f.triple.relation.value);
  }
  return {s.begin(), s.end()};
}

double set_jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::set<std::uint32_t> u(a.begin(), a.end()), i;
  u.insert(b.begin(), b.end());
  for (auto x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) i.insert(x);
  }
  return u.empty() ? 0.0 : double(i.size()) / double(u.size());
}

}  // namespace

TEST_CASE("load_kg minimal and merged rows") {
  TempDir dir("load");
  dir.write("triples.tsv", "# comment\na\tr\tb\t0.9\tA\nb\tr\tc\t0.5\tA\nc\ts\ta\t0.1\tB\n");
  std::filesystem::create_directories(dir / "onto");
  auto kg = load_kg(dir / "triples.tsv", "", dir / "onto");
  CHECK(kg.facts().size() == 3);
  CHECK(kg.ontology().empty());
  CHECK(kg.num_entities() == 3);
  CHECK(kg.num_relations() == 2);

  dir.write("dup.tsv", "a\tr\tb\t0.9\tA\na\tr\tb\t0.4\tB\n");
  auto merged = load_kg(dir / "dup.tsv", "", "");
  REQUIRE(merged.facts().size() == 1);
  REQUIRE(merged.facts()[0].confidences.size() == 2);
  CHECK(merged.facts()[0].confidences[0] == SourceConfidence{"A", 0.9});
  CHECK(merged.facts()[0].confidences[1] == SourceConfidence{"B", 0.4});
}

TEST_CASE("load_kg errors name the line") {
  TempDir dir("load-err");
  dir.write("cols.tsv", "a\tr\tb\t0.9\tA\na\tr\tb\t0.9\n");
  try {
    load_kg(dir / "cols.tsv", "", "");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("cols.tsv:2") != std::string::npos);
  }
  dir.write("range.tsv", "a\tr\tb\t1.5\tA\n");
  CHECK_THROWS_AS(load_kg(dir / "range.tsv", "", ""), ParseError);
  dir.write("ok.tsv", "a\tr\tb\t0.5\tA\n");
  dir.write("onto/dom.tsv", "nope\tL\n");
  CHECK_THROWS_AS(load_kg(dir / "ok.tsv", "", dir / "onto"), ReferenceError);
}

TEST_CASE("load_kg ontology, labels, truth, and the type relation") {
  TempDir dir("load-onto");
  dir.write("triples.tsv",
            "a\tr\tb\t0.9\tA\nb\ts\ta\t0.8\tA\na\tisa\tL\t0.7\tA\n");
  dir.write("labels.tsv", "b\tM\t0.6\tA\n");
  dir.write("truth.tsv", "a\tr\tb\t1\nb\ts\ta\t0\n");
  dir.write("onto/dom.tsv", "r\tL\n");
  dir.write("onto/rng.tsv", "r\tM\n");
  dir.write("onto/sub.tsv", "L\tTop\n");
  dir.write("onto/inv.tsv", "r\ts\n");
  dir.write("onto/mut.tsv", "L\tM\n");
  dir.write("onto/sameent.tsv", "a\tb\t0.25\n");
  LoadOptions opt;
  opt.truth = dir / "truth.tsv";
  opt.type_relation = "isa";
  auto kg = load_kg(dir / "triples.tsv", dir / "labels.tsv", dir / "onto", opt);
  CHECK(kg.facts().size() == 2);
  CHECK(kg.labels().size() == 2);
  const auto& o = kg.ontology();
  CHECK(o.dom.size() == 1);
  CHECK(o.rng.size() == 1);
  CHECK(o.sub.size() == 1);
  CHECK(o.inv.size() == 1);
  CHECK(o.mut.size() == 1);
  REQUIRE(o.sameent.size() == 1);
  CHECK(o.sameent[0].score == 0.25);
  REQUIRE(kg.truth());
  CHECK(kg.truth()->size() == 2);
}

TEST_CASE("write_kg round trip") {
  SyntheticSpec ss;
  ss.entities = 30;
  ss.facts = 120;
  ss.seed = 5;
  NoiseSpec ns;
  ns.seed = 5;
  auto kg = assign_extraction_scores(corrupt_kg(generate_synthetic_kg(ss), ns).kg, ns);
  TempDir dir("roundtrip");
  write_kg(kg, dir.path());
  LoadOptions opt;
  opt.truth = dir / "truth.tsv";
  opt.compat = dir / "noise.tsv";
  auto back = load_kg(dir / "triples.tsv", dir / "labels.tsv", dir / "ontology", opt);
  CHECK(fact_strings(back) == fact_strings(kg));
  CHECK(back.labels().size() == kg.labels().size());
  CHECK(back.ontology().dom.size() == kg.ontology().dom.size());
  CHECK(back.ontology().sub.size() == kg.ontology().sub.size());
  CHECK(back.ontology().mut.size() == kg.ontology().mut.size());
  CHECK(back.ontology().inv.size() == kg.ontology().inv.size());
  CHECK(back.compat().size() == kg.compat().size());
  // Writing the reloaded graph reproduces the files byte for byte.
  CHECK(render_triples(back) == render_triples(kg));
  CHECK(render_truth(back) == render_truth(kg));
}

TEST_CASE("jaccard_sameent") {
  auto v = std::make_shared<Vocabulary>();
  auto e1 = v->entity("e1"), e2 = v->entity("e2"), x1 = v->entity("x1"), x2 = v->entity("x2");
  auto a = v->relation("a"), b = v->relation("b"), c = v->relation("c"), x = v->relation("x");
  auto fact = [](EntityId s, RelationId r, EntityId o) { return CandidateFact{{s, r, o}, {{"g", 1.0}}}; };
  // headrels {a,b} vs {b,c}, tailrels {x} vs {x}.
  KnowledgeGraph kg(v,
                    {fact(e1, a, x1), fact(e1, b, x2), fact(e2, b, x1), fact(e2, c, x2), fact(x1, x, e1),
                     fact(x2, x, e2)},
                    {}, {});
  CHECK(jaccard_sameent(kg, e1, e2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(jaccard_sameent(kg, e1, e1) == 1.0);
  CHECK(jaccard_sameent(kg, e1, e2) == jaccard_sameent(kg, e2, e1));
  // x1 is only a subject of x and an object of a/b; e1 shares nothing with it
  // in the same role.
  CHECK(jaccard_sameent(kg, e1, x1) == 0.0);
  CHECK_THROWS_AS(jaccard_sameent(kg, e1, EntityId{99}), ReferenceError);
}

TEST_CASE("generate_sameent equals brute-force pair scoring") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticSpec ss;
    ss.entities = 25;
    ss.facts = 80;
    ss.seed = seed;
    auto kg = generate_synthetic_kg(ss);
    std::vector<SameEntity> all;
    for (std::uint32_t i = 0; i < kg.num_entities(); ++i) {
      for (std::uint32_t j = i + 1; j < kg.num_entities(); ++j) {
        const double s = (set_jaccard(role_set(kg, EntityId{i}, true), role_set(kg, EntityId{j}, true)) +
                          set_jaccard(role_set(kg, EntityId{i}, false), role_set(kg, EntityId{j}, false))) /
                         2.0;
        if (s > 0) all.push_back({EntityId{i}, EntityId{j}, s});
      }
    }
    std::sort(all.begin(), all.end(), [](const SameEntity& x, const SameEntity& y) {
      if (std::abs(x.score - y.score) > 1e-12) return x.score > y.score;
      return std::pair{x.first, x.second} < std::pair{y.first, y.second};
    });
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{17}, all.size() + 10}) {
      auto got = generate_sameent(kg, k);
      REQUIRE(got.size() == std::min(k, all.size()));
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == all[i].first);
        CHECK(got[i].second == all[i].second);
        CHECK(got[i].score == doctest::Approx(all[i].score).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("split_kg proportions, determinism, partition") {
  auto v = std::make_shared<Vocabulary>();
  std::vector<CandidateFact> facts;
  TruthMap truth;
  auto r = v->relation("r");
  for (int i = 0; i < 100; ++i) {
    Triple t{v->entity("s" + std::to_string(i)), r, v->entity("o" + std::to_string(i % 7))};
    facts.push_back({t, {{"g", 0.5}}});
    truth[t] = i % 4 == 0 ? 0 : 1;
  }
  KnowledgeGraph kg(v, facts, {}, {}, truth);
  const SplitSpec spec{0.8, 0.1, 0.1, 7};
  auto s1 = split_kg(kg, spec);
  CHECK(s1.train.facts().size() == 80);
  CHECK(s1.valid.items.size() == 10);
  CHECK(s1.test.items.size() == 10);

  auto s2 = split_kg(kg, spec);
  for (std::size_t i = 0; i < s1.valid.items.size(); ++i) {
    CHECK(s1.valid.items[i].fact.triple == s2.valid.items[i].fact.triple);
  }

  std::set<Triple> seen;
  for (const auto& f : s1.train.facts()) seen.insert(f.triple);
  for (const auto* set : {&s1.valid, &s1.test}) {
    for (const auto& item : set->items) {
      CHECK(seen.insert(item.fact.triple).second);
      CHECK(item.gold == truth.at(item.fact.triple));
    }
  }
  CHECK(seen.size() == 100);

  CHECK_THROWS_AS(split_kg(kg, SplitSpec{0.8, 0.1, 0.2, 1}), ConfigError);
  CHECK_THROWS_AS(split_kg(kg, SplitSpec{1.0, 0.0, 0.0, 1}), ConfigError);
  CHECK_THROWS_AS(split_kg(KnowledgeGraph(v, facts, {}, {}), spec), DataError);

  auto [h1, h2] = split_halves_stratified(s1.train.facts().empty() ? s1.test : s1.valid, 3);
  const auto n1 = static_cast<long>(h1.positives()), n2 = static_cast<long>(h2.positives());
  CHECK(std::abs(n1 - n2) <= 1);
  CHECK(std::abs(static_cast<long>(h1.negatives()) - static_cast<long>(h2.negatives())) <= 1);
}

TEST_CASE("corrupt_kg counts and invariants") {
  SyntheticSpec ss;
  ss.entities = 100;
  ss.facts = 700;
  ss.seed = 11;
  const auto clean = generate_synthetic_kg(ss);
  const TypeIndex types(clean);
  NoiseSpec ns;
  ns.seed = 11;
  const auto res = corrupt_kg(clean, ns);
  const auto& kg = res.kg;
  const std::size_t population = clean.facts().size() + clean.labels().size();
  CHECK(res.stats.population == population);
  CHECK(res.stats.corrupted == static_cast<std::size_t>(std::llround(0.25 * double(population))));
  CHECK(res.stats.compatible_requested == static_cast<std::size_t>(std::llround(0.5 * double(res.stats.corrupted))));
  CHECK(res.stats.type_compatible + res.stats.fallbacks >= res.stats.compatible_requested);
  CHECK(kg.facts().size() == clean.facts().size());
  CHECK(kg.labels().size() == clean.labels().size());

  std::size_t noisy = 0;
  for (const auto& f : kg.facts()) {
    const int gold = kg.truth()->at(f.triple);
    if (gold == 1) {
      CHECK(clean.contains(f.triple));
      continue;
    }
    ++noisy;
    CHECK_FALSE(clean.contains(f.triple));
    REQUIRE(kg.compat().contains(f.triple));
    if (kg.compat().at(f.triple)) {
      // Re-evaluate the check used during sampling.
      CHECK(types.subject_compatible(f.triple.subject, f.triple.relation));
      CHECK(types.object_compatible(f.triple.object, f.triple.relation));
    }
  }
  CHECK(noisy == res.stats.corrupted_facts);
  std::size_t compat = 0;
  for (const auto& [t, c] : kg.compat()) compat += c;
  CHECK(compat == res.stats.type_compatible);

  NoiseSpec zero = ns;
  zero.corrupt_fraction = 0.0;
  const auto same = corrupt_kg(clean, zero).kg;
  CHECK(fact_strings(same) == fact_strings(clean));
  for (const auto& [t, g] : *same.truth()) CHECK(g == 1);

  const auto again = corrupt_kg(clean, ns).kg;
  CHECK(fact_strings(again) == fact_strings(kg));
}

TEST_CASE("extraction scores") {
  SyntheticSpec ss;
  ss.entities = 60;
  ss.facts = 300;
  ss.seed = 4;
  NoiseSpec ns;
  ns.seed = 4;
  const auto corrupted = corrupt_kg(generate_synthetic_kg(ss), ns).kg;

  NoiseSpec flat = ns;
  flat.clean_std = 0.0;
  flat.noise_std = 0.0;
  const auto kg = assign_extraction_scores(corrupted, flat);
  for (const auto& f : kg.facts()) {
    REQUIRE(f.confidences.size() == 1);
    CHECK(f.confidences[0].value == (kg.truth()->at(f.triple) == 1 ? 0.7 : 0.3));
  }

  const auto a = assign_extraction_scores(corrupted, ns);
  const auto b = assign_extraction_scores(corrupted, ns);
  CHECK(fact_strings(a) == fact_strings(b));
  for (const auto& f : a.facts()) {
    CHECK(f.confidences[0].value >= kScoreFloor);
    CHECK(f.confidences[0].value <= kScoreCeil);
  }

  CHECK_THROWS_AS(assign_extraction_scores(generate_synthetic_kg(ss).with_facts({}), ns), DataError);
}

TEST_CASE("clamped-Gaussian oracle") {
  // Degenerate and symmetric cases pin the quadrature.
  CHECK(oracle::clamped_gaussian_mean(0.5, 0.2, 0.01, 0.99) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(oracle::clamped_gaussian_mean(0.7, 1e-9, 0.01, 0.99) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(oracle::clamped_gaussian_mean(2.0, 0.01, 0.01, 0.99) == doctest::Approx(0.99).epsilon(1e-9));
  const double m = oracle::clamped_gaussian_mean(0.7, 0.2, 0.01, 0.99);
  CHECK(m < 0.7);
  CHECK(m > 0.68);
}

TEST_CASE("synthetic generator shape") {
  SyntheticSpec ss;
  ss.seed = 3;
  const auto kg = generate_synthetic_kg(ss);
  CHECK(kg.num_entities() == 200);
  CHECK(kg.facts().size() == 2000);
  CHECK(kg.num_relations() == 10);
  CHECK(kg.num_labels() == 8);
  const auto& o = kg.ontology();
  CHECK(o.dom.size() == 10);
  CHECK(o.rng.size() == 10);
  CHECK(o.inv.size() == 5);
  CHECK_FALSE(o.sub.empty());
  CHECK_FALSE(o.mut.empty());
  const TypeIndex types(kg);
  for (const auto& f : kg.facts()) {
    CHECK(types.subject_compatible(f.triple.subject, f.triple.relation));
    CHECK(types.object_compatible(f.triple.object, f.triple.relation));
  }
  CHECK(fact_strings(generate_synthetic_kg(ss)) == fact_strings(kg));
  ss.entities = 5;
  CHECK_THROWS_AS(generate_synthetic_kg(ss), ConfigError);
}
