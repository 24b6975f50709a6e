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

#ifndef KGREFINE_TESTS_FIXTURES_HPP_
#define KGREFINE_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "embedding.hpp"
#include "kg.hpp"
#include "noise.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"

namespace kgrefine::fixtures {

// Five candidate facts whose closure touches every ontology template:
// INV, DOM, RNG, SUB, RSUB, MUT, RMUT, and SAMEENT on both relation
// positions and on labels.
inline KnowledgeGraph toy_kg() {
  auto v = std::make_shared<Vocabulary>();
  auto a = v->entity("a"), b = v->entity("b"), c = v->entity("c"), d = v->entity("d");
  auto r = v->relation("r"), s = v->relation("s"), t = v->relation("t"), u = v->relation("u");
  auto L = v->label("L"), P = v->label("P"), Q = v->label("Q"), M = v->label("M");
  Ontology o;
  o.inv.insert({r, s});
  o.dom[r] = L;
  o.rng[r] = Q;
  o.sub.insert({L, P});
  o.rsub.insert({r, t});
  o.mut.insert({std::min(P, M), std::max(P, M)});
  o.rmut.insert({std::min(t, u), std::max(t, u)});
  o.sameent.push_back({a, d, 0.6});
  std::vector<CandidateFact> facts{
      {{a, r, b}, {{"x", 0.9}, {"y", 0.7}}},
      {{b, s, a}, {{"x", 0.4}}},
      {{a, u, b}, {{"x", 0.3}}},
      {{c, r, a}, {{"y", 0.8}}},
      {{d, t, c}, {{"x", 0.55}}},
  };
  std::vector<CandidateLabel> labels{{a, M, {{"x", 0.5}}}, {c, Q, {{"x", 0.65}}}};
  return KnowledgeGraph(v, std::move(facts), std::move(labels), std::move(o));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("kgrefine-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  void write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p) << content;
  }

 private:
  std::filesystem::path path_;
};

// Small model with parameters spread over [-0.8, 0.8] so every gradient
// entry is well away from zero; used for finite-difference checks.
inline EmbeddingModel fd_model(BaseModel base, TypeMode mode, std::uint64_t seed = 17) {
  ModelConfig c;
  c.base = base;
  c.mode = mode;
  c.dim = 3;
  c.type_dim = 2;
  c.label_dim = 2;
  c.l2 = 0.01;
  TypeAssignment types{{EntityId{0}, LabelId{1}}, {EntityId{2}, LabelId{0}}};
  EmbeddingModel m(c, ModelShape{4, 2, 2}, types);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    for (auto& v : m.block(static_cast<Block>(b)).data) v = u(rng);
  }
  return m;
}

inline std::vector<Sample> fd_batch() {
  auto t = [](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
    return Triple{EntityId{s}, RelationId{r}, EntityId{o}};
  };
  return {{t(0, 0, 1), 1}, {t(1, 1, 2), 1}, {t(2, 0, 3), 1}, {t(3, 1, 0), 1}, {t(0, 1, 2), 1},
          {t(3, 0, 1), 0}, {t(0, 0, 0), 0}, {t(2, 1, 1), 0}, {t(1, 0, 3), 0}, {t(3, 1, 3), 0}};
}

struct Bench {
  KnowledgeGraph kg;
  PipelineSplits splits;
};

// Small noisy synthetic benchmark for pipeline tests.
inline Bench small_bench(std::uint64_t seed = 1, std::size_t entities = 40, std::size_t facts = 240) {
  SyntheticSpec ss;
  ss.entities = entities;
  ss.facts = facts;
  ss.regions = 2;
  ss.seed = seed;
  NoiseSpec ns;
  ns.seed = seed;
  auto kg = assign_extraction_scores(corrupt_kg(generate_synthetic_kg(ss), ns).kg, ns);
  auto split = split_kg(kg, SplitSpec{0.6, 0.2, 0.2, seed});
  return {kg, {split.valid, split.test}};
}

inline PipelineConfig small_pipeline_config() {
  PipelineConfig c;
  c.model.dim = 8;
  c.model.type_dim = 4;
  c.model.label_dim = 4;
  c.model.epochs = 15;
  c.model.negatives = 1;
  c.model.l2 = 1e-3;
  c.model.batch_size = 64;
  c.solver.max_iterations = 800;
  c.feedback.max_iter = 2;
  return c;
}

}  // namespace kgrefine::fixtures

#endif  // KGREFINE_TESTS_FIXTURES_HPP_
