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

// Bilinear KG embeddings (ComplEx, DistMult) with optional type gates:
//   plain:    sigma(Y)
//   implicit: sigma(s_t.r_h) * sigma(Y) * sigma(o_t.r_t)
//   typee:    sigma(s_t.r_h + s_l.r_dom) * sigma(Y) * sigma(o_t.r_t + o_l.r_range)
// Gradients are derived by hand; tests check them against central
// differences.

#ifndef KGREFINE_EMBEDDING_HPP_
#define KGREFINE_EMBEDDING_HPP_

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "kg.hpp"

namespace kgrefine {

enum class BaseModel { kComplex, kDistMult };
enum class TypeMode { kPlain, kImplicit, kTypee };

const char* base_name(BaseModel b);
const char* mode_name(TypeMode m);
BaseModel parse_base(std::string_view s);
TypeMode parse_mode(std::string_view s);

struct ModelConfig {
  BaseModel base = BaseModel::kComplex;
  TypeMode mode = TypeMode::kTypee;
  int dim = 100;
  int type_dim = 20;
  int label_dim = 20;
  int negatives = 5;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  int epochs = 100;
  int batch_size = 512;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct ModelShape {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t labels = 0;
  bool operator==(const ModelShape&) const = default;
};

// Entities missing from the map use the UNK explicit row.
using TypeAssignment = std::map<EntityId, LabelId>;

enum class Block : std::uint8_t {
  kEntity,     // complex: [re | im] per row
  kRelation,
  kEntityType,  // s_t / o_t
  kRelHead,     // r_h
  kRelTail,     // r_t
  kLabel,       // s_l / o_l, row 0 is UNK
  kRelDom,      // r_dom
  kRelRange,    // r_range
};
inline constexpr std::size_t kNumBlocks = 8;
const char* block_name(Block b);

struct ParamBlock {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  bool operator==(const ParamBlock&) const = default;
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // Parameters drawn from U[-0.05, 0.05] on the seed's "init" stream.
  EmbeddingModel(const ModelConfig& config, const ModelShape& shape, const TypeAssignment& types);

  const ModelConfig& config() const { return config_; }
  const ModelShape& shape() const { return shape_; }
  ParamBlock& block(Block b) { return blocks_[static_cast<std::size_t>(b)]; }
  const ParamBlock& block(Block b) const { return blocks_[static_cast<std::size_t>(b)]; }
  const std::vector<std::uint32_t>& type_rows() const { return type_rows_; }  // 0 = UNK, l+1 = label l
  std::uint32_t type_row(EntityId e) const { return type_rows_.at(e.value); }
  bool operator==(const EmbeddingModel&) const = default;

  // For checkpoint loading.
  EmbeddingModel(const ModelConfig& config, const ModelShape& shape, std::array<ParamBlock, kNumBlocks> blocks,
                 std::vector<std::uint32_t> type_rows);

 private:
  ModelConfig config_;
  ModelShape shape_;
  std::array<ParamBlock, kNumBlocks> blocks_;
  std::vector<std::uint32_t> type_rows_;
};

// Raw bilinear score Y(s,r,o).
double base_score(const EmbeddingModel& m, const Triple& t);
// Gate-weighted raw score, gates from implicit type vectors only.
double implicit_typed_score(const EmbeddingModel& m, const Triple& t);
// Gate-weighted raw score, gates from implicit and explicit type vectors.
double typee_score(const EmbeddingModel& m, const Triple& t);

// Probability in (0,1) for the model's mode. Throws ReferenceError on ids
// the model was not built for.
double predict_one(const EmbeddingModel& m, const Triple& t);
std::vector<double> predict(const EmbeddingModel& m, std::span<const Triple> triples);

inline constexpr double kProbClip = 1e-7;

// Sum of per-sample negative log-likelihoods; scores are clipped first.
double bce_loss(std::span<const double> scores, std::span<const int> labels);
// d loss / d score for one sample; zero where clipping is active.
double bce_grad(double score, int label);

struct TrainingSet {
  std::vector<Triple> positives;
  std::unordered_set<Triple, TripleHash> known;

  explicit TrainingSet(std::vector<Triple> positives);
};

std::vector<Triple> negative_sample(const Triple& positive, int k, const TrainingSet& known,
                                    std::size_t num_entities, Rng& rng);

struct Sample {
  Triple triple;
  int label = 0;
};

// Batch objective: summed BCE plus l2/2 * ||row||^2 over every parameter row
// the batch touches (each row counted once).
double batch_loss(const EmbeddingModel& m, std::span<const Sample> batch);

// Dense gradient of batch_loss, one vector per block (empty for inactive
// blocks).
std::array<std::vector<double>, kNumBlocks> batch_gradient(const EmbeddingModel& m, std::span<const Sample> batch);

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_trace;  // mean per-sample loss per epoch
};

// Adagrad on mini-batches of positives plus `negatives` corruptions each.
TrainResult train(const TrainingSet& data, const TypeAssignment& types, const ModelConfig& config,
                  const ModelShape& shape);

// ---- Checkpoints ----------------------------------------------------------

struct Checkpoint {
  EmbeddingModel model;
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::vector<std::string> labels;
};

void save_checkpoint(const EmbeddingModel& m, const Vocabulary& vocab, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kgrefine

#endif  // KGREFINE_EMBEDDING_HPP_
