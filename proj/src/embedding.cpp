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

#include "embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kgrefine {

const char* base_name(BaseModel b) { return b == BaseModel::kComplex ? "complex" : "distmult"; }

const char* mode_name(TypeMode m) {
  switch (m) {
    case TypeMode::kPlain: return "plain";
    case TypeMode::kImplicit: return "implicit";
    case TypeMode::kTypee: return "typee";
  }
  return "?";
}

BaseModel parse_base(std::string_view s) {
  if (s == "complex") return BaseModel::kComplex;
  if (s == "distmult") return BaseModel::kDistMult;
  throw ConfigError("unknown base model '" + std::string(s) + "' (expected complex or distmult)");
}

TypeMode parse_mode(std::string_view s) {
  if (s == "plain") return TypeMode::kPlain;
  if (s == "implicit" || s == "implicit_typed") return TypeMode::kImplicit;
  if (s == "typee") return TypeMode::kTypee;
  throw ConfigError("unknown model mode '" + std::string(s) + "' (expected plain, implicit or typee)");
}

const char* block_name(Block b) {
  static constexpr const char* kNames[] = {"entity", "relation", "entity_type", "relation_head",
                                           "relation_tail", "label", "relation_domain", "relation_range"};
  return kNames[static_cast<std::size_t>(b)];
}

void ModelConfig::validate() const {
  if (dim < 1) throw ConfigError("model.dim must be >= 1");
  if (mode != TypeMode::kPlain && type_dim < 1) throw ConfigError("model.type_dim must be >= 1");
  if (mode == TypeMode::kTypee && label_dim < 1) throw ConfigError("model.label_dim must be >= 1");
  if (negatives < 1) throw ConfigError("model.negatives must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("model.learning_rate must be >= 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("model.l2 must be >= 0");
  if (epochs < 0) throw ConfigError("model.epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("model.batch_size must be >= 1");
}

namespace {

constexpr double kInitRange = 0.05;
constexpr double kAdagradEps = 1e-10;
constexpr int kMaxNegativeTries = 100;

std::size_t idx(Block b) { return static_cast<std::size_t>(b); }

std::array<std::pair<std::size_t, std::size_t>, kNumBlocks> block_shapes(const ModelConfig& c, const ModelShape& s) {
  std::array<std::pair<std::size_t, std::size_t>, kNumBlocks> out{};
  const std::size_t d = static_cast<std::size_t>(c.dim) * (c.base == BaseModel::kComplex ? 2 : 1);
  out[idx(Block::kEntity)] = {s.entities, d};
  out[idx(Block::kRelation)] = {s.relations, d};
  if (c.mode != TypeMode::kPlain) {
    const auto dt = static_cast<std::size_t>(c.type_dim);
    out[idx(Block::kEntityType)] = {s.entities, dt};
    out[idx(Block::kRelHead)] = {s.relations, dt};
    out[idx(Block::kRelTail)] = {s.relations, dt};
  }
  if (c.mode == TypeMode::kTypee) {
    const auto dl = static_cast<std::size_t>(c.label_dim);
    out[idx(Block::kLabel)] = {s.labels + 1, dl};
    out[idx(Block::kRelDom)] = {s.relations, dl};
    out[idx(Block::kRelRange)] = {s.relations, dl};
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_ids(const EmbeddingModel& m, const Triple& t) {
  const auto& s = m.shape();
  if (t.subject.value >= s.entities) throw ReferenceError("unseen entity id " + std::to_string(t.subject.value));
  if (t.object.value >= s.entities) throw ReferenceError("unseen entity id " + std::to_string(t.object.value));
  if (t.relation.value >= s.relations) throw ReferenceError("unseen relation id " + std::to_string(t.relation.value));
}

struct Parts {
  double y = 0.0;   // bilinear score
  double zs = 0.0;  // subject gate logit
  double zo = 0.0;  // object gate logit
};

Parts parts_of(const EmbeddingModel& m, const Triple& t, bool with_explicit) {
  Parts p;
  const auto s = m.block(Block::kEntity).row(t.subject.value);
  const auto r = m.block(Block::kRelation).row(t.relation.value);
  const auto o = m.block(Block::kEntity).row(t.object.value);
  if (m.config().base == BaseModel::kComplex) {
    const std::size_t d = s.size() / 2;
    for (std::size_t k = 0; k < d; ++k) {
      const double a = s[k], b = s[d + k], c = r[k], dd = r[d + k], e = o[k], f = o[d + k];
      p.y += a * c * e - b * dd * e + a * dd * f + b * c * f;
    }
  } else {
    for (std::size_t k = 0; k < s.size(); ++k) p.y += s[k] * r[k] * o[k];
  }
  if (m.config().mode != TypeMode::kPlain) {
    p.zs = dot(m.block(Block::kEntityType).row(t.subject.value), m.block(Block::kRelHead).row(t.relation.value));
    p.zo = dot(m.block(Block::kEntityType).row(t.object.value), m.block(Block::kRelTail).row(t.relation.value));
  }
  if (with_explicit) {
    const auto& lbl = m.block(Block::kLabel);
    p.zs += dot(lbl.row(m.type_row(t.subject)), m.block(Block::kRelDom).row(t.relation.value));
    p.zo += dot(lbl.row(m.type_row(t.object)), m.block(Block::kRelRange).row(t.relation.value));
  }
  return p;
}

// Dense per-block gradients plus the list of rows written since the last
// clear, so sparse batches stay cheap.
class GradBuffer {
 public:
  explicit GradBuffer(const EmbeddingModel& m) {
    for (std::size_t b = 0; b < kNumBlocks; ++b) {
      const auto& blk = m.block(static_cast<Block>(b));
      dense_[b].assign(blk.data.size(), 0.0);
      mark_[b].assign(blk.rows, 0);
      cols_[b] = blk.cols;
    }
  }

  std::span<double> row(Block blk, std::size_t i) {
    const auto b = idx(blk);
    if (!mark_[b][i]) {
      mark_[b][i] = 1;
      touched_[b].push_back(static_cast<std::uint32_t>(i));
    }
    return {dense_[b].data() + i * cols_[b], cols_[b]};
  }

  void clear() {
    for (std::size_t b = 0; b < kNumBlocks; ++b) {
      for (auto i : touched_[b]) {
        std::fill_n(dense_[b].begin() + static_cast<std::ptrdiff_t>(i * cols_[b]), cols_[b], 0.0);
        mark_[b][i] = 0;
      }
      touched_[b].clear();
    }
  }

  const std::vector<std::uint32_t>& touched(std::size_t b) const { return touched_[b]; }
  std::span<const double> dense_row(std::size_t b, std::size_t i) const {
    return {dense_[b].data() + i * cols_[b], cols_[b]};
  }
  std::array<std::vector<double>, kNumBlocks>& dense() { return dense_; }

 private:
  std::array<std::vector<double>, kNumBlocks> dense_;
  std::array<std::vector<char>, kNumBlocks> mark_;
  std::array<std::vector<std::uint32_t>, kNumBlocks> touched_;
  std::array<std::size_t, kNumBlocks> cols_{};
};

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

// Adds one sample's loss gradient into g and returns its loss.
double sample_step(const EmbeddingModel& m, const Sample& smp, GradBuffer& g) {
  const auto& cfg = m.config();
  const Triple& t = smp.triple;
  const bool gated = cfg.mode != TypeMode::kPlain;
  const bool typee = cfg.mode == TypeMode::kTypee;
  const Parts p = parts_of(m, t, typee);

  const double sy = sigmoid(p.y);
  const double gs = gated ? sigmoid(p.zs) : 1.0;
  const double go = gated ? sigmoid(p.zo) : 1.0;
  const double f = gs * sy * go;
  const double loss = [&] {
    const double fc = std::clamp(f, kProbClip, 1.0 - kProbClip);
    return smp.label == 1 ? -std::log(fc) : -std::log(1.0 - fc);
  }();
  const double gf = bce_grad(f, smp.label);

  // Touch every row the sample reads so L2 sees it even when gf == 0.
  auto gs_row = g.row(Block::kEntity, t.subject.value);
  auto gr_row = g.row(Block::kRelation, t.relation.value);
  auto go_row = g.row(Block::kEntity, t.object.value);
  const auto s = m.block(Block::kEntity).row(t.subject.value);
  const auto r = m.block(Block::kRelation).row(t.relation.value);
  const auto o = m.block(Block::kEntity).row(t.object.value);

  const double dy = gf * f * (1.0 - sy);
  if (cfg.base == BaseModel::kComplex) {
    const std::size_t d = s.size() / 2;
    for (std::size_t k = 0; k < d; ++k) {
      const double a = s[k], b = s[d + k], c = r[k], dd = r[d + k], e = o[k], ff = o[d + k];
      gs_row[k] += dy * (c * e + dd * ff);
      gs_row[d + k] += dy * (-dd * e + c * ff);
      gr_row[k] += dy * (a * e + b * ff);
      gr_row[d + k] += dy * (-b * e + a * ff);
      go_row[k] += dy * (a * c - b * dd);
      go_row[d + k] += dy * (a * dd + b * c);
    }
  } else {
    for (std::size_t k = 0; k < s.size(); ++k) {
      gs_row[k] += dy * r[k] * o[k];
      gr_row[k] += dy * s[k] * o[k];
      go_row[k] += dy * s[k] * r[k];
    }
  }

  if (gated) {
    const double dzs = gf * f * (1.0 - gs);
    const double dzo = gf * f * (1.0 - go);
    const auto st = m.block(Block::kEntityType).row(t.subject.value);
    const auto ot = m.block(Block::kEntityType).row(t.object.value);
    const auto rh = m.block(Block::kRelHead).row(t.relation.value);
    const auto rt = m.block(Block::kRelTail).row(t.relation.value);
    axpy(dzs, rh, g.row(Block::kEntityType, t.subject.value));
    axpy(dzs, st, g.row(Block::kRelHead, t.relation.value));
    axpy(dzo, rt, g.row(Block::kEntityType, t.object.value));
    axpy(dzo, ot, g.row(Block::kRelTail, t.relation.value));
    if (typee) {
      const auto ls = m.type_row(t.subject), lo = m.type_row(t.object);
      const auto& lbl = m.block(Block::kLabel);
      axpy(dzs, m.block(Block::kRelDom).row(t.relation.value), g.row(Block::kLabel, ls));
      axpy(dzs, lbl.row(ls), g.row(Block::kRelDom, t.relation.value));
      axpy(dzo, m.block(Block::kRelRange).row(t.relation.value), g.row(Block::kLabel, lo));
      axpy(dzo, lbl.row(lo), g.row(Block::kRelRange, t.relation.value));
    }
  }
  return loss;
}

// Loss over a batch including L2 on touched rows; g receives the gradient.
double batch_step(const EmbeddingModel& m, std::span<const Sample> batch, GradBuffer& g) {
  double loss = 0.0;
  for (const auto& smp : batch) loss += sample_step(m, smp, g);
  const double l2 = m.config().l2;
  if (l2 > 0.0) {
    for (std::size_t b = 0; b < kNumBlocks; ++b) {
      const auto& blk = m.block(static_cast<Block>(b));
      for (auto i : g.touched(b)) {
        const auto w = blk.row(i);
        loss += 0.5 * l2 * dot(w, w);
        axpy(l2, w, g.row(static_cast<Block>(b), i));
      }
    }
  }
  return loss;
}

}  // namespace

EmbeddingModel::EmbeddingModel(const ModelConfig& config, const ModelShape& shape, const TypeAssignment& types)
    : config_(config), shape_(shape), type_rows_(shape.entities, 0) {
  config_.validate();
  auto rng = make_stream(config.seed, "init");
  std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
  const auto shapes = block_shapes(config_, shape_);
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    blocks_[b].rows = shapes[b].first;
    blocks_[b].cols = shapes[b].second;
    blocks_[b].data.resize(shapes[b].first * shapes[b].second);
    for (auto& v : blocks_[b].data) v = init(rng);
  }
  for (const auto& [e, l] : types) {
    if (e.value >= shape.entities) throw ReferenceError("type assignment for unknown entity id " + std::to_string(e.value));
    if (l.value >= shape.labels) throw ReferenceError("type assignment uses unknown label id " + std::to_string(l.value));
    type_rows_[e.value] = l.value + 1;
  }
}

EmbeddingModel::EmbeddingModel(const ModelConfig& config, const ModelShape& shape,
                               std::array<ParamBlock, kNumBlocks> blocks, std::vector<std::uint32_t> type_rows)
    : config_(config), shape_(shape), blocks_(std::move(blocks)), type_rows_(std::move(type_rows)) {
  config_.validate();
  const auto shapes = block_shapes(config_, shape_);
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    if (blocks_[b].rows != shapes[b].first || blocks_[b].cols != shapes[b].second ||
        blocks_[b].data.size() != shapes[b].first * shapes[b].second) {
      throw DataError(std::string("parameter block '") + block_name(static_cast<Block>(b)) +
                      "' does not match the model configuration");
    }
  }
  if (type_rows_.size() != shape_.entities) throw DataError("type assignment size does not match entity count");
  for (auto r : type_rows_) {
    if (r > shape_.labels) throw DataError("type assignment row out of range");
  }
}

double base_score(const EmbeddingModel& m, const Triple& t) {
  check_ids(m, t);
  return parts_of(m, t, false).y;
}

double implicit_typed_score(const EmbeddingModel& m, const Triple& t) {
  if (m.config().mode == TypeMode::kPlain) throw ContractError("implicit_typed_score needs type vectors");
  check_ids(m, t);
  const auto p = parts_of(m, t, false);
  return sigmoid(p.zs) * p.y * sigmoid(p.zo);
}

double typee_score(const EmbeddingModel& m, const Triple& t) {
  if (m.config().mode != TypeMode::kTypee) throw ContractError("typee_score needs a typee model");
  check_ids(m, t);
  const auto p = parts_of(m, t, true);
  return sigmoid(p.zs) * p.y * sigmoid(p.zo);
}

double predict_one(const EmbeddingModel& m, const Triple& t) {
  check_ids(m, t);
  const auto mode = m.config().mode;
  const auto p = parts_of(m, t, mode == TypeMode::kTypee);
  if (mode == TypeMode::kPlain) return sigmoid(p.y);
  return sigmoid(p.zs) * sigmoid(p.y) * sigmoid(p.zo);
}

std::vector<double> predict(const EmbeddingModel& m, std::span<const Triple> triples) {
  std::vector<double> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(predict_one(m, t));
  return out;
}

double bce_loss(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ContractError("bce_loss: scores and labels differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double f = std::clamp(scores[i], kProbClip, 1.0 - kProbClip);
    total -= labels[i] == 1 ? std::log(f) : std::log(1.0 - f);
  }
  return total;
}

double bce_grad(double score, int label) {
  if (score < kProbClip || score > 1.0 - kProbClip) return 0.0;
  return label == 1 ? -1.0 / score : 1.0 / (1.0 - score);
}

TrainingSet::TrainingSet(std::vector<Triple> pos) : positives(std::move(pos)), known(positives.begin(), positives.end()) {}

std::vector<Triple> negative_sample(const Triple& positive, int k, const TrainingSet& known,
                                    std::size_t num_entities, Rng& rng) {
  std::vector<Triple> out;
  if (k <= 0 || num_entities == 0) return out;
  out.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::uint32_t> ent(0, static_cast<std::uint32_t>(num_entities - 1));
  for (int i = 0; i < k; ++i) {
    Triple cand = positive;
    for (int attempt = 0; attempt < kMaxNegativeTries; ++attempt) {
      cand = positive;
      if (coin(rng) == 0) {
        cand.subject = EntityId{ent(rng)};
      } else {
        cand.object = EntityId{ent(rng)};
      }
      if (!known.known.contains(cand)) break;
    }
    out.push_back(cand);
  }
  return out;
}

double batch_loss(const EmbeddingModel& m, std::span<const Sample> batch) {
  for (const auto& s : batch) check_ids(m, s.triple);
  GradBuffer g(m);
  return batch_step(m, batch, g);
}

std::array<std::vector<double>, kNumBlocks> batch_gradient(const EmbeddingModel& m, std::span<const Sample> batch) {
  for (const auto& s : batch) check_ids(m, s.triple);
  GradBuffer g(m);
  batch_step(m, batch, g);
  return std::move(g.dense());
}

TrainResult train(const TrainingSet& data, const TypeAssignment& types, const ModelConfig& config,
                  const ModelShape& shape) {
  config.validate();
  if (data.positives.empty()) throw DataError("cannot train on an empty training set");
  TrainResult result{EmbeddingModel(config, shape, types), {}};
  auto& model = result.model;
  for (const auto& t : data.positives) check_ids(model, t);

  std::array<std::vector<double>, kNumBlocks> accum;
  for (std::size_t b = 0; b < kNumBlocks; ++b) accum[b].assign(model.block(static_cast<Block>(b)).data.size(), 0.0);

  auto rng = make_stream(config.seed, "sampling");
  std::vector<std::size_t> order(data.positives.size());
  std::iota(order.begin(), order.end(), 0);
  GradBuffer g(model);
  std::vector<Sample> batch;
  const auto bs = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;
    for (std::size_t start = 0, batch_no = 0; start < order.size(); start += bs, ++batch_no) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + bs); ++i) {
        const auto& pos = data.positives[order[i]];
        batch.push_back({pos, 1});
        for (const auto& neg : negative_sample(pos, config.negatives, data, shape.entities, rng)) {
          batch.push_back({neg, 0});
        }
      }
      const double loss = batch_step(model, batch, g);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                           std::to_string(batch_no + 1));
      }
      epoch_loss += loss;
      epoch_samples += batch.size();
      for (std::size_t b = 0; b < kNumBlocks; ++b) {
        auto& blk = model.block(static_cast<Block>(b));
        for (auto i : g.touched(b)) {
          const auto grad = g.dense_row(b, i);
          auto w = blk.row(i);
          double* acc = accum[b].data() + static_cast<std::size_t>(i) * blk.cols;
          for (std::size_t k = 0; k < blk.cols; ++k) {
            acc[k] += grad[k] * grad[k];
            w[k] -= config.learning_rate * grad[k] / (std::sqrt(acc[k]) + kAdagradEps);
          }
        }
      }
      g.clear();
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(1, epoch_samples)));
  }
  return result;
}

}  // namespace kgrefine
