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

// Checkpoint layout (all integers and floats little-endian):
//
//   char[8]  magic "KGRMODEL"
//   u32      format version (1)
//   u32      base (0 complex, 1 distmult)
//   u32      mode (0 plain, 1 implicit, 2 typee)
//   i32 x4   dim, type_dim, label_dim, negatives
//   f64 x2   learning_rate, l2
//   i32 x2   epochs, batch_size
//   u64      seed
//   3 x name table (entities, relations, labels):
//            u64 count, then per name u32 byte length + UTF-8 bytes
//   u64      entity count, then u32 explicit type row per entity (0 = UNK)
//   u32      block count (8), then per block:
//            u32 block id, u64 rows, u64 cols, rows*cols f64 row-major

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "embedding.hpp"
#include "io.hpp"

namespace kgrefine {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'R', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

template <class T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  template <class T>
  void put(T v) {
    v = to_le(v);
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(std::string_view s) { buf_.append(s); }
  void str(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string where) : data_(std::move(data)), where_(std::move(where)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_le(v);
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view v(data_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  // Bounds a count read from the file by the bytes that remain.
  std::uint64_t count(std::size_t min_bytes_each) {
    const auto n = get<std::uint64_t>();
    if (min_bytes_each > 0 && n > (data_.size() - pos_) / min_bytes_each) fail("count exceeds file size");
    return n;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(where_ + ": " + what + " at byte " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated checkpoint");
  }
  std::string data_;
  std::string where_;
  std::size_t pos_ = 0;
};

void put_names(Writer& w, const Interner& in, std::size_t n) {
  w.put(static_cast<std::uint64_t>(n));
  for (std::size_t i = 0; i < n; ++i) w.str(in.name(static_cast<std::uint32_t>(i)));
}

std::vector<std::string> get_names(Reader& r) {
  const auto n = r.count(4);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(r.str());
  return out;
}

}  // namespace

void save_checkpoint(const EmbeddingModel& m, const Vocabulary& vocab, const std::filesystem::path& path) {
  const auto& c = m.config();
  const auto& s = m.shape();
  if (vocab.entities.size() < s.entities || vocab.relations.size() < s.relations || vocab.labels.size() < s.labels) {
    throw ContractError("vocabulary is smaller than the model");
  }
  Writer w;
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(c.base));
  w.put(static_cast<std::uint32_t>(c.mode));
  for (std::int32_t v : {c.dim, c.type_dim, c.label_dim, c.negatives}) w.put(v);
  w.put(c.learning_rate);
  w.put(c.l2);
  w.put(static_cast<std::int32_t>(c.epochs));
  w.put(static_cast<std::int32_t>(c.batch_size));
  w.put(c.seed);
  put_names(w, vocab.entities, s.entities);
  put_names(w, vocab.relations, s.relations);
  put_names(w, vocab.labels, s.labels);
  w.put(static_cast<std::uint64_t>(m.type_rows().size()));
  for (auto r : m.type_rows()) w.put(r);
  w.put(static_cast<std::uint32_t>(kNumBlocks));
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    const auto& blk = m.block(static_cast<Block>(b));
    w.put(static_cast<std::uint32_t>(b));
    w.put(static_cast<std::uint64_t>(blk.rows));
    w.put(static_cast<std::uint64_t>(blk.cols));
    for (double v : blk.data) w.put(v);
  }
  write_file_atomic(path, w.data());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(read_file(path), path.string());
  if (r.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) r.fail("not a kgrefine checkpoint");
  if (const auto v = r.get<std::uint32_t>(); v != kVersion) r.fail("unsupported checkpoint version " + std::to_string(v));
  ModelConfig c;
  const auto base = r.get<std::uint32_t>();
  const auto mode = r.get<std::uint32_t>();
  if (base > 1 || mode > 2) r.fail("invalid model kind");
  c.base = static_cast<BaseModel>(base);
  c.mode = static_cast<TypeMode>(mode);
  c.dim = r.get<std::int32_t>();
  c.type_dim = r.get<std::int32_t>();
  c.label_dim = r.get<std::int32_t>();
  c.negatives = r.get<std::int32_t>();
  c.learning_rate = r.get<double>();
  c.l2 = r.get<double>();
  c.epochs = r.get<std::int32_t>();
  c.batch_size = r.get<std::int32_t>();
  c.seed = r.get<std::uint64_t>();

  Checkpoint out;
  out.entities = get_names(r);
  out.relations = get_names(r);
  out.labels = get_names(r);
  const ModelShape shape{out.entities.size(), out.relations.size(), out.labels.size()};

  std::vector<std::uint32_t> type_rows(r.count(4));
  for (auto& t : type_rows) t = r.get<std::uint32_t>();

  std::array<ParamBlock, kNumBlocks> blocks;
  if (r.get<std::uint32_t>() != kNumBlocks) r.fail("unexpected block count");
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    if (r.get<std::uint32_t>() != b) r.fail("blocks out of order");
    auto& blk = blocks[b];
    blk.rows = r.get<std::uint64_t>();
    blk.cols = r.get<std::uint64_t>();
    if (blk.cols != 0 && blk.rows > r.remaining() / sizeof(double) / blk.cols) r.fail("block exceeds file size");
    blk.data.resize(blk.rows * blk.cols);
    for (auto& v : blk.data) v = r.get<double>();
  }
  if (!r.done()) r.fail("trailing bytes");
  out.model = EmbeddingModel(c, shape, std::move(blocks), std::move(type_rows));
  return out;
}

}  // namespace kgrefine
