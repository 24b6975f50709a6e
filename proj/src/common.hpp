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

#ifndef KGREFINE_COMMON_HPP_
#define KGREFINE_COMMON_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgrefine {

// Error taxonomy. The C API and the CLI map these onto status/exit codes.
enum class ErrorKind { kConfig, kParse, kReference, kData, kNumeric, kContract, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::kConfig, w) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::kParse, w) {}
};
struct ReferenceError : Error {
  explicit ReferenceError(const std::string& w) : Error(ErrorKind::kReference, w) {}
};
struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorKind::kData, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::kNumeric, w) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorKind::kContract, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::kIo, w) {}
};

// Dense integer id, distinct per tag so entity/relation/label ids cannot mix.
template <class Tag>
struct Id {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const Id&) const = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;
using LabelId = Id<struct LabelTag>;

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;
  constexpr auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (std::uint64_t{t.subject.value} << 32) ^ t.object.value;
    h ^= std::uint64_t{t.relation.value} * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }
};

using Rng = std::mt19937_64;

// Named sub-stream of a global seed. Components ("noise", "split", "init",
// "sampling", ...) draw from independent streams so they can be re-seeded
// without perturbing each other.
Rng make_stream(std::uint64_t seed, std::string_view name);

inline double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Shortest round-trip decimal rendering; used by every text writer.
std::string format_double(double v);

}  // namespace kgrefine

template <class Tag>
struct std::hash<kgrefine::Id<Tag>> {
  std::size_t operator()(const kgrefine::Id<Tag>& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // KGREFINE_COMMON_HPP_
