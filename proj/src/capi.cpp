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

#include "kgrefine/kgrefine.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <unordered_map>

#include "commands.hpp"
#include "io.hpp"

struct kgr_config {
  kgrefine::RunConfig config;
};

struct kgr_kg {
  kgrefine::KnowledgeGraph kg;
};

struct kgr_model {
  kgrefine::EmbeddingModel model;
  std::unordered_map<std::string, std::uint32_t> entities;
  std::unordered_map<std::string, std::uint32_t> relations;
};

namespace {

thread_local std::string g_last_error;

kgr_status status_of(kgrefine::ErrorKind k) {
  using kgrefine::ErrorKind;
  switch (k) {
    case ErrorKind::kConfig: return KGR_ERR_CONFIG;
    case ErrorKind::kParse: return KGR_ERR_PARSE;
    case ErrorKind::kReference: return KGR_ERR_REFERENCE;
    case ErrorKind::kData: return KGR_ERR_DATA;
    case ErrorKind::kNumeric: return KGR_ERR_NUMERIC;
    case ErrorKind::kContract: return KGR_ERR_CONTRACT;
    case ErrorKind::kIo: return KGR_ERR_IO;
  }
  return KGR_ERR_INTERNAL;
}

kgr_status fail(kgr_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

template <class Fn>
kgr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return KGR_OK;
  } catch (const kgrefine::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(KGR_ERR_PARSE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(KGR_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KGR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KGR_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

kgr_status null_arg(const char* what) { return fail(KGR_ERR_INVALID_ARGUMENT, std::string(what) + " is null"); }

}  // namespace

extern "C" {

const char* kgr_version(void) { return KGREFINE_VERSION; }

const char* kgr_last_error(void) { return g_last_error.c_str(); }

const char* kgr_status_name(kgr_status status) {
  switch (status) {
    case KGR_OK: return "ok";
    case KGR_ERR_CONFIG: return "config";
    case KGR_ERR_PARSE: return "parse";
    case KGR_ERR_REFERENCE: return "reference";
    case KGR_ERR_DATA: return "data";
    case KGR_ERR_NUMERIC: return "numeric";
    case KGR_ERR_CONTRACT: return "contract";
    case KGR_ERR_IO: return "io";
    case KGR_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case KGR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void kgr_string_free(char* s) { std::free(s); }

kgr_status kgr_config_new(kgr_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new kgr_config(); });
}

void kgr_config_free(kgr_config* config) { delete config; }

kgr_status kgr_config_merge_file(kgr_config* config, const char* path) {
  if (!config) return null_arg("config");
  if (!path) return null_arg("path");
  return guarded([&] {
    auto j = nlohmann::json::parse(kgrefine::read_file(path), nullptr, false);
    if (j.is_discarded()) throw kgrefine::ParseError(std::string("config ") + path + ": invalid JSON");
    // Merge into a copy so a failing document leaves the handle unchanged.
    auto next = config->config;
    next.merge(j);
    config->config = std::move(next);
  });
}

kgr_status kgr_config_merge_json(kgr_config* config, const char* json_text) {
  if (!config) return null_arg("config");
  if (!json_text) return null_arg("json_text");
  return guarded([&] {
    auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw kgrefine::ParseError("config overrides: invalid JSON");
    auto next = config->config;
    next.merge(j);
    config->config = std::move(next);
  });
}

kgr_status kgr_config_to_json(const kgr_config* config, char** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(config->config.to_json().dump(2)); });
}

kgr_status kgr_run(const kgr_config* config, const char* command, char** summary) {
  if (!config) return null_arg("config");
  if (!command) return null_arg("command");
  if (!summary) return null_arg("summary");
  return guarded([&] { *summary = dup_string(kgrefine::run_command(command, config->config)); });
}

size_t kgr_command_count(void) { return kgrefine::kCommands.size(); }

const char* kgr_command_name(size_t i) {
  return i < kgrefine::kCommands.size() ? kgrefine::kCommands[i].c_str() : nullptr;
}

kgr_status kgr_kg_load(const kgr_config* config, kgr_kg** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new kgr_kg{kgrefine::load_input(config->config)}; });
}

void kgr_kg_free(kgr_kg* kg) { delete kg; }

size_t kgr_kg_num_facts(const kgr_kg* kg) { return kg ? kg->kg.facts().size() : 0; }
size_t kgr_kg_num_entities(const kgr_kg* kg) { return kg ? kg->kg.num_entities() : 0; }
size_t kgr_kg_num_relations(const kgr_kg* kg) { return kg ? kg->kg.num_relations() : 0; }
size_t kgr_kg_num_labels(const kgr_kg* kg) { return kg ? kg->kg.num_labels() : 0; }

kgr_status kgr_model_load(const char* path, kgr_model** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto ck = kgrefine::load_checkpoint(path);
    auto m = std::make_unique<kgr_model>();
    m->model = std::move(ck.model);
    for (std::uint32_t i = 0; i < ck.entities.size(); ++i) m->entities.emplace(ck.entities[i], i);
    for (std::uint32_t i = 0; i < ck.relations.size(); ++i) m->relations.emplace(ck.relations[i], i);
    *out = m.release();
  });
}

void kgr_model_free(kgr_model* model) { delete model; }

kgr_status kgr_model_predict(const kgr_model* model, const char* subject, const char* relation, const char* object,
                             double* out) {
  if (!model) return null_arg("model");
  if (!subject || !relation || !object) return null_arg("triple name");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto find = [](const auto& map, const char* name, const char* what) {
      auto it = map.find(name);
      if (it == map.end()) throw kgrefine::ReferenceError(std::string("unknown ") + what + " '" + name + "'");
      return it->second;
    };
    const kgrefine::Triple t{kgrefine::EntityId{find(model->entities, subject, "entity")},
                             kgrefine::RelationId{find(model->relations, relation, "relation")},
                             kgrefine::EntityId{find(model->entities, object, "entity")}};
    *out = kgrefine::predict_one(model->model, t);
  });
}

}  // extern "C"
