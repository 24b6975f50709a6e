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

// kgrefine command-line tool. Talks to the library only through the C API.
// Exit codes: 0 ok, 1 usage or config error, 2 data/input error, 3 numeric.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kgrefine/kgrefine.h"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Option storage shared by all subcommands; only one of them runs.
struct Flags {
  std::vector<std::string> config_files;
  std::string psl_config;
  std::string model_config;
  std::map<std::string, std::string> strings;
  std::map<std::string, double> numbers;
  std::map<std::string, long long> integers;
  std::vector<std::string> ablations;
  std::vector<double> heatmap_pos;
  std::vector<double> heatmap_neg;
};

// Dotted keys address the nested config document.
void set_path(json& doc, const std::string& dotted, json value) {
  json* node = &doc;
  std::size_t start = 0;
  for (auto dot = dotted.find('.'); dot != std::string::npos; dot = dotted.find('.', start)) {
    node = &(*node)[dotted.substr(start, dot - start)];
    start = dot + 1;
  }
  (*node)[dotted.substr(start)] = std::move(value);
}

class Command {
 public:
  Command(CLI::App* app, Flags& flags) : app_(app), flags_(flags) {}

  CLI::App* app() const { return app_; }

  void str(const std::string& flag, const std::string& key, const std::string& help) {
    keys_.push_back({app_->add_option(flag, flags_.strings[key], help), key, 's'});
  }
  void num(const std::string& flag, const std::string& key, const std::string& help) {
    keys_.push_back({app_->add_option(flag, flags_.numbers[key], help), key, 'n'});
  }
  void integer(const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = app_->add_option(flag, flags_.integers[key], help)->check(CLI::NonNegativeNumber);
    keys_.push_back({opt, key, 'i'});
  }
  void toggle(const std::string& flag, const std::string& key, bool value, const std::string& help) {
    keys_.push_back({app_->add_flag(flag, help), key, value ? 't' : 'f'});
  }

  // Options given on the command line, as a config document.
  json overrides() const {
    json doc = json::object();
    for (const auto& k : keys_) {
      if (k.opt->count() == 0) continue;
      switch (k.type) {
        case 's': set_path(doc, k.key, flags_.strings.at(k.key)); break;
        case 'n': set_path(doc, k.key, flags_.numbers.at(k.key)); break;
        case 'i': set_path(doc, k.key, flags_.integers.at(k.key)); break;
        case 't': set_path(doc, k.key, true); break;
        case 'f': set_path(doc, k.key, false); break;
      }
    }
    return doc;
  }

 private:
  struct Key {
    CLI::Option* opt;
    std::string key;
    char type;
  };
  CLI::App* app_;
  Flags& flags_;
  std::vector<Key> keys_;
};

void input_options(Command& c, Flags& f) {
  auto* app = c.app();
  app->add_option("-c,--config", f.config_files, "JSON config file (repeatable; later files win)")
      ->check(CLI::ExistingFile);
  c.integer("--seed", "seed", "global seed for every stochastic component");
  c.str("-o,--out", "paths.out", "output directory");
  c.str("--kg", "paths.kg", "KG directory (triples.tsv, labels.tsv, ontology/, truth.tsv, noise.tsv)");
  c.str("--triples", "paths.triples", "triples file (overrides --kg)");
  c.str("--labels", "paths.labels", "labels file");
  c.str("--ontology", "paths.ontology", "ontology directory");
  c.str("--truth", "paths.truth", "truth file");
  c.str("--compat", "paths.compat", "noise compatibility file");
  c.str("--type-relation", "type_relation", "relation name whose triples are labels");
  c.toggle("--synthetic", "synthetic_kg", true, "use the built-in synthetic KG generator");
  c.integer("--entities", "synthetic.entities", "synthetic entity count");
  c.integer("--facts", "synthetic.facts", "synthetic fact count");
  c.integer("--regions", "synthetic.regions", "synthetic region count");
  c.num("--locality", "synthetic.locality", "synthetic within-region fact rate");
}

void noise_options(Command& c) {
  c.num("--noise-fraction", "noise.corrupt_fraction", "fraction of facts to corrupt");
  c.num("--compatible-fraction", "noise.type_compatible_fraction", "type-compatible share of corruptions");
  c.num("--clean-mean", "noise.clean_mean", "score mean for clean facts");
  c.num("--clean-std", "noise.clean_std", "score std for clean facts");
  c.num("--noise-mean", "noise.noise_mean", "score mean for corrupted facts");
  c.num("--noise-std", "noise.noise_std", "score std for corrupted facts");
  c.toggle("--no-label-noise", "noise.corrupt_labels", false, "leave label facts uncorrupted");
}

void psl_options(Command& c, Flags& f) {
  c.app()->add_option("--weights,--psl-config", f.psl_config, "JSON file with the psl section")
      ->check(CLI::ExistingFile);
  c.str("--solver", "psl.solver", "admm or subgradient");
  c.integer("--max-iterations", "psl.max_iterations", "solver iteration limit");
  c.num("--tolerance", "psl.tolerance", "solver convergence tolerance");
  c.integer("--hinge-power", "psl.hinge_power", "1 (linear) or 2 (squared) hinges");
  c.integer("--sameent-k", "sameent_k", "add the k strongest same-entity pairs");
}

void model_options(Command& c, Flags& f) {
  c.app()->add_option("--model-config", f.model_config, "JSON file with the model section")
      ->check(CLI::ExistingFile);
  c.str("--base", "model.base", "complex or distmult");
  c.str("--mode", "model.mode", "plain, implicit, or typee");
  c.integer("--dim", "model.dim", "entity/relation dimension");
  c.integer("--type-dim", "model.type_dim", "implicit type dimension");
  c.integer("--label-dim", "model.label_dim", "explicit label dimension");
  c.integer("--negatives", "model.negatives", "negatives per positive");
  c.num("--lr", "model.learning_rate", "Adagrad learning rate");
  c.num("--l2", "model.l2", "l2 penalty");
  c.integer("--epochs", "model.epochs", "training epochs");
  c.integer("--batch-size", "model.batch_size", "positives per batch");
  c.integer("--model-seed", "model.seed", "model seed (defaults to --seed)");
}

void feedback_options(Command& c) {
  c.integer("--max-iter", "feedback.max_iter", "refinement iterations");
  c.num("--phi1", "feedback.phi1", "positive feedback margin");
  c.num("--phi2", "feedback.phi2", "negative feedback margin");
  c.num("--size-cap", "feedback.size_cap", "stop when normalized KG size exceeds this");
  c.num("--feedback-weight", "feedback.weight", "rule weight of feedback evidence");
  c.toggle("--no-feedback", "feedback.enabled", false, "disable feedback selection");
}

int exit_code(kgr_status s) {
  switch (s) {
    case KGR_OK: return 0;
    case KGR_ERR_CONFIG:
    case KGR_ERR_INVALID_ARGUMENT: return kExitUsage;
    case KGR_ERR_NUMERIC: return kExitNumeric;
    default: return kExitData;
  }
}

struct ConfigHandle {
  kgr_config* ptr = nullptr;
  ~ConfigHandle() { kgr_config_free(ptr); }
};

int report_failure(const std::string& command, kgr_status s, const std::string& message) {
  std::cerr << "kgrefine " << command << ": " << kgr_status_name(s) << " error: " << message << "\n";
  std::cout << json{{"command", command}, {"status", "error"}, {"kind", kgr_status_name(s)}, {"message", message}}
                   .dump()
            << "\n";
  return exit_code(s);
}

json read_section_file(const std::string& path, const char* section) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw std::runtime_error(path + ": invalid JSON");
  return json{{section, j}};
}

int run(const std::string& command, const Command& c, const Flags& f) {
  ConfigHandle cfg;
  if (auto s = kgr_config_new(&cfg.ptr); s != KGR_OK) return report_failure(command, s, kgr_last_error());
  for (const auto& file : f.config_files) {
    if (auto s = kgr_config_merge_file(cfg.ptr, file.c_str()); s != KGR_OK) {
      return report_failure(command, s, kgr_last_error());
    }
  }
  std::vector<json> docs;
  try {
    if (!f.psl_config.empty()) docs.push_back(read_section_file(f.psl_config, "psl"));
    if (!f.model_config.empty()) docs.push_back(read_section_file(f.model_config, "model"));
  } catch (const std::exception& e) {
    return report_failure(command, KGR_ERR_PARSE, e.what());
  }
  auto flags = c.overrides();
  if (!f.ablations.empty()) flags["ablations"] = f.ablations;
  if (!f.heatmap_pos.empty()) flags["heatmap"]["pos"] = f.heatmap_pos;
  if (!f.heatmap_neg.empty()) flags["heatmap"]["neg"] = f.heatmap_neg;
  docs.push_back(flags);
  for (const auto& d : docs) {
    if (auto s = kgr_config_merge_json(cfg.ptr, d.dump().c_str()); s != KGR_OK) {
      return report_failure(command, s, kgr_last_error());
    }
  }
  char* summary = nullptr;
  if (auto s = kgr_run(cfg.ptr, command.c_str(), &summary); s != KGR_OK) {
    return report_failure(command, s, kgr_last_error());
  }
  std::cout << summary << "\n";
  kgr_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgrefine: refine noisy knowledge graphs with ontology rules and typed embeddings"};
  app.name("kgrefine");
  app.set_version_flag("--version", kgr_version());
  app.require_subcommand(1);

  const std::map<std::string, std::string> descriptions{
      {"prepare", "inject noise into a clean KG and write a benchmark directory"},
      {"infer", "run rule inference and write inferred.tsv"},
      {"train", "train an embedding model and write model.bin"},
      {"iterate", "run the refinement loop and write reports.json"},
      {"eval", "run the refinement loop and the baselines"},
      {"ablate", "rerun the refinement loop under ontology ablations"},
      {"heatmap", "sweep feedback percentages and write heatmap.csv"},
  };

  Flags flags;
  std::vector<std::unique_ptr<Command>> commands;
  for (std::size_t i = 0; i < kgr_command_count(); ++i) {
    const std::string name = kgr_command_name(i);
    auto c = std::make_unique<Command>(app.add_subcommand(name, descriptions.at(name)), flags);
    input_options(*c, flags);
    if (name == "prepare") {
      noise_options(*c);
    } else {
      noise_options(*c);
      c->integer("--split-seed", "split.seed", "seed of the train/valid/test split");
      psl_options(*c, flags);
      if (name != "infer") model_options(*c, flags);
      if (name != "infer" && name != "train") feedback_options(*c);
    }
    if (name == "ablate") {
      c->app()->add_option("--ablation", flags.ablations, "all, none, without:X, only:X+Y (repeatable)");
    }
    if (name == "heatmap") {
      c->app()->add_option("--pos", flags.heatmap_pos, "positive feedback percentages")->delimiter(',');
      c->app()->add_option("--neg", flags.heatmap_neg, "negative feedback percentages")->delimiter(',');
    }
    commands.push_back(std::move(c));
  }

  if (argc < 2) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e) == 0) return 0;
    std::cerr << "\n" << app.help();
    return kExitUsage;
  }

  for (const auto& c : commands) {
    if (c->app()->parsed()) return run(c->app()->get_name(), *c, flags);
  }
  std::cerr << app.help();
  return kExitUsage;
}
