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

#include "config.hpp"

#include <algorithm>
#include <map>

#include "io.hpp"

namespace kgrefine {

using nlohmann::json;

namespace {

// Walks one JSON object, dispatching known keys and rejecting the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config section '" + label() + "' must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class Fn>
  Section& on(const char* key, Fn&& fn) {
    known_.push_back(key);
    if (auto it = j_.find(key); it != j_.end()) fn(*it, qualified(key));
    return *this;
  }

  Section& num(const char* key, double& out) {
    return on(key, [&](const json& v, const std::string& q) {
      if (!v.is_number()) throw ConfigError("config key '" + q + "' must be a number");
      out = v.get<double>();
    });
  }

  template <class Int>
  Section& integer(const char* key, Int& out) {
    return on(key, [&](const json& v, const std::string& q) {
      if (!v.is_number_integer()) throw ConfigError("config key '" + q + "' must be an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
          out = v.get<Int>();
        } else {
          throw ConfigError("config key '" + q + "' must be nonnegative");
        }
      } else {
        out = v.get<Int>();
      }
    });
  }

  Section& str(const char* key, std::string& out) {
    return on(key, [&](const json& v, const std::string& q) {
      if (!v.is_string()) throw ConfigError("config key '" + q + "' must be a string");
      out = v.get<std::string>();
    });
  }

  Section& boolean(const char* key, bool& out) {
    return on(key, [&](const json& v, const std::string& q) {
      if (!v.is_boolean()) throw ConfigError("config key '" + q + "' must be true or false");
      out = v.get<bool>();
    });
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(known_.begin(), known_.end(), it.key()) == known_.end()) {
        throw ConfigError("unknown config key '" + qualified(it.key()) + "'");
      }
    }
  }

 private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string label() const { return path_.empty() ? "(root)" : path_; }

  const json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

std::map<std::string, double> weight_map(const json& v, const std::string& q) {
  if (!v.is_object()) throw ConfigError("config key '" + q + "' must be an object of weights");
  std::map<std::string, double> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("config key '" + q + "." + it.key() + "' must be a number");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

std::vector<double> number_list(const json& v, const std::string& q) {
  if (!v.is_array()) throw ConfigError("config key '" + q + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("config key '" + q + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const char* solver_name(SolverMethod m) { return m == SolverMethod::kAdmm ? "admm" : "subgradient"; }

SolverMethod parse_solver(const std::string& s) {
  if (s == "admm") return SolverMethod::kAdmm;
  if (s == "subgradient") return SolverMethod::kSubgradient;
  throw ConfigError("unknown solver '" + s + "' (expected admm or subgradient)");
}

}  // namespace

std::vector<std::string> default_ablations() {
  std::vector<std::string> out{"all", "none"};
  for (auto c : kAllComponents) out.push_back(std::string("without:") + component_name(c));
  out.push_back("only:DOM+RNG");
  return out;
}

void RunConfig::merge(const json& j) {
  Section root(j, "");
  bool section_seed[4] = {false, false, false, false};  // noise, split, model, synthetic

  root.integer("seed", seed);
  root.str("type_relation", type_relation);
  root.integer("sameent_k", sameent_k);
  root.boolean("synthetic_kg", use_synthetic);
  root.on("paths", [&](const json& v, const std::string& q) {
    Section(v, q)
        .str("kg", paths.kg)
        .str("triples", paths.triples)
        .str("labels", paths.labels)
        .str("ontology", paths.ontology)
        .str("truth", paths.truth)
        .str("compat", paths.compat)
        .str("out", paths.out)
        .str("model", paths.model)
        .finish();
  });
  root.on("psl", [&](const json& v, const std::string& q) {
    std::string method = solver_name(solver.method);
    Section s(v, q);
    s.num("candidate_weight", weights.default_candidate)
        .on("source_weights", [&](const json& x, const std::string& k) { weights.candidate_rel = weight_map(x, k); })
        .on("label_source_weights",
            [&](const json& x, const std::string& k) { weights.candidate_lbl = weight_map(x, k); })
        .num("entity_resolution", weights.entity_resolution)
        .num("inverse", weights.inverse)
        .num("selectional", weights.selectional)
        .num("subsumption", weights.subsumption)
        .num("mutual_exclusion", weights.mutual_exclusion)
        .num("negative_prior", weights.negative_prior)
        .integer("hinge_power", weights.hinge_power)
        .str("solver", method)
        .integer("max_iterations", solver.max_iterations)
        .num("tolerance", solver.tolerance)
        .integer("patience", solver.patience)
        .num("step_size", solver.step_size)
        .num("admm_rho", solver.admm_rho)
        .finish();
    solver.method = parse_solver(method);
  });
  root.on("model", [&](const json& v, const std::string& q) {
    std::string base = base_name(model.base), mode = mode_name(model.mode);
    Section s(v, q);
    s.str("base", base)
        .str("mode", mode)
        .integer("dim", model.dim)
        .integer("type_dim", model.type_dim)
        .integer("label_dim", model.label_dim)
        .integer("negatives", model.negatives)
        .num("learning_rate", model.learning_rate)
        .num("l2", model.l2)
        .integer("epochs", model.epochs)
        .integer("batch_size", model.batch_size)
        .integer("seed", model.seed)
        .finish();
    model.base = parse_base(base);
    model.mode = parse_mode(mode);
    section_seed[2] = s.has("seed");
  });
  root.on("feedback", [&](const json& v, const std::string& q) {
    Section(v, q)
        .num("phi1", feedback.phi1)
        .num("phi2", feedback.phi2)
        .num("weight", feedback.feedback_weight)
        .integer("max_iter", feedback.max_iter)
        .num("size_cap", feedback.size_cap)
        .boolean("enabled", feedback.enabled)
        .finish();
  });
  root.on("split", [&](const json& v, const std::string& q) {
    Section s(v, q);
    s.num("train", split.train).num("valid", split.valid).num("test", split.test).integer("seed", split.seed).finish();
    section_seed[1] = s.has("seed");
  });
  root.on("noise", [&](const json& v, const std::string& q) {
    Section s(v, q);
    s.num("corrupt_fraction", noise.corrupt_fraction)
        .num("type_compatible_fraction", noise.type_compatible_fraction)
        .num("clean_mean", noise.clean_mean)
        .num("clean_std", noise.clean_std)
        .num("noise_mean", noise.noise_mean)
        .num("noise_std", noise.noise_std)
        .boolean("corrupt_labels", noise.corrupt_labels)
        .integer("seed", noise.seed)
        .finish();
    section_seed[0] = s.has("seed");
  });
  root.on("synthetic", [&](const json& v, const std::string& q) {
    Section s(v, q);
    s.integer("entities", synthetic.entities)
        .integer("facts", synthetic.facts)
        .integer("regions", synthetic.regions)
        .num("locality", synthetic.locality)
        .num("inverse_rate", synthetic.inverse_rate)
        .integer("seed", synthetic.seed)
        .finish();
    section_seed[3] = s.has("seed");
  });
  root.on("ablations", [&](const json& v, const std::string& q) {
    if (!v.is_array()) throw ConfigError("config key '" + q + "' must be an array of strings");
    ablations.clear();
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError("config key '" + q + "' must be an array of strings");
      Ablation::parse(x.get<std::string>());
      ablations.push_back(x.get<std::string>());
    }
  });
  root.on("heatmap", [&](const json& v, const std::string& q) {
    Section(v, q)
        .on("pos", [&](const json& x, const std::string& k) { heatmap_pos = number_list(x, k); })
        .on("neg", [&](const json& x, const std::string& k) { heatmap_neg = number_list(x, k); })
        .finish();
  });
  root.finish();

  if (j.contains("seed")) {
    if (!section_seed[0]) noise.seed = seed;
    if (!section_seed[1]) split.seed = seed;
    if (!section_seed[2]) model.seed = seed;
    if (!section_seed[3]) synthetic.seed = seed;
  }
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["type_relation"] = type_relation;
  j["sameent_k"] = sameent_k;
  j["synthetic_kg"] = use_synthetic;
  j["paths"] = {{"kg", paths.kg},         {"triples", paths.triples}, {"labels", paths.labels},
                {"ontology", paths.ontology}, {"truth", paths.truth},     {"compat", paths.compat},
                {"out", paths.out},       {"model", paths.model}};
  j["psl"] = {{"candidate_weight", weights.default_candidate},
              {"source_weights", weights.candidate_rel},
              {"label_source_weights", weights.candidate_lbl},
              {"entity_resolution", weights.entity_resolution},
              {"inverse", weights.inverse},
              {"selectional", weights.selectional},
              {"subsumption", weights.subsumption},
              {"mutual_exclusion", weights.mutual_exclusion},
              {"negative_prior", weights.negative_prior},
              {"hinge_power", weights.hinge_power},
              {"solver", solver_name(solver.method)},
              {"max_iterations", solver.max_iterations},
              {"tolerance", solver.tolerance},
              {"patience", solver.patience},
              {"step_size", solver.step_size},
              {"admm_rho", solver.admm_rho}};
  j["model"] = {{"base", base_name(model.base)},
                {"mode", mode_name(model.mode)},
                {"dim", model.dim},
                {"type_dim", model.type_dim},
                {"label_dim", model.label_dim},
                {"negatives", model.negatives},
                {"learning_rate", model.learning_rate},
                {"l2", model.l2},
                {"epochs", model.epochs},
                {"batch_size", model.batch_size},
                {"seed", model.seed}};
  j["feedback"] = {{"phi1", feedback.phi1},         {"phi2", feedback.phi2},
                   {"weight", feedback.feedback_weight}, {"max_iter", feedback.max_iter},
                   {"size_cap", feedback.size_cap}, {"enabled", feedback.enabled}};
  j["split"] = {{"train", split.train}, {"valid", split.valid}, {"test", split.test}, {"seed", split.seed}};
  j["noise"] = {{"corrupt_fraction", noise.corrupt_fraction},
                {"type_compatible_fraction", noise.type_compatible_fraction},
                {"clean_mean", noise.clean_mean},
                {"clean_std", noise.clean_std},
                {"noise_mean", noise.noise_mean},
                {"noise_std", noise.noise_std},
                {"corrupt_labels", noise.corrupt_labels},
                {"seed", noise.seed}};
  j["synthetic"] = {{"entities", synthetic.entities}, {"facts", synthetic.facts},
                    {"regions", synthetic.regions},   {"locality", synthetic.locality},
                    {"inverse_rate", synthetic.inverse_rate}, {"seed", synthetic.seed}};
  j["ablations"] = ablations;
  j["heatmap"] = {{"pos", heatmap_pos}, {"neg", heatmap_neg}};
  return j;
}

void RunConfig::validate() const {
  weights.validate();
  model.validate();
  feedback.validate();
  noise.validate();
  synthetic.validate();
  if (solver.max_iterations < 1) throw ConfigError("psl.max_iterations must be >= 1");
  if (!(solver.tolerance >= 0)) throw ConfigError("psl.tolerance must be >= 0");
  if (solver.patience < 1) throw ConfigError("psl.patience must be >= 1");
  if (!(solver.step_size > 0) || !(solver.admm_rho > 0)) {
    throw ConfigError("psl.step_size and psl.admm_rho must be positive");
  }
  for (const auto& a : ablations) Ablation::parse(a);
  for (const auto* grid : {&heatmap_pos, &heatmap_neg}) {
    for (double p : *grid) {
      if (!(p >= 0 && p <= 100)) throw ConfigError("heatmap percentages must lie in [0,100]");
    }
  }
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  RunConfig c;
  c.merge(j);
  return c;
}

}  // namespace kgrefine
