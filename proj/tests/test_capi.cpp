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

// Exercises the shared library through its C header only, and the CLI
// binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include "kgrefine/kgrefine.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Scratch {
 public:
  Scratch() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("kgrefine-capi-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& n) const { return path_ / n; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Config {
  kgr_config* ptr = nullptr;
  Config() { REQUIRE(kgr_config_new(&ptr) == KGR_OK); }
  ~Config() { kgr_config_free(ptr); }
  kgr_status merge(const json& j) { return kgr_config_merge_json(ptr, j.dump().c_str()); }
};

std::string run_ok(const Config& c, const char* command) {
  char* summary = nullptr;
  const auto s = kgr_run(c.ptr, command, &summary);
  INFO(kgr_last_error());
  REQUIRE(s == KGR_OK);
  std::string out = summary;
  kgr_string_free(summary);
  return out;
}

const json kTinyModel = {{"dim", 8},       {"type_dim", 4},       {"label_dim", 4}, {"epochs", 5},
                         {"negatives", 1}, {"batch_size", 64},    {"l2", 1e-3}};
const json kTinySynthetic = {{"entities", 40}, {"facts", 200}, {"regions", 2}};

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(const Scratch& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(KGREFINE_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::regex_match(kgr_version(), std::regex(R"(\d+\.\d+\.\d+)")));
  CHECK(std::string(kgr_status_name(KGR_ERR_DATA)) == "data");
  CHECK(kgr_command_count() == 7);
  CHECK(std::string(kgr_command_name(0)) == "prepare");
  CHECK(kgr_command_name(7) == nullptr);
}

TEST_CASE("config handle") {
  Config c;
  CHECK(c.merge({{"feedback", {{"phi1", 0.25}}}}) == KGR_OK);
  CHECK(std::string(kgr_last_error()).empty());

  CHECK(c.merge({{"feedback", {{"phi9", 1}}}}) == KGR_ERR_CONFIG);
  CHECK(std::string(kgr_last_error()).find("feedback.phi9") != std::string::npos);
  CHECK(kgr_config_merge_json(c.ptr, "{oops") == KGR_ERR_PARSE);
  // A failed merge leaves the previous values in place.
  CHECK(c.merge({{"feedback", {{"phi1", 0.9}, {"phi2", "x"}}}}) == KGR_ERR_CONFIG);

  char* text = nullptr;
  REQUIRE(kgr_config_to_json(c.ptr, &text) == KGR_OK);
  const auto doc = json::parse(text);
  kgr_string_free(text);
  CHECK(doc["feedback"]["phi1"] == 0.25);
  CHECK(doc["feedback"]["phi2"] == 0.75);

  CHECK(kgr_config_merge_file(c.ptr, "/nonexistent/kgrefine.json") == KGR_ERR_IO);
}

TEST_CASE("null arguments") {
  char* s = nullptr;
  CHECK(kgr_config_new(nullptr) == KGR_ERR_INVALID_ARGUMENT);
  CHECK(kgr_run(nullptr, "infer", &s) == KGR_ERR_INVALID_ARGUMENT);
  CHECK(kgr_model_load(nullptr, nullptr) == KGR_ERR_INVALID_ARGUMENT);
  CHECK(kgr_kg_num_facts(nullptr) == 0);
  Config c;
  CHECK(kgr_run(c.ptr, "frobnicate", &s) == KGR_ERR_CONFIG);
  CHECK(kgr_run(c.ptr, "infer", &s) == KGR_ERR_CONFIG);  // no input configured
}

TEST_CASE("prepare, load, train, predict through the C API") {
  Scratch dir;
  Config prep;
  REQUIRE(prep.merge({{"synthetic_kg", true},
                      {"seed", 3},
                      {"synthetic", kTinySynthetic},
                      {"paths", {{"out", (dir / "data").string()}}}}) == KGR_OK);
  auto summary = json::parse(run_ok(prep, "prepare"));
  CHECK(summary["status"] == "ok");
  CHECK(summary["facts"] == 200);
  for (const char* f : {"triples.tsv", "labels.tsv", "truth.tsv", "noise.tsv", "stats.json", "ontology/dom.tsv"}) {
    CHECK(fs::exists(dir / "data" / f));
  }

  Config c;
  REQUIRE(c.merge({{"seed", 3},
                   {"model", kTinyModel},
                   {"paths", {{"kg", (dir / "data").string()}, {"out", (dir / "train").string()}}}}) == KGR_OK);
  kgr_kg* kg = nullptr;
  REQUIRE(kgr_kg_load(c.ptr, &kg) == KGR_OK);
  CHECK(kgr_kg_num_facts(kg) == 200);
  CHECK(kgr_kg_num_relations(kg) == 10);
  CHECK(kgr_kg_num_labels(kg) == 8);
  kgr_kg_free(kg);

  summary = json::parse(run_ok(c, "train"));
  CHECK(summary["command"] == "train");
  REQUIRE(fs::exists(dir / "train" / "model.bin"));
  CHECK(json::parse(slurp(dir / "train" / "train.json")).contains("metrics"));

  kgr_model* model = nullptr;
  REQUIRE(kgr_model_load((dir / "train" / "model.bin").c_str(), &model) == KGR_OK);
  // The first triples.tsv row names a known subject, relation, and object.
  std::istringstream row(slurp(dir / "data" / "triples.tsv"));
  std::string s, r, o;
  std::getline(row, s, '\t');
  std::getline(row, r, '\t');
  std::getline(row, o, '\t');
  double p = -1;
  REQUIRE(kgr_model_predict(model, s.c_str(), r.c_str(), o.c_str(), &p) == KGR_OK);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(kgr_model_predict(model, "nobody", r.c_str(), o.c_str(), &p) == KGR_ERR_REFERENCE);
  kgr_model_free(model);

  CHECK(kgr_model_load((dir / "data" / "triples.tsv").c_str(), &model) == KGR_ERR_PARSE);
}

TEST_CASE("cli usage and exit codes") {
  Scratch dir;
  auto r = cli(dir, "");
  CHECK(r.code == 1);
  CHECK(r.err.find("Subcommands") != std::string::npos);

  r = cli(dir, "--version");
  CHECK(r.code == 0);
  CHECK(r.out.find(kgr_version()) != std::string::npos);

  CHECK(cli(dir, "frobnicate").code == 1);
  CHECK(cli(dir, "iterate --no-such-flag").code == 1);
  CHECK(cli(dir, "iterate --synthetic --mode fancy").code == 1);

  r = cli(dir, "infer --kg " + (dir / "missing").string());
  CHECK(r.code == 2);
  CHECK(json::parse(r.out)["status"] == "error");

  std::ofstream(dir / "bad.tsv") << "a\tr\tb\n";
  CHECK(cli(dir, "prepare --triples " + (dir / "bad.tsv").string()).code == 2);

  std::ofstream(dir / "bad.json") << "{\"psl\": {\"inverse\": \"x\"}}";
  CHECK(cli(dir, "infer --synthetic --config " + (dir / "bad.json").string()).code == 1);
}

TEST_CASE("cli prepare from a triples file") {
  Scratch dir;
  {
    std::ofstream t(dir / "t.tsv");
    for (int i = 0; i < 40; ++i) t << "s" << i << "\tr" << i % 3 << "\to" << (i * 7) % 11 << "\t1\tsrc\n";
  }
  auto r = cli(dir, "prepare --triples " + (dir / "t.tsv").string() + " --noise-fraction 0.25 --seed 1 -o " +
                        (dir / "out").string());
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["corrupted"] == 10);
  const auto stats = json::parse(slurp(dir / "out" / "stats.json"));
  CHECK(stats["corrupted"] == 10);
  CHECK(stats.contains("clean_score_mean"));
  CHECK(stats.contains("compatibility_rate"));
  CHECK(fs::exists(dir / "out" / "truth.tsv"));
}

TEST_CASE("cli iterate writes one report per iteration") {
  Scratch dir;
  std::string args = "iterate --synthetic --seed 2 --entities 40 --facts 200 --regions 2 --max-iter 6 "
                     "--dim 8 --type-dim 4 --label-dim 4 --epochs 5 --negatives 1 --batch-size 64 "
                     "--max-iterations 300 -o " +
                     (dir / "run").string();
  // A size cap this large never halts, so all six iterations run.
  auto r = cli(dir, args + " --size-cap 1000");
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto reports = json::parse(slurp(dir / "run" / "reports.json"));
  REQUIRE(reports.is_array());
  CHECK(reports.size() == 6);
  CHECK(reports[0]["iteration"] == 1);
  CHECK(reports[5]["iteration"] == 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(fs::exists(dir / "run" / ("iter-" + std::to_string(k)) / "inferred.tsv"));
    CHECK(fs::exists(dir / "run" / ("iter-" + std::to_string(k)) / "feedback.tsv"));
  }
  CHECK(fs::exists(dir / "run" / "model.bin"));
  // No temp files left behind.
  for (const auto& e : fs::recursive_directory_iterator(dir / "run")) {
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
  }
}

TEST_CASE("cli flags override config files") {
  Scratch dir;
  std::ofstream(dir / "c.json") << R"({"feedback": {"max_iter": 4}, "model": {"epochs": 3, "dim": 8,
      "type_dim": 4, "label_dim": 4, "negatives": 1, "batch_size": 64},
      "psl": {"max_iterations": 200}, "synthetic": {"entities": 30, "facts": 120, "regions": 2}})";
  auto r = cli(dir, "iterate --synthetic --config " + (dir / "c.json").string() + " --max-iter 2 -o " +
                        (dir / "run").string());
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(dir / "run" / "reports.json")).size() == 2);
}
