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

#include "kg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "io.hpp"

namespace kgrefine {

namespace fs = std::filesystem;

std::uint32_t Interner::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) {
    return it->second;
  }
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

double CandidateFact::max_confidence() const {
  double best = 0.0;
  for (const auto& c : confidences) {
    best = std::max(best, c.value);
  }
  return best;
}

double CandidateFact::mean_confidence() const {
  if (confidences.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto& c : confidences) {
    sum += c.value;
  }
  return sum / static_cast<double>(confidences.size());
}

bool Ontology::empty() const {
  return dom.empty() && rng.empty() && sub.empty() && rsub.empty() && mut.empty() && rmut.empty() &&
         inv.empty() && sameent.empty();
}

namespace {

void check_confidences(const std::vector<SourceConfidence>& confs, const std::string& what) {
  if (confs.empty()) {
    throw DataError(what + ": no confidence values");
  }
  for (const auto& c : confs) {
    if (!(c.value >= 0.0 && c.value <= 1.0)) {
      throw DataError(what + ": confidence " + format_double(c.value) + " outside [0,1]");
    }
  }
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::shared_ptr<const Vocabulary> vocab, std::vector<CandidateFact> facts,
                               std::vector<CandidateLabel> labels, Ontology ontology,
                               std::optional<TruthMap> truth, LabelTruthMap label_truth, CompatMap compat)
    : vocab_(std::move(vocab)),
      ontology_(std::move(ontology)),
      truth_(std::move(truth)),
      label_truth_(std::move(label_truth)),
      compat_(std::move(compat)) {
  const auto ne = vocab_->entities.size();
  const auto nr = vocab_->relations.size();
  const auto nl = vocab_->labels.size();
  facts_.reserve(facts.size());
  for (auto& f : facts) {
    const auto& t = f.triple;
    if (t.subject.value >= ne || t.object.value >= ne || t.relation.value >= nr) {
      throw ReferenceError("fact references an unknown id");
    }
    auto [it, inserted] = index_.emplace(t, facts_.size());
    if (inserted) {
      facts_.push_back(std::move(f));
    } else {
      auto& dst = facts_[it->second].confidences;
      dst.insert(dst.end(), f.confidences.begin(), f.confidences.end());
    }
  }
  for (const auto& f : facts_) {
    check_confidences(f.confidences, describe(f.triple));
  }

  std::map<LabelKey, std::size_t> label_index;
  for (auto& l : labels) {
    if (l.entity.value >= ne || l.label.value >= nl) {
      throw ReferenceError("label references an unknown id");
    }
    auto [it, inserted] = label_index.emplace(LabelKey{l.entity, l.label}, labels_.size());
    if (inserted) {
      labels_.push_back(std::move(l));
    } else {
      auto& dst = labels_[it->second].confidences;
      dst.insert(dst.end(), l.confidences.begin(), l.confidences.end());
    }
  }
  for (const auto& l : labels_) {
    for (const auto& c : l.confidences) {
      if (!(c.value >= 0.0 && c.value <= 1.0)) {
        throw DataError("label " + vocab_->entities.name(l.entity.value) + " confidence outside [0,1]");
      }
    }
  }

  auto check_label = [&](LabelId l) {
    if (l.value >= nl) throw ReferenceError("ontology references an unknown label id");
  };
  auto check_rel = [&](RelationId r) {
    if (r.value >= nr) throw ReferenceError("ontology references an unknown relation id");
  };
  for (const auto& [r, l] : ontology_.dom) { check_rel(r); check_label(l); }
  for (const auto& [r, l] : ontology_.rng) { check_rel(r); check_label(l); }
  for (const auto& [c, p] : ontology_.sub) {
    check_label(c);
    check_label(p);
    if (c == p) throw DataError("SUB self-loop on label " + vocab_->labels.name(c.value));
  }
  for (const auto& [a, b] : ontology_.rsub) { check_rel(a); check_rel(b); }
  for (const auto& [a, b] : ontology_.inv) { check_rel(a); check_rel(b); }
  for (const auto& [a, b] : ontology_.mut) {
    check_label(a);
    check_label(b);
    if (a == b) throw DataError("MUT pair must name two distinct labels");
  }
  for (const auto& [a, b] : ontology_.rmut) {
    check_rel(a);
    check_rel(b);
    if (a == b) throw DataError("RMUT pair must name two distinct relations");
  }
  for (const auto& s : ontology_.sameent) {
    if (s.first.value >= ne || s.second.value >= ne) {
      throw ReferenceError("SAMEENT references an unknown entity id");
    }
    if (!(s.score >= 0.0 && s.score <= 1.0)) {
      throw DataError("SAMEENT score outside [0,1]");
    }
  }
}

const CandidateFact* KnowledgeGraph::find(const Triple& t) const {
  auto it = index_.find(t);
  return it == index_.end() ? nullptr : &facts_[it->second];
}

KnowledgeGraph KnowledgeGraph::with_facts(std::vector<CandidateFact> facts) const {
  return KnowledgeGraph(vocab_, std::move(facts), labels_, ontology_, truth_, label_truth_, compat_);
}

KnowledgeGraph KnowledgeGraph::with_ontology(Ontology ontology) const {
  return KnowledgeGraph(vocab_, facts_, labels_, std::move(ontology), truth_, label_truth_, compat_);
}

std::string KnowledgeGraph::describe(const Triple& t) const {
  auto safe = [](const Interner& in, std::uint32_t id) {
    return id < in.size() ? in.name(id) : "#" + std::to_string(id);
  };
  return "(" + safe(vocab_->entities, t.subject.value) + ", " + safe(vocab_->relations, t.relation.value) +
         ", " + safe(vocab_->entities, t.object.value) + ")";
}

// ---- Loading ----------------------------------------------------------------

namespace {

std::string where(const fs::path& p, std::size_t line) { return p.string() + ":" + std::to_string(line); }

void expect_columns(const std::vector<std::string_view>& f, std::size_t n, const fs::path& p,
                    std::size_t line) {
  if (f.size() != n) {
    throw ParseError(where(p, line) + ": expected " + std::to_string(n) + " columns, got " +
                     std::to_string(f.size()));
  }
}

double parse_unit(std::string_view text, const fs::path& p, std::size_t line) {
  double v = parse_double(text, where(p, line));
  if (v < 0.0 || v > 1.0) {
    throw ParseError(where(p, line) + ": confidence " + std::string(text) + " outside [0,1]");
  }
  return v;
}

int parse_flag(std::string_view text, const fs::path& p, std::size_t line) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw ParseError(where(p, line) + ": expected 0 or 1, got '" + std::string(text) + "'");
}

RelationId known_relation(const Vocabulary& v, std::string_view name, const fs::path& p, std::size_t line) {
  auto id = v.relations.find(name);
  if (!id) {
    throw ReferenceError(where(p, line) + ": unknown relation '" + std::string(name) + "'");
  }
  return RelationId{*id};
}

EntityId known_entity(const Vocabulary& v, std::string_view name, const fs::path& p, std::size_t line) {
  auto id = v.entities.find(name);
  if (!id) {
    throw ReferenceError(where(p, line) + ": unknown entity '" + std::string(name) + "'");
  }
  return EntityId{*id};
}

template <class A, class B>
std::pair<A, B> ordered(A a, B b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

KnowledgeGraph load_kg(const fs::path& triples, const fs::path& labels, const fs::path& ontology_dir,
                       const LoadOptions& options) {
  auto vocab = std::make_shared<Vocabulary>();
  std::vector<CandidateFact> facts;
  std::vector<CandidateLabel> cand_labels;

  for_each_tsv_row(triples, [&](std::size_t line, const auto& f) {
    expect_columns(f, 5, triples, line);
    double conf = parse_unit(f[3], triples, line);
    if (!options.type_relation.empty() && f[1] == options.type_relation) {
      cand_labels.push_back({vocab->entity(f[0]), vocab->label(f[2]), {{std::string(f[4]), conf}}});
      return;
    }
    Triple t{vocab->entity(f[0]), vocab->relation(f[1]), vocab->entity(f[2])};
    facts.push_back({t, {{std::string(f[4]), conf}}});
  });

  if (!labels.empty()) {
    for_each_tsv_row(labels, [&](std::size_t line, const auto& f) {
      expect_columns(f, 4, labels, line);
      double conf = parse_unit(f[2], labels, line);
      cand_labels.push_back({vocab->entity(f[0]), vocab->label(f[1]), {{std::string(f[3]), conf}}});
    });
  }

  Ontology onto;
  auto component = [&](const char* name) { return ontology_dir / name; };
  auto if_exists = [&](const char* name, auto&& fn) {
    if (!ontology_dir.empty() && fs::exists(component(name))) {
      for_each_tsv_row(component(name), fn);
    }
  };
  auto label_map = [&](const char* name, std::map<RelationId, LabelId>& out) {
    if_exists(name, [&](std::size_t line, const auto& f) {
      expect_columns(f, 2, component(name), line);
      auto r = known_relation(*vocab, f[0], component(name), line);
      auto l = vocab->label(f[1]);
      auto [it, inserted] = out.emplace(r, l);
      if (!inserted && it->second != l) {
        throw DataError(where(component(name), line) + ": conflicting label for relation '" +
                        std::string(f[0]) + "'");
      }
    });
  };
  label_map("dom.tsv", onto.dom);
  label_map("rng.tsv", onto.rng);
  if_exists("sub.tsv", [&](std::size_t line, const auto& f) {
    expect_columns(f, 2, component("sub.tsv"), line);
    onto.sub.emplace(vocab->label(f[0]), vocab->label(f[1]));
  });
  if_exists("mut.tsv", [&](std::size_t line, const auto& f) {
    expect_columns(f, 2, component("mut.tsv"), line);
    onto.mut.insert(ordered(vocab->label(f[0]), vocab->label(f[1])));
  });
  auto rel_pairs = [&](const char* name, std::set<std::pair<RelationId, RelationId>>& out, bool unordered) {
    if_exists(name, [&](std::size_t line, const auto& f) {
      expect_columns(f, 2, component(name), line);
      auto a = known_relation(*vocab, f[0], component(name), line);
      auto b = known_relation(*vocab, f[1], component(name), line);
      out.insert(unordered ? ordered(a, b) : std::pair{a, b});
    });
  };
  rel_pairs("rsub.tsv", onto.rsub, false);
  rel_pairs("rmut.tsv", onto.rmut, true);
  rel_pairs("inv.tsv", onto.inv, false);
  if_exists("sameent.tsv", [&](std::size_t line, const auto& f) {
    expect_columns(f, 3, component("sameent.tsv"), line);
    auto a = known_entity(*vocab, f[0], component("sameent.tsv"), line);
    auto b = known_entity(*vocab, f[1], component("sameent.tsv"), line);
    onto.sameent.push_back({a, b, parse_unit(f[2], component("sameent.tsv"), line)});
  });

  std::optional<TruthMap> truth;
  LabelTruthMap label_truth;
  std::unordered_set<Triple, TripleHash> fact_keys;
  for (const auto& f : facts) fact_keys.insert(f.triple);
  if (!options.truth.empty()) {
    truth.emplace();
    for_each_tsv_row(options.truth, [&](std::size_t line, const auto& f) {
      expect_columns(f, 4, options.truth, line);
      int flag = parse_flag(f[3], options.truth, line);
      if (!options.type_relation.empty() && f[1] == options.type_relation) {
        auto e = known_entity(*vocab, f[0], options.truth, line);
        auto l = vocab->labels.find(f[2]);
        if (!l) throw ReferenceError(where(options.truth, line) + ": unknown label");
        label_truth[{e, LabelId{*l}}] = flag;
        return;
      }
      Triple t{known_entity(*vocab, f[0], options.truth, line), known_relation(*vocab, f[1], options.truth, line),
               known_entity(*vocab, f[2], options.truth, line)};
      if (!fact_keys.contains(t)) {
        throw ReferenceError(where(options.truth, line) + ": truth row names a fact not in the KG");
      }
      (*truth)[t] = flag;
    });
  }
  CompatMap compat;
  if (!options.compat.empty()) {
    for_each_tsv_row(options.compat, [&](std::size_t line, const auto& f) {
      expect_columns(f, 4, options.compat, line);
      Triple t{known_entity(*vocab, f[0], options.compat, line), known_relation(*vocab, f[1], options.compat, line),
               known_entity(*vocab, f[2], options.compat, line)};
      compat[t] = parse_flag(f[3], options.compat, line) == 1;
    });
  }

  return KnowledgeGraph(vocab, std::move(facts), std::move(cand_labels), std::move(onto), std::move(truth),
                        std::move(label_truth), std::move(compat));
}

// ---- Writing ------------------------------------------------------------------

std::string render_triples(const KnowledgeGraph& kg) {
  const auto& v = kg.vocab();
  std::string out;
  for (const auto& f : kg.facts()) {
    for (const auto& c : f.confidences) {
      out += v.entities.name(f.triple.subject.value);
      out += '\t';
      out += v.relations.name(f.triple.relation.value);
      out += '\t';
      out += v.entities.name(f.triple.object.value);
      out += '\t';
      out += format_double(c.value);
      out += '\t';
      out += c.source;
      out += '\n';
    }
  }
  return out;
}

std::string render_labels(const KnowledgeGraph& kg) {
  const auto& v = kg.vocab();
  std::string out;
  for (const auto& l : kg.labels()) {
    for (const auto& c : l.confidences) {
      out += v.entities.name(l.entity.value) + '\t' + v.labels.name(l.label.value) + '\t' +
             format_double(c.value) + '\t' + c.source + '\n';
    }
  }
  return out;
}

std::string render_truth(const KnowledgeGraph& kg) {
  const auto& v = kg.vocab();
  std::string out;
  if (!kg.truth()) return out;
  for (const auto& f : kg.facts()) {
    auto it = kg.truth()->find(f.triple);
    if (it == kg.truth()->end()) continue;
    out += v.entities.name(f.triple.subject.value) + '\t' + v.relations.name(f.triple.relation.value) + '\t' +
           v.entities.name(f.triple.object.value) + '\t' + std::to_string(it->second) + '\n';
  }
  return out;
}

std::string render_compat(const KnowledgeGraph& kg) {
  const auto& v = kg.vocab();
  std::string out;
  for (const auto& f : kg.facts()) {
    auto it = kg.compat().find(f.triple);
    if (it == kg.compat().end()) continue;
    out += v.entities.name(f.triple.subject.value) + '\t' + v.relations.name(f.triple.relation.value) + '\t' +
           v.entities.name(f.triple.object.value) + '\t' + (it->second ? "1" : "0") + '\n';
  }
  return out;
}

void write_ontology(const KnowledgeGraph& kg, const fs::path& dir) {
  const auto& v = kg.vocab();
  const auto& o = kg.ontology();
  auto rel = [&](RelationId r) { return v.relations.name(r.value); };
  auto lbl = [&](LabelId l) { return v.labels.name(l.value); };
  std::string dom, rng, sub, rsub, mut, rmut, inv, same;
  for (const auto& [r, l] : o.dom) dom += rel(r) + '\t' + lbl(l) + '\n';
  for (const auto& [r, l] : o.rng) rng += rel(r) + '\t' + lbl(l) + '\n';
  for (const auto& [c, p] : o.sub) sub += lbl(c) + '\t' + lbl(p) + '\n';
  for (const auto& [a, b] : o.rsub) rsub += rel(a) + '\t' + rel(b) + '\n';
  for (const auto& [a, b] : o.mut) mut += lbl(a) + '\t' + lbl(b) + '\n';
  for (const auto& [a, b] : o.rmut) rmut += rel(a) + '\t' + rel(b) + '\n';
  for (const auto& [a, b] : o.inv) inv += rel(a) + '\t' + rel(b) + '\n';
  for (const auto& s : o.sameent) {
    same += v.entities.name(s.first.value) + '\t' + v.entities.name(s.second.value) + '\t' +
            format_double(s.score) + '\n';
  }
  write_file_atomic(dir / "dom.tsv", dom);
  write_file_atomic(dir / "rng.tsv", rng);
  write_file_atomic(dir / "sub.tsv", sub);
  write_file_atomic(dir / "rsub.tsv", rsub);
  write_file_atomic(dir / "mut.tsv", mut);
  write_file_atomic(dir / "rmut.tsv", rmut);
  write_file_atomic(dir / "inv.tsv", inv);
  write_file_atomic(dir / "sameent.tsv", same);
}

void write_kg(const KnowledgeGraph& kg, const fs::path& dir) {
  write_file_atomic(dir / "triples.tsv", render_triples(kg));
  write_file_atomic(dir / "labels.tsv", render_labels(kg));
  write_ontology(kg, dir / "ontology");
  if (kg.truth()) {
    write_file_atomic(dir / "truth.tsv", render_truth(kg));
  }
  if (!kg.compat().empty()) {
    write_file_atomic(dir / "noise.tsv", render_compat(kg));
  }
}

// ---- Splits -------------------------------------------------------------------

std::size_t EvalSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const EvalItem& i) { return i.gold == 1; }));
}

KgSplit split_kg(const KnowledgeGraph& kg, const SplitSpec& spec) {
  if (!(spec.train > 0 && spec.valid > 0 && spec.test > 0)) {
    throw ConfigError("split fractions must all be positive");
  }
  if (std::abs(spec.train + spec.valid + spec.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  if (!kg.truth()) {
    throw DataError("split requires gold truth labels");
  }
  const auto n = kg.facts().size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_stream(spec.seed, "split");
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(spec.train * static_cast<double>(n)));
  const auto n_valid =
      std::min(n - n_train, static_cast<std::size_t>(std::llround(spec.valid * static_cast<double>(n))));

  auto gold_of = [&](const Triple& t) {
    auto it = kg.truth()->find(t);
    if (it == kg.truth()->end()) {
      throw DataError("no truth label for " + kg.describe(t));
    }
    return it->second;
  };

  std::vector<CandidateFact> train_facts;
  TruthMap train_truth;
  CompatMap train_compat;
  KgSplit out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = kg.facts()[order[i]];
    if (i < n_train) {
      train_facts.push_back(f);
      train_truth[f.triple] = gold_of(f.triple);
      if (auto it = kg.compat().find(f.triple); it != kg.compat().end()) {
        train_compat.insert(*it);
      }
    } else if (i < n_train + n_valid) {
      out.valid.items.push_back({f, gold_of(f.triple)});
    } else {
      out.test.items.push_back({f, gold_of(f.triple)});
    }
  }
  out.train = KnowledgeGraph(kg.vocab_ptr(), std::move(train_facts),
                             std::vector<CandidateLabel>(kg.labels().begin(), kg.labels().end()), kg.ontology(),
                             std::move(train_truth), kg.label_truth(), std::move(train_compat));
  return out;
}

std::pair<EvalSet, EvalSet> split_halves_stratified(const EvalSet& set, std::uint64_t seed) {
  std::vector<const EvalItem*> pos, neg;
  for (const auto& item : set.items) {
    (item.gold == 1 ? pos : neg).push_back(&item);
  }
  auto rng = make_stream(seed, "halves");
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::pair<EvalSet, EvalSet> out;
  auto deal = [&](const std::vector<const EvalItem*>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      (i < v.size() / 2 ? out.first : out.second).items.push_back(*v[i]);
    }
  };
  deal(pos);
  deal(neg);
  return out;
}

// ---- SAMEENT -------------------------------------------------------------------

namespace {

struct RelationProfile {
  std::vector<std::vector<std::uint32_t>> head;  // sorted relation ids per entity as subject
  std::vector<std::vector<std::uint32_t>> tail;
};

RelationProfile build_profile(const KnowledgeGraph& kg) {
  RelationProfile p;
  p.head.resize(kg.num_entities());
  p.tail.resize(kg.num_entities());
  for (const auto& f : kg.facts()) {
    p.head[f.triple.subject.value].push_back(f.triple.relation.value);
    p.tail[f.triple.object.value].push_back(f.triple.relation.value);
  }
  auto normalize = [](auto& sets) {
    for (auto& s : sets) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  };
  normalize(p.head);
  normalize(p.tail);
  return p;
}

double jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.empty() && b.empty()) {
    return 0.0;
  }
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double profile_score(const RelationProfile& p, std::uint32_t a, std::uint32_t b) {
  return (jaccard(p.head[a], p.head[b]) + jaccard(p.tail[a], p.tail[b])) / 2.0;
}

}  // namespace

double jaccard_sameent(const KnowledgeGraph& kg, EntityId a, EntityId b) {
  if (a.value >= kg.num_entities() || b.value >= kg.num_entities()) {
    throw ReferenceError("jaccard_sameent: unknown entity id");
  }
  return profile_score(build_profile(kg), a.value, b.value);
}

std::vector<SameEntity> generate_sameent(const KnowledgeGraph& kg, std::size_t k) {
  if (k == 0) {
    return {};
  }
  const auto profile = build_profile(kg);
  // Candidate pairs share at least one relation id in the same role.
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_head, by_tail;
  for (std::uint32_t e = 0; e < profile.head.size(); ++e) {
    for (auto r : profile.head[e]) by_head[r].push_back(e);
    for (auto r : profile.tail[e]) by_tail[r].push_back(e);
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<SameEntity> scored;
  auto visit = [&](const std::unordered_map<std::uint32_t, std::vector<std::uint32_t>>& index) {
    for (const auto& [r, ents] : index) {
      for (std::size_t i = 0; i < ents.size(); ++i) {
        for (std::size_t j = i + 1; j < ents.size(); ++j) {
          auto a = std::min(ents[i], ents[j]);
          auto b = std::max(ents[i], ents[j]);
          if (!seen.insert((std::uint64_t{a} << 32) | b).second) continue;
          double s = profile_score(profile, a, b);
          if (s > 0.0) scored.push_back({EntityId{a}, EntityId{b}, s});
        }
      }
    }
  };
  visit(by_head);
  visit(by_tail);
  auto better = [](const SameEntity& x, const SameEntity& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::pair{x.first, x.second} < std::pair{y.first, y.second};
  };
  if (scored.size() > k) {
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
    scored.resize(k);
  } else {
    std::sort(scored.begin(), scored.end(), better);
  }
  return scored;
}

}  // namespace kgrefine
