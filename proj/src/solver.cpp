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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psl.hpp"

namespace kgrefine {

double lukasiewicz_body(std::span<const double> values) {
  if (values.empty()) {
    throw ContractError("lukasiewicz_body: empty conjunction");
  }
  double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return std::max(0.0, sum - static_cast<double>(values.size() - 1));
}

double hinge_distance(const GroundRule& rule, std::span<const double> x) {
  std::vector<double> vals(rule.observed);
  for (auto a : rule.body) vals.push_back(x[a]);
  const double body = lukasiewicz_body(vals);
  const double head = rule.negated_head ? 1.0 - x[rule.head] : x[rule.head];
  return std::max(0.0, body - head);
}

namespace {

// A rule as w * max(0, constant + sum coef_i * x_i)^p. For the template set
// here this is exactly max(0, body - head).
struct Potential {
  double constant = 0.0;
  double weight = 1.0;
  std::vector<std::uint32_t> atoms;
  std::vector<double> coefs;
};

std::vector<Potential> linearize(const GroundProgram& program) {
  std::vector<Potential> out;
  out.reserve(program.rules().size());
  for (const auto& r : program.rules()) {
    Potential p;
    p.weight = r.weight;
    const auto n = r.observed.size() + r.body.size();
    p.constant = std::accumulate(r.observed.begin(), r.observed.end(), 0.0) - static_cast<double>(n - 1);
    auto add = [&](std::uint32_t atom, double c) {
      for (std::size_t i = 0; i < p.atoms.size(); ++i) {
        if (p.atoms[i] == atom) {
          p.coefs[i] += c;
          return;
        }
      }
      p.atoms.push_back(atom);
      p.coefs.push_back(c);
    };
    for (auto a : r.body) add(a, 1.0);
    if (r.negated_head) {
      p.constant -= 1.0;
      add(r.head, 1.0);
    } else {
      add(r.head, -1.0);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline double linear_value(const Potential& p, std::span<const double> x) {
  double v = p.constant;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) v += p.coefs[i] * x[p.atoms[i]];
  return v;
}

double objective_of(const GroundProgram& program, const std::vector<Potential>& pots, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t j = 0; j < pots.size(); ++j) {
    const double d = std::max(0.0, linear_value(pots[j], x));
    const double term = pots[j].weight * (program.hinge_power == 2 ? d * d : d);
    if (!std::isfinite(term)) {
      throw NumericError("non-finite potential at rule #" + std::to_string(j) + " (" +
                         template_name(program.rules()[j].tmpl) + ")");
    }
    total += term;
  }
  return total;
}

void subgradient_of(const GroundProgram& program, const std::vector<Potential>& pots, std::span<const double> x,
                    std::span<double> g) {
  std::fill(g.begin(), g.end(), 0.0);
  for (const auto& p : pots) {
    const double d = linear_value(p, x);
    if (d <= 0.0) continue;
    const double scale = p.weight * (program.hinge_power == 2 ? 2.0 * d : 1.0);
    for (std::size_t i = 0; i < p.atoms.size(); ++i) g[p.atoms[i]] += scale * p.coefs[i];
  }
}

// Tracks the incumbent; the reported trace is non-increasing.
struct Incumbent {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> trace;

  void offer(std::span<const double> cand, double v) {
    if (v < value) {
      value = v;
      x.assign(cand.begin(), cand.end());
    }
    trace.push_back(value);
  }

  bool stalled(const SolverConfig& cfg) const {
    const auto k = trace.size();
    const auto window = static_cast<std::size_t>(std::max(1, cfg.patience));
    if (k <= window) return false;
    return trace[k - 1 - window] - trace[k - 1] < cfg.tolerance;
  }
};

void solve_subgradient(const GroundProgram& program, const std::vector<Potential>& pots, Incumbent& inc,
                       int& iterations) {
  const auto& cfg = program.solver;
  const auto n = program.num_atoms();
  std::vector<double> x = inc.x;
  std::vector<double> g(n);
  // Diagonal scaling: each coordinate's step is normalized by the total
  // weight of the potentials touching it.
  std::vector<double> mass(n, 0.0);
  for (const auto& p : pots) {
    for (std::size_t i = 0; i < p.atoms.size(); ++i) mass[p.atoms[i]] += p.weight * std::abs(p.coefs[i]);
  }
  for (auto& m : mass) m = std::max(1.0, m);
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    subgradient_of(program, pots, x, g);
    const double step = cfg.step_size / std::sqrt(static_cast<double>(k));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::clamp(x[i] - step * g[i] / mass[i], 0.0, 1.0);
    }
    inc.offer(x, objective_of(program, pots, x));
    iterations = k;
    if (inc.stalled(cfg)) break;
  }
}

// Consensus ADMM: one local copy per potential, closed-form proximal steps,
// box-projected consensus average.
void solve_admm(const GroundProgram& program, const std::vector<Potential>& pots, Incumbent& inc,
                int& iterations) {
  const auto& cfg = program.solver;
  const double rho = cfg.admm_rho;
  const auto n = program.num_atoms();
  std::vector<double> z = inc.x;
  std::vector<std::vector<double>> local(pots.size()), dual(pots.size());
  std::vector<double> count(n, 0.0);
  for (std::size_t j = 0; j < pots.size(); ++j) {
    local[j].resize(pots[j].atoms.size());
    dual[j].assign(pots[j].atoms.size(), 0.0);
    for (std::size_t i = 0; i < pots[j].atoms.size(); ++i) {
      local[j][i] = z[pots[j].atoms[i]];
      count[pots[j].atoms[i]] += 1.0;
    }
  }
  std::vector<double> sum(n);
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    for (std::size_t j = 0; j < pots.size(); ++j) {
      const auto& p = pots[j];
      auto& x = local[j];
      const auto m = p.atoms.size();
      double lin = p.constant;
      double norm2 = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        x[i] = z[p.atoms[i]] - dual[j][i];
        lin += p.coefs[i] * x[i];
        norm2 += p.coefs[i] * p.coefs[i];
      }
      if (lin <= 0.0 || norm2 == 0.0) continue;
      double shift;  // move along -coefs by shift
      if (program.hinge_power == 2) {
        shift = 2.0 * p.weight * lin / (rho + 2.0 * p.weight * norm2);
      } else {
        shift = p.weight / rho;
        if (lin - shift * norm2 < 0.0) shift = lin / norm2;  // lands on the hinge
      }
      for (std::size_t i = 0; i < m; ++i) x[i] -= shift * p.coefs[i];
    }
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < pots.size(); ++j) {
      for (std::size_t i = 0; i < pots[j].atoms.size(); ++i) sum[pots[j].atoms[i]] += local[j][i] + dual[j][i];
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (count[a] > 0) z[a] = std::clamp(sum[a] / count[a], 0.0, 1.0);
    }
    for (std::size_t j = 0; j < pots.size(); ++j) {
      for (std::size_t i = 0; i < pots[j].atoms.size(); ++i) dual[j][i] += local[j][i] - z[pots[j].atoms[i]];
    }
    inc.offer(z, objective_of(program, pots, z));
    iterations = k;
    if (inc.stalled(cfg)) break;
  }
}

}  // namespace

double program_objective(const GroundProgram& program, std::span<const double> x) {
  return objective_of(program, linearize(program), x);
}

void program_subgradient(const GroundProgram& program, std::span<const double> x, std::span<double> out) {
  subgradient_of(program, linearize(program), x, out);
}

std::optional<double> InferenceResult::rel_score(const Triple& t) const {
  auto it = std::lower_bound(rel_scores.begin(), rel_scores.end(), t,
                             [](const auto& e, const Triple& key) { return e.first < key; });
  if (it == rel_scores.end() || it->first != t) return std::nullopt;
  return it->second;
}

std::optional<double> InferenceResult::lbl_score(EntityId e, LabelId l) const {
  const LabelKey key{e, l};
  auto it = std::lower_bound(lbl_scores.begin(), lbl_scores.end(), key,
                             [](const auto& entry, const LabelKey& k) { return entry.first < k; });
  if (it == lbl_scores.end() || it->first != key) return std::nullopt;
  return it->second;
}

InferenceResult map_inference(const GroundProgram& program) {
  InferenceResult result;
  const auto n = program.num_atoms();
  if (program.solver.max_iterations < 0 || !(program.solver.admm_rho > 0.0) || !(program.solver.step_size > 0.0)) {
    throw ConfigError("invalid solver configuration");
  }
  if (n == 0) {
    return result;
  }
  const auto pots = linearize(program);

  // Start from the strongest positive evidence for each atom.
  std::vector<double> x0(n, 0.0);
  for (const auto& r : program.rules()) {
    if (r.body.empty() && !r.negated_head && !r.observed.empty()) {
      x0[r.head] = std::max(x0[r.head], std::clamp(lukasiewicz_body(r.observed), 0.0, 1.0));
    }
  }
  Incumbent inc{x0, objective_of(program, pots, x0), {}};
  int iterations = 0;
  if (program.solver.method == SolverMethod::kAdmm) {
    solve_admm(program, pots, inc, iterations);
  } else {
    solve_subgradient(program, pots, inc, iterations);
  }

  result.objective = inc.value;
  result.iterations = iterations;
  result.objective_trace = std::move(inc.trace);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& key = program.atoms()[i];
    if (key.kind == AtomKind::kRel) {
      result.rel_scores.emplace_back(key.triple(), inc.x[i]);
    } else {
      result.lbl_scores.emplace_back(LabelKey{EntityId{key.a}, LabelId{key.b}}, inc.x[i]);
    }
  }
  std::sort(result.rel_scores.begin(), result.rel_scores.end());
  std::sort(result.lbl_scores.begin(), result.lbl_scores.end());
  return result;
}

InferenceResult infer(const KnowledgeGraph& kg, const RuleWeights& weights, const FeedbackEvidence* feedback,
                      const SolverConfig& solver) {
  auto program = ground(kg, weights, feedback);
  program.solver = solver;
  return map_inference(program);
}

}  // namespace kgrefine
