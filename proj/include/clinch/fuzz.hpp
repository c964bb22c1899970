#pragma once

// Seeded cross-check harness. Each case draws an instance, runs the
// auction and checks it; the first failing case is written out as an
// instance file that `clinch run` can replay.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clinch/core.hpp"
#include "clinch/engine.hpp"
#include "clinch/flowmatch.hpp"
#include "clinch/generate.hpp"
#include "clinch/io.hpp"
#include "clinch/oracle.hpp"
#include "clinch/verifier.hpp"

namespace clinch {

enum class FuzzMode { Properties, Oracle, Truthfulness };

inline std::optional<FuzzMode> parse_fuzz_mode(const std::string& s) {
  if (s == "properties") return FuzzMode::Properties;
  if (s == "oracle") return FuzzMode::Oracle;
  if (s == "truthfulness") return FuzzMode::Truthfulness;
  return std::nullopt;
}

inline std::optional<Mutation> parse_mutation(const std::string& s) {
  if (s == "none") return Mutation::None;
  if (s == "skip-value-limited-reset") return Mutation::SkipValueLimitedReset;
  if (s == "skip-value-limited-sell") return Mutation::SkipValueLimitedSell;
  if (s == "skip-forced-clinch") return Mutation::SkipForcedClinch;
  return std::nullopt;
}

struct FuzzConfig {
  int cases = 1000;
  int max_agents = 6;
  int max_items = 6;
  std::uint64_t seed = 1;
  FuzzMode mode = FuzzMode::Properties;
  long value_max = 10;
  long budget_max = 20;
  Mutation mutation = Mutation::None;
  std::string artifact_dir = ".";
};

struct FuzzReport {
  int cases_run = 0;
  int cases_passed = 0;
  long checks = 0;
  std::optional<int> failed_case;
  std::string failure;
  std::string artifact;

  [[nodiscard]] bool ok() const { return !failed_case; }
};

// Allocation shaped like a possible outcome but otherwise arbitrary: each
// item goes to a random interested agent (or stays unsold with small
// probability), and each payment is a random multiple of 1/2 in
// [0, min(b_a, M_a v_a)].
inline Allocation random_allocation(const Instance& inst, std::mt19937_64& rng) {
  Allocation alloc;
  std::uniform_int_distribution<int> percent(0, 99);
  for (ItemId t : inst.items) {
    std::vector<AgentId> takers;
    for (const auto& a : inst.agents) {
      if (a.interested_in(t)) takers.push_back(a.id);
    }
    if (takers.empty() || percent(rng) < 10) continue;
    std::uniform_int_distribution<std::size_t> pick(0, takers.size() - 1);
    alloc.assignment[t] = takers[pick(rng)];
  }
  int sequence = 0;
  for (const auto& a : inst.agents) {
    const Rational cap = std::min(a.budget, Rational(alloc.items_held(a.id)) * a.value);
    const long halves = floor_div(cap * Rational(2), Rational(1)).get_si();
    std::uniform_int_distribution<long> pick(0, halves);
    const Rational pay = Rational(pick(rng), 2);
    alloc.payments.push_back(pay);
    alloc.remaining_budgets.push_back(a.budget - pay);
    // spread the payment over the agent's items so the sale list is coherent
    std::vector<ItemId> mine;
    for (const auto& [t, owner] : alloc.assignment) {
      if (owner == a.id) mine.push_back(t);
    }
    for (std::size_t k = 0; k < mine.size(); ++k) {
      alloc.trace.push_back({a.id, mine[k], k == 0 ? pay : Rational(), SaleReason::AvoidClinch, ++sequence});
    }
  }
  return alloc;
}

// Engine output with one item handed to a different interested agent.
// The moved sale is repriced to what the receiver can still afford and at
// most its value, so the result stays budget-feasible and rational; often
// a near miss for the verifier.
inline std::optional<Allocation> nudged_allocation(const Instance& inst, const Allocation& base, std::mt19937_64& rng) {
  std::vector<std::pair<ItemId, AgentId>> moves;
  for (const auto& [t, owner] : base.assignment) {
    for (const auto& a : inst.agents) {
      if (a.id != owner && a.interested_in(t)) moves.emplace_back(t, a.id);
    }
  }
  if (moves.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  const auto [t, to] = moves[pick(rng)];
  Allocation out = base;
  out.assignment[t] = to;
  for (auto& e : out.trace) {
    if (e.item != t) continue;
    out.payments[e.agent.index()] -= e.price;
    out.remaining_budgets[e.agent.index()] += e.price;
    e.agent = to;
    e.price = std::min({e.price, inst.agent(to).value, out.remaining(to)});
    out.payments[to.index()] += e.price;
    out.remaining_budgets[to.index()] -= e.price;
  }
  return out;
}

namespace detail {

struct CaseFailure {
  std::string what;
};

inline void expect(bool cond, long& checks, const std::string& what) {
  ++checks;
  if (!cond) throw CaseFailure{what};
}

inline void check_engine_output(const Instance& inst, const Allocation& alloc, long& checks) {
  expect(unsold_items(inst, alloc).empty(), checks, "items left unsold");
  const auto problems = allocation_violations(inst, alloc);
  expect(problems.empty(), checks, problems.empty() ? "" : "allocation invariant: " + problems.front());
  expect(alloc.revenue().sign() >= 0, checks, "negative revenue");
  for (const auto& a : inst.agents) {
    expect(utility(inst, alloc, a.id).sign() >= 0, checks, "negative utility for agent " + std::to_string(a.id.value));
  }
  const Verdict v = pareto_verify(inst, alloc);
  std::string witness;
  if (v.failure) {
    if (const auto* p = std::get_if<TradingPathFound>(&*v.failure)) witness = " via " + p->path.str();
  }
  expect(v.pareto_optimal, checks, "engine output not Pareto-optimal" + witness);
}

// The dominance oracle and the trading-path verifier must agree, and the
// path finder must report exactly the least enumerated path.
inline void check_equivalences(const Instance& inst, const Allocation& alloc, long& checks, const char* label) {
  // the equivalence is only claimed for budget-feasible allocations
  bool feasible = structural_violations(inst, alloc).empty();
  for (const auto& r : alloc.remaining_budgets) feasible = feasible && r.sign() >= 0;
  expect(feasible, checks, std::string(label) + ": harness built an infeasible allocation");
  const auto cert = dominance_oracle(inst, alloc);
  if (cert) expect(certificate_holds(inst, alloc, *cert), checks, std::string(label) + ": bogus dominance certificate");
  const bool optimal = pareto_verify(inst, alloc).pareto_optimal;
  expect(cert.has_value() != optimal, checks,
         std::string(label) + ": dominance oracle " + (cert ? "found" : "did not find") +
             " an improvement but the verifier says " + (optimal ? "optimal" : "not optimal"));

  const auto all = enumerate_trading_paths(inst, alloc);
  const auto found = find_trading_path(inst, alloc);
  expect(all.empty() != found.has_value(), checks, std::string(label) + ": path enumeration and search disagree");
  if (found) {
    auto least = std::min_element(all.begin(), all.end(), witness_less);
    expect(*least == *found, checks, std::string(label) + ": reported path is not the least witness");
    expect(is_trading_path(inst, alloc, *found), checks, std::string(label) + ": reported path fails the definition");
  }
}

inline void check_matching_oracle(const Instance& inst, std::mt19937_64& rng, long& checks) {
  InterestGraph g;
  std::uniform_int_distribution<int> cap(0, static_cast<int>(inst.item_count()));
  for (const auto& a : inst.agents) g.agents.push_back({a.id, cap(rng)});
  g.items = inst.items;
  for (const auto& a : inst.agents) {
    for (ItemId t : a.interests) g.edges.emplace_back(a.id, t);
  }
  const auto all = enumerate_bmatchings(g);
  int best = 0;
  for (const auto& m : all) best = std::max(best, m.size());
  for (unsigned mask = 0; mask < (1u << g.agents.size()); ++mask) {
    std::set<AgentId> avoid;
    for (std::size_t i = 0; i < g.agents.size(); ++i) {
      if (mask & (1u << i)) avoid.insert(g.agents[i].id);
    }
    int fewest = static_cast<int>(inst.item_count()) + 1;
    for (const auto& m : all) {
      if (m.size() == best) fewest = std::min(fewest, m.size() - items_outside(m, avoid));
    }
    const BMatching got = avoid_matching(g, avoid);
    expect(got.size() == best, checks, "avoid matching is not maximum");
    expect(got.size() - items_outside(got, avoid) == fewest, checks,
           "avoid matching does not minimize the avoided load");
  }
}

inline void check_truthfulness(const Instance& inst, const Allocation& truthful, const EngineOptions& opts,
                               long& checks) {
  const auto grid = misreport_grid(inst, truthful);
  for (const auto& a : inst.agents) {
    const Rational honest = utility(inst, truthful, a.id);
    for (const Rational& lie : grid) {
      Instance shifted = inst;
      shifted.agents[a.id.index()].value = lie;
      const Rational got = utility(inst, run_auction(shifted, opts), a.id);
      expect(got <= honest, checks,
             "agent " + std::to_string(a.id.value) + " gains by reporting " + lie.str() + " (" + got.str() + " > " +
                 honest.str() + ")");
    }
  }
}

}  // namespace detail

// Case i uses generator seed `seed + i`; sizes come from a separate stream
// seeded the same way so a case replays from its instance file alone.
inline FuzzReport run_fuzz(const FuzzConfig& cfg) {
  if (cfg.cases < 0 || cfg.max_agents < 1 || cfg.max_items < 1) throw std::invalid_argument("bad fuzz sizes");
  if (cfg.mode != FuzzMode::Properties &&
      (cfg.max_agents > static_cast<int>(kMaxMatchingEnumerationSide) ||
       cfg.max_items > static_cast<int>(kMaxMatchingEnumerationSide))) {
    throw SizeGuardError("oracle and truthfulness modes allow at most 4 agents and 4 items");
  }

  FuzzReport report;
  EngineOptions opts;
  opts.check_sellability = true;
  opts.mutation = cfg.mutation;

  for (int i = 0; i < cfg.cases; ++i) {
    const std::uint64_t case_seed = cfg.seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(case_seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> agents(1, cfg.max_agents);
    std::uniform_int_distribution<int> items(1, cfg.max_items);
    const GenParams params{agents(rng), items(rng), case_seed, cfg.value_max, cfg.budget_max};
    const Instance inst = generate_instance(params);
    ++report.cases_run;

    std::optional<std::string> failure;
    try {
      const Allocation alloc = run_auction(inst, opts);
      detail::check_engine_output(inst, alloc, report.checks);
      if (cfg.mode == FuzzMode::Oracle) {
        detail::check_equivalences(inst, alloc, report.checks, "engine output");
        detail::check_equivalences(inst, random_allocation(inst, rng), report.checks, "random allocation");
        if (auto nudged = nudged_allocation(inst, alloc, rng)) {
          detail::check_equivalences(inst, *nudged, report.checks, "nudged allocation");
        }
        detail::check_matching_oracle(inst, rng, report.checks);
      } else if (cfg.mode == FuzzMode::Truthfulness) {
        detail::check_truthfulness(inst, alloc, opts, report.checks);
      }
    } catch (const detail::CaseFailure& f) {
      failure = f.what;
    } catch (const InvariantViolation& e) {
      failure = std::string("engine invariant: ") + e.what();
    }
    if (!failure) {
      ++report.cases_passed;
    } else {
      report.failed_case = i;
      report.failure = *failure;
      std::filesystem::create_directories(cfg.artifact_dir);
      const auto path = std::filesystem::path(cfg.artifact_dir) / ("fuzz-case-" + std::to_string(i) + ".json");
      std::ofstream(path) << render(instance_to_json(name_instance(inst)));
      report.artifact = path.string();
      break;
    }
  }
  return report;
}

}  // namespace clinch
