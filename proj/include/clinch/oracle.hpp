#pragma once

// Brute-force ground truth for small instances. Nothing in here shares code
// paths with the engine's matching queries or the verifier's path search;
// it enumerates.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "clinch/core.hpp"
#include "clinch/engine.hpp"
#include "clinch/flowmatch.hpp"
#include "clinch/verifier.hpp"

namespace clinch {

class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::uint64_t kMaxDominanceAssignments = 1u << 20;
inline constexpr std::size_t kMaxPathEnumerationAgents = 5;
inline constexpr std::size_t kMaxMatchingEnumerationSide = 4;

// An alternative (M', P') that weakly improves every bidder and the
// auctioneer, strictly for `strict_agent` (or for the auctioneer when empty).
struct DominanceCertificate {
  std::map<ItemId, AgentId> alt_assignment;
  std::vector<Rational> alt_payments;
  std::optional<AgentId> strict_agent;

  [[nodiscard]] std::string strict_party() const {
    return strict_agent ? "agent " + std::to_string(strict_agent->value) : "auctioneer";
  }
};

// Re-checks a certificate from scratch: interests respected, P'_a <= b_a,
// nobody worse off, and the named party strictly better off.
inline bool certificate_holds(const Instance& inst, const Allocation& alloc, const DominanceCertificate& cert) {
  const std::size_t n = inst.agent_count();
  if (cert.alt_payments.size() != n) return false;
  std::vector<int> held(n, 0);
  for (const auto& [t, a] : cert.alt_assignment) {
    if (!inst.agent(a).interested_in(t)) return false;
    ++held[a.index()];
  }
  Rational old_revenue;
  Rational new_revenue;
  bool strict = false;
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId a = AgentId::from_index(i);
    const auto& spec = inst.agents[i];
    if (cert.alt_payments[i] > spec.budget) return false;
    const Rational before = utility(inst, alloc, a);
    const Rational after = Rational(held[i]) * spec.value - cert.alt_payments[i];
    if (after < before) return false;
    if (cert.strict_agent == a && after > before) strict = true;
    old_revenue += alloc.payments[i];
    new_revenue += cert.alt_payments[i];
  }
  if (new_revenue < old_revenue) return false;
  if (!cert.strict_agent) strict = new_revenue > old_revenue;
  return strict;
}

// Searches every alternative assignment M' (each item to an interested
// agent or unsold) in lexicographic order, item 1 most significant and
// "unsold" before any agent. For a fixed M' the most the auctioneer can
// collect while keeping every agent at its old utility u_a and within its
// budget is the sum of min(b_a, M'_a v_a - u_a); payments may be negative.
// M' dominates iff that sum beats the old revenue, or ties it while some
// agent's budget cap binds (that agent keeps the difference).
inline std::optional<DominanceCertificate> dominance_oracle(const Instance& inst, const Allocation& alloc) {
  const std::size_t n = inst.agent_count();
  const std::size_t m = inst.item_count();

  std::vector<std::vector<std::optional<AgentId>>> options(m);
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < m; ++j) {
    options[j].push_back(std::nullopt);
    for (const auto& a : inst.agents) {
      if (a.interested_in(ItemId::from_index(j))) options[j].emplace_back(a.id);
    }
    total *= options[j].size();
    if (total > kMaxDominanceAssignments) throw SizeGuardError("dominance search space too large");
  }

  std::vector<Rational> old_utility(n);
  for (std::size_t i = 0; i < n; ++i) old_utility[i] = utility(inst, alloc, AgentId::from_index(i));
  const Rational old_revenue = alloc.revenue();

  std::vector<std::size_t> choice(m, 0);
  while (true) {
    std::vector<int> held(n, 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (const auto& a = options[j][choice[j]]) ++held[a->index()];
    }
    Rational best_revenue;
    std::vector<Rational> pay(n);
    std::optional<AgentId> slack_agent;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational room = Rational(held[i]) * inst.agents[i].value - old_utility[i];
      pay[i] = std::min(inst.agents[i].budget, room);
      if (inst.agents[i].budget < room && !slack_agent) slack_agent = AgentId::from_index(i);
      best_revenue += pay[i];
    }
    const bool auctioneer_gains = best_revenue > old_revenue;
    if (auctioneer_gains || (best_revenue == old_revenue && slack_agent)) {
      DominanceCertificate cert;
      for (std::size_t j = 0; j < m; ++j) {
        if (const auto& a = options[j][choice[j]]) cert.alt_assignment[ItemId::from_index(j)] = *a;
      }
      cert.alt_payments = std::move(pay);
      if (!auctioneer_gains) cert.strict_agent = slack_agent;
      return cert;
    }

    // odometer, last item fastest
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (++choice[j] < options[j].size()) break;
      choice[j] = 0;
      if (j == 0) return std::nullopt;
    }
    if (m == 0) return std::nullopt;
  }
}

// Every simple alternating path that satisfies the trading conditions,
// found by depth-first search from each agent, in witness order.
inline std::vector<TradingPath> enumerate_trading_paths(const Instance& inst, const Allocation& alloc) {
  if (inst.agent_count() > kMaxPathEnumerationAgents) throw SizeGuardError("too many agents to enumerate paths");
  std::vector<TradingPath> found;
  TradingPath path;
  std::vector<bool> on_path(inst.agent_count(), false);

  std::function<void()> extend = [&]() {
    const AgentId at = path.agents.back();
    for (const auto& [t, owner] : alloc.assignment) {
      if (owner != at) continue;
      for (const auto& next : inst.agents) {
        if (on_path[next.id.index()] || !next.interested_in(t)) continue;
        path.items.push_back(t);
        path.agents.push_back(next.id);
        on_path[next.id.index()] = true;
        const AgentSpec& first = inst.agent(path.agents.front());
        if (next.value > first.value && alloc.remaining(next.id) >= first.value) found.push_back(path);
        extend();
        on_path[next.id.index()] = false;
        path.agents.pop_back();
        path.items.pop_back();
      }
    }
  };

  for (const auto& a : inst.agents) {
    path = TradingPath{{a.id}, {}};
    on_path.assign(inst.agent_count(), false);
    on_path[a.id.index()] = true;
    extend();
  }
  std::sort(found.begin(), found.end(), witness_less);
  return found;
}

// Every B-matching of the graph, the empty one included.
inline std::vector<BMatching> enumerate_bmatchings(const InterestGraph& g) {
  validate_graph(g);
  if (g.agents.size() > kMaxMatchingEnumerationSide || g.items.size() > kMaxMatchingEnumerationSide) {
    throw SizeGuardError("graph too large to enumerate matchings");
  }
  std::map<AgentId, int> capacity;
  for (const auto& s : g.agents) capacity[s.id] = s.capacity;

  std::vector<std::vector<std::optional<AgentId>>> options;
  for (ItemId t : g.items) {
    std::vector<std::optional<AgentId>> opts{std::nullopt};
    for (const auto& [a, u] : g.edges) {
      if (u == t) opts.emplace_back(a);
    }
    options.push_back(std::move(opts));
  }

  std::vector<BMatching> out;
  BMatching current;
  std::function<void(std::size_t)> place = [&](std::size_t j) {
    if (j == g.items.size()) {
      out.push_back(current);
      return;
    }
    for (const auto& a : options[j]) {
      if (!a) {
        place(j + 1);
        continue;
      }
      if (current.count(*a) >= capacity[*a]) continue;
      current.assigned[g.items[j]] = *a;
      ++current.per_agent_count[*a];
      place(j + 1);
      current.assigned.erase(g.items[j]);
      if (--current.per_agent_count[*a] == 0) current.per_agent_count.erase(*a);
    }
  };
  place(0);
  return out;
}

struct DeviationOutcome {
  Rational truthful_utility;
  Rational deviated_utility;
};

// Runs the auction with and without the misreport and scores both outcomes
// with the agent's true value.
inline DeviationOutcome deviation_test(const Instance& inst, AgentId agent, const Rational& reported_value,
                                       const EngineOptions& opts = {}) {
  if (reported_value.sign() <= 0) throw std::invalid_argument("reported value must be positive");
  const Allocation truthful = run_auction(inst, opts);
  Instance lie = inst;
  lie.agents.at(agent.index()).value = reported_value;
  const Allocation deviated = run_auction(lie, opts);
  return {utility(inst, truthful, agent), utility(inst, deviated, agent)};
}

// Misreports worth trying: every budget quotient b_i / k (k <= m), every
// value, the prices paid in the truthful run, their pairwise midpoints,
// and points below the lowest and above the highest.
inline std::vector<Rational> misreport_grid(const Instance& inst, const Allocation& truthful) {
  std::set<Rational> points;
  const long m = static_cast<long>(inst.item_count());
  for (const auto& a : inst.agents) {
    points.insert(a.value);
    for (long k = 1; k <= m; ++k) points.insert(a.budget / Rational(k));
  }
  for (const auto& e : truthful.trace) points.insert(e.price);
  std::erase_if(points, [](const Rational& r) { return r.sign() <= 0; });
  if (points.empty()) points.insert(Rational(1));

  std::vector<Rational> grid(points.begin(), points.end());
  std::set<Rational> out(points.begin(), points.end());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) out.insert((grid[i] + grid[i + 1]) / Rational(2));
  out.insert(grid.front() / Rational(2));
  out.insert(grid.back() + Rational(1));
  return {out.begin(), out.end()};
}

}  // namespace clinch
