#pragma once

// The budget-constrained clinching auction for single-valued combinatorial
// bidders.
//
// The price p rises from zero. At every price each agent has a demand D
// (items it would buy at p within budget and supply), a demand D+ just
// above p, and a current demand d that is D while its flag H is set and D+
// once cleared. Items are clinched whenever the other active agents can no
// longer absorb the unsold supply, which is measured with S-avoid matchings
// on the interest graph.

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clinch/core.hpp"
#include "clinch/flowmatch.hpp"

namespace clinch {

// min(m, floor(budget / price)) while price <= value, 0 above the value.
// At price zero the budget is irrelevant and demand is the full supply.
inline int demand(const Rational& price, const Rational& budget, int m, const Rational& value) {
  if (price > value) return 0;
  if (price.is_zero()) return m;
  const BigInt q = floor_div(budget, price);
  return q < m ? static_cast<int>(q.get_si()) : m;
}

// Demand at price + epsilon: floor(budget / price), one less when the
// quotient is exact, capped by m; zero once price reaches the value.
inline int demand_plus(const Rational& price, const Rational& budget, int m, const Rational& value) {
  if (price >= value) return 0;
  if (price.is_zero()) return budget.sign() > 0 ? m : 0;
  BigInt q = floor_div(budget, price);
  if (Rational(q) * price == budget) q -= 1;
  return q < m ? static_cast<int>(q.get_si()) : m;
}

struct AgentDemand {
  int full = 0;      // D
  int plus = 0;      // D+
  int current = 0;   // d
  bool active = false;
  bool value_limited = false;
};

struct DemandView {
  std::vector<AgentDemand> agents;  // indexed by agent index

  [[nodiscard]] const AgentDemand& at(AgentId a) const { return agents.at(a.index()); }

  [[nodiscard]] std::vector<AgentId> active() const {
    std::vector<AgentId> out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (agents[i].active) out.push_back(AgentId::from_index(i));
    }
    return out;
  }
  [[nodiscard]] std::set<AgentId> value_limited() const {
    std::set<AgentId> out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (agents[i].value_limited) out.insert(AgentId::from_index(i));
    }
    return out;
  }
};

inline DemandView demand_view(const AuctionState& s, const Instance& inst) {
  DemandView view;
  const int m = s.unsold_count();
  view.agents.reserve(inst.agent_count());
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    const auto& spec = inst.agents[i];
    AgentDemand d;
    d.full = demand(s.price, s.remaining_budgets[i], m, spec.value);
    d.plus = demand_plus(s.price, s.remaining_budgets[i], m, spec.value);
    d.current = s.flags[i] ? d.full : d.plus;
    d.active = d.current > 0;
    d.value_limited = d.active && spec.value == s.price;
    view.agents.push_back(d);
  }
  return view;
}

// Active agents with capacity d_a against the unsold items.
inline InterestGraph interest_graph(const AuctionState& s, const Instance& inst, const DemandView& view) {
  InterestGraph g;
  g.items.assign(s.unsold.begin(), s.unsold.end());
  std::vector<bool> open(inst.item_count() + 1, false);
  for (ItemId t : g.items) open[static_cast<std::size_t>(t.value)] = true;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    const auto& d = view.agents[i];
    if (!d.active) continue;
    const auto& spec = inst.agents[i];
    g.agents.push_back({spec.id, d.current});
    for (ItemId t : spec.interests) {
      if (open[static_cast<std::size_t>(t.value)]) g.edges.emplace_back(spec.id, t);
    }
  }
  return g;
}

// The first price above the current one at which some active agent's D+
// drops. With H cleared an active agent's D+ equals c > 0, and its next
// drop is at budget / c (the quotient turns exact) or at its value,
// whichever comes first.
inline Rational next_price(const AuctionState& s, const Instance& inst) {
  const DemandView view = demand_view(s, inst);
  std::optional<Rational> best;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    if (!view.agents[i].active) continue;
    const int c = view.agents[i].plus;
    Rational q = inst.agents[i].value;
    if (c > 0) q = std::min(q, s.remaining_budgets[i] / Rational(c));
    if (!best || q < *best) best = q;
  }
  if (!best) throw std::logic_error("next_price called with no active agents");
  return *best;
}

// Sells to `targets` at the current price until the other active agents
// can absorb every unsold item (B(not targets) >= m). Each round takes a
// fresh targets-avoid matching and sells its least (agent, item) pair
// inside the targets; budgets and demands are recomputed between sales.
template <class OnSale>
std::vector<SaleEvent> sell_to(AuctionState& state, const Instance& inst, const std::set<AgentId>& targets,
                               SaleReason reason, OnSale&& on_sale) {
  std::vector<SaleEvent> sold;
  if (targets.empty()) return sold;
  while (true) {
    const DemandView view = demand_view(state, inst);
    const InterestGraph g = interest_graph(state, inst, view);
    std::set<AgentId> avoid;
    for (const auto& slot : g.agents) {
      if (targets.contains(slot.id)) avoid.insert(slot.id);
    }
    const BMatching y = avoid_matching(g, avoid);
    if (items_outside(y, avoid) >= state.unsold_count()) return sold;

    std::optional<std::pair<AgentId, ItemId>> pick;
    for (const auto& [t, a] : y.assigned) {
      if (avoid.contains(a) && (!pick || std::pair(a, t) < *pick)) pick = std::pair(a, t);
    }
    if (!pick) throw InvariantViolation("avoid matching is short of the supply but assigns nothing to targets");

    const auto [a, t] = *pick;
    state.unsold.erase(t);
    state.remaining_budgets[a.index()] -= state.price;
    const int seq = static_cast<int>(state.sales.size()) + 1;
    state.sales.push_back({a, t, state.price, reason, seq});
    sold.push_back(state.sales.back());
    on_sale(state.sales.back());
  }
}

inline std::vector<SaleEvent> sell_to(AuctionState& state, const Instance& inst, const std::set<AgentId>& targets,
                                      SaleReason reason) {
  return sell_to(state, inst, targets, reason, [](const SaleEvent&) {});
}

// Test hooks that break the mechanism on purpose, so the fuzz harness can
// show that it notices.
enum class Mutation {
  None,
  SkipValueLimitedReset,  // keep H set for value-limited agents after Sell(V)
  SkipValueLimitedSell,   // never sell to value-limited agents
  SkipForcedClinch,       // never run the B(not {a}) < m clinch scan
};

inline bool sellability_check_default() {
  const char* env = std::getenv("CLINCH_SELLABILITY_CHECK");
  if (env == nullptr) return true;
  const std::string_view v(env);
  return !(v == "0" || v == "off" || v == "false" || v == "no");
}

struct EngineOptions {
  bool check_sellability = sellability_check_default();
  Mutation mutation = Mutation::None;
};

enum class TraceKind { Sale, PriceChange, FlagCleared };

struct TraceEvent {
  TraceKind kind = TraceKind::Sale;
  Rational price;
  std::optional<AgentId> agent;
  std::optional<ItemId> item;
  std::optional<SaleReason> reason;
};

struct RunResult {
  Allocation allocation;
  std::vector<TraceEvent> events;
  int price_steps = 0;
};

namespace detail {

class ClinchingRun {
 public:
  ClinchingRun(const Instance& inst, const EngineOptions& opts)
      : inst_(inst), opts_(opts), state_(AuctionState::initial(inst)), uncapped_(inst.agent_count()) {
    refresh_all();
  }

  RunResult run() {
    while (true) {
      // A price step and the flag reset that follows it form one event:
      // with H raised every d_a equals the D+ it had before the step.
      DemandView view = current_view();
      for (std::size_t i = 0; i < inst_.agent_count(); ++i) {
        if (view.agents[i].full > 0) state_.flags[i] = true;
      }
      view = current_view();
      if (view.active().empty()) break;
      assert_sellable("price step");

      if (opts_.mutation != Mutation::SkipValueLimitedSell) {
        sell(view.value_limited(), SaleReason::ValueLimitedClinch);
      }
      if (opts_.mutation != Mutation::SkipValueLimitedReset) {
        for (AgentId a : current_view().value_limited()) clear_flag(a);
      }

      while (true) {
        view = current_view();
        const auto active = view.active();
        if (active.empty()) break;
        if (opts_.mutation != Mutation::SkipForcedClinch) {
          if (auto a = first_forced(view)) {
            sell({*a}, SaleReason::AvoidClinch);
            continue;
          }
        }
        auto flagged = std::find_if(active.begin(), active.end(),
                                    [&](AgentId a) { return state_.flags[a.index()]; });
        if (flagged == active.end()) break;
        clear_flag(*flagged);
      }

      if (current_view().active().empty()) break;
      state_.price = next_price(state_, inst_);
      refresh_all();
      ++result_.price_steps;
      result_.events.push_back({TraceKind::PriceChange, state_.price, {}, {}, {}});
    }

    if (!state_.unsold.empty()) {
      throw InvariantViolation("auction ended with " + std::to_string(state_.unsold.size()) + " unsold items");
    }
    assemble();
    return std::move(result_);
  }

 private:
  // D and D+ without the supply cap; they change only with the price or
  // the agent's own budget, while the cap m is applied per view.
  struct Uncapped {
    int full = 0;
    int plus = 0;
  };

  void refresh(std::size_t i) {
    constexpr int kNoCap = std::numeric_limits<int>::max();
    const auto& spec = inst_.agents[i];
    uncapped_[i] = {demand(state_.price, state_.remaining_budgets[i], kNoCap, spec.value),
                    demand_plus(state_.price, state_.remaining_budgets[i], kNoCap, spec.value)};
  }
  void refresh_all() {
    for (std::size_t i = 0; i < inst_.agent_count(); ++i) refresh(i);
  }

  [[nodiscard]] DemandView current_view() const {
    const int m = state_.unsold_count();
    DemandView v;
    v.agents.reserve(inst_.agent_count());
    for (std::size_t i = 0; i < inst_.agent_count(); ++i) {
      AgentDemand d;
      d.full = std::min(m, uncapped_[i].full);
      d.plus = std::min(m, uncapped_[i].plus);
      d.current = state_.flags[i] ? d.full : d.plus;
      d.active = d.current > 0;
      d.value_limited = d.active && inst_.agents[i].value == state_.price;
      v.agents.push_back(d);
    }
    return v;
  }

  // Least active agent whose B(not {a}) falls short of the unsold count.
  std::optional<AgentId> first_forced(const DemandView& view) {
    std::vector<int> key;
    key.push_back(state_.unsold_count());
    for (const auto& d : view.agents) key.push_back(d.current);
    if (key == no_forced_key_) return std::nullopt;

    const InterestGraph g = interest_graph(state_, inst_, view);
    const ExclusionMatcher matcher(g);
    const int m = state_.unsold_count();
    for (const auto& slot : g.agents) {
      if (matcher.max_matching_without(slot.id) < m) return slot.id;
    }
    no_forced_key_ = std::move(key);
    return std::nullopt;
  }

  void sell(const std::set<AgentId>& targets, SaleReason reason) {
    sell_to(state_, inst_, targets, reason, [this](const SaleEvent& e) {
      refresh(e.agent.index());
      result_.events.push_back({TraceKind::Sale, e.price, e.agent, e.item, e.reason});
      if (state_.remaining_budgets[e.agent.index()].sign() < 0) {
        throw InvariantViolation("budget of agent " + std::to_string(e.agent.value) + " went negative");
      }
      assert_sellable("sale");
    });
  }

  void clear_flag(AgentId a) {
    state_.flags[a.index()] = false;
    result_.events.push_back({TraceKind::FlagCleared, state_.price, a, {}, {}});
    assert_sellable("flag cleared");
  }

  // Every unsold item can still be sold to active agents under the
  // current capacities.
  void assert_sellable(const char* where) const {
    if (!opts_.check_sellability) return;
    const DemandView view = current_view();
    const ExclusionMatcher matcher(interest_graph(state_, inst_, view));
    if (matcher.max_matching() < state_.unsold_count()) {
      throw InvariantViolation(std::string("sellability lost after ") + where + " at price " + state_.price.str());
    }
  }

  void assemble() {
    Allocation& out = result_.allocation;
    out.payments.assign(inst_.agent_count(), Rational());
    for (const auto& e : state_.sales) {
      out.assignment[e.item] = e.agent;
      out.payments[e.agent.index()] += e.price;
    }
    out.remaining_budgets = state_.remaining_budgets;
    out.trace = state_.sales;
  }

  const Instance& inst_;
  EngineOptions opts_;
  AuctionState state_;
  RunResult result_;
  std::vector<Uncapped> uncapped_;
  std::vector<int> no_forced_key_;
};

}  // namespace detail

inline RunResult run_auction_traced(const Instance& inst, const EngineOptions& opts = {}) {
  if (auto report = validate_instance(inst); !report.ok()) throw ValidationError(std::move(report));
  return detail::ClinchingRun(inst, opts).run();
}

inline Allocation run_auction(const Instance& inst, const EngineOptions& opts = {}) {
  return run_auction_traced(inst, opts).allocation;
}

}  // namespace clinch
