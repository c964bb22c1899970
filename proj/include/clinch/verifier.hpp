#pragma once

// Pareto-optimality of an allocation, decided combinatorially: an
// allocation is Pareto-optimal iff every item is sold and no trading path
// exists. A trading path (a1, t1, a2, ..., a_j) is a simple alternating
// path (a_i holds t_i, and a_{i+1} wants t_i) whose last agent values items
// strictly more than a1 and still has at least v_{a1} of budget left.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "clinch/core.hpp"

namespace clinch {

struct TradingPath {
  std::vector<AgentId> agents;  // a1 .. a_j
  std::vector<ItemId> items;    // t1 .. t_{j-1}; agents[i] holds items[i], agents[i+1] wants it

  [[nodiscard]] std::string str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (i > 0) os << ", t" << items[i - 1].value << ", ";
      os << 'a' << agents[i].value;
    }
    os << ')';
    return os.str();
  }

  // a1, t1, a2, ... as raw id numbers
  [[nodiscard]] std::vector<int> nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (i > 0) out.push_back(items[i - 1].value);
      out.push_back(agents[i].value);
    }
    return out;
  }

  friend bool operator==(const TradingPath&, const TradingPath&) = default;
};

// Witness order: start agent, then length, then node sequence.
inline bool witness_less(const TradingPath& x, const TradingPath& y) {
  if (x.agents.front() != y.agents.front()) return x.agents.front() < y.agents.front();
  if (x.agents.size() != y.agents.size()) return x.agents.size() < y.agents.size();
  return x.nodes() < y.nodes();
}

struct UnsoldItems {
  std::vector<ItemId> items;
};
struct TradingPathFound {
  TradingPath path;
};

struct Verdict {
  bool pareto_optimal = true;
  std::optional<std::variant<UnsoldItems, TradingPathFound>> failure;
};

// Checks the trading path conditions directly against the allocation.
inline bool is_trading_path(const Instance& inst, const Allocation& alloc, const TradingPath& path) {
  if (path.agents.size() < 2 || path.items.size() + 1 != path.agents.size()) return false;
  std::set<AgentId> seen;
  for (AgentId a : path.agents) {
    if (a.value < 1 || static_cast<std::size_t>(a.value) > inst.agent_count()) return false;
    if (!seen.insert(a).second) return false;
  }
  for (std::size_t i = 0; i < path.items.size(); ++i) {
    auto it = alloc.assignment.find(path.items[i]);
    if (it == alloc.assignment.end() || it->second != path.agents[i]) return false;
    if (!inst.agent(path.agents[i + 1]).interested_in(path.items[i])) return false;
  }
  const Rational& first_value = inst.agent(path.agents.front()).value;
  const AgentId last = path.agents.back();
  return inst.agent(last).value > first_value && alloc.remaining(last) >= first_value;
}

namespace detail {

inline void require_structure(const Instance& inst, const Allocation& alloc) {
  auto problems = structural_violations(inst, alloc);
  if (!problems.empty()) {
    std::string msg = "malformed allocation:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
}

}  // namespace detail

// Returns the trading path with the smallest start agent, then the fewest
// hops, then the lexicographically least node sequence; nullopt if none.
//
// Detection runs over walks: for each start value v, a reverse BFS gives
// every agent's hop distance to the endpoint set {y : v_y > v, b*_y >= v}.
// A shortest walk never repeats an agent (cutting out the stretch between
// two visits of the same agent leaves a shorter alternating walk with the
// same ends), so the greedy shortest walk is already a simple path.
inline std::optional<TradingPath> find_trading_path(const Instance& inst, const Allocation& alloc) {
  detail::require_structure(inst, alloc);
  const std::size_t n = inst.agent_count();

  std::vector<std::vector<ItemId>> held(n);
  for (const auto& [t, a] : alloc.assignment) held[a.index()].push_back(t);

  // wanted_by[t] = agents interested in t, ascending
  std::vector<std::vector<AgentId>> wanted_by(inst.item_count());
  for (const auto& a : inst.agents) {
    for (ItemId t : a.interests) wanted_by[t.index()].push_back(a.id);
  }

  // pred[y] = agents x with an arc x -> y (x holds an item y wants)
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (ItemId t : held[x]) {
      for (AgentId y : wanted_by[t.index()]) {
        if (y.index() != x) pred[y.index()].push_back(x);
      }
    }
  }

  constexpr int kFar = std::numeric_limits<int>::max();
  std::map<Rational, std::vector<int>> dist_by_value;
  auto distances = [&](const Rational& v) -> const std::vector<int>& {
    auto it = dist_by_value.find(v);
    if (it != dist_by_value.end()) return it->second;
    std::vector<int> dist(n, kFar);
    std::deque<std::size_t> queue;
    for (std::size_t y = 0; y < n; ++y) {
      if (inst.agents[y].value > v && alloc.remaining_budgets[y] >= v) {
        dist[y] = 0;
        queue.push_back(y);
      }
    }
    while (!queue.empty()) {
      const std::size_t y = queue.front();
      queue.pop_front();
      for (std::size_t x : pred[y]) {
        if (dist[x] == kFar) {
          dist[x] = dist[y] + 1;
          queue.push_back(x);
        }
      }
    }
    return dist_by_value.emplace(v, std::move(dist)).first->second;
  };

  for (std::size_t start = 0; start < n; ++start) {
    if (held[start].empty()) continue;
    const auto& dist = distances(inst.agents[start].value);
    if (dist[start] == kFar || dist[start] == 0) continue;

    TradingPath path;
    std::size_t at = start;
    path.agents.push_back(AgentId::from_index(at));
    while (dist[at] > 0) {
      std::optional<std::pair<ItemId, AgentId>> step;
      for (ItemId t : held[at]) {  // held lists are ascending (built from an ordered map)
        for (AgentId y : wanted_by[t.index()]) {
          if (y.index() != at && dist[y.index()] == dist[at] - 1) {
            step = std::pair(t, y);
            break;
          }
        }
        if (step) break;
      }
      if (!step) throw std::logic_error("trading path reconstruction lost its way");
      path.items.push_back(step->first);
      path.agents.push_back(step->second);
      at = step->second.index();
    }
    return path;
  }
  return std::nullopt;
}

inline Verdict pareto_verify(const Instance& inst, const Allocation& alloc) {
  detail::require_structure(inst, alloc);
  if (auto unsold = unsold_items(inst, alloc); !unsold.empty()) {
    return {false, UnsoldItems{std::move(unsold)}};
  }
  if (auto path = find_trading_path(inst, alloc)) return {false, TradingPathFound{std::move(*path)}};
  return {true, std::nullopt};
}

// One piece of the symmetric difference of two full assignments. Agents
// and items alternate: agents[i] holds items[i] in the first assignment,
// and items[i] goes to agents[i + 1] (to agents[0] again, for a cycle) in
// the second.
struct DecompositionPath {
  enum class Kind { Path, Cycle };
  Kind kind = Kind::Path;
  std::vector<AgentId> agents;
  std::vector<ItemId> items;

  [[nodiscard]] AgentId start_agent() const { return agents.front(); }
  [[nodiscard]] AgentId end_agent() const { return agents.back(); }
};

// Splits first xor second into edge-disjoint simple alternating paths and
// cycles. Paths start at agents that lose more items than they gain and end
// at agents that gain more than they lose, so no path ends where another
// begins.
inline std::vector<DecompositionPath> decompose_symmetric_difference(const std::map<ItemId, AgentId>& first,
                                                                     const std::map<ItemId, AgentId>& second,
                                                                     const Instance& inst) {
  for (const auto* m : {&first, &second}) {
    if (m->size() != inst.item_count()) throw std::invalid_argument("assignment does not cover every item");
    for (const auto& [t, a] : *m) {
      if (t.value < 1 || static_cast<std::size_t>(t.value) > inst.item_count() || a.value < 1 ||
          static_cast<std::size_t>(a.value) > inst.agent_count()) {
        throw std::invalid_argument("assignment references an unknown id");
      }
      if (!inst.agent(a).interested_in(t)) throw std::invalid_argument("assignment outside interests");
    }
  }

  const std::size_t n = inst.agent_count();
  // out_items[a] = items a gives up (first -> second changes owner), ascending
  std::vector<std::deque<ItemId>> out_items(n);
  std::vector<int> surplus(n, 0);  // remaining out-arcs minus remaining in-arcs
  std::map<ItemId, AgentId> receiver;
  for (const auto& [t, a] : first) {
    const AgentId b = second.at(t);
    if (a == b) continue;
    out_items[a.index()].push_back(t);
    receiver[t] = b;
    ++surplus[a.index()];
    --surplus[b.index()];
  }

  std::vector<DecompositionPath> pieces;

  // Follows unused arcs from `from`; whenever the walk returns to an agent
  // already on it, the loop is cut off as a cycle.
  auto walk = [&](std::size_t from, bool closed) {
    std::vector<AgentId> agents{AgentId::from_index(from)};
    std::vector<ItemId> items;
    std::map<AgentId, std::size_t> position{{agents.front(), 0}};
    std::size_t at = from;
    while (!out_items[at].empty()) {
      const ItemId t = out_items[at].front();
      out_items[at].pop_front();
      const AgentId next = receiver.at(t);
      items.push_back(t);
      if (auto it = position.find(next); it != position.end()) {
        const std::size_t k = it->second;
        DecompositionPath cyc{DecompositionPath::Kind::Cycle,
                              std::vector<AgentId>(agents.begin() + static_cast<long>(k), agents.end()),
                              std::vector<ItemId>(items.begin() + static_cast<long>(k), items.end())};
        pieces.push_back(std::move(cyc));
        for (std::size_t j = k + 1; j < agents.size(); ++j) position.erase(agents[j]);
        agents.resize(k + 1);
        items.resize(k);
      } else {
        position[next] = agents.size();
        agents.push_back(next);
      }
      at = agents.back().index();
    }
    if (!closed) {
      pieces.push_back({DecompositionPath::Kind::Path, std::move(agents), std::move(items)});
    } else if (!items.empty()) {
      throw std::logic_error("balanced remainder left an open walk");
    }
  };

  for (std::size_t a = 0; a < n; ++a) {
    for (; surplus[a] > 0; --surplus[a]) walk(a, false);
  }
  for (std::size_t a = 0; a < n; ++a) {
    while (!out_items[a].empty()) walk(a, true);
  }
  return pieces;
}

}  // namespace clinch
