#pragma once

// Min-cost max-flow on small integer networks, and the bipartite
// B-matching queries the auction is built on.
//
// avoid_matching() is the S-avoid matching: a maximum-cardinality
// B-matching which, among all maximum ones, gives the fewest items to the
// agents in S. It reduces to min-cost max-flow with unit cost on the
// source->agent arcs of avoided agents.
//
// ExclusionMatcher answers the same B(not S) statistic through a different
// route: B(not S) equals the maximum matching size of the graph with S
// deleted. Take an optimal S-avoid matching Y. The pairs of Y outside S
// form a matching of G - S, so B(not S) <= maxflow(G - S). Conversely,
// start from a maximum matching of G - S and augment it to a maximum
// matching of G; an augmenting path enters through one agent and every
// other agent on it keeps its load, so the outside count never drops.
// The result is maximum in G with at least maxflow(G - S) items outside S.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clinch/core.hpp"

namespace clinch {

struct FlowEdge {
  int from = 0;
  int to = 0;
  std::int64_t capacity = 0;
  std::int64_t cost = 0;
};

struct FlowNetwork {
  int node_count = 0;
  std::vector<FlowEdge> edges;

  int add_edge(int from, int to, std::int64_t capacity, std::int64_t cost) {
    edges.push_back({from, to, capacity, cost});
    return static_cast<int>(edges.size()) - 1;
  }
};

struct FlowResult {
  std::int64_t value = 0;
  std::int64_t cost = 0;
  std::vector<std::int64_t> edge_flow;  // parallel to FlowNetwork::edges
};

// Successive shortest augmenting paths with Johnson potentials. All costs
// are nonnegative, so zero initial potentials are feasible and reduced
// costs stay nonnegative after every Dijkstra round.
inline FlowResult min_cost_max_flow(const FlowNetwork& net, int source, int sink) {
  const int n = net.node_count;
  if (n <= 0) throw std::invalid_argument("flow network has no nodes");
  auto in_range = [n](int v) { return v >= 0 && v < n; };
  if (!in_range(source) || !in_range(sink)) throw std::invalid_argument("source or sink out of range");
  if (source == sink) throw std::invalid_argument("source equals sink");
  for (const auto& e : net.edges) {
    if (!in_range(e.from) || !in_range(e.to)) throw std::invalid_argument("edge endpoint out of range");
    if (e.capacity < 0) throw std::invalid_argument("negative capacity");
    if (e.cost < 0) throw std::invalid_argument("negative cost");
  }

  struct Arc {
    int to;
    std::int64_t cap;
    std::int64_t cost;
  };
  std::vector<Arc> arcs;
  arcs.reserve(net.edges.size() * 2);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const auto& e : net.edges) {
    out[e.from].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({e.to, e.capacity, e.cost});
    out[e.to].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({e.from, 0, -e.cost});
  }

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> potential(n, 0);
  std::vector<std::int64_t> dist(n);
  std::vector<int> via(n);
  FlowResult result;

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via.begin(), via.end(), -1);
    dist[source] = 0;
    using Entry = std::pair<std::int64_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0, source);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d != dist[v]) continue;
      for (int id : out[v]) {
        const Arc& a = arcs[id];
        if (a.cap <= 0) continue;
        const std::int64_t nd = d + a.cost + potential[v] - potential[a.to];
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          via[a.to] = id;
          heap.emplace(nd, a.to);
        }
      }
    }
    if (dist[sink] >= kInf) break;
    for (int v = 0; v < n; ++v) {
      if (dist[v] < kInf) potential[v] += dist[v];
    }
    std::int64_t push = kInf;
    for (int v = sink; v != source; v = arcs[via[v] ^ 1].to) push = std::min(push, arcs[via[v]].cap);
    for (int v = sink; v != source; v = arcs[via[v] ^ 1].to) {
      arcs[via[v]].cap -= push;
      arcs[via[v] ^ 1].cap += push;
      result.cost += push * arcs[via[v]].cost;
    }
    result.value += push;
  }

  result.edge_flow.resize(net.edges.size());
  for (std::size_t i = 0; i < net.edges.size(); ++i) result.edge_flow[i] = arcs[2 * i + 1].cap;
  return result;
}

struct AgentSlot {
  AgentId id;
  int capacity = 0;  // d_a
};

// Active agents on the left with capacity d_a, unsold items on the right
// with unit capacity, and an edge wherever the item is in the agent's
// interest set.
struct InterestGraph {
  std::vector<AgentSlot> agents;                  // ascending id
  std::vector<ItemId> items;                      // ascending id
  std::vector<std::pair<AgentId, ItemId>> edges;  // ascending (agent, item)
};

inline void validate_graph(const InterestGraph& g) {
  std::set<AgentId> agents;
  for (const auto& s : g.agents) {
    if (s.capacity < 0) throw std::invalid_argument("negative agent capacity");
    if (!agents.insert(s.id).second) throw std::invalid_argument("duplicate agent in interest graph");
  }
  std::set<ItemId> items(g.items.begin(), g.items.end());
  if (items.size() != g.items.size()) throw std::invalid_argument("duplicate item in interest graph");
  std::set<std::pair<AgentId, ItemId>> seen;
  for (const auto& e : g.edges) {
    if (!agents.contains(e.first) || !items.contains(e.second)) {
      throw std::invalid_argument("interest edge with dangling endpoint");
    }
    if (!seen.insert(e).second) throw std::invalid_argument("duplicate interest edge");
  }
}

struct BMatching {
  std::map<ItemId, AgentId> assigned;
  std::map<AgentId, int> per_agent_count;

  [[nodiscard]] int size() const { return static_cast<int>(assigned.size()); }
  [[nodiscard]] int count(AgentId a) const {
    auto it = per_agent_count.find(a);
    return it == per_agent_count.end() ? 0 : it->second;
  }

  friend bool operator==(const BMatching&, const BMatching&) = default;
};

// Assigned items whose agent lies outside `avoid`; B(not S) for an S-avoid matching.
inline int items_outside(const BMatching& m, const std::set<AgentId>& avoid) {
  int n = 0;
  for (const auto& [t, a] : m.assigned) {
    if (!avoid.contains(a)) ++n;
  }
  return n;
}

namespace detail {

// Nodes: 0 = source, 1..A agents, A+1..A+I items, A+I+1 = sink.
struct MatchingReduction {
  FlowNetwork net;
  int source = 0;
  int sink = 0;
  std::vector<int> pair_edges;  // edge id for each interest edge, same order as graph.edges
};

inline MatchingReduction reduce(const InterestGraph& g, const std::set<AgentId>& avoid) {
  MatchingReduction r;
  const int na = static_cast<int>(g.agents.size());
  const int ni = static_cast<int>(g.items.size());
  r.net.node_count = na + ni + 2;
  r.source = 0;
  r.sink = na + ni + 1;
  std::map<AgentId, int> agent_node;
  std::map<ItemId, int> item_node;
  for (int i = 0; i < na; ++i) agent_node[g.agents[i].id] = 1 + i;
  for (int j = 0; j < ni; ++j) item_node[g.items[j]] = 1 + na + j;
  for (const auto& s : g.agents) {
    r.net.add_edge(r.source, agent_node[s.id], s.capacity, avoid.contains(s.id) ? 1 : 0);
  }
  for (const auto& [a, t] : g.edges) r.pair_edges.push_back(r.net.add_edge(agent_node[a], item_node[t], 1, 0));
  for (ItemId t : g.items) r.net.add_edge(item_node[t], r.sink, 1, 0);
  return r;
}

}  // namespace detail

inline BMatching avoid_matching(const InterestGraph& g, const std::set<AgentId>& avoid) {
  validate_graph(g);
  for (AgentId a : avoid) {
    if (std::none_of(g.agents.begin(), g.agents.end(), [a](const AgentSlot& s) { return s.id == a; })) {
      throw std::invalid_argument("avoid set contains an agent outside the graph");
    }
  }
  auto red = detail::reduce(g, avoid);
  auto flow = min_cost_max_flow(red.net, red.source, red.sink);
  BMatching m;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (flow.edge_flow[red.pair_edges[k]] > 0) {
      const auto [a, t] = g.edges[k];
      m.assigned[t] = a;
      ++m.per_agent_count[a];
    }
  }
  return m;
}

// Maximum B-matchings of the graph with selected agents deleted, warm
// started from one maximum matching of the full graph. Used to scan every
// agent's B(not {a}) cheaply.
class ExclusionMatcher {
 public:
  explicit ExclusionMatcher(const InterestGraph& g) {
    const std::size_t na = g.agents.size();
    const std::size_t ni = g.items.size();
    std::vector<int> agent_pos;
    std::vector<int> item_pos;
    for (std::size_t i = 0; i < na; ++i) {
      place(agent_pos, g.agents[i].id.value, static_cast<int>(i));
      ids_.push_back(g.agents[i].id);
      cap_.push_back(g.agents[i].capacity);
    }
    for (std::size_t j = 0; j < ni; ++j) place(item_pos, g.items[j].value, static_cast<int>(j));
    item_agents_.resize(ni);
    for (const auto& [a, t] : g.edges) item_agents_[item_pos.at(t.value)].push_back(agent_pos.at(a.value));
    for (auto& v : item_agents_) std::sort(v.begin(), v.end());

    parent_.resize(ni);
    queue_.reserve(ni);
    base_.owner.assign(ni, -1);
    base_.owned.resize(na);
    base_.excluded.assign(na, false);
    for (std::size_t t = 0; t < ni; ++t) {
      if (augment(base_, static_cast<int>(t))) ++base_size_;
    }
  }

  [[nodiscard]] int max_matching() const { return base_size_; }

  [[nodiscard]] int max_matching_without(const std::set<AgentId>& excluded) const {
    std::vector<int> positions;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (excluded.contains(ids_[i])) positions.push_back(static_cast<int>(i));
    }
    return without(positions);
  }

  [[nodiscard]] int max_matching_without(AgentId a) const {
    auto it = std::find(ids_.begin(), ids_.end(), a);
    if (it == ids_.end()) return base_size_;
    return without({static_cast<int>(it - ids_.begin())});
  }

 private:
  struct State {
    std::vector<int> owner;               // item -> agent position, -1 when free
    std::vector<std::vector<int>> owned;  // agent position -> items
    std::vector<bool> excluded;
  };

  static void place(std::vector<int>& pos, int id, int at) {
    if (id < 0) throw std::invalid_argument("negative id in interest graph");
    if (static_cast<std::size_t>(id) >= pos.size()) pos.resize(static_cast<std::size_t>(id) + 1, -1);
    pos[static_cast<std::size_t>(id)] = at;
  }

  [[nodiscard]] int without(const std::vector<int>& positions) const {
    State s = base_;
    int size = base_size_;
    std::vector<int> freed;
    for (int i : positions) {
      s.excluded[i] = true;
      for (int t : s.owned[i]) {
        s.owner[t] = -1;
        freed.push_back(t);
      }
      size -= static_cast<int>(s.owned[i].size());
      s.owned[i].clear();
    }
    std::sort(freed.begin(), freed.end());
    for (int t : freed) {
      if (augment(s, t)) ++size;
    }
    return size;
  }

  // BFS over items from the free item `start` looking for an agent with
  // spare capacity; shifts items along the path found.
  bool augment(State& s, int start) const {
    std::fill(parent_.begin(), parent_.end(), -2);
    queue_.clear();
    queue_.push_back(start);
    parent_[start] = -1;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int y = queue_[head];
      for (int c : item_agents_[y]) {
        if (s.excluded[c] || c == s.owner[y]) continue;
        if (static_cast<int>(s.owned[c].size()) < cap_[c]) {
          shift(s, y, c);
          return true;
        }
        for (int x : s.owned[c]) {
          if (parent_[x] == -2) {
            parent_[x] = y;
            queue_.push_back(x);
          }
        }
      }
    }
    return false;
  }

  void shift(State& s, int item, int agent) const {
    while (true) {
      const int old = s.owner[item];
      if (old >= 0) {
        auto& v = s.owned[old];
        v.erase(std::find(v.begin(), v.end(), item));
      }
      s.owner[item] = agent;
      s.owned[agent].push_back(item);
      if (old < 0) return;
      agent = old;
      item = parent_[item];
    }
  }

  std::vector<AgentId> ids_;
  std::vector<int> cap_;
  std::vector<std::vector<int>> item_agents_;
  State base_;
  int base_size_ = 0;
  // BFS scratch; a matcher is used from one thread at a time.
  mutable std::vector<int> parent_;
  mutable std::vector<int> queue_;
};

}  // namespace clinch
