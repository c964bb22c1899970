#pragma once

// Seeded random instances. Same seed and same build give the same instance.
//
// Draw order, all from one std::mt19937_64 seeded with `seed`:
//   for each agent: value in [1, value_max], budget in [0, budget_max],
//   then one fair coin per item for membership in its interest set; an
//   empty set gets one uniformly chosen item.
//   then for each uncovered item, in id order: add it to a uniformly
//   chosen agent.

#include <cstdint>
#include <random>
#include <stdexcept>

#include "clinch/core.hpp"

namespace clinch {

struct GenParams {
  int agents = 3;
  int items = 3;
  std::uint64_t seed = 1;
  long value_max = 10;
  long budget_max = 20;
};

inline Instance generate_instance(const GenParams& p) {
  if (p.agents < 1 || p.items < 1) throw std::invalid_argument("agent and item counts must be at least 1");
  if (p.value_max < 1 || p.budget_max < 0) throw std::invalid_argument("value_max must be >= 1 and budget_max >= 0");

  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<long> value(1, p.value_max);
  std::uniform_int_distribution<long> budget(0, p.budget_max);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick_item(1, p.items);
  std::uniform_int_distribution<int> pick_agent(0, p.agents - 1);

  std::vector<AgentInput> agents;
  std::vector<bool> covered(static_cast<std::size_t>(p.items), false);
  for (int i = 0; i < p.agents; ++i) {
    AgentInput in{Rational(value(rng)), Rational(budget(rng)), {}};
    for (int t = 1; t <= p.items; ++t) {
      if (coin(rng) == 1) in.interests.push_back(t);
    }
    if (in.interests.empty()) in.interests.push_back(pick_item(rng));
    for (int t : in.interests) covered[static_cast<std::size_t>(t - 1)] = true;
    agents.push_back(std::move(in));
  }
  for (int t = 1; t <= p.items; ++t) {
    if (!covered[static_cast<std::size_t>(t - 1)]) agents[static_cast<std::size_t>(pick_agent(rng))].interests.push_back(t);
  }
  return make_instance(p.items, agents);
}

}  // namespace clinch
