// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 0 only
// if every criterion passes. All money comparisons are exact rationals, so
// the only tolerances are the wall-clock limits below.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clinch/clinch.hpp"

using namespace clinch;

namespace {

constexpr double kFixtureSeconds = 1.0;
constexpr double kDeskSweepSeconds = 30.0;
constexpr double kBiconditionalSeconds = 300.0;
constexpr double kScaleSeconds = 5.0;

constexpr int kDeskCases = 1000;
constexpr int kBiconditionalPairCap = 2000;
constexpr int kTruthfulnessCases = 200;
constexpr int kSecondPriceCases = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& what, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ' ' << what << " (" << detail << ")\n";
  if (!pass) ++failures;
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << s << " s";
  return os.str();
}

// AC1
void fixture() {
  const auto start = Clock::now();
  const Instance inst = make_instance(2, {{10, 4, {1, 2}}, {11, 5, {1, 2}}});
  const Allocation a = run_auction(inst);
  const double took = seconds_since(start);
  const bool pass = a.items_held(AgentId(1)) == 1 && a.items_held(AgentId(2)) == 1 &&
                    a.payment(AgentId(1)) == Rational(3) && a.payment(AgentId(2)) == Rational(2) &&
                    took < kFixtureSeconds;
  report("AC1", pass, "two-agent fixture: one item each, payments exactly 3 and 2",
         "P = (" + a.payment(AgentId(1)).str() + ", " + a.payment(AgentId(2)).str() + "), " + fmt_seconds(took));
}

std::vector<Instance> desk_instances() {
  std::vector<Instance> out;
  std::mt19937_64 sizes(2024);
  std::uniform_int_distribution<int> pick(1, 6);
  for (int i = 0; i < kDeskCases; ++i) {
    out.push_back(generate_instance({pick(sizes), pick(sizes), 1000 + static_cast<std::uint64_t>(i), 10, 30}));
  }
  return out;
}

// AC2 and AC3 share the instances and the runs.
void desk_sweep() {
  const auto instances = desk_instances();
  EngineOptions opts;
  opts.check_sellability = true;

  const auto start = Clock::now();
  std::vector<Allocation> runs;
  int sold_out = 0;
  std::string first_problem;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      runs.push_back(run_auction(instances[i], opts));
      if (unsold_items(instances[i], runs.back()).empty()) ++sold_out;
    } catch (const InvariantViolation& e) {
      runs.emplace_back();
      if (first_problem.empty()) first_problem = "case " + std::to_string(i) + ": " + e.what();
    }
  }
  const double took = seconds_since(start);
  report("AC2", sold_out == kDeskCases && first_problem.empty() && took < kDeskSweepSeconds,
         "all items sold, sellability assertion silent on 1000 instances (n, m <= 6)",
         std::to_string(sold_out) + "/" + std::to_string(kDeskCases) + " sold out, " + fmt_seconds(took) +
             (first_problem.empty() ? "" : ", " + first_problem));

  int good = 0;
  std::string bad;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    const Allocation& a = runs[i];
    if (a.payments.size() != inst.agent_count()) continue;
    bool ok = pareto_verify(inst, a).pareto_optimal && a.revenue().sign() >= 0;
    for (const auto& ag : inst.agents) {
      ok = ok && a.payment(ag.id).sign() >= 0 && a.payment(ag.id) <= ag.budget;
    }
    for (const auto& e : a.trace) ok = ok && e.price <= inst.agent(e.agent).value;
    ok = ok && allocation_violations(inst, a).empty();
    if (ok) {
      ++good;
    } else if (bad.empty()) {
      bad = ", first failure: case " + std::to_string(i);
    }
  }
  report("AC3", good == kDeskCases,
         "Pareto-optimal, 0 <= P_a <= b_a, prices <= values, revenue >= 0 on the same 1000 runs",
         std::to_string(good) + "/" + std::to_string(kDeskCases) + " exact" + bad);
}

// Interest patterns (one mask per agent) covering every item, one
// representative per class under agent and item relabeling.
std::vector<std::vector<unsigned>> interest_patterns(int n, int m) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::vector<std::vector<unsigned>> out;
  const unsigned full = (1u << m) - 1;
  std::vector<unsigned> masks(static_cast<std::size_t>(n), 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned lo) {
    if (i == masks.size()) {
      unsigned cover = 0;
      for (unsigned x : masks) cover |= x;
      if (cover != full) return;
      std::iota(perm.begin(), perm.end(), 0);
      do {
        std::vector<unsigned> image;
        for (unsigned x : masks) {
          unsigned y = 0;
          for (int t = 0; t < m; ++t) {
            if (x & (1u << t)) y |= 1u << perm[static_cast<std::size_t>(t)];
          }
          image.push_back(y);
        }
        std::sort(image.begin(), image.end());
        if (image < masks) return;  // not the least member of its class
      } while (std::next_permutation(perm.begin(), perm.end()));
      out.push_back(masks);
      return;
    }
    for (unsigned x = lo; x <= full; ++x) {
      masks[i] = x;
      rec(i + 1, x);
    }
  };
  rec(0, 0);
  return out;
}

// AC4
void biconditional() {
  struct Pattern {
    int m;
    std::vector<unsigned> masks;
  };
  std::vector<Pattern> patterns;
  for (int n = 1; n <= 3; ++n) {
    for (int m = 1; m <= 3; ++m) {
      for (auto& masks : interest_patterns(n, m)) patterns.push_back({m, std::move(masks)});
    }
  }

  const auto start = Clock::now();
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> money(1, 5);
  int pairs = 0;
  int agree = 0;
  int dominated = 0;
  std::string first_disagreement;
  auto check = [&](const Instance& inst, const Allocation& alloc) {
    if (pairs >= kBiconditionalPairCap) return;
    ++pairs;
    const bool found = dominance_oracle(inst, alloc).has_value();
    const bool optimal = pareto_verify(inst, alloc).pareto_optimal;
    dominated += found;
    if (found != optimal) {
      ++agree;
    } else if (first_disagreement.empty()) {
      first_disagreement = ", first disagreement at pair " + std::to_string(pairs);
    }
  };
  // round-robin over patterns so the cap cuts evenly
  for (int round = 0; pairs < kBiconditionalPairCap; ++round) {
    for (const auto& p : patterns) {
      std::vector<AgentInput> agents;
      for (unsigned mask : p.masks) {
        AgentInput a{Rational(money(rng)), Rational(money(rng)), {}};
        for (int t = 0; t < p.m; ++t) {
          if (mask & (1u << t)) a.interests.push_back(t + 1);
        }
        agents.push_back(std::move(a));
      }
      const Instance inst = make_instance(p.m, agents);
      const Allocation engine = run_auction(inst);
      check(inst, engine);
      check(inst, random_allocation(inst, rng));
      if (auto nudged = nudged_allocation(inst, engine, rng)) check(inst, *nudged);
    }
  }
  const double took = seconds_since(start);
  report("AC4", agree == pairs && pairs == kBiconditionalPairCap && took < kBiconditionalSeconds,
         "dominance oracle finds a certificate iff the verifier reports failure (n, m <= 3, values and budgets 1..5)",
         std::to_string(agree) + "/" + std::to_string(pairs) + " agree over " + std::to_string(patterns.size()) +
             " interest patterns, " + std::to_string(dominated) + " dominated, " + fmt_seconds(took) +
             first_disagreement);
}

// AC5
void truthfulness() {
  std::mt19937_64 sizes(5);
  std::uniform_int_distribution<int> pick(1, 4);
  long misreports = 0;
  int violations = 0;
  std::string first;
  for (int i = 0; i < kTruthfulnessCases; ++i) {
    const Instance inst = generate_instance({pick(sizes), pick(sizes), 5000 + static_cast<std::uint64_t>(i), 10, 30});
    const Allocation truthful = run_auction(inst);
    const auto grid = misreport_grid(inst, truthful);
    for (const auto& a : inst.agents) {
      const Rational honest = utility(inst, truthful, a.id);
      for (const Rational& lie : grid) {
        Instance shifted = inst;
        shifted.agents[a.id.index()].value = lie;
        ++misreports;
        if (utility(inst, run_auction(shifted), a.id) > honest) {
          ++violations;
          if (first.empty()) {
            first = ", first: case " + std::to_string(i) + " agent " + std::to_string(a.id.value) + " reports " + lie.str();
          }
        }
      }
    }
  }
  report("AC5", violations == 0, "no profitable value misreport on 200 instances (n, m <= 4)",
         std::to_string(misreports) + " misreports, " + std::to_string(violations) + " profitable" + first);
}

// AC6
void second_price() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<long> num(1, 200);
  std::uniform_int_distribution<long> den(1, 8);
  int good = 0;
  for (int i = 0; i < kSecondPriceCases; ++i) {
    Rational v1(num(rng), den(rng));
    Rational v2(num(rng), den(rng));
    while (v2 == v1) v2 = Rational(num(rng), den(rng));
    const Rational top = std::max(v1, v2);
    const Instance inst = make_instance(1, {{v1, top + Rational(num(rng), den(rng)), {1}},
                                            {v2, top + Rational(num(rng), den(rng)), {1}}});
    const Allocation a = run_auction(inst);
    const AgentId winner = v1 > v2 ? AgentId(1) : AgentId(2);
    const AgentId loser = v1 > v2 ? AgentId(2) : AgentId(1);
    if (a.assignment.at(ItemId(1)) == winner && a.payment(winner) == std::min(v1, v2) &&
        a.payment(loser).is_zero()) {
      ++good;
    }
  }
  report("AC6", good == kSecondPriceCases, "one item, two agents: higher value wins at exactly the lower value",
         std::to_string(good) + "/" + std::to_string(kSecondPriceCases) + " exact");
}

// AC7: every graph with <= 4 agents and <= 4 items and capacities <= 4, one
// per class under agent and item relabeling, against every avoid set.
void flow_oracle() {
  const auto start = Clock::now();
  long graphs = 0;
  long queries = 0;
  long agree = 0;
  for (int m = 1; m <= 4; ++m) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    const unsigned masks = 1u << m;
    for (int n = 1; n <= 4; ++n) {
      // agent type = capacity * masks + interest mask; sorted types = one multiset
      std::vector<unsigned> types(static_cast<std::size_t>(n), 0);
      const unsigned type_count = 5 * masks;
      std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned lo) {
        if (i == types.size()) {
          std::iota(perm.begin(), perm.end(), 0);
          while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<unsigned> image;
            for (unsigned ty : types) {
              unsigned x = ty % masks;
              unsigned y = 0;
              for (int t = 0; t < m; ++t) {
                if (x & (1u << t)) y |= 1u << perm[static_cast<std::size_t>(t)];
              }
              image.push_back(ty - x + y);
            }
            std::sort(image.begin(), image.end());
            if (image < types) return;
          }
          InterestGraph g;
          for (int t = 1; t <= m; ++t) g.items.emplace_back(t);
          for (int a = 0; a < n; ++a) {
            const unsigned ty = types[static_cast<std::size_t>(a)];
            g.agents.push_back({AgentId(a + 1), static_cast<int>(ty / masks)});
            for (int t = 0; t < m; ++t) {
              if ((ty % masks) & (1u << t)) g.edges.emplace_back(AgentId(a + 1), ItemId(t + 1));
            }
          }
          ++graphs;
          const auto all = enumerate_bmatchings(g);
          int best = 0;
          for (const auto& mt : all) best = std::max(best, mt.size());
          for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::set<AgentId> avoid;
            for (int a = 0; a < n; ++a) {
              if (mask & (1u << a)) avoid.insert(AgentId(a + 1));
            }
            int fewest = m + 1;
            for (const auto& mt : all) {
              if (mt.size() == best) fewest = std::min(fewest, mt.size() - items_outside(mt, avoid));
            }
            const BMatching got = avoid_matching(g, avoid);
            ++queries;
            if (got.size() == best && got.size() - items_outside(got, avoid) == fewest) ++agree;
          }
          return;
        }
        for (unsigned ty = lo; ty < type_count; ++ty) {
          types[i] = ty;
          rec(i + 1, ty);
        }
      };
      rec(0, 0);
    }
  }
  report("AC7", agree == queries,
         "avoid matching equals exhaustive enumeration on cardinality and fewest avoided items",
         std::to_string(agree) + "/" + std::to_string(queries) + " queries over " + std::to_string(graphs) +
             " graphs, " + fmt_seconds(seconds_since(start)));
}

// AC8
void scale() {
  const Instance inst = generate_instance({50, 100, 8, 100, 1000});
  EngineOptions opts;
  opts.check_sellability = false;
  const auto start = Clock::now();
  const Allocation a = run_auction(inst, opts);
  const double took = seconds_since(start);
  report("AC8", took < kScaleSeconds && unsold_items(inst, a).empty(),
         "n = 50, m = 100 completes with assertions off", fmt_seconds(took));
}

}  // namespace

int main() {
  fixture();
  desk_sweep();
  biconditional();
  truthfulness();
  second_price();
  flow_oracle();
  scale();
  std::cout << (failures == 0 ? "all acceptance criteria passed\n" : std::to_string(failures) + " criteria failed\n");
  return failures == 0 ? 0 : 1;
}
