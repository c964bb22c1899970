#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "clinch/engine.hpp"
#include "clinch/generate.hpp"

using namespace clinch;

namespace {

Instance two_agent_fixture() { return make_instance(2, {{10, 4, {1, 2}}, {11, 5, {1, 2}}}); }

// The breakpoint scan written out literally: collect v_a and b_a / k for
// active agents, keep q > p, and return the first q at which some active
// agent's D+ falls below its value at p.
Rational next_price_by_scan(const AuctionState& s, const Instance& inst) {
  const int m = s.unsold_count();
  const DemandView view = demand_view(s, inst);
  std::set<Rational> grid;
  for (std::size_t i = 0; i < inst.agent_count(); ++i) {
    if (!view.agents[i].active) continue;
    grid.insert(inst.agents[i].value);
    for (int k = 1; k <= m; ++k) grid.insert(s.remaining_budgets[i] / Rational(k));
  }
  for (const Rational& q : grid) {
    if (q <= s.price) continue;
    for (std::size_t i = 0; i < inst.agent_count(); ++i) {
      if (!view.agents[i].active) continue;
      const auto& a = inst.agents[i];
      if (demand_plus(q, s.remaining_budgets[i], m, a.value) < demand_plus(s.price, s.remaining_budgets[i], m, a.value)) {
        return q;
      }
    }
  }
  throw std::logic_error("scan found no breakpoint");
}

}  // namespace

TEST(Demand, BudgetAndValueLimits) {
  EXPECT_EQ(demand(2, 4, 2, 10), 2);
  EXPECT_EQ(demand(3, 4, 2, 10), 1);
  EXPECT_EQ(demand(5, 4, 2, 10), 0);
  EXPECT_EQ(demand(1, 100, 3, 10), 3);   // capped by supply
  EXPECT_EQ(demand(10, 100, 3, 10), 3);  // at the value the agent still demands
  EXPECT_EQ(demand(11, 100, 3, 10), 0);
}

TEST(Demand, PlusDropsAtExactQuotientsAndAtTheValue) {
  EXPECT_EQ(demand_plus(2, 4, 2, 10), 1);  // 4/2 exact
  EXPECT_EQ(demand_plus(Rational(5, 2), 5, 3, 10), 1);
  EXPECT_EQ(demand_plus(3, 5, 2, 10), 1);
  EXPECT_EQ(demand_plus(10, 100, 3, 10), 0);
  EXPECT_EQ(demand_plus(Rational(19, 2), 100, 3, 10), 3);
}

TEST(Demand, PriceZeroConvention) {
  EXPECT_EQ(demand(0, 0, 4, 1), 4);
  EXPECT_EQ(demand_plus(0, 0, 4, 1), 0);
  EXPECT_EQ(demand_plus(0, Rational(1, 100), 4, 1), 4);
}

TEST(DemandView, FlagsSelectFullOrMarginalDemand) {
  const Instance inst = two_agent_fixture();
  AuctionState s = AuctionState::initial(inst);
  s.price = 2;
  s.flags = {false, true};
  const DemandView v = demand_view(s, inst);
  EXPECT_EQ(v.at(AgentId(1)).current, 1);
  EXPECT_EQ(v.at(AgentId(2)).current, 2);
  EXPECT_EQ(v.active().size(), 2u);
  EXPECT_TRUE(v.value_limited().empty());
  s.price = 10;
  s.flags = {true, true};
  s.remaining_budgets = {40, 50};
  EXPECT_EQ(demand_view(s, inst).value_limited(), std::set<AgentId>{AgentId(1)});
}

TEST(NextPrice, TwoAgentFixtureFromZero) {
  const Instance inst = two_agent_fixture();
  EXPECT_EQ(next_price(AuctionState::initial(inst), inst), Rational(2));
}

TEST(NextPrice, SupplyCapMasksBudgetBreakpoints) {
  const Instance inst = make_instance(1, {{5, 10, {1}}});
  EXPECT_EQ(next_price(AuctionState::initial(inst), inst), Rational(5));
}

TEST(NextPrice, TwoAgentFixtureAfterFirstSale) {
  const Instance inst = two_agent_fixture();
  AuctionState s = AuctionState::initial(inst);
  s.price = 2;
  s.unsold = {ItemId(1)};
  s.remaining_budgets = {4, 3};
  EXPECT_EQ(next_price(s, inst), Rational(3));
}

TEST(NextPrice, ThrowsWithoutActiveAgents) {
  const Instance inst = make_instance(1, {{1, 0, {1}}});
  AuctionState s = AuctionState::initial(inst);
  s.price = 1;
  EXPECT_THROW(next_price(s, inst), std::logic_error);
}

TEST(NextPrice, ClosedFormMatchesBreakpointScan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<long> small(0, 12);
  std::uniform_int_distribution<long> den(1, 4);
  int compared = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const Instance inst = generate_instance({count(rng), count(rng), rng(), 12, 30});
    AuctionState s = AuctionState::initial(inst);
    s.price = Rational(small(rng), den(rng));
    for (auto& b : s.remaining_budgets) b = Rational(small(rng) * 2, den(rng));
    std::vector<ItemId> keep;
    for (ItemId t : inst.items) {
      if (small(rng) % 3 != 0) keep.push_back(t);
    }
    if (keep.empty()) keep.push_back(inst.items.front());
    s.unsold = {keep.begin(), keep.end()};
    if (demand_view(s, inst).active().empty()) continue;
    ASSERT_EQ(next_price(s, inst), next_price_by_scan(s, inst)) << "trial " << trial;
    ++compared;
  }
  EXPECT_GT(compared, 1000);
}

TEST(Sell, OneSaleToTheTargetAtTheCurrentPrice) {
  const Instance inst = two_agent_fixture();
  AuctionState s = AuctionState::initial(inst);
  s.price = 2;
  s.flags = {false, true};
  const auto sold = sell_to(s, inst, {AgentId(2)}, SaleReason::AvoidClinch);
  ASSERT_EQ(sold.size(), 1u);
  EXPECT_EQ(sold[0].agent, AgentId(2));
  EXPECT_EQ(sold[0].price, Rational(2));
  EXPECT_EQ(sold[0].sequence, 1);
  EXPECT_EQ(s.remaining_budgets[1], Rational(3));
  EXPECT_EQ(s.unsold_count(), 1);
}

TEST(Sell, SoleAgentClinchesAtPriceZero) {
  const Instance inst = make_instance(1, {{3, 2, {1}}});
  AuctionState s = AuctionState::initial(inst);
  s.flags = {true};
  const auto sold = sell_to(s, inst, {AgentId(1)}, SaleReason::AvoidClinch);
  ASSERT_EQ(sold.size(), 1u);
  EXPECT_EQ(sold[0].price, Rational(0));
}

TEST(Sell, NothingToSellWhenOthersCoverSupply) {
  const Instance inst = two_agent_fixture();
  AuctionState s = AuctionState::initial(inst);
  s.flags = {true, true};
  EXPECT_TRUE(sell_to(s, inst, {AgentId(1)}, SaleReason::AvoidClinch).empty());
  EXPECT_TRUE(sell_to(s, inst, {}, SaleReason::AvoidClinch).empty());
}

TEST(RunAuction, TwoAgentFixture) {
  const Allocation a = run_auction(two_agent_fixture());
  EXPECT_EQ(a.items_held(AgentId(1)), 1);
  EXPECT_EQ(a.items_held(AgentId(2)), 1);
  EXPECT_EQ(a.payment(AgentId(1)), Rational(3));
  EXPECT_EQ(a.payment(AgentId(2)), Rational(2));
  EXPECT_EQ(a.remaining(AgentId(1)), Rational(1));
  EXPECT_EQ(a.remaining(AgentId(2)), Rational(3));
  ASSERT_EQ(a.trace.size(), 2u);
  EXPECT_EQ(a.trace[0].agent, AgentId(2));
  EXPECT_EQ(a.trace[0].price, Rational(2));
  EXPECT_EQ(a.trace[1].agent, AgentId(1));
  EXPECT_EQ(a.trace[1].price, Rational(3));
}

TEST(RunAuction, SingleAgentGetsItemFree) {
  for (const auto& [v, b] : {std::pair<long, long>{1, 0}, {5, 100}, {7, 3}}) {
    const Allocation a = run_auction(make_instance(1, {{v, b, {1}}}));
    EXPECT_EQ(a.assignment.at(ItemId(1)), AgentId(1));
    EXPECT_EQ(a.payment(AgentId(1)), Rational(0));
  }
}

TEST(RunAuction, SecondPriceOnOneItem) {
  const Allocation a = run_auction(make_instance(1, {{4, 20, {1}}, {9, 20, {1}}}));
  EXPECT_EQ(a.assignment.at(ItemId(1)), AgentId(2));
  EXPECT_EQ(a.payment(AgentId(2)), Rational(4));
  EXPECT_EQ(a.payment(AgentId(1)), Rational(0));
}

TEST(RunAuction, TiedValuesStillSellEverything) {
  const Allocation a = run_auction(make_instance(1, {{3, 10, {1}}, {3, 10, {1}}}));
  EXPECT_EQ(a.assignment.size(), 1u);
  EXPECT_EQ(a.revenue(), Rational(3));
}

TEST(RunAuction, TraceRecordsPriceStepsAndFlagResets) {
  const RunResult r = run_auction_traced(two_agent_fixture());
  int sales = 0;
  int prices = 0;
  int flags = 0;
  for (const auto& e : r.events) {
    sales += e.kind == TraceKind::Sale;
    prices += e.kind == TraceKind::PriceChange;
    flags += e.kind == TraceKind::FlagCleared;
  }
  EXPECT_EQ(sales, 2);
  EXPECT_EQ(prices, r.price_steps);
  EXPECT_GT(flags, 0);
  for (std::size_t i = 1; i < r.events.size(); ++i) EXPECT_LE(r.events[i - 1].price, r.events[i].price);
}

TEST(RunAuction, RejectsInvalidInstances) {
  EXPECT_THROW(run_auction(make_instance(2, {{1, 1, {1}}})), ValidationError);
}

TEST(RunAuction, DeterministicAndFeasibleOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Instance inst = generate_instance({1 + static_cast<int>(seed % 6), 1 + static_cast<int>(seed % 5), seed, 9, 25});
    const Allocation a = run_auction(inst);
    EXPECT_EQ(a, run_auction(inst));
    EXPECT_TRUE(allocation_violations(inst, a).empty());
    EXPECT_TRUE(unsold_items(inst, a).empty());
  }
}

TEST(RunAuction, FractionalInputs) {
  const Instance inst = make_instance(2, {{Rational(7, 2), Rational(5, 3), {1, 2}}, {Rational(9, 4), Rational(1, 2), {1, 2}}});
  const Allocation a = run_auction(inst);
  EXPECT_TRUE(allocation_violations(inst, a).empty());
  EXPECT_TRUE(unsold_items(inst, a).empty());
}

TEST(EngineOptions, SellabilityCheckFollowsEnvironment) {
  ::setenv("CLINCH_SELLABILITY_CHECK", "off", 1);
  EXPECT_FALSE(sellability_check_default());
  ::setenv("CLINCH_SELLABILITY_CHECK", "1", 1);
  EXPECT_TRUE(sellability_check_default());
  ::unsetenv("CLINCH_SELLABILITY_CHECK");
  EXPECT_TRUE(sellability_check_default());
}

TEST(EngineOptions, MutationsChangeOutcomes) {
  // skipping the forced clinch leaves the lone bidder's item unsellable
  EngineOptions opts;
  opts.mutation = Mutation::SkipForcedClinch;
  EXPECT_THROW(run_auction(make_instance(1, {{2, 1, {1}}, {1, 1, {1}}}), opts), InvariantViolation);
}
