#pragma once

// Domain types shared by every module: dense 1-based ids, the auction
// instance, sale events, allocations and the mutable auction state.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clinch/rational.hpp"

namespace clinch {

template <class Tag>
struct Id {
  int value = 0;

  constexpr Id() = default;
  constexpr explicit Id(int v) : value(v) {}

  // 0-based position in dense per-id vectors.
  [[nodiscard]] constexpr std::size_t index() const { return static_cast<std::size_t>(value - 1); }
  static constexpr Id from_index(std::size_t i) { return Id(static_cast<int>(i) + 1); }

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

struct AgentTag {};
struct ItemTag {};
using AgentId = Id<AgentTag>;
using ItemId = Id<ItemTag>;

struct AgentSpec {
  AgentId id;
  Rational value;
  Rational budget;
  std::vector<ItemId> interests;  // sorted, unique

  [[nodiscard]] bool interested_in(ItemId t) const {
    return std::binary_search(interests.begin(), interests.end(), t);
  }
};

struct Instance {
  std::vector<ItemId> items;
  std::vector<AgentSpec> agents;

  [[nodiscard]] std::size_t agent_count() const { return agents.size(); }
  [[nodiscard]] std::size_t item_count() const { return items.size(); }
  [[nodiscard]] const AgentSpec& agent(AgentId a) const { return agents.at(a.index()); }
};

// Builds an instance with ids 1..n and 1..m; interests are 1-based item numbers.
struct AgentInput {
  Rational value;
  Rational budget;
  std::vector<int> interests;
};

inline Instance make_instance(int item_count, const std::vector<AgentInput>& agents) {
  Instance inst;
  for (int t = 1; t <= item_count; ++t) inst.items.emplace_back(t);
  int next = 1;
  for (const auto& in : agents) {
    AgentSpec spec{AgentId(next++), in.value, in.budget, {}};
    for (int t : in.interests) spec.interests.emplace_back(t);
    std::sort(spec.interests.begin(), spec.interests.end());
    spec.interests.erase(std::unique(spec.interests.begin(), spec.interests.end()), spec.interests.end());
    inst.agents.push_back(std::move(spec));
  }
  return inst;
}

enum class IssueKind {
  UncoveredItem,
  NonPositiveValue,
  NegativeBudget,
  DuplicateAgentId,
  DuplicateItemId,
  NonDenseId,
  UnknownInterestItem,
};

inline const char* to_string(IssueKind k) {
  switch (k) {
    case IssueKind::UncoveredItem: return "uncovered item";
    case IssueKind::NonPositiveValue: return "non-positive value";
    case IssueKind::NegativeBudget: return "negative budget";
    case IssueKind::DuplicateAgentId: return "duplicate agent id";
    case IssueKind::DuplicateItemId: return "duplicate item id";
    case IssueKind::NonDenseId: return "non-dense id";
    case IssueKind::UnknownInterestItem: return "unknown interest item";
  }
  return "unknown";
}

struct ValidationIssue {
  IssueKind kind;
  std::string subject;  // offending id, as rendered for the user
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
  [[nodiscard]] bool has(IssueKind k) const {
    return std::any_of(issues.begin(), issues.end(), [k](const auto& i) { return i.kind == k; });
  }
  [[nodiscard]] std::string str() const {
    std::ostringstream os;
    for (const auto& i : issues) {
      os << to_string(i.kind) << ": " << i.subject;
      if (!i.detail.empty()) os << " (" << i.detail << ")";
      os << '\n';
    }
    return os.str();
  }
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report)
      : std::runtime_error("invalid instance:\n" + report.str()), report_(std::move(report)) {}
  [[nodiscard]] const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Raised when an internal invariant of the mechanism fails (a solver or engine bug).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  auto add = [&](IssueKind k, auto id, std::string detail = {}) {
    report.issues.push_back({k, std::to_string(id), std::move(detail)});
  };

  std::set<ItemId> seen_items;
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    const ItemId t = inst.items[i];
    if (!seen_items.insert(t).second) add(IssueKind::DuplicateItemId, t.value);
    if (t != ItemId::from_index(i)) add(IssueKind::NonDenseId, t.value, "item ids must be 1..m in order");
  }
  std::set<AgentId> seen_agents;
  std::vector<bool> covered(inst.items.size(), false);
  for (std::size_t i = 0; i < inst.agents.size(); ++i) {
    const AgentSpec& a = inst.agents[i];
    if (!seen_agents.insert(a.id).second) add(IssueKind::DuplicateAgentId, a.id.value);
    if (a.id != AgentId::from_index(i)) add(IssueKind::NonDenseId, a.id.value, "agent ids must be 1..n in order");
    if (a.value.sign() <= 0) add(IssueKind::NonPositiveValue, a.id.value, "value " + a.value.str());
    if (a.budget.sign() < 0) add(IssueKind::NegativeBudget, a.id.value, "budget " + a.budget.str());
    for (ItemId t : a.interests) {
      if (t.value < 1 || static_cast<std::size_t>(t.value) > inst.items.size()) {
        add(IssueKind::UnknownInterestItem, t.value, "in interests of agent " + std::to_string(a.id.value));
      } else {
        covered[t.index()] = true;
      }
    }
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) add(IssueKind::UncoveredItem, inst.items[i].value, "no agent is interested");
  }
  return report;
}

enum class SaleReason { ValueLimitedClinch, AvoidClinch };

inline const char* to_string(SaleReason r) {
  return r == SaleReason::ValueLimitedClinch ? "value-limited-clinch" : "avoid-clinch";
}

struct SaleEvent {
  AgentId agent;
  ItemId item;
  Rational price;
  SaleReason reason = SaleReason::AvoidClinch;
  int sequence = 0;

  friend bool operator==(const SaleEvent&, const SaleEvent&) = default;
};

// The pair (M, P) plus what is left of each budget.
struct Allocation {
  std::map<ItemId, AgentId> assignment;
  std::vector<Rational> payments;           // indexed by agent index
  std::vector<Rational> remaining_budgets;  // indexed by agent index
  std::vector<SaleEvent> trace;

  [[nodiscard]] int items_held(AgentId a) const {
    return static_cast<int>(std::count_if(assignment.begin(), assignment.end(),
                                          [a](const auto& kv) { return kv.second == a; }));
  }
  [[nodiscard]] const Rational& payment(AgentId a) const { return payments.at(a.index()); }
  [[nodiscard]] const Rational& remaining(AgentId a) const { return remaining_budgets.at(a.index()); }

  [[nodiscard]] Rational revenue() const {
    Rational sum;
    for (const auto& p : payments) sum += p;
    return sum;
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// u_a = M_a * v_a - P_a
inline Rational utility(const Instance& inst, const Allocation& alloc, AgentId a) {
  return Rational(alloc.items_held(a)) * inst.agent(a).value - alloc.payment(a);
}

inline std::vector<ItemId> unsold_items(const Instance& inst, const Allocation& alloc) {
  std::vector<ItemId> out;
  for (ItemId t : inst.items) {
    if (!alloc.assignment.contains(t)) out.push_back(t);
  }
  return out;
}

// Shape checks needed before any analysis: sizes match, ids are known,
// interests respected, and payments + remaining = initial budget.
inline std::vector<std::string> structural_violations(const Instance& inst, const Allocation& alloc) {
  std::vector<std::string> out;
  const std::size_t n = inst.agent_count();
  if (alloc.payments.size() != n) out.push_back("payments vector has wrong length");
  if (alloc.remaining_budgets.size() != n) out.push_back("remaining budgets vector has wrong length");
  for (const auto& [t, a] : alloc.assignment) {
    if (t.value < 1 || static_cast<std::size_t>(t.value) > inst.item_count()) {
      out.push_back("unknown item " + std::to_string(t.value));
      continue;
    }
    if (a.value < 1 || static_cast<std::size_t>(a.value) > n) {
      out.push_back("unknown agent " + std::to_string(a.value));
      continue;
    }
    if (!inst.agent(a).interested_in(t)) {
      out.push_back("item " + std::to_string(t.value) + " assigned outside interests of agent " +
                    std::to_string(a.value));
    }
  }
  if (out.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (alloc.payments[i] + alloc.remaining_budgets[i] != inst.agents[i].budget) {
        out.push_back("payment + remaining != budget for agent " + std::to_string(i + 1));
      }
    }
  }
  return out;
}

// The full allocation invariant suite: structure, budget feasibility,
// no positive transfers, and payments equal to the sum of sale prices.
inline std::vector<std::string> allocation_violations(const Instance& inst, const Allocation& alloc) {
  auto out = structural_violations(inst, alloc);
  if (!out.empty()) return out;
  const std::size_t n = inst.agent_count();
  std::vector<Rational> sums(n);
  std::set<ItemId> traced;
  for (const auto& e : alloc.trace) {
    if (e.agent.value < 1 || static_cast<std::size_t>(e.agent.value) > n) {
      out.push_back("sale to unknown agent " + std::to_string(e.agent.value));
      continue;
    }
    sums[e.agent.index()] += e.price;
    if (!traced.insert(e.item).second) out.push_back("item " + std::to_string(e.item.value) + " sold twice");
    auto it = alloc.assignment.find(e.item);
    if (it == alloc.assignment.end() || it->second != e.agent) {
      out.push_back("sale of item " + std::to_string(e.item.value) + " disagrees with assignment");
    }
    if (e.price.sign() < 0) out.push_back("negative sale price");
    if (e.price > inst.agent(e.agent).value) {
      out.push_back("sale price above value for agent " + std::to_string(e.agent.value));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string who = std::to_string(i + 1);
    if (alloc.remaining_budgets[i].sign() < 0) out.push_back("negative remaining budget for agent " + who);
    if (alloc.payments[i].sign() < 0) out.push_back("positive transfer to agent " + who);
    if (alloc.payments[i] != sums[i]) out.push_back("payment differs from sale total for agent " + who);
  }
  return out;
}

struct AuctionState {
  Rational price;
  std::set<ItemId> unsold;
  std::vector<Rational> remaining_budgets;
  std::vector<bool> flags;  // H_a
  std::vector<SaleEvent> sales;

  static AuctionState initial(const Instance& inst) {
    AuctionState s;
    s.unsold.insert(inst.items.begin(), inst.items.end());
    for (const auto& a : inst.agents) s.remaining_budgets.push_back(a.budget);
    s.flags.assign(inst.agent_count(), false);
    return s;
  }

  [[nodiscard]] int unsold_count() const { return static_cast<int>(unsold.size()); }
};

}  // namespace clinch
