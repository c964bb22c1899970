#pragma once

// JSON instance and allocation files. External ids are arbitrary strings;
// inside the library they become dense 1-based ids in file order.
// Rationals travel as strings ("3", "5/2", "0.25"); integers are also
// accepted for convenience, floats never.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clinch/core.hpp"
#include "clinch/engine.hpp"

namespace clinch {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An instance together with the external names of its ids.
struct NamedInstance {
  Instance instance;
  std::vector<std::string> item_names;   // by item index
  std::vector<std::string> agent_names;  // by agent index

  [[nodiscard]] const std::string& item_name(ItemId t) const { return item_names.at(t.index()); }
  [[nodiscard]] const std::string& agent_name(AgentId a) const { return agent_names.at(a.index()); }
};

namespace detail {

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

inline std::string text(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.dump();
  throw ParseError(where + ": expected a string id");
}

inline Rational rational(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational::parse(j.dump());
  if (!j.is_string()) throw ParseError(where + ": expected an exact number as a string, e.g. \"5/2\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception&) {
    throw ParseError(where + ": not an exact number: \"" + j.get<std::string>() + "\"");
  }
}

inline const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a list");
  return j;
}

inline Json parse_text(const std::string& body, const std::string& origin) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline bool names_item(IssueKind k) {
  return k == IssueKind::UncoveredItem || k == IssueKind::DuplicateItemId || k == IssueKind::UnknownInterestItem;
}

}  // namespace detail

// Parses an instance document. Shape errors raise ParseError; content
// errors (duplicates, unknown interests, bad values, uncovered items) are
// collected and raised together as a ValidationError naming external ids.
inline NamedInstance instance_from_json(const Json& doc) {
  NamedInstance out;
  ValidationReport report;
  std::map<std::string, ItemId> item_ids;

  const Json& items = detail::array(detail::field(doc, "items", "instance"), "items");
  for (std::size_t j = 0; j < items.size(); ++j) {
    std::string name = detail::text(items[j], "items[" + std::to_string(j) + "]");
    const ItemId id = ItemId::from_index(out.item_names.size());
    if (!item_ids.emplace(name, id).second) {
      report.issues.push_back({IssueKind::DuplicateItemId, name, {}});
      continue;
    }
    out.instance.items.push_back(id);
    out.item_names.push_back(std::move(name));
  }

  std::map<std::string, AgentId> agent_ids;
  const Json& agents = detail::array(detail::field(doc, "agents", "instance"), "agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string where = "agents[" + std::to_string(i) + "]";
    const Json& a = agents[i];
    std::string name = detail::text(detail::field(a, "id", where), where + ".id");
    AgentSpec spec;
    spec.value = detail::rational(detail::field(a, "value", where), where + ".value");
    spec.budget = detail::rational(detail::field(a, "budget", where), where + ".budget");
    const Json& wants = detail::array(detail::field(a, "interests", where), where + ".interests");
    for (std::size_t k = 0; k < wants.size(); ++k) {
      const std::string item = detail::text(wants[k], where + ".interests[" + std::to_string(k) + "]");
      auto it = item_ids.find(item);
      if (it == item_ids.end()) {
        report.issues.push_back({IssueKind::UnknownInterestItem, item, "in interests of agent " + name});
        continue;
      }
      spec.interests.push_back(it->second);
    }
    std::sort(spec.interests.begin(), spec.interests.end());
    spec.interests.erase(std::unique(spec.interests.begin(), spec.interests.end()), spec.interests.end());

    spec.id = AgentId::from_index(out.agent_names.size());
    if (!agent_ids.emplace(name, spec.id).second) {
      report.issues.push_back({IssueKind::DuplicateAgentId, name, {}});
      continue;
    }
    out.instance.agents.push_back(std::move(spec));
    out.agent_names.push_back(std::move(name));
  }

  for (auto issue : validate_instance(out.instance).issues) {
    const int id = std::stoi(issue.subject);
    issue.subject = detail::names_item(issue.kind) ? out.item_names.at(static_cast<std::size_t>(id - 1))
                                                   : out.agent_names.at(static_cast<std::size_t>(id - 1));
    report.issues.push_back(std::move(issue));
  }
  if (!report.ok()) throw ValidationError(std::move(report));
  return out;
}

inline NamedInstance read_instance(const std::string& path) {
  return instance_from_json(detail::parse_text(detail::slurp(path), path));
}

// Instance with generated names t1.., a1.. for the dense ids.
inline NamedInstance name_instance(Instance inst) {
  NamedInstance out;
  for (ItemId t : inst.items) out.item_names.push_back("t" + std::to_string(t.value));
  for (const auto& a : inst.agents) out.agent_names.push_back("a" + std::to_string(a.id.value));
  out.instance = std::move(inst);
  return out;
}

inline Json instance_to_json(const NamedInstance& ni) {
  Json doc;
  doc["items"] = Json::array();
  for (const auto& name : ni.item_names) doc["items"].push_back(name);
  doc["agents"] = Json::array();
  for (const auto& a : ni.instance.agents) {
    Json interests = Json::array();
    for (ItemId t : a.interests) interests.push_back(ni.item_name(t));
    doc["agents"].push_back(Json{{"id", ni.agent_name(a.id)},
                                 {"value", a.value.str()},
                                 {"budget", a.budget.str()},
                                 {"interests", std::move(interests)}});
  }
  return doc;
}

inline const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Sale: return "sale";
    case TraceKind::PriceChange: return "price";
    case TraceKind::FlagCleared: return "flag-cleared";
  }
  return "unknown";
}

// Assignments are listed in sale order. The optional trace adds price
// changes and flag resets between the sales.
inline Json allocation_to_json(const NamedInstance& ni, const Allocation& alloc,
                               const std::vector<TraceEvent>* events = nullptr) {
  const Instance& inst = ni.instance;
  Json doc;
  doc["assignments"] = Json::array();
  std::vector<SaleEvent> sales = alloc.trace;
  std::stable_sort(sales.begin(), sales.end(), [](const auto& x, const auto& y) { return x.sequence < y.sequence; });
  for (const auto& e : sales) {
    doc["assignments"].push_back(Json{{"item", ni.item_name(e.item)},
                                      {"agent", ni.agent_name(e.agent)},
                                      {"price", e.price.str()},
                                      {"sequence", e.sequence},
                                      {"reason", to_string(e.reason)}});
  }
  doc["payments"] = Json::array();
  doc["remaining_budgets"] = Json::array();
  Json utilities = Json::array();
  for (const auto& a : inst.agents) {
    doc["payments"].push_back(Json{{"agent", ni.agent_name(a.id)}, {"amount", alloc.payment(a.id).str()}});
    doc["remaining_budgets"].push_back(Json{{"agent", ni.agent_name(a.id)}, {"amount", alloc.remaining(a.id).str()}});
    utilities.push_back(Json{{"agent", ni.agent_name(a.id)}, {"utility", utility(inst, alloc, a.id).str()}});
  }
  Json unsold = Json::array();
  for (ItemId t : unsold_items(inst, alloc)) unsold.push_back(ni.item_name(t));
  doc["summary"] = Json{{"revenue", alloc.revenue().str()}, {"utilities", std::move(utilities)}, {"unsold", std::move(unsold)}};

  if (events != nullptr) {
    Json trace = Json::array();
    for (const auto& ev : *events) {
      Json entry{{"event", to_string(ev.kind)}, {"price", ev.price.str()}};
      if (ev.agent) entry["agent"] = ni.agent_name(*ev.agent);
      if (ev.item) entry["item"] = ni.item_name(*ev.item);
      if (ev.reason) entry["reason"] = to_string(*ev.reason);
      trace.push_back(std::move(entry));
    }
    doc["trace"] = std::move(trace);
  }
  return doc;
}

// Reads an allocation against a named instance. Each assignment needs an
// item, an agent and a price; sequence defaults to list order and reason to
// "avoid-clinch". Missing payments default to the sum of the agent's prices,
// missing remaining budgets to budget minus payment. Consistency with the
// instance is the caller's business (see structural_violations).
inline Allocation allocation_from_json(const Json& doc, const NamedInstance& ni) {
  const Instance& inst = ni.instance;
  std::map<std::string, ItemId> items;
  std::map<std::string, AgentId> agents;
  for (ItemId t : inst.items) items.emplace(ni.item_name(t), t);
  for (const auto& a : inst.agents) agents.emplace(ni.agent_name(a.id), a.id);

  auto lookup = [](const auto& table, const std::string& name, const std::string& where) {
    auto it = table.find(name);
    if (it == table.end()) throw ParseError(where + ": unknown id \"" + name + "\"");
    return it->second;
  };

  Allocation alloc;
  const std::size_t n = inst.agent_count();
  std::vector<Rational> sums(n);
  const Json& list = detail::array(detail::field(doc, "assignments", "allocation"), "assignments");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "assignments[" + std::to_string(k) + "]";
    const Json& e = list[k];
    SaleEvent sale;
    sale.item = lookup(items, detail::text(detail::field(e, "item", where), where + ".item"), where);
    sale.agent = lookup(agents, detail::text(detail::field(e, "agent", where), where + ".agent"), where);
    sale.price = detail::rational(detail::field(e, "price", where), where + ".price");
    sale.sequence = static_cast<int>(k) + 1;
    if (auto it = e.find("sequence"); it != e.end()) {
      if (!it->is_number_integer()) throw ParseError(where + ".sequence: expected an integer");
      sale.sequence = it->get<int>();
    }
    if (auto it = e.find("reason"); it != e.end()) {
      const std::string r = detail::text(*it, where + ".reason");
      if (r == "value-limited-clinch") {
        sale.reason = SaleReason::ValueLimitedClinch;
      } else if (r == "avoid-clinch") {
        sale.reason = SaleReason::AvoidClinch;
      } else {
        throw ParseError(where + ".reason: unknown reason \"" + r + "\"");
      }
    }
    if (!alloc.assignment.emplace(sale.item, sale.agent).second) {
      throw ParseError(where + ": item \"" + ni.item_name(sale.item) + "\" assigned twice");
    }
    sums[sale.agent.index()] += sale.price;
    alloc.trace.push_back(std::move(sale));
  }

  auto per_agent = [&](const char* key, std::vector<std::optional<Rational>>& into) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    const Json& rows = detail::array(*it, key);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::string where = std::string(key) + "[" + std::to_string(k) + "]";
      const AgentId a = lookup(agents, detail::text(detail::field(rows[k], "agent", where), where + ".agent"), where);
      if (into[a.index()]) throw ParseError(where + ": agent listed twice");
      into[a.index()] = detail::rational(detail::field(rows[k], "amount", where), where + ".amount");
    }
  };
  std::vector<std::optional<Rational>> paid(n);
  std::vector<std::optional<Rational>> left(n);
  per_agent("payments", paid);
  per_agent("remaining_budgets", left);
  for (std::size_t i = 0; i < n; ++i) {
    alloc.payments.push_back(paid[i].value_or(sums[i]));
    alloc.remaining_budgets.push_back(left[i].value_or(inst.agents[i].budget - alloc.payments.back()));
  }
  return alloc;
}

inline Allocation read_allocation(const std::string& path, const NamedInstance& ni) {
  return allocation_from_json(detail::parse_text(detail::slurp(path), path), ni);
}

// Canonical text: two-space indent, fields in fixed order, trailing newline.
inline std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace clinch
