#pragma once

// The CLI subcommands as plain functions returning exit codes, so tests
// can drive them without a process boundary.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "clinch/engine.hpp"
#include "clinch/fuzz.hpp"
#include "clinch/generate.hpp"
#include "clinch/io.hpp"
#include "clinch/verifier.hpp"

namespace clinch {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse = 1;
inline constexpr int validation = 2;
inline constexpr int verification = 3;
inline constexpr int invariant = 4;
}  // namespace exit_code

namespace detail {

inline int emit(const std::string& body, const std::optional<std::string>& out_path, std::ostream& out,
                std::ostream& err) {
  if (!out_path) {
    out << body;
    return exit_code::ok;
  }
  std::ofstream file(*out_path, std::ios::binary);
  if (!file || !(file << body)) {
    err << "error: cannot write " << *out_path << '\n';
    return exit_code::parse;
  }
  return exit_code::ok;
}

}  // namespace detail

inline int cmd_run(const std::string& instance_path, bool emit_trace, const std::optional<std::string>& out_path,
                   std::ostream& out, std::ostream& err) {
  try {
    const NamedInstance ni = read_instance(instance_path);
    const RunResult result = run_auction_traced(ni.instance);
    const Json doc = allocation_to_json(ni, result.allocation, emit_trace ? &result.events : nullptr);
    return detail::emit(render(doc), out_path, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const ValidationError& e) {
    err << e.what();
    return exit_code::validation;
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << '\n';
    return exit_code::invariant;
  }
}

inline int cmd_verify(const std::string& instance_path, const std::string& allocation_path, std::ostream& out,
                      std::ostream& err) {
  try {
    const NamedInstance ni = read_instance(instance_path);
    const Allocation alloc = read_allocation(allocation_path, ni);
    if (auto problems = structural_violations(ni.instance, alloc); !problems.empty()) {
      err << "allocation does not fit the instance:\n";
      for (const auto& p : problems) err << "  " << p << '\n';
      return exit_code::parse;
    }
    const Verdict v = pareto_verify(ni.instance, alloc);
    if (v.pareto_optimal) {
      out << "PARETO-OPTIMAL\n";
      return exit_code::ok;
    }
    out << "NOT PARETO-OPTIMAL\n";
    if (const auto* unsold = std::get_if<UnsoldItems>(&*v.failure)) {
      out << "unsold items:";
      for (ItemId t : unsold->items) out << ' ' << ni.item_name(t);
      out << '\n';
    } else {
      const TradingPath& p = std::get<TradingPathFound>(*v.failure).path;
      out << "trading path: (";
      for (std::size_t i = 0; i < p.agents.size(); ++i) {
        if (i > 0) out << ", " << ni.item_name(p.items[i - 1]) << ", ";
        out << ni.agent_name(p.agents[i]);
      }
      out << ")\n";
    }
    return exit_code::verification;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_code::parse;
  } catch (const ValidationError& e) {
    err << e.what();
    return exit_code::validation;
  }
}

inline int cmd_gen(const GenParams& params, const std::optional<std::string>& out_path, std::ostream& out,
                   std::ostream& err) {
  try {
    const NamedInstance ni = name_instance(generate_instance(params));
    return detail::emit(render(instance_to_json(ni)), out_path, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::parse;
  }
}

inline int cmd_fuzz(const FuzzConfig& cfg, std::ostream& out, std::ostream& err) {
  FuzzReport report;
  try {
    report = run_fuzz(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::parse;
  }
  out << "cases: " << report.cases_run << ", passed: " << report.cases_passed << ", checks: " << report.checks
      << '\n';
  if (report.ok()) {
    out << "OK\n";
    return exit_code::ok;
  }
  out << "FAILED at case " << *report.failed_case << ": " << report.failure << '\n';
  out << "reproduce with: clinch run " << report.artifact << '\n';
  return exit_code::verification;
}

}  // namespace clinch
