#pragma once

// Reference evaluation of a production system, written without the engine:
// its own condition evaluator, its own ranking key and an exhaustive search
// over firing sequences.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cmf/rules.hpp"

namespace cmf::testing {

struct OracleOutcome {
  std::map<std::string, Value> facts;
  std::vector<std::pair<std::string, std::vector<Fact>>> trace;
  std::optional<std::pair<std::string, std::string>> conflict;  // (rule id, attribute)
};

namespace detail {

using Facts = std::map<std::string, Value>;
using RankKey = std::tuple<std::int64_t, std::int64_t, std::string>;  // (-priority, -conditions, id)

inline bool holds(const Condition& c, const Facts& facts) {
  const auto it = facts.find(c.attribute);
  if (it == facts.end()) return false;
  const Value& v = it->second;
  if (c.op == ConditionOp::in_set) {
    for (const auto& option : std::get<std::vector<Value>>(c.operand)) {
      if (option == v) return true;
    }
    return false;
  }
  const Value& operand = std::get<Value>(c.operand);
  if (c.op == ConditionOp::eq) return v == operand;
  if (c.op == ConditionOp::neq) return !(v == operand);
  if (!std::holds_alternative<std::int64_t>(v)) return false;
  const auto lhs = std::get<std::int64_t>(v), rhs = std::get<std::int64_t>(operand);
  return c.op == ConditionOp::lt ? lhs < rhs : lhs > rhs;
}

inline bool enabled(const ProductionRule& r, const Facts& facts) {
  for (const auto& c : r.conditions) {
    if (!holds(c, facts)) return false;
  }
  return true;
}

struct Step {
  std::size_t rule;
  bool conflict = false;
  std::string attribute;
};

struct Search {
  const std::vector<ProductionRule>& rules;
  std::vector<RankKey> keys;
  bool exhaustive;
  std::optional<std::vector<Step>> best;

  bool less(const std::vector<Step>& a, const std::vector<Step>& b) const {
    const auto n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (keys[a[i].rule] != keys[b[i].rule]) return keys[a[i].rule] < keys[b[i].rule];
    }
    return a.size() < b.size();
  }

  // Returns true when the search may stop (non-exhaustive mode found the
  // lexicographically first sequence).
  bool explore(const Facts& facts, std::vector<bool>& fired, std::vector<Step>& seq) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (!fired[i] && enabled(rules[i], facts)) candidates.push_back(i);
    }
    if (candidates.empty()) {
      if (!best || less(seq, *best)) best = seq;
      return !exhaustive;
    }
    std::sort(candidates.begin(), candidates.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    for (auto i : candidates) {
      Facts next = facts;
      Step step{i};
      for (const auto& act : rules[i].actions) {
        const auto it = next.find(act.attribute);
        if (it != next.end() && !(it->second == act.value)) {
          step.conflict = true;
          step.attribute = act.attribute;
          break;
        }
        next.emplace(act.attribute, act.value);
      }
      seq.push_back(step);
      if (step.conflict) {
        if (!best || less(seq, *best)) best = seq;
        seq.pop_back();
        if (!exhaustive) return true;
        continue;
      }
      fired[i] = true;
      const bool stop = explore(next, fired, seq);
      fired[i] = false;
      seq.pop_back();
      if (stop) return true;
    }
    return false;
  }
};

}  // namespace detail

/// Enumerates maximal firing sequences and keeps the lexicographically
/// smallest one under the (priority desc, conditions desc, id asc) ranking.
/// Every sequence is enumerated when the system has at most
/// `exhaustive_limit` rules; larger systems stop at the first sequence in
/// ranking order, which is the same minimum.
inline OracleOutcome oracle_forward_chain(const FactBase& base, const std::vector<ProductionRule>& rules,
                                          std::size_t exhaustive_limit = 7) {
  detail::Search search{rules, {}, rules.size() <= exhaustive_limit, std::nullopt};
  for (const auto& r : rules) {
    search.keys.emplace_back(-r.priority, -static_cast<std::int64_t>(r.conditions.size()), r.id);
  }
  detail::Facts facts(base.facts().begin(), base.facts().end());
  std::vector<bool> fired(rules.size(), false);
  std::vector<detail::Step> seq;
  search.explore(facts, fired, seq);

  OracleOutcome out;
  out.facts = facts;
  for (const auto& step : *search.best) {
    const auto& rule = rules[step.rule];
    if (step.conflict) {
      out.conflict = std::make_pair(rule.id, step.attribute);
      break;
    }
    for (const auto& act : rule.actions) out.facts.emplace(act.attribute, act.value);
    out.trace.emplace_back(rule.id, rule.actions);
  }
  return out;
}

/// Order-free fixpoint: apply every enabled rule until nothing changes.
/// Valid for conflict-free systems because facts are never retracted, so a
/// rule once enabled stays enabled.
inline std::map<std::string, Value> fixpoint_facts(const FactBase& base, const std::vector<ProductionRule>& rules) {
  detail::Facts facts(base.facts().begin(), base.facts().end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      if (!detail::enabled(r, facts)) continue;
      for (const auto& act : r.actions) changed = facts.emplace(act.attribute, act.value).second || changed;
    }
  }
  return facts;
}

}  // namespace cmf::testing
