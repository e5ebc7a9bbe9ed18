#include "cmf/rules.hpp"

#include <algorithm>
#include <set>

#include "cmf/domain.hpp"

namespace cmf {

std::string value_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<bool>(v) ? "true" : "false";
}

std::string describe_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  return value_text(v);
}

FactConflict::FactConflict(std::string attribute, Value existing, Value attempted, std::string rule_id)
    : std::runtime_error((rule_id.empty() ? std::string() : "rule '" + rule_id + "': ") + "attribute '" +
                         attribute + "' already holds " + describe_value(existing) + ", cannot assert " +
                         describe_value(attempted)),
      attribute_(std::move(attribute)),
      existing_(std::move(existing)),
      attempted_(std::move(attempted)),
      rule_id_(std::move(rule_id)) {}

FactBase FactBase::with(const Fact& fact) const {
  if (!is_identifier(fact.attribute)) {
    throw std::invalid_argument("fact attribute '" + fact.attribute + "' must match [a-z][a-z0-9_]*");
  }
  if (const auto it = facts_.find(fact.attribute); it != facts_.end()) {
    if (it->second == fact.value) return *this;
    throw FactConflict(fact.attribute, it->second, fact.value);
  }
  FactBase out = *this;
  out.facts_.emplace(fact.attribute, fact.value);
  return out;
}

const Value* FactBase::find(std::string_view attribute) const {
  const auto it = facts_.find(attribute);
  return it == facts_.end() ? nullptr : &it->second;
}

bool FactBase::contains(const Fact& fact) const {
  const Value* v = find(fact.attribute);
  return v && *v == fact.value;
}

FactBase assert_fact(const FactBase& base, const Fact& fact) { return base.with(fact); }

std::string_view to_string(ConditionOp op) noexcept {
  switch (op) {
    case ConditionOp::eq: return "eq";
    case ConditionOp::neq: return "neq";
    case ConditionOp::in_set: return "in";
    case ConditionOp::lt: return "lt";
    case ConditionOp::gt: return "gt";
  }
  return "?";
}

bool Condition::satisfied_by(const FactBase& base) const {
  const Value* held = base.find(attribute);
  if (!held) return false;
  if (op == ConditionOp::in_set) {
    const auto* set = std::get_if<std::vector<Value>>(&operand);
    return set && std::find(set->begin(), set->end(), *held) != set->end();
  }
  const auto* expected = std::get_if<Value>(&operand);
  if (!expected) return false;
  switch (op) {
    case ConditionOp::eq: return *held == *expected;
    case ConditionOp::neq: return *held != *expected;
    case ConditionOp::lt:
    case ConditionOp::gt: {
      const auto* lhs = std::get_if<std::int64_t>(held);
      const auto* rhs = std::get_if<std::int64_t>(expected);
      if (!lhs || !rhs) return false;
      return op == ConditionOp::lt ? *lhs < *rhs : *lhs > *rhs;
    }
    case ConditionOp::in_set: break;
  }
  return false;
}

std::vector<std::string> rule_problems(const ProductionRule& rule) {
  std::vector<std::string> problems;
  const std::string where = "rule '" + rule.id + "': ";
  if (!is_identifier(rule.id)) problems.push_back(where + "id must match [a-z][a-z0-9_]*");
  if (rule.conditions.empty()) problems.push_back(where + "needs at least one condition");
  if (rule.actions.empty()) problems.push_back(where + "needs at least one action");
  for (const auto& c : rule.conditions) {
    if (!is_identifier(c.attribute)) problems.push_back(where + "condition attribute '" + c.attribute + "' is invalid");
    if (c.op == ConditionOp::in_set) {
      const auto* set = std::get_if<std::vector<Value>>(&c.operand);
      if (!set || set->empty()) problems.push_back(where + "'in' on '" + c.attribute + "' needs a nonempty value list");
      continue;
    }
    const auto* v = std::get_if<Value>(&c.operand);
    if (!v) {
      problems.push_back(where + "'" + std::string(to_string(c.op)) + "' on '" + c.attribute + "' needs a single value");
    } else if ((c.op == ConditionOp::lt || c.op == ConditionOp::gt) && !std::holds_alternative<std::int64_t>(*v)) {
      problems.push_back(where + "'" + std::string(to_string(c.op)) + "' on '" + c.attribute + "' needs an integer");
    }
  }
  std::set<std::string> asserted;
  for (const auto& a : rule.actions) {
    if (!is_identifier(a.attribute)) problems.push_back(where + "action attribute '" + a.attribute + "' is invalid");
    if (!asserted.insert(a.attribute).second) {
      problems.push_back(where + "asserts '" + a.attribute + "' more than once");
    }
    for (const auto& c : rule.conditions) {
      if (c.op != ConditionOp::neq || c.attribute != a.attribute) continue;
      const auto* v = std::get_if<Value>(&c.operand);
      if (v && *v == a.value) {
        problems.push_back(where + "asserts " + a.attribute + " = " + describe_value(a.value) +
                           " while requiring it to differ from that value");
      }
    }
  }
  return problems;
}

bool fires_before(const ProductionRule& a, const ProductionRule& b) noexcept {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.conditions.size() != b.conditions.size()) return a.conditions.size() > b.conditions.size();
  return a.id < b.id;
}

RuleSet::RuleSet(std::vector<ProductionRule> rules) : rules_(std::move(rules)) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& rule : rules_) {
    auto p = rule_problems(rule);
    problems.insert(problems.end(), p.begin(), p.end());
    if (!ids.insert(rule.id).second) problems.push_back("duplicate rule id '" + rule.id + "'");
  }
  if (!problems.empty()) {
    std::string message = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) message += "; " + problems[i];
    throw std::invalid_argument(message);
  }
}

bool match_rule(const ProductionRule& rule, const FactBase& base) {
  return std::all_of(rule.conditions.begin(), rule.conditions.end(),
                     [&](const Condition& c) { return c.satisfied_by(base); });
}

ChainResult run_forward_chain(const FactBase& base, const RuleSet& rules) {
  // Agenda in conflict-resolution order, so the first match found each
  // cycle is the one to fire.
  std::vector<const ProductionRule*> agenda;
  agenda.reserve(rules.size());
  for (const auto& r : rules.rules()) agenda.push_back(&r);
  std::sort(agenda.begin(), agenda.end(), [](const auto* a, const auto* b) { return fires_before(*a, *b); });

  ChainResult result{base, {}};
  std::vector<bool> fired(agenda.size(), false);
  while (true) {
    std::size_t pick = agenda.size();
    for (std::size_t i = 0; i < agenda.size(); ++i) {
      if (!fired[i] && match_rule(*agenda[i], result.facts)) {
        pick = i;
        break;
      }
    }
    if (pick == agenda.size()) break;
    const auto& rule = *agenda[pick];
    fired[pick] = true;
    for (const auto& action : rule.actions) {
      try {
        result.facts = result.facts.with(action);
      } catch (const FactConflict& c) {
        throw FactConflict(c.attribute(), c.existing(), c.attempted(), rule.id);
      }
    }
    result.trace.push_back(Firing{rule.id, rule.actions});
  }
  return result;
}

}  // namespace cmf
