#pragma once

// Propositional production system: attribute facts, IF-THEN rules and a
// forward chainer with deterministic conflict resolution.

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmf {

using Value = std::variant<std::string, std::int64_t, bool>;

/// Plain text form used for metadata matching: strings verbatim, integers
/// in decimal, booleans as true/false.
std::string value_text(const Value& v);

/// Human-readable form with strings quoted.
std::string describe_value(const Value& v);

struct Fact {
  std::string attribute;
  Value value;

  bool operator==(const Fact&) const = default;
};

/// Raised when an attribute would receive a second, different value.
class FactConflict : public std::runtime_error {
 public:
  FactConflict(std::string attribute, Value existing, Value attempted, std::string rule_id = {});

  const std::string& attribute() const noexcept { return attribute_; }
  const Value& existing() const noexcept { return existing_; }
  const Value& attempted() const noexcept { return attempted_; }
  /// Empty unless the conflict came from firing a rule.
  const std::string& rule_id() const noexcept { return rule_id_; }

 private:
  std::string attribute_;
  Value existing_;
  Value attempted_;
  std::string rule_id_;
};

/// Immutable set of facts with one value per attribute.
class FactBase {
 public:
  using Map = std::map<std::string, Value, std::less<>>;

  FactBase() = default;

  /// Copy of this base plus `fact`. Re-asserting an identical fact is a
  /// no-op; a different value for a held attribute throws FactConflict.
  /// Throws std::invalid_argument for a malformed attribute name.
  FactBase with(const Fact& fact) const;

  const Value* find(std::string_view attribute) const;
  bool contains(const Fact& fact) const;
  std::size_t size() const noexcept { return facts_.size(); }
  bool empty() const noexcept { return facts_.empty(); }
  const Map& facts() const noexcept { return facts_; }

  bool operator==(const FactBase&) const = default;

 private:
  Map facts_;
};

FactBase assert_fact(const FactBase& base, const Fact& fact);

enum class ConditionOp { eq, neq, in_set, lt, gt };

std::string_view to_string(ConditionOp op) noexcept;

struct Condition {
  std::string attribute;
  ConditionOp op = ConditionOp::eq;
  /// A single value for eq/neq/lt/gt, a value list for in_set.
  std::variant<Value, std::vector<Value>> operand;

  /// Closed world: a condition on an absent attribute is never satisfied.
  bool satisfied_by(const FactBase& base) const;

  bool operator==(const Condition&) const = default;
};

struct ProductionRule {
  std::string id;
  std::int64_t priority = 0;
  std::vector<Condition> conditions;  // conjunction
  std::vector<Fact> actions;

  bool operator==(const ProductionRule&) const = default;
};

std::vector<std::string> rule_problems(const ProductionRule& rule);

/// Conflict-resolution order: higher priority first, then more conditions,
/// then smaller id. Total over rules with distinct ids.
bool fires_before(const ProductionRule& a, const ProductionRule& b) noexcept;

/// Validated rule collection; ids are unique and every rule is well-formed.
class RuleSet {
 public:
  RuleSet() = default;
  /// Throws std::invalid_argument listing every problem found.
  explicit RuleSet(std::vector<ProductionRule> rules);

  const std::vector<ProductionRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }

 private:
  std::vector<ProductionRule> rules_;
};

bool match_rule(const ProductionRule& rule, const FactBase& base);

struct Firing {
  std::string rule_id;
  std::vector<Fact> asserted;

  bool operator==(const Firing&) const = default;
};

using FiringTrace = std::vector<Firing>;

struct ChainResult {
  FactBase facts;
  FiringTrace trace;
};

/// Fires matching rules one at a time, each at most once, until none match.
/// A firing that contradicts an existing fact throws FactConflict carrying
/// the rule id.
ChainResult run_forward_chain(const FactBase& base, const RuleSet& rules);

}  // namespace cmf
