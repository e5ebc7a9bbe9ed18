#pragma once

// Slot filling and per-channel validation of rendered messages.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmf/domain.hpp"

namespace cmf {

/// Budgets and required parts imposed by one advertising channel.
struct ChannelProfile {
  std::string id;
  std::string display_name;
  std::map<StructuralPartKind, CharacterBudget> budgets;
  PartKindSet required_parts;

  bool operator==(const ChannelProfile&) const = default;
};

std::vector<std::string> profile_problems(const ChannelProfile& profile);

using Bindings = std::map<std::string, std::string>;

struct Message {
  std::string template_id;
  std::map<StructuralPartKind, std::string> parts;
  Bindings bindings;  // only the bindings that were used

  /// Parts in canonical order joined by newlines.
  std::string plain_text() const;
};

class MissingSlots : public std::runtime_error {
 public:
  explicit MissingSlots(std::set<std::string> names);
  const std::set<std::string>& names() const noexcept { return names_; }

 private:
  std::set<std::string> names_;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FillResult {
  Message message;
  std::vector<std::string> unused_bindings;
};

/// Substitutes every slot. Throws MissingSlots naming every unbound slot.
FillResult fill_slots(const TemplateSpec& spec, const Bindings& bindings);

struct PartMeasure {
  StructuralPartKind kind = StructuralPartKind::title;
  std::string text;
  CharacterBudget budget;
  BudgetVerdict verdict;
};

inline constexpr std::string_view kRuleBudgetExceeded = "budget_exceeded";
inline constexpr std::string_view kRuleMissingParts = "missing_parts";
inline constexpr std::string_view kRuleWithinExtension = "within_extension";

struct Violation {
  std::optional<StructuralPartKind> part;
  std::string rule;
  std::string detail;
  std::optional<std::size_t> length;
  std::optional<std::size_t> limit;
  PartKindSet missing;
};

/// `pass` holds exactly when `violations` is empty. Extension-allowance use
/// is reported under `warnings` and never fails a message.
struct ValidationReport {
  bool pass = true;
  std::vector<PartMeasure> parts;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
};

/// Throws ConfigurationError when the message holds a part the profile has
/// no budget for.
ValidationReport validate_message(const Message& msg, const TemplateSpec& spec, const ChannelProfile& profile);

}  // namespace cmf
