#pragma once

// Core model of a text communication message template: per-part semantics,
// stylistic format, character budget and ordered structure.

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmf/pattern.hpp"

namespace cmf {

/// True when `s` matches `[a-z][a-z0-9_]*`.
bool is_identifier(std::string_view s) noexcept;

/// Byte offset of the first malformed UTF-8 sequence, or npos if `s` is
/// well-formed (overlongs, surrogates and values above U+10FFFF rejected).
std::size_t find_invalid_utf8(std::string_view s) noexcept;

/// Meaning role carried by a structural part (usp_focus, attention_draw, ...).
class SemanticTag {
 public:
  /// Throws std::invalid_argument unless `name` is an identifier.
  explicit SemanticTag(std::string name);

  const std::string& name() const noexcept { return name_; }
  auto operator<=>(const SemanticTag&) const = default;

 private:
  std::string name_;
};

/// Stylistic device of a part (question, argument, ...).
class Format {
 public:
  explicit Format(std::string name);

  const std::string& name() const noexcept { return name_; }
  auto operator<=>(const Format&) const = default;

 private:
  std::string name_;
};

const std::vector<SemanticTag>& default_semantic_tags();
const std::vector<Format>& default_formats();

/// Closed set of format names a catalog accepts.
using FormatVocabulary = std::set<std::string>;
FormatVocabulary default_format_vocabulary();

/// Symbol allowance for one part. The hard limit is base + extension.
struct CharacterBudget {
  std::size_t base = 0;
  std::size_t extension = 0;

  std::size_t effective_limit() const noexcept { return base + extension; }
  bool operator==(const CharacterBudget&) const = default;
};

/// Structural parts in canonical order. The enumerator values define that order.
enum class StructuralPartKind {
  tagline = 0,
  title = 1,
  main_text = 2,
  reference_info = 3,
  echo_phrase = 4,
};

inline constexpr std::array<StructuralPartKind, 5> kAllPartKinds = {
    StructuralPartKind::tagline, StructuralPartKind::title, StructuralPartKind::main_text,
    StructuralPartKind::reference_info, StructuralPartKind::echo_phrase};

std::string_view to_string(StructuralPartKind kind) noexcept;
std::optional<StructuralPartKind> part_kind_from_string(std::string_view name) noexcept;

using PartKindSet = std::set<StructuralPartKind>;

struct PartSpec {
  StructuralPartKind kind = StructuralPartKind::title;
  std::set<SemanticTag> semantics;
  Format format{"argument"};
  CharacterBudget budget;
  Pattern pattern;

  bool operator==(const PartSpec&) const = default;
};

/// One template: the ⟨semantics, format, budget, structure⟩ tuple plus the
/// metadata the recommender matches against.
struct TemplateSpec {
  std::string id;
  std::string channel;
  std::vector<PartSpec> parts;
  std::map<std::string, std::string> metadata;

  const PartSpec* find_part(StructuralPartKind kind) const noexcept;
  PartKindSet part_kinds() const;

  bool operator==(const TemplateSpec&) const = default;
};

/// Returns every invariant violation of `spec` as a readable message; empty
/// means the spec is well-formed.
std::vector<std::string> template_problems(const TemplateSpec& spec);

/// Number of Unicode code points. Bytes that are not UTF-8 continuation bytes
/// each count as one, so the result is defined for any byte string.
std::size_t count_symbols(std::string_view text) noexcept;

enum class BudgetStatus { within_base = 0, within_extension = 1, exceeded = 2 };

std::string_view to_string(BudgetStatus status) noexcept;

struct BudgetVerdict {
  BudgetStatus status = BudgetStatus::within_base;
  std::size_t length = 0;

  bool operator==(const BudgetVerdict&) const = default;
};

BudgetVerdict check_budget(std::string_view text, const CharacterBudget& budget) noexcept;
BudgetVerdict classify_length(std::size_t length, const CharacterBudget& budget) noexcept;

struct StructureVerdict {
  PartKindSet missing;

  bool complete() const noexcept { return missing.empty(); }
  bool operator==(const StructureVerdict&) const = default;
};

StructureVerdict check_structure(const PartKindSet& present, const PartKindSet& required);

}  // namespace cmf
