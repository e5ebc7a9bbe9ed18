#include "cmf/domain.hpp"

#include <algorithm>
#include <iterator>

namespace cmf {

bool is_identifier(std::string_view s) noexcept {
  if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::size_t find_invalid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    unsigned lo = 0x80, hi = 0xBF;  // allowed range of the second byte
    if (b0 >= 0xC2 && b0 <= 0xDF) {
      len = 2;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
      len = 3;
      if (b0 == 0xE0) lo = 0xA0;
      if (b0 == 0xED) hi = 0x9F;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
      len = 4;
      if (b0 == 0xF0) lo = 0x90;
      if (b0 == 0xF4) hi = 0x8F;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    const auto b1 = static_cast<unsigned char>(s[i + 1]);
    if (b1 < lo || b1 > hi) return i;
    for (std::size_t k = 2; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0u) != 0x80u) return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

SemanticTag::SemanticTag(std::string name) : name_(std::move(name)) {
  if (!is_identifier(name_)) throw std::invalid_argument("invalid semantic tag '" + name_ + "'");
}

Format::Format(std::string name) : name_(std::move(name)) {
  if (!is_identifier(name_)) throw std::invalid_argument("invalid format name '" + name_ + "'");
}

const std::vector<SemanticTag>& default_semantic_tags() {
  static const std::vector<SemanticTag> tags = {
      SemanticTag{"attention_draw"}, SemanticTag{"usp_focus"},     SemanticTag{"audience_address"},
      SemanticTag{"problem_statement"}, SemanticTag{"benefit"},    SemanticTag{"call_to_action"},
      SemanticTag{"reinforcement"},  SemanticTag{"contact_details"},
  };
  return tags;
}

const std::vector<Format>& default_formats() {
  static const std::vector<Format> formats = {
      Format{"question"},  Format{"argument"},  Format{"invitation_to_action"},
      Format{"problem_appeal"}, Format{"statement"},
  };
  return formats;
}

FormatVocabulary default_format_vocabulary() {
  FormatVocabulary vocab;
  for (const auto& f : default_formats()) vocab.insert(f.name());
  return vocab;
}

std::string_view to_string(StructuralPartKind kind) noexcept {
  switch (kind) {
    case StructuralPartKind::tagline: return "tagline";
    case StructuralPartKind::title: return "title";
    case StructuralPartKind::main_text: return "main_text";
    case StructuralPartKind::reference_info: return "reference_info";
    case StructuralPartKind::echo_phrase: return "echo_phrase";
  }
  return "?";
}

std::optional<StructuralPartKind> part_kind_from_string(std::string_view name) noexcept {
  for (auto kind : kAllPartKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

const PartSpec* TemplateSpec::find_part(StructuralPartKind kind) const noexcept {
  for (const auto& part : parts) {
    if (part.kind == kind) return &part;
  }
  return nullptr;
}

PartKindSet TemplateSpec::part_kinds() const {
  PartKindSet kinds;
  for (const auto& part : parts) kinds.insert(part.kind);
  return kinds;
}

std::vector<std::string> template_problems(const TemplateSpec& spec) {
  std::vector<std::string> problems;
  if (!is_identifier(spec.id)) problems.push_back("template id '" + spec.id + "' is not an identifier");
  if (!is_identifier(spec.channel)) problems.push_back("channel '" + spec.channel + "' is not an identifier");
  if (spec.parts.empty()) problems.push_back("template declares no parts");
  for (const auto& [key, value] : spec.metadata) {
    if (!is_identifier(key)) problems.push_back("metadata key '" + key + "' is not an identifier");
  }
  for (std::size_t i = 0; i < spec.parts.size(); ++i) {
    const auto& part = spec.parts[i];
    const std::string name(to_string(part.kind));
    if (i > 0 && spec.parts[i - 1].kind >= part.kind) {
      problems.push_back(spec.parts[i - 1].kind == part.kind ? "duplicate part '" + name + "'"
                                                              : "part '" + name + "' is out of canonical order");
    }
    if (part.semantics.empty() && part.kind != StructuralPartKind::reference_info) {
      problems.push_back("part '" + name + "' must declare at least one semantic tag");
    }
  }
  return problems;
}

std::size_t count_symbols(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0u) != 0x80u;
  }));
}

std::string_view to_string(BudgetStatus status) noexcept {
  switch (status) {
    case BudgetStatus::within_base: return "within_base";
    case BudgetStatus::within_extension: return "within_extension";
    case BudgetStatus::exceeded: return "exceeded";
  }
  return "?";
}

BudgetVerdict classify_length(std::size_t length, const CharacterBudget& budget) noexcept {
  if (length <= budget.base) return {BudgetStatus::within_base, length};
  if (length <= budget.effective_limit()) return {BudgetStatus::within_extension, length};
  return {BudgetStatus::exceeded, length};
}

BudgetVerdict check_budget(std::string_view text, const CharacterBudget& budget) noexcept {
  return classify_length(count_symbols(text), budget);
}

StructureVerdict check_structure(const PartKindSet& present, const PartKindSet& required) {
  StructureVerdict verdict;
  std::set_difference(required.begin(), required.end(), present.begin(), present.end(),
                      std::inserter(verdict.missing, verdict.missing.end()));
  return verdict;
}

}  // namespace cmf
