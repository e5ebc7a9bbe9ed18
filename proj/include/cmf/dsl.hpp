#pragma once

// Reader and writer for `.cmt` template files.
//
//   template "ad_b2b_pain" {
//     channel: "google_adwords"
//     meta audience: "b2b"
//     part title {
//       semantics: [attention_draw, usp_focus]
//       format: question
//       budget: 35+30
//       text: "Is {pain_point} slowing your team down?"
//     }
//   }
//
// `#` starts a comment. Strings are double-quoted and accept the escapes
// \" \\ \n \t \r. Diagnostic columns count code points, not bytes.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmf/domain.hpp"

namespace cmf {

struct TemplateSource {
  std::string text;
  std::string origin = "<memory>";
};

enum class Severity { error, warning };

struct ParseDiagnostic {
  Severity severity = Severity::error;
  std::string message;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string format_diagnostic(const std::string& origin, const ParseDiagnostic& diag);

/// Result of reading a file that may hold several templates. `templates` is
/// only populated when no error diagnostics were produced.
struct ParseResult {
  std::vector<TemplateSpec> templates;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept;
};

ParseResult parse_templates(const TemplateSource& source,
                            const FormatVocabulary& formats = default_format_vocabulary());

/// Like parse_templates, but the source must declare exactly one template.
struct TemplateParse {
  std::optional<TemplateSpec> spec;
  std::vector<ParseDiagnostic> diagnostics;
};

TemplateParse parse_template(const TemplateSource& source,
                             const FormatVocabulary& formats = default_format_vocabulary());

/// Canonical text of `spec`: fixed field order, metadata sorted by key,
/// budgets written as `N` or `N+M`.
TemplateSource serialize_template(const TemplateSpec& spec);

/// One slot occurrence. line/column locate the opening brace inside the
/// part's pattern source text (1-based, code points).
struct Slot {
  std::string name;
  StructuralPartKind part = StructuralPartKind::title;
  std::size_t line = 1;
  std::size_t column = 1;

  bool operator==(const Slot&) const = default;
};

/// Slot occurrences in document order (parts in canonical order, then
/// position within the pattern).
std::vector<Slot> list_slots(const TemplateSpec& spec);

}  // namespace cmf
