#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmf {

struct PatternParse;

/// Slot-bearing text. In source form `{name}` marks a slot and `{{` / `}}`
/// stand for literal braces. Internally the text is kept as alternating
/// literal and slot segments; adjacent literals are always merged and empty
/// literals never stored, so equal texts compare equal.
class Pattern {
 public:
  struct Literal {
    std::string text;
    bool operator==(const Literal&) const = default;
  };
  struct SlotRef {
    std::string name;
    bool operator==(const SlotRef&) const = default;
  };
  using Segment = std::variant<Literal, SlotRef>;

  struct Error {
    std::size_t offset = 0;  // byte offset into the source form
    std::string message;
  };

  Pattern() = default;

  /// Either a pattern or the first syntax error.
  static PatternParse parse(std::string_view source);

  /// Builder helpers; literals may contain braces, they are escaped on output.
  Pattern& append_literal(std::string_view text);
  Pattern& append_slot(std::string name);

  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// Escaped source form, the inverse of parse().
  std::string source() const;

  /// Slot names in order of occurrence, repeats included.
  std::vector<std::string> slot_names() const;

  bool operator==(const Pattern&) const = default;

 private:
  std::vector<Segment> segments_;
};

struct PatternParse {
  std::optional<Pattern> pattern;
  std::optional<Pattern::Error> error;
};

}  // namespace cmf
