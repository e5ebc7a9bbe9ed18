#include "cmf/pattern.hpp"

#include <stdexcept>

#include "cmf/domain.hpp"

namespace cmf {

PatternParse Pattern::parse(std::string_view source) {
  Pattern out;
  std::string literal;
  std::size_t i = 0;
  auto fail = [](std::size_t offset, std::string message) {
    return PatternParse{std::nullopt, Error{offset, std::move(message)}};
  };

  while (i < source.size()) {
    const char c = source[i];
    if (c == '{') {
      if (i + 1 < source.size() && source[i + 1] == '{') {
        literal.push_back('{');
        i += 2;
        continue;
      }
      const std::size_t close = source.find('}', i + 1);
      const std::size_t reopen = source.find('{', i + 1);
      if (close == std::string_view::npos || (reopen != std::string_view::npos && reopen < close)) {
        return fail(i, "unclosed slot");
      }
      std::string_view name = source.substr(i + 1, close - i - 1);
      if (!is_identifier(name)) {
        return fail(i, "invalid slot name '" + std::string(name) + "'");
      }
      if (!literal.empty()) {
        out.segments_.emplace_back(Literal{std::move(literal)});
        literal.clear();
      }
      out.segments_.emplace_back(SlotRef{std::string(name)});
      i = close + 1;
    } else if (c == '}') {
      if (i + 1 < source.size() && source[i + 1] == '}') {
        literal.push_back('}');
        i += 2;
        continue;
      }
      return fail(i, "unmatched '}' (write '}}' for a literal brace)");
    } else {
      literal.push_back(c);
      ++i;
    }
  }
  if (!literal.empty()) out.segments_.emplace_back(Literal{std::move(literal)});
  return PatternParse{std::move(out), std::nullopt};
}

Pattern& Pattern::append_literal(std::string_view text) {
  if (text.empty()) return *this;
  if (!segments_.empty()) {
    if (auto* last = std::get_if<Literal>(&segments_.back())) {
      last->text.append(text);
      return *this;
    }
  }
  segments_.emplace_back(Literal{std::string(text)});
  return *this;
}

Pattern& Pattern::append_slot(std::string name) {
  if (!is_identifier(name)) throw std::invalid_argument("invalid slot name '" + name + "'");
  segments_.emplace_back(SlotRef{std::move(name)});
  return *this;
}

std::string Pattern::source() const {
  std::string out;
  for (const auto& seg : segments_) {
    if (const auto* lit = std::get_if<Literal>(&seg)) {
      for (char c : lit->text) {
        out.push_back(c);
        if (c == '{' || c == '}') out.push_back(c);
      }
    } else {
      out.push_back('{');
      out += std::get<SlotRef>(seg).name;
      out.push_back('}');
    }
  }
  return out;
}

std::vector<std::string> Pattern::slot_names() const {
  std::vector<std::string> names;
  for (const auto& seg : segments_) {
    if (const auto* slot = std::get_if<SlotRef>(&seg)) names.push_back(slot->name);
  }
  return names;
}

}  // namespace cmf
