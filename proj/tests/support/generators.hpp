#pragma once

// Seeded random generators shared by the property tests and the acceptance
// suite.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cmf/domain.hpp"
#include "cmf/dsl.hpp"
#include "cmf/rules.hpp"

namespace cmf::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[uniform(rng, 0, items.size() - 1)];
}

inline std::string random_identifier(Rng& rng, std::size_t max_len = 10) {
  static const std::string head = "abcdefghijklmnopqrstuvwxyz";
  static const std::string tail = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::string s(1, head[uniform(rng, 0, head.size() - 1)]);
  const auto len = uniform(rng, 0, max_len - 1);
  for (std::size_t i = 0; i < len; ++i) s.push_back(tail[uniform(rng, 0, tail.size() - 1)]);
  return s;
}

/// Literal text drawn from ASCII, Cyrillic, emoji, a combining mark and the
/// characters that need escaping in the DSL. Returns text and code points.
struct Piece {
  std::string text;
  std::size_t code_points = 0;
};

inline Piece random_literal(Rng& rng, std::size_t max_units = 12) {
  static const std::vector<std::string> units = {
      "a", "b", "Z", " ", "7", ".", "?", "!", "{", "}", "\"", "\\", "\n", "\t", "#", ":",
      "\xD0\x96",          // Ж
      "\xC3\xA9",          // é
      "\xE2\x82\xAC",      // €
      "\xF0\x9F\x9A\x80",  // 🚀
      "\xCC\x81",          // combining acute accent
  };
  Piece p;
  const auto n = uniform(rng, 1, max_units);
  for (std::size_t i = 0; i < n; ++i) {
    p.text += pick(rng, units);
    ++p.code_points;
  }
  return p;
}

inline Pattern random_pattern(Rng& rng) {
  static const std::vector<std::string> slots = {"product", "pain_point", "usp", "customer", "deadline", "x1"};
  Pattern pattern;
  const auto n = uniform(rng, 0, 5);
  for (std::size_t i = 0; i < n; ++i) {
    if (coin(rng, 0.4)) {
      pattern.append_slot(pick(rng, slots));
    } else {
      pattern.append_literal(random_literal(rng).text);
    }
  }
  return pattern;
}

inline TemplateSpec random_template(Rng& rng, const std::string& id) {
  static const std::vector<std::string> channels = {"google_adwords", "yandex_direct", "email_newsletter"};
  static const std::vector<std::string> meta_keys = {"audience", "stage", "goal", "tone"};
  TemplateSpec spec;
  spec.id = id;
  spec.channel = pick(rng, channels);
  for (const auto& key : meta_keys) {
    if (coin(rng)) spec.metadata[key] = random_literal(rng, 6).text;
  }
  const auto& tags = default_semantic_tags();
  const auto& formats = default_formats();
  for (auto kind : kAllPartKinds) {
    if (!coin(rng, 0.6) && !(kind == StructuralPartKind::echo_phrase && spec.parts.empty())) continue;
    PartSpec part;
    part.kind = kind;
    const auto min_tags = kind == StructuralPartKind::reference_info ? 0 : 1;
    const auto n_tags = uniform(rng, min_tags, 3);
    while (part.semantics.size() < n_tags) part.semantics.insert(pick(rng, tags));
    part.format = pick(rng, formats);
    part.budget.base = uniform(rng, 0, 200);
    part.budget.extension = coin(rng) ? 0 : uniform(rng, 1, 50);
    part.pattern = random_pattern(rng);
    spec.parts.push_back(std::move(part));
  }
  return spec;
}

/// A random propositional system over a small attribute universe. Attribute
/// `a<i>` has kind i % 3: boolean, enumerated string or small integer.
struct RuleSystem {
  FactBase initial;
  std::vector<ProductionRule> rules;
};

inline Value random_value_for(Rng& rng, std::size_t attr_index) {
  static const std::vector<std::string> words = {"x", "y", "z"};
  switch (attr_index % 3) {
    case 0: return Value{coin(rng)};
    case 1: return Value{pick(rng, words)};
    default: return Value{static_cast<std::int64_t>(uniform(rng, 0, 5))};
  }
}

inline RuleSystem random_rule_system(Rng& rng, std::size_t max_rules = 20, std::size_t max_attrs = 10) {
  RuleSystem sys;
  const auto n_attrs = uniform(rng, 2, max_attrs);
  auto attr = [](std::size_t i) { return "a" + std::to_string(i); };

  // Each attribute has a usual value; straying from it is what makes
  // conflicts, so it is kept rare enough for long chains to happen too.
  std::vector<Value> usual;
  for (std::size_t i = 0; i < n_attrs; ++i) usual.push_back(random_value_for(rng, i));
  auto value_for = [&](std::size_t i) { return coin(rng, 0.9) ? usual[i] : random_value_for(rng, i); };

  for (std::size_t i = 0; i < n_attrs; ++i) {
    if (coin(rng, 0.4)) sys.initial = sys.initial.with(Fact{attr(i), value_for(i)});
  }

  const auto n_rules = uniform(rng, 0, max_rules);
  std::vector<std::string> ids;
  while (ids.size() < n_rules) {
    auto id = random_identifier(rng, 4);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  for (const auto& id : ids) {
    while (true) {
      ProductionRule rule;
      rule.id = id;
      rule.priority = static_cast<std::int64_t>(uniform(rng, 0, 3));
      const auto n_conds = uniform(rng, 1, 3);
      for (std::size_t c = 0; c < n_conds; ++c) {
        const auto i = uniform(rng, 0, n_attrs - 1);
        Condition cond;
        cond.attribute = attr(i);
        const bool is_int = i % 3 == 2;
        const auto roll = uniform(rng, 0, is_int ? 4 : 2);
        if (roll == 0) {
          cond.op = ConditionOp::eq;
          cond.operand = value_for(i);
        } else if (roll == 1) {
          cond.op = ConditionOp::neq;
          cond.operand = random_value_for(rng, i);
        } else if (roll == 2) {
          cond.op = ConditionOp::in_set;
          std::vector<Value> set;
          const auto n = uniform(rng, 1, 3);
          for (std::size_t k = 0; k < n; ++k) set.push_back(random_value_for(rng, i));
          cond.operand = std::move(set);
        } else {
          cond.op = roll == 3 ? ConditionOp::lt : ConditionOp::gt;
          cond.operand = Value{static_cast<std::int64_t>(uniform(rng, 0, 5))};
        }
        rule.conditions.push_back(std::move(cond));
      }
      const auto n_actions = uniform(rng, 1, 2);
      for (std::size_t a = 0; a < n_actions; ++a) {
        const auto i = uniform(rng, 0, n_attrs - 1);
        const bool dup = std::any_of(rule.actions.begin(), rule.actions.end(),
                                     [&](const Fact& f) { return f.attribute == attr(i); });
        if (!dup) rule.actions.push_back(Fact{attr(i), value_for(i)});
      }
      if (rule_problems(rule).empty()) {
        sys.rules.push_back(std::move(rule));
        break;
      }
    }
  }
  return sys;
}


/// Small vocabularies so that recommendation facts actually hit templates.
inline const std::vector<std::string>& rec_audiences() {
  static const std::vector<std::string> v = {"b2b", "b2c", "dev"};
  return v;
}
inline const std::vector<std::string>& rec_stages() {
  static const std::vector<std::string> v = {"awareness", "interest", "purchase"};
  return v;
}

/// A catalog of `n` templates whose metadata and formats come from the
/// vocabularies above. Ids are unique.
inline std::vector<TemplateSpec> random_catalog(Rng& rng, std::size_t n) {
  std::vector<TemplateSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto spec = random_template(rng, "t" + std::to_string(i) + "_" + random_identifier(rng, 3));
    spec.metadata.clear();
    if (coin(rng, 0.8)) spec.metadata["audience"] = pick(rng, rec_audiences());
    if (coin(rng, 0.8)) spec.metadata["stage"] = pick(rng, rec_stages());
    for (auto& part : spec.parts) part.format = pick(rng, default_formats());
    out.push_back(std::move(spec));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// One rule that fires on `trigger = true` and asserts a random subset of
/// rec_audience, rec_stage and rec_format.
inline std::vector<ProductionRule> random_recommendation_rules(Rng& rng) {
  ProductionRule r;
  r.id = "advise";
  r.conditions.push_back(Condition{"trigger", ConditionOp::eq, Value{true}});
  if (coin(rng, 0.7)) r.actions.push_back(Fact{"rec_audience", Value{pick(rng, rec_audiences())}});
  if (coin(rng, 0.7)) r.actions.push_back(Fact{"rec_stage", Value{pick(rng, rec_stages())}});
  if (coin(rng, 0.7) || r.actions.empty()) {
    r.actions.push_back(Fact{"rec_format", Value{pick(rng, default_formats()).name()}});
  }
  return {r};
}

/// Bindings for every slot in `spec` plus an occasional unused one. Values
/// are wrapped in '|', which random_literal never produces.
inline std::map<std::string, std::string> random_bindings(Rng& rng, const TemplateSpec& spec) {
  std::map<std::string, std::string> b;
  for (const auto& part : spec.parts) {
    for (const auto& name : part.pattern.slot_names()) {
      if (!b.contains(name)) b[name] = "|" + random_literal(rng, 8).text + "|";
    }
  }
  if (coin(rng, 0.2)) b["unused_extra"] = "zzz";
  return b;
}

/// Rendered length predicted from the source form alone: source length,
/// minus one for each escaped brace, minus `{name}` for each slot, plus the
/// bound value.
inline std::size_t predicted_length(const Pattern& pattern, const std::map<std::string, std::string>& bindings) {
  std::size_t n = count_symbols(pattern.source());
  for (const auto& seg : pattern.segments()) {
    if (const auto* lit = std::get_if<Pattern::Literal>(&seg)) {
      n -= static_cast<std::size_t>(std::count_if(lit->text.begin(), lit->text.end(),
                                                  [](char c) { return c == '{' || c == '}'; }));
    } else {
      const auto& name = std::get<Pattern::SlotRef>(seg).name;
      n -= name.size() + 2;
      n += count_symbols(bindings.at(name));
    }
  }
  return n;
}

/// True when the diagnostic's position lies within `text`: an existing line
/// (or the empty line after a final newline) and at most one column past
/// its last code point.
inline bool diagnostic_in_bounds(std::string_view text, const ParseDiagnostic& d) {
  if (d.line < 1 || d.column < 1) return false;
  std::size_t line = 1, start = 0;
  for (std::size_t i = 0; i < text.size() && line < d.line; ++i) {
    if (text[i] == '\n') {
      ++line;
      start = i + 1;
    }
  }
  if (line != d.line) return false;
  auto end = text.find('\n', start);
  if (end == std::string_view::npos) end = text.size();
  return d.column <= count_symbols(text.substr(start, end - start)) + 1;
}

/// Random bytes, or a valid template with random byte-level mutations.
inline std::string random_fuzz_input(Rng& rng, const std::string& seed_source) {
  if (coin(rng, 0.3)) {
    std::string s(uniform(rng, 0, 400), '\0');
    for (auto& c : s) c = static_cast<char>(uniform(rng, 0, 255));
    return s;
  }
  std::string s = seed_source;
  static const std::string alphabet = "{}[]:,+-\"\\#\n template part meta channel text budget semantics format x1_";
  const auto edits = uniform(rng, 1, 8);
  for (std::size_t e = 0; e < edits && !s.empty(); ++e) {
    const auto at = uniform(rng, 0, s.size() - 1);
    switch (uniform(rng, 0, 3)) {
      case 0: s.erase(at, uniform(rng, 1, 5)); break;
      case 1: s.insert(at, 1, alphabet[uniform(rng, 0, alphabet.size() - 1)]); break;
      case 2: s[at] = static_cast<char>(uniform(rng, 0, 255)); break;
      default: s = s.substr(0, at); break;
    }
  }
  return s;
}

}  // namespace cmf::testing
