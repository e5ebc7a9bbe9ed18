#include "cmf/dsl.hpp"

#include <algorithm>
#include <cstdint>
#include <string_view>

namespace cmf {

namespace {

constexpr std::size_t kMaxErrors = 100;
constexpr std::uint64_t kMaxBudget = 1'000'000;

struct Pos {
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class Tok { ident, string, integer, lbrace, rbrace, colon, lbracket, rbracket, comma, plus, minus, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Pos pos;
  std::vector<Pos> byte_pos;  // strings: source position of each decoded byte
  std::uint64_t number = 0;
  bool overflow = false;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::ident: return "'" + t.text + "'";
    case Tok::string: return "string";
    case Tok::integer: return "number";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::colon: return "':'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::end: return "end of input";
  }
  return "token";
}

class Diagnostics {
 public:
  void error(Pos at, std::string message) { add(Severity::error, at, std::move(message)); }
  void warning(Pos at, std::string message) { add(Severity::warning, at, std::move(message)); }

  std::size_t error_count() const noexcept { return errors_; }
  bool saturated() const noexcept { return errors_ >= kMaxErrors; }
  std::vector<ParseDiagnostic> take() { return std::move(list_); }

 private:
  void add(Severity severity, Pos at, std::string message) {
    if (saturated()) return;
    if (severity == Severity::error) {
      ++errors_;
      if (saturated()) message += " (too many errors, stopping)";
    }
    list_.push_back(ParseDiagnostic{severity, std::move(message), at.line, at.column});
  }

  std::vector<ParseDiagnostic> list_;
  std::size_t errors_ = 0;
};

class Lexer {
 public:
  Lexer(std::string_view src, Diagnostics& diags) : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (i_ >= src_.size() || diags_.saturated()) break;
      const char c = src_[i_];
      Token tok;
      tok.pos = pos_;
      if (is_ident_start(c)) {
        tok.kind = Tok::ident;
        while (i_ < src_.size() && is_ident_char(src_[i_])) tok.text.push_back(take());
      } else if (c >= '0' && c <= '9') {
        tok.kind = Tok::integer;
        while (i_ < src_.size() && src_[i_] >= '0' && src_[i_] <= '9') {
          const char d = take();
          tok.text.push_back(d);
          if (!tok.overflow) {
            tok.number = tok.number * 10 + static_cast<std::uint64_t>(d - '0');
            if (tok.number > kMaxBudget) tok.overflow = true;
          }
        }
      } else if (c == '"') {
        if (!lex_string(tok)) continue;
      } else if (auto kind = punct(c)) {
        tok.kind = *kind;
        take();
      } else {
        diags_.error(pos_, "unexpected character");
        take_code_point();
        continue;
      }
      out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Tok::end;
    end.pos = pos_;
    out.push_back(std::move(end));
    return out;
  }

 private:
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  static std::optional<Tok> punct(char c) {
    switch (c) {
      case '{': return Tok::lbrace;
      case '}': return Tok::rbrace;
      case ':': return Tok::colon;
      case '[': return Tok::lbracket;
      case ']': return Tok::rbracket;
      case ',': return Tok::comma;
      case '+': return Tok::plus;
      case '-': return Tok::minus;
      default: return std::nullopt;
    }
  }

  char take() {
    const char c = src_[i_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else if (i_ >= src_.size() || (static_cast<unsigned char>(src_[i_]) & 0xC0u) != 0x80u) {
      ++pos_.column;
    }
    return c;
  }

  void take_code_point() {
    take();
    while (i_ < src_.size() && (static_cast<unsigned char>(src_[i_]) & 0xC0u) == 0x80u) take();
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        take();
      } else if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') take();
      } else {
        break;
      }
    }
  }

  bool lex_string(Token& tok) {
    tok.kind = Tok::string;
    take();  // opening quote
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') {
        diags_.error(tok.pos, "unterminated string");
        return false;
      }
      const Pos at = pos_;
      const char c = take();
      if (c == '"') return true;
      if (c != '\\') {
        tok.text.push_back(c);
        tok.byte_pos.push_back(at);
        continue;
      }
      if (i_ >= src_.size() || src_[i_] == '\n') continue;  // reported as unterminated next round
      const char e = src_[i_];
      char decoded = 0;
      switch (e) {
        case '"': decoded = '"'; break;
        case '\\': decoded = '\\'; break;
        case 'n': decoded = '\n'; break;
        case 't': decoded = '\t'; break;
        case 'r': decoded = '\r'; break;
        default:
          diags_.error(at, "unknown escape sequence");
          take_code_point();
          continue;
      }
      take();
      tok.text.push_back(decoded);
      tok.byte_pos.push_back(at);
    }
  }

  std::string_view src_;
  Diagnostics& diags_;
  std::size_t i_ = 0;
  Pos pos_;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const FormatVocabulary& formats, Diagnostics& diags)
      : toks_(std::move(tokens)), formats_(formats), diags_(diags) {}

  std::vector<TemplateSpec> run() {
    std::vector<TemplateSpec> out;
    while (!at(Tok::end) && !diags_.saturated()) {
      if (at_word("template")) {
        if (auto spec = parse_template_block()) out.push_back(std::move(*spec));
        continue;
      }
      diags_.error(peek().pos, "expected 'template' but found " + describe(peek()));
      while (!at(Tok::end) && !at_word("template")) next();
    }
    return out;
  }

 private:
  const Token& peek() const { return toks_[idx_]; }
  const Token& next() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_word(std::string_view w) const { return at(Tok::ident) && peek().text == w; }

  bool expect(Tok kind, std::string_view what) {
    if (at(kind)) {
      next();
      return true;
    }
    diags_.error(peek().pos, "expected " + std::string(what) + " but found " + describe(peek()));
    return false;
  }

  // Skips a balanced `{ ... }` block starting at the current '{'.
  void skip_block() {
    int depth = 0;
    do {
      if (at(Tok::lbrace)) ++depth;
      if (at(Tok::rbrace)) --depth;
      next();
    } while (depth > 0 && !at(Tok::end));
  }

  // Panic-mode recovery: stop at a '}' closing the current block or at a
  // word starting a later line.
  void sync(std::size_t error_line) {
    while (!at(Tok::end) && !at(Tok::rbrace)) {
      if (at(Tok::ident) && peek().pos.line > error_line) return;
      if (at(Tok::lbrace)) {
        skip_block();
      } else {
        next();
      }
    }
  }

  std::optional<TemplateSpec> parse_template_block() {
    const std::size_t errors_before = diags_.error_count();
    const Pos kw = next().pos;
    TemplateSpec spec;
    if (at(Tok::string)) {
      const Token& id = next();
      if (!is_identifier(id.text)) {
        diags_.error(id.pos, "template id '" + id.text + "' must match [a-z][a-z0-9_]*");
      }
      spec.id = id.text;
    } else {
      diags_.error(peek().pos, "expected quoted template id but found " + describe(peek()));
    }
    if (!expect(Tok::lbrace, "'{'")) {
      while (!at(Tok::end) && !at_word("template")) next();
      return std::nullopt;
    }

    bool have_channel = false;
    while (!diags_.saturated()) {
      if (at(Tok::rbrace)) {
        next();
        break;
      }
      if (at(Tok::end)) {
        diags_.error(peek().pos, "missing '}' to close template '" + spec.id + "'");
        break;
      }
      if (at_word("template")) {
        diags_.error(peek().pos, "missing '}' before next template");
        break;
      }
      const Token& field = peek();
      const std::size_t line = field.pos.line;
      bool ok = true;
      if (field.text == "channel" && field.kind == Tok::ident) {
        const Pos at_pos = next().pos;
        if ((ok = expect(Tok::colon, "':'") && expect_string_into(spec.channel, "channel"))) {
          if (have_channel) diags_.error(at_pos, "duplicate field 'channel'");
          if (!is_identifier(spec.channel)) {
            diags_.error(at_pos, "channel '" + spec.channel + "' must match [a-z][a-z0-9_]*");
          }
          have_channel = true;
        }
      } else if (field.text == "meta" && field.kind == Tok::ident) {
        ok = parse_meta(spec);
      } else if (field.text == "part" && field.kind == Tok::ident) {
        ok = parse_part(spec);
      } else {
        diags_.error(field.pos, "unexpected " + describe(field) + " in template body");
        ok = false;
      }
      if (!ok) sync(line);
    }

    if (!have_channel) diags_.error(kw, "template '" + spec.id + "' is missing 'channel'");
    if (spec.parts.empty()) diags_.error(kw, "template '" + spec.id + "' declares no parts");
    std::sort(spec.parts.begin(), spec.parts.end(),
              [](const PartSpec& a, const PartSpec& b) { return a.kind < b.kind; });
    if (diags_.error_count() != errors_before) return std::nullopt;
    return spec;
  }

  bool expect_string_into(std::string& out, std::string_view field) {
    if (!at(Tok::string)) {
      diags_.error(peek().pos, "expected quoted value for '" + std::string(field) + "' but found " + describe(peek()));
      return false;
    }
    out = next().text;
    return true;
  }

  bool parse_meta(TemplateSpec& spec) {
    next();
    if (!at(Tok::ident)) {
      diags_.error(peek().pos, "expected metadata key but found " + describe(peek()));
      return false;
    }
    const Token& key = next();
    if (!is_identifier(key.text)) diags_.error(key.pos, "metadata key '" + key.text + "' must match [a-z][a-z0-9_]*");
    std::string value;
    if (!expect(Tok::colon, "':'") || !expect_string_into(value, "meta " + key.text)) return false;
    if (!spec.metadata.emplace(key.text, std::move(value)).second) {
      diags_.error(key.pos, "duplicate meta key '" + key.text + "'");
    }
    return true;
  }

  bool parse_part(TemplateSpec& spec) {
    const Pos kw = next().pos;
    if (!at(Tok::ident)) {
      diags_.error(peek().pos, "expected part kind but found " + describe(peek()));
      return false;
    }
    const Token& kind_tok = next();
    const auto kind = part_kind_from_string(kind_tok.text);
    if (!kind) {
      diags_.error(kind_tok.pos, "unknown part kind '" + kind_tok.text +
                                     "' (expected tagline, title, main_text, reference_info or echo_phrase)");
    } else if (spec.find_part(*kind)) {
      diags_.error(kind_tok.pos, "duplicate part kind '" + kind_tok.text + "'");
    }
    if (!expect(Tok::lbrace, "'{'")) return false;

    PartSpec part;
    if (kind) part.kind = *kind;
    bool have_semantics = false, have_format = false, have_budget = false, have_text = false;
    auto duplicate = [&](bool& seen, const Token& tok) {
      if (seen) diags_.error(tok.pos, "duplicate field '" + tok.text + "' in part '" + kind_tok.text + "'");
      seen = true;
    };

    while (!diags_.saturated()) {
      if (at(Tok::rbrace)) {
        next();
        break;
      }
      if (at(Tok::end)) {
        diags_.error(peek().pos, "missing '}' to close part '" + kind_tok.text + "'");
        return false;
      }
      const Token& field = peek();
      const std::size_t line = field.pos.line;
      bool ok = false;
      if (field.kind != Tok::ident) {
        diags_.error(field.pos, "unexpected " + describe(field) + " in part body");
      } else if (field.text == "semantics") {
        duplicate(have_semantics, next());
        ok = expect(Tok::colon, "':'") && parse_semantics(part);
      } else if (field.text == "format") {
        duplicate(have_format, next());
        ok = expect(Tok::colon, "':'") && parse_format(part);
      } else if (field.text == "budget") {
        duplicate(have_budget, next());
        ok = expect(Tok::colon, "':'") && parse_budget(part);
      } else if (field.text == "text") {
        duplicate(have_text, next());
        ok = expect(Tok::colon, "':'") && parse_text(part);
      } else {
        diags_.error(field.pos, "unknown part field '" + field.text + "'");
      }
      if (!ok) sync(line);
    }

    const std::string name = kind_tok.text;
    if (!have_format) diags_.error(kw, "part '" + name + "' is missing 'format'");
    if (!have_budget) diags_.error(kw, "part '" + name + "' is missing 'budget'");
    if (!have_text) diags_.error(kw, "part '" + name + "' is missing 'text'");
    if (part.semantics.empty() && part.kind != StructuralPartKind::reference_info) {
      diags_.error(kw, "part '" + name + "' must declare at least one semantic tag");
    }
    if (kind && !spec.find_part(*kind)) spec.parts.push_back(std::move(part));
    return true;
  }

  bool parse_semantics(PartSpec& part) {
    if (!expect(Tok::lbracket, "'['")) return false;
    if (at(Tok::rbracket)) {
      next();
      return true;
    }
    while (true) {
      if (!at(Tok::ident)) {
        diags_.error(peek().pos, "expected semantic tag but found " + describe(peek()));
        return false;
      }
      const Token& tag = next();
      if (!is_identifier(tag.text)) {
        diags_.error(tag.pos, "semantic tag '" + tag.text + "' must match [a-z][a-z0-9_]*");
      } else if (!part.semantics.insert(SemanticTag{tag.text}).second) {
        diags_.warning(tag.pos, "semantic tag '" + tag.text + "' listed twice");
      }
      if (at(Tok::comma)) {
        next();
        continue;
      }
      return expect(Tok::rbracket, "',' or ']'");
    }
  }

  bool parse_format(PartSpec& part) {
    if (!at(Tok::ident)) {
      diags_.error(peek().pos, "expected format name but found " + describe(peek()));
      return false;
    }
    const Token& name = next();
    if (!is_identifier(name.text) || !formats_.contains(name.text)) {
      diags_.error(name.pos, "unknown format '" + name.text + "'");
    } else {
      part.format = Format{name.text};
    }
    return true;
  }

  bool read_budget_number(std::size_t& out) {
    if (at(Tok::minus)) {
      const Pos at_pos = next().pos;
      if (at(Tok::integer)) next();
      diags_.error(at_pos, "negative budget");
      return true;
    }
    if (!at(Tok::integer)) {
      diags_.error(peek().pos, "expected budget number but found " + describe(peek()));
      return false;
    }
    const Token& num = next();
    if (num.overflow) {
      diags_.error(num.pos, "budget value too large");
    } else {
      out = static_cast<std::size_t>(num.number);
    }
    return true;
  }

  bool parse_budget(PartSpec& part) {
    CharacterBudget budget;
    if (!read_budget_number(budget.base)) return false;
    if (at(Tok::plus)) {
      next();
      if (!read_budget_number(budget.extension)) return false;
    }
    part.budget = budget;
    return true;
  }

  bool parse_text(PartSpec& part) {
    if (!at(Tok::string)) {
      diags_.error(peek().pos, "expected quoted text but found " + describe(peek()));
      return false;
    }
    const Token& str = next();
    auto parsed = Pattern::parse(str.text);
    if (parsed.error) {
      const Pos at_pos = parsed.error->offset < str.byte_pos.size() ? str.byte_pos[parsed.error->offset] : str.pos;
      diags_.error(at_pos, parsed.error->message);
    } else {
      part.pattern = std::move(*parsed.pattern);
    }
    return true;
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  const FormatVocabulary& formats_;
  Diagnostics& diags_;
};

Pos position_of(std::string_view text, std::size_t offset) {
  Pos pos;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0u) != 0x80u) {
      ++pos.column;
    }
  }
  return pos;
}

void append_quoted(std::string& out, std::string_view text) {
  out.push_back('"');
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

}  // namespace

std::string format_diagnostic(const std::string& origin, const ParseDiagnostic& diag) {
  return origin + ":" + std::to_string(diag.line) + ":" + std::to_string(diag.column) + ": " +
         (diag.severity == Severity::error ? "error: " : "warning: ") + diag.message;
}

bool ParseResult::ok() const noexcept {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const ParseDiagnostic& d) { return d.severity == Severity::error; });
}

ParseResult parse_templates(const TemplateSource& source, const FormatVocabulary& formats) {
  Diagnostics diags;
  ParseResult result;
  if (const auto bad = find_invalid_utf8(source.text); bad != std::string_view::npos) {
    diags.error(position_of(source.text, bad), "invalid UTF-8 byte sequence");
    result.diagnostics = diags.take();
    return result;
  }
  auto tokens = Lexer(source.text, diags).run();
  auto templates = Parser(std::move(tokens), formats, diags).run();
  result.diagnostics = diags.take();
  if (result.ok()) result.templates = std::move(templates);
  return result;
}

TemplateParse parse_template(const TemplateSource& source, const FormatVocabulary& formats) {
  auto parsed = parse_templates(source, formats);
  TemplateParse out;
  out.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.ok()) return out;
  if (parsed.templates.size() != 1) {
    const Pos end = position_of(source.text, source.text.size());
    out.diagnostics.push_back(ParseDiagnostic{
        Severity::error,
        "expected exactly one template, found " + std::to_string(parsed.templates.size()),
        parsed.templates.empty() ? end.line : 1, parsed.templates.empty() ? end.column : 1});
    return out;
  }
  out.spec = std::move(parsed.templates.front());
  return out;
}

TemplateSource serialize_template(const TemplateSpec& spec) {
  std::string out = "template ";
  append_quoted(out, spec.id);
  out += " {\n  channel: ";
  append_quoted(out, spec.channel);
  out += "\n";
  for (const auto& [key, value] : spec.metadata) {
    out += "  meta " + key + ": ";
    append_quoted(out, value);
    out += "\n";
  }
  for (const auto& part : spec.parts) {
    out += "  part ";
    out += to_string(part.kind);
    out += " {\n    semantics: [";
    bool first = true;
    for (const auto& tag : part.semantics) {
      if (!first) out += ", ";
      out += tag.name();
      first = false;
    }
    out += "]\n    format: " + part.format.name() + "\n    budget: " + std::to_string(part.budget.base);
    if (part.budget.extension > 0) out += "+" + std::to_string(part.budget.extension);
    out += "\n    text: ";
    append_quoted(out, part.pattern.source());
    out += "\n  }\n";
  }
  out += "}\n";
  return TemplateSource{std::move(out), "<memory>"};
}

std::vector<Slot> list_slots(const TemplateSpec& spec) {
  std::vector<Slot> slots;
  for (const auto& part : spec.parts) {
    std::size_t line = 1, column = 1;
    for (const auto& seg : part.pattern.segments()) {
      if (const auto* lit = std::get_if<Pattern::Literal>(&seg)) {
        for (char c : lit->text) {
          if (c == '\n') {
            ++line;
            column = 1;
          } else if (c == '{' || c == '}') {
            column += 2;
          } else if ((static_cast<unsigned char>(c) & 0xC0u) != 0x80u) {
            ++column;
          }
        }
      } else {
        const auto& name = std::get<Pattern::SlotRef>(seg).name;
        slots.push_back(Slot{name, part.kind, line, column});
        column += name.size() + 2;
      }
    }
  }
  return slots;
}

}  // namespace cmf
