#include "cmf/json_io.hpp"

#include <set>

#include "cmf/dsl.hpp"

namespace cmf {

JsonSyntaxError::JsonSyntaxError(std::size_t byte, const std::string& message)
    : std::runtime_error("malformed JSON at byte " + std::to_string(byte) + ": " + message), byte_(byte) {}

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + message), path_(std::move(path)) {}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw JsonSyntaxError(e.byte, e.what());
  }
}

namespace {

void require_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(path + "/" + key, "unknown key");
  }
}

const Json& require_key(const Json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw SchemaError(path + "/" + key, "missing required key");
  return j.at(key);
}

std::string require_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

std::string require_identifier(const Json& j, const std::string& path) {
  auto s = require_string(j, path);
  if (!is_identifier(s)) throw SchemaError(path, "'" + s + "' must match [a-z][a-z0-9_]*");
  return s;
}

std::int64_t require_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw SchemaError(path, "integer out of range");
  }
  return j.get<std::int64_t>();
}

std::size_t require_count(const Json& j, const std::string& path) {
  const auto n = require_integer(j, path);
  if (n < 0) throw SchemaError(path, "must be non-negative");
  return static_cast<std::size_t>(n);
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

std::optional<ConditionOp> op_from_string(std::string_view s) {
  for (auto op : {ConditionOp::eq, ConditionOp::neq, ConditionOp::in_set, ConditionOp::lt, ConditionOp::gt}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

Json budget_to_json(const CharacterBudget& b) { return Json{{"base", b.base}, {"extension", b.extension}}; }

Json violation_to_json(const Violation& v) {
  Json out;
  out["part"] = v.part ? Json(std::string(to_string(*v.part))) : Json(nullptr);
  out["rule"] = v.rule;
  out["detail"] = v.detail;
  out["length"] = v.length ? Json(*v.length) : Json(nullptr);
  out["limit"] = v.limit ? Json(*v.limit) : Json(nullptr);
  Json missing = Json::array();
  for (auto kind : v.missing) missing.push_back(std::string(to_string(kind)));
  out["missing"] = std::move(missing);
  return out;
}

}  // namespace

Value value_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return require_integer(j, path);
  throw SchemaError(path, "expected a string, integer or boolean");
}

Json value_to_json(const Value& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

FactBase facts_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object of attribute values");
  FactBase base;
  for (const auto& [key, value] : j.items()) {
    const std::string at = path + "/" + key;
    if (!is_identifier(key)) throw SchemaError(at, "attribute must match [a-z][a-z0-9_]*");
    base = base.with(Fact{key, value_from_json(value, at)});
  }
  return base;
}

Json facts_to_json(const FactBase& base) {
  Json out = Json::object();
  for (const auto& [attribute, value] : base.facts()) out[attribute] = value_to_json(value);
  return out;
}

Json fact_list_to_json(const std::vector<Fact>& facts) {
  Json out = Json::array();
  for (const auto& f : facts) out.push_back(Json{{"attr", f.attribute}, {"value", value_to_json(f.value)}});
  return out;
}

RuleSet ruleset_from_json(const Json& j) {
  require_object(j, "", {"rules"});
  const auto& rules = require_array(require_key(j, "", "rules"), "/rules");
  std::vector<ProductionRule> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string path = "/rules/" + std::to_string(i);
    const auto& r = rules[i];
    require_object(r, path, {"id", "priority", "if", "then"});
    ProductionRule rule;
    rule.id = require_identifier(require_key(r, path, "id"), path + "/id");
    if (!ids.insert(rule.id).second) throw SchemaError(path + "/id", "duplicate rule id '" + rule.id + "'");
    rule.priority = require_integer(require_key(r, path, "priority"), path + "/priority");

    const auto& conds = require_array(require_key(r, path, "if"), path + "/if");
    if (conds.empty()) throw SchemaError(path + "/if", "needs at least one condition");
    for (std::size_t c = 0; c < conds.size(); ++c) {
      const std::string cp = path + "/if/" + std::to_string(c);
      require_object(conds[c], cp, {"attr", "op", "value"});
      Condition cond;
      cond.attribute = require_identifier(require_key(conds[c], cp, "attr"), cp + "/attr");
      const auto op_name = require_string(require_key(conds[c], cp, "op"), cp + "/op");
      const auto op = op_from_string(op_name);
      if (!op) throw SchemaError(cp + "/op", "unknown operator '" + op_name + "' (eq, neq, in, lt, gt)");
      cond.op = *op;
      const auto& value = require_key(conds[c], cp, "value");
      if (cond.op == ConditionOp::in_set) {
        require_array(value, cp + "/value");
        if (value.empty()) throw SchemaError(cp + "/value", "'in' needs a nonempty list");
        std::vector<Value> set;
        for (std::size_t v = 0; v < value.size(); ++v) {
          set.push_back(value_from_json(value[v], cp + "/value/" + std::to_string(v)));
        }
        cond.operand = std::move(set);
      } else if (cond.op == ConditionOp::lt || cond.op == ConditionOp::gt) {
        cond.operand = Value{require_integer(value, cp + "/value")};
      } else {
        cond.operand = value_from_json(value, cp + "/value");
      }
      rule.conditions.push_back(std::move(cond));
    }

    const auto& acts = require_array(require_key(r, path, "then"), path + "/then");
    if (acts.empty()) throw SchemaError(path + "/then", "needs at least one action");
    for (std::size_t a = 0; a < acts.size(); ++a) {
      const std::string ap = path + "/then/" + std::to_string(a);
      require_object(acts[a], ap, {"attr", "value"});
      rule.actions.push_back(Fact{require_identifier(require_key(acts[a], ap, "attr"), ap + "/attr"),
                                  value_from_json(require_key(acts[a], ap, "value"), ap + "/value")});
    }
    if (auto problems = rule_problems(rule); !problems.empty()) throw SchemaError(path, problems.front());
    out.push_back(std::move(rule));
  }
  return RuleSet(std::move(out));
}

Json ruleset_to_json(const RuleSet& rules) {
  Json list = Json::array();
  for (const auto& rule : rules.rules()) {
    Json conds = Json::array();
    for (const auto& c : rule.conditions) {
      Json value;
      if (const auto* set = std::get_if<std::vector<Value>>(&c.operand)) {
        value = Json::array();
        for (const auto& v : *set) value.push_back(value_to_json(v));
      } else {
        value = value_to_json(std::get<Value>(c.operand));
      }
      conds.push_back(Json{{"attr", c.attribute}, {"op", std::string(to_string(c.op))}, {"value", value}});
    }
    list.push_back(Json{{"id", rule.id},
                        {"priority", rule.priority},
                        {"if", std::move(conds)},
                        {"then", fact_list_to_json(rule.actions)}});
  }
  return Json{{"rules", std::move(list)}};
}

std::vector<ChannelProfile> channels_from_json(const Json& j) {
  require_object(j, "", {"channels"});
  const auto& channels = require_array(require_key(j, "", "channels"), "/channels");
  std::vector<ChannelProfile> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string path = "/channels/" + std::to_string(i);
    const auto& c = channels[i];
    require_object(c, path, {"id", "display_name", "budgets", "required"});
    ChannelProfile profile;
    profile.id = require_identifier(require_key(c, path, "id"), path + "/id");
    if (!ids.insert(profile.id).second) throw SchemaError(path + "/id", "duplicate channel id '" + profile.id + "'");
    profile.display_name = c.contains("display_name") ? require_string(c.at("display_name"), path + "/display_name")
                                                      : profile.id;
    const auto& budgets = require_key(c, path, "budgets");
    if (!budgets.is_object()) throw SchemaError(path + "/budgets", "expected an object");
    for (const auto& [key, b] : budgets.items()) {
      const std::string bp = path + "/budgets/" + key;
      const auto kind = part_kind_from_string(key);
      if (!kind) throw SchemaError(bp, "unknown part kind '" + key + "'");
      require_object(b, bp, {"base", "extension"});
      CharacterBudget budget;
      budget.base = require_count(require_key(b, bp, "base"), bp + "/base");
      if (b.contains("extension")) budget.extension = require_count(b.at("extension"), bp + "/extension");
      profile.budgets.emplace(*kind, budget);
    }
    if (c.contains("required")) {
      const auto& req = require_array(c.at("required"), path + "/required");
      for (std::size_t r = 0; r < req.size(); ++r) {
        const std::string rp = path + "/required/" + std::to_string(r);
        const auto name = require_string(req[r], rp);
        const auto kind = part_kind_from_string(name);
        if (!kind) throw SchemaError(rp, "unknown part kind '" + name + "'");
        if (!profile.budgets.contains(*kind)) throw SchemaError(rp, "required part '" + name + "' has no budget");
        profile.required_parts.insert(*kind);
      }
    }
    out.push_back(std::move(profile));
  }
  return out;
}

Json channels_to_json(const std::vector<ChannelProfile>& channels) {
  Json list = Json::array();
  for (const auto& c : channels) {
    Json budgets = Json::object();
    for (const auto& [kind, b] : c.budgets) budgets[std::string(to_string(kind))] = budget_to_json(b);
    Json required = Json::array();
    for (auto kind : c.required_parts) required.push_back(std::string(to_string(kind)));
    list.push_back(Json{{"id", c.id},
                        {"display_name", c.display_name},
                        {"budgets", std::move(budgets)},
                        {"required", std::move(required)}});
  }
  return Json{{"channels", std::move(list)}};
}

Bindings bindings_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object of slot values");
  Bindings out;
  for (const auto& [key, value] : j.items()) {
    if (!is_identifier(key)) throw SchemaError(path + "/" + key, "slot name must match [a-z][a-z0-9_]*");
    out.emplace(key, require_string(value, path + "/" + key));
  }
  return out;
}

Json trace_to_json(const FiringTrace& trace) {
  Json out = Json::array();
  for (const auto& f : trace) out.push_back(Json{{"rule", f.rule_id}, {"asserted", fact_list_to_json(f.asserted)}});
  return out;
}

Json recommendation_to_json(const Recommendation& rec) {
  return Json{{"template_id", rec.template_id},
              {"score", rec.score.value()},
              {"matched", fact_list_to_json(rec.matched)},
              {"unmatched", fact_list_to_json(rec.unmatched)},
              {"trace", trace_to_json(rec.trace)}};
}

Json template_to_json(const TemplateSpec& spec) {
  Json parts = Json::array();
  for (const auto& p : spec.parts) {
    Json semantics = Json::array();
    for (const auto& t : p.semantics) semantics.push_back(t.name());
    Json slots = Json::array();
    for (const auto& s : p.pattern.slot_names()) slots.push_back(s);
    parts.push_back(Json{{"kind", std::string(to_string(p.kind))},
                         {"semantics", std::move(semantics)},
                         {"format", p.format.name()},
                         {"budget", budget_to_json(p.budget)},
                         {"text", p.pattern.source()},
                         {"slots", std::move(slots)}});
  }
  Json metadata = Json::object();
  for (const auto& [k, v] : spec.metadata) metadata[k] = v;
  return Json{{"id", spec.id}, {"channel", spec.channel}, {"metadata", std::move(metadata)}, {"parts", std::move(parts)}};
}

Json report_to_json(const ValidationReport& report) {
  Json parts = Json::array();
  for (const auto& p : report.parts) {
    parts.push_back(Json{{"kind", std::string(to_string(p.kind))},
                         {"text", p.text},
                         {"length", p.verdict.length},
                         {"base", p.budget.base},
                         {"extension", p.budget.extension},
                         {"status", std::string(to_string(p.verdict.status))}});
  }
  Json violations = Json::array();
  for (const auto& v : report.violations) violations.push_back(violation_to_json(v));
  Json warnings = Json::array();
  for (const auto& v : report.warnings) warnings.push_back(violation_to_json(v));
  return Json{{"verdict", report.pass ? "pass" : "fail"},
              {"parts", std::move(parts)},
              {"violations", std::move(violations)},
              {"warnings", std::move(warnings)}};
}

Json message_to_json(const Message& msg) {
  Json parts = Json::array();
  for (const auto& [kind, text] : msg.parts) parts.push_back(Json{{"kind", std::string(to_string(kind))}, {"text", text}});
  Json bindings = Json::object();
  for (const auto& [k, v] : msg.bindings) bindings[k] = v;
  return Json{{"parts", std::move(parts)}, {"plain_text", msg.plain_text()}, {"bindings", std::move(bindings)}};
}

}  // namespace cmf
