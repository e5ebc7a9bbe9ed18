#include "cmf/composer.hpp"

namespace cmf {

std::vector<std::string> profile_problems(const ChannelProfile& profile) {
  std::vector<std::string> problems;
  if (!is_identifier(profile.id)) problems.push_back("channel id '" + profile.id + "' must match [a-z][a-z0-9_]*");
  for (auto kind : profile.required_parts) {
    if (!profile.budgets.contains(kind)) {
      problems.push_back("channel '" + profile.id + "' requires '" + std::string(to_string(kind)) +
                         "' but has no budget for it");
    }
  }
  return problems;
}

std::string Message::plain_text() const {
  std::string out;
  for (const auto& [kind, text] : parts) {
    if (!out.empty()) out.push_back('\n');
    out += text;
  }
  return out;
}

namespace {

std::string join_names(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

MissingSlots::MissingSlots(std::set<std::string> names)
    : std::runtime_error("missing bindings for slots: " + join_names(names)), names_(std::move(names)) {}

FillResult fill_slots(const TemplateSpec& spec, const Bindings& bindings) {
  FillResult result;
  result.message.template_id = spec.id;
  std::set<std::string> missing;
  for (const auto& part : spec.parts) {
    std::string text;
    for (const auto& seg : part.pattern.segments()) {
      if (const auto* lit = std::get_if<Pattern::Literal>(&seg)) {
        text += lit->text;
        continue;
      }
      const auto& name = std::get<Pattern::SlotRef>(seg).name;
      if (const auto it = bindings.find(name); it != bindings.end()) {
        text += it->second;
        result.message.bindings.insert(*it);
      } else {
        missing.insert(name);
      }
    }
    result.message.parts.emplace(part.kind, std::move(text));
  }
  if (!missing.empty()) throw MissingSlots(std::move(missing));
  for (const auto& [name, value] : bindings) {
    if (!result.message.bindings.contains(name)) result.unused_bindings.push_back(name);
  }
  return result;
}

ValidationReport validate_message(const Message& msg, const TemplateSpec& spec, const ChannelProfile& profile) {
  ValidationReport report;
  for (const auto& [kind, text] : msg.parts) {
    const auto budget = profile.budgets.find(kind);
    if (budget == profile.budgets.end()) {
      throw ConfigurationError("channel '" + profile.id + "' defines no budget for part '" +
                               std::string(to_string(kind)) + "' used by template '" + spec.id + "'");
    }
    const auto verdict = check_budget(text, budget->second);
    report.parts.push_back(PartMeasure{kind, text, budget->second, verdict});
    const std::string counted =
        std::to_string(verdict.length) + " > " + std::to_string(budget->second.base);
    if (verdict.status == BudgetStatus::exceeded) {
      report.violations.push_back(Violation{kind, std::string(kRuleBudgetExceeded),
                                            std::to_string(verdict.length) + " > " +
                                                std::to_string(budget->second.effective_limit()),
                                            verdict.length, budget->second.effective_limit(), {}});
    } else if (verdict.status == BudgetStatus::within_extension) {
      report.warnings.push_back(Violation{kind, std::string(kRuleWithinExtension),
                                          counted + " (extension up to " +
                                              std::to_string(budget->second.effective_limit()) + ")",
                                          verdict.length, budget->second.effective_limit(), {}});
    }
  }

  PartKindSet present;
  for (const auto& [kind, text] : msg.parts) present.insert(kind);
  if (auto structure = check_structure(present, profile.required_parts); !structure.complete()) {
    std::string detail = "missing required parts:";
    for (auto kind : structure.missing) detail += " " + std::string(to_string(kind));
    report.violations.push_back(
        Violation{std::nullopt, std::string(kRuleMissingParts), detail, std::nullopt, std::nullopt, structure.missing});
  }
  report.pass = report.violations.empty();
  return report;
}

}  // namespace cmf
