#pragma once

// JSON readers and writers for rule sets, channel profiles, fact bases and
// API payloads. Readers are strict: unknown keys are schema errors.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmf/composer.hpp"
#include "cmf/recommender.hpp"
#include "cmf/rules.hpp"

namespace cmf {

using Json = nlohmann::ordered_json;

/// Malformed JSON text; `byte` is the offset where parsing stopped.
class JsonSyntaxError : public std::runtime_error {
 public:
  JsonSyntaxError(std::size_t byte, const std::string& message);
  std::size_t byte() const noexcept { return byte_; }

 private:
  std::size_t byte_;
};

/// Well-formed JSON that violates a schema; `path` is a JSON pointer.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

Json parse_json(std::string_view text);

Value value_from_json(const Json& j, const std::string& path);
Json value_to_json(const Value& v);

/// `{"attr": value, ...}` into a fact base.
FactBase facts_from_json(const Json& j, const std::string& path);
Json facts_to_json(const FactBase& base);
Json fact_list_to_json(const std::vector<Fact>& facts);

RuleSet ruleset_from_json(const Json& j);
Json ruleset_to_json(const RuleSet& rules);

std::vector<ChannelProfile> channels_from_json(const Json& j);
Json channels_to_json(const std::vector<ChannelProfile>& channels);

Bindings bindings_from_json(const Json& j, const std::string& path);

Json trace_to_json(const FiringTrace& trace);
Json recommendation_to_json(const Recommendation& rec);
Json template_to_json(const TemplateSpec& spec);
Json report_to_json(const ValidationReport& report);
Json message_to_json(const Message& msg);

}  // namespace cmf
