#include "cmf/service.hpp"

#include <algorithm>

namespace cmf {

DataPaths DataPaths::under(const std::filesystem::path& root) {
  return DataPaths{root / "catalog", root / "rules", root / "channels.json"};
}

const ChannelProfile* Snapshot::find_channel(const std::string& id) const {
  const auto it = std::find_if(channels.begin(), channels.end(), [&](const ChannelProfile& c) { return c.id == id; });
  return it == channels.end() ? nullptr : &*it;
}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
  return out;
}

}  // namespace

LoadFailure::LoadFailure(std::vector<std::string> messages)
    : std::runtime_error(join_lines(messages)), messages_(std::move(messages)) {}

Snapshot load_snapshot(const DataPaths& paths) {
  Snapshot snap;
  std::vector<std::string> errors;
  bool have_channels = false;
  try {
    snap.channels = load_channel_profiles(paths.channels);
    have_channels = true;
  } catch (const std::exception& e) {
    errors.push_back(paths.channels.string() + ": " + e.what());
  }
  try {
    snap.rulesets = load_rulesets(paths.rules);
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  CatalogOptions options;
  if (have_channels) options.channels = &snap.channels;
  auto loaded = load_catalog(paths.catalog, options);
  for (const auto& e : loaded.errors) errors.push_back(e.to_string());
  if (!errors.empty()) throw LoadFailure(std::move(errors));
  snap.catalog = std::move(*loaded.catalog);
  return snap;
}

std::string ApiResponse::text() const { return body.dump(2) + "\n"; }

ApiResponse api_error_response(int status, std::string_view code, const std::string& message, Json details) {
  return ApiResponse{status, Json{{"code", std::string(code)}, {"message", message}, {"details", std::move(details)}}};
}

namespace {

ApiResponse schema_error(const SchemaError& e) {
  return api_error_response(400, api_error::kValidationSchema, e.what(), Json{{"path", e.path()}});
}

void check_request_keys(const Json& request, std::initializer_list<std::string_view> allowed) {
  if (!request.is_object()) throw SchemaError("", "request body must be a JSON object");
  for (const auto& [key, value] : request.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) throw SchemaError("/" + key, "unknown key");
  }
}

struct ComposeRequest {
  const TemplateSpec* spec = nullptr;
  const ChannelProfile* channel = nullptr;
  Bindings bindings;
};

// Shared front half of validate and render. Returns an error response or
// fills `out`.
std::optional<ApiResponse> read_compose_request(const Snapshot& snap, const Json& request, ComposeRequest& out) {
  try {
    check_request_keys(request, {"template", "bindings", "channel"});
    if (!request.contains("template") || !request["template"].is_string()) {
      throw SchemaError("/template", "expected a template id string");
    }
    const auto id = request["template"].get<std::string>();
    out.bindings = request.contains("bindings") ? bindings_from_json(request["bindings"], "/bindings") : Bindings{};
    out.spec = snap.catalog.find(id);
    if (!out.spec) {
      return api_error_response(404, api_error::kUnknownTemplate, "no template '" + id + "'", Json{{"template", id}});
    }
    std::string channel = out.spec->channel;
    if (request.contains("channel")) {
      if (!request["channel"].is_string()) throw SchemaError("/channel", "expected a channel id string");
      channel = request["channel"].get<std::string>();
    }
    out.channel = snap.find_channel(channel);
    if (!out.channel) {
      return api_error_response(404, api_error::kUnknownChannel, "no channel '" + channel + "'",
                                Json{{"channel", channel}});
    }
  } catch (const SchemaError& e) {
    return schema_error(e);
  }
  return std::nullopt;
}

ApiResponse compose(const Snapshot& snap, const Json& request, bool include_message) {
  ComposeRequest req;
  if (auto err = read_compose_request(snap, request, req)) return *err;
  try {
    auto filled = fill_slots(*req.spec, req.bindings);
    auto report = validate_message(filled.message, *req.spec, *req.channel);
    Json body;
    body["template_id"] = req.spec->id;
    body["channel"] = req.channel->id;
    if (include_message) body["message"] = message_to_json(filled.message);
    body["report"] = report_to_json(report);
    body["unused_bindings"] = filled.unused_bindings;
    return ApiResponse{200, std::move(body)};
  } catch (const MissingSlots& e) {
    Json slots = Json::array();
    for (const auto& n : e.names()) slots.push_back(n);
    return api_error_response(422, api_error::kMissingSlots, e.what(), Json{{"slots", std::move(slots)}});
  } catch (const ConfigurationError& e) {
    return api_error_response(500, api_error::kConfiguration, e.what());
  }
}

}  // namespace

ApiResponse handle_channels(const Snapshot& snap) { return ApiResponse{200, channels_to_json(snap.channels)}; }

ApiResponse handle_templates(const Snapshot& snap) {
  Json list = Json::array();
  for (const auto& [id, spec] : snap.catalog.templates()) list.push_back(template_to_json(spec));
  return ApiResponse{200, Json{{"templates", std::move(list)}}};
}

ApiResponse handle_config(const Snapshot& snap) {
  Json rulesets = Json::array();
  for (const auto& [id, rules] : snap.rulesets) rulesets.push_back(id);
  return ApiResponse{200, Json{{"api_base", "/api"},
                               {"debounce_ms", kValidateDebounceMs},
                               {"default_k", kDefaultTopK},
                               {"rulesets", std::move(rulesets)}}};
}

ApiResponse handle_recommend(const Snapshot& snap, const Json& request) {
  FactBase facts;
  std::size_t k = kDefaultTopK;
  std::string ruleset_id(kDefaultRuleset);
  bool ruleset_given = false;
  try {
    check_request_keys(request, {"facts", "ruleset", "k"});
    if (!request.contains("facts")) throw SchemaError("/facts", "missing required key");
    facts = facts_from_json(request["facts"], "/facts");
    if (request.contains("k")) {
      const auto& kj = request["k"];
      if (!kj.is_number_integer() || kj.get<std::int64_t>() < 1) throw SchemaError("/k", "k must be a positive integer");
      k = kj.get<std::size_t>();
    }
    if (request.contains("ruleset")) {
      if (!request["ruleset"].is_string()) throw SchemaError("/ruleset", "expected a ruleset id string");
      ruleset_id = request["ruleset"].get<std::string>();
      ruleset_given = true;
    }
  } catch (const SchemaError& e) {
    return schema_error(e);
  }

  static const RuleSet kNoRules;
  const RuleSet* rules = nullptr;
  if (const auto it = snap.rulesets.find(ruleset_id); it != snap.rulesets.end()) {
    rules = &it->second;
  } else if (!ruleset_given && snap.rulesets.empty()) {
    rules = &kNoRules;
  } else {
    return api_error_response(404, api_error::kUnknownRuleset, "no ruleset '" + ruleset_id + "'",
                              Json{{"ruleset", ruleset_id}});
  }

  try {
    const auto recs = recommend(facts, *rules, snap.catalog.list(), k);
    Json list = Json::array();
    for (const auto& r : recs) list.push_back(recommendation_to_json(r));
    return ApiResponse{200, Json{{"ruleset", ruleset_id}, {"k", k}, {"recommendations", std::move(list)}}};
  } catch (const FactConflict& e) {
    return api_error_response(409, api_error::kFactConflict, e.what(),
                              Json{{"rule", e.rule_id()},
                                   {"attribute", e.attribute()},
                                   {"existing", value_to_json(e.existing())},
                                   {"attempted", value_to_json(e.attempted())}});
  }
}

ApiResponse handle_validate(const Snapshot& snap, const Json& request) { return compose(snap, request, false); }

ApiResponse handle_render(const Snapshot& snap, const Json& request) { return compose(snap, request, true); }

ApiResponse dispatch(const Snapshot& snap, std::string_view method, std::string_view path, std::string_view body) {
  struct Route {
    std::string_view path;
    std::string_view method;
  };
  static constexpr Route kRoutes[] = {
      {"/api/channels", "GET"}, {"/api/templates", "GET"}, {"/api/config", "GET"},
      {"/api/recommend", "POST"}, {"/api/validate", "POST"}, {"/api/render", "POST"},
  };
  const auto route = std::find_if(std::begin(kRoutes), std::end(kRoutes), [&](const Route& r) { return r.path == path; });
  if (route == std::end(kRoutes)) {
    return api_error_response(404, api_error::kNotFound, "no endpoint " + std::string(path));
  }
  if (route->method != method) {
    return api_error_response(405, api_error::kMethodNotAllowed,
                              std::string(path) + " expects " + std::string(route->method));
  }
  if (method == "GET") {
    if (path == "/api/channels") return handle_channels(snap);
    if (path == "/api/templates") return handle_templates(snap);
    return handle_config(snap);
  }
  Json request;
  try {
    request = parse_json(body);
  } catch (const JsonSyntaxError& e) {
    return api_error_response(400, api_error::kBadRequest, e.what(), Json{{"byte", e.byte()}});
  }
  if (path == "/api/recommend") return handle_recommend(snap, request);
  if (path == "/api/validate") return handle_validate(snap, request);
  return handle_render(snap, request);
}

Service::Service(DataPaths paths) : paths_(std::move(paths)) { reload(); }

Service::Service(DataPaths paths, Snapshot initial)
    : paths_(std::move(paths)), current_(std::make_shared<const Snapshot>(std::move(initial))) {}

std::shared_ptr<const Snapshot> Service::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

void Service::reload() { replace(load_snapshot(paths_)); }

void Service::replace(Snapshot next) {
  auto fresh = std::make_shared<const Snapshot>(std::move(next));
  std::lock_guard lock(mu_);
  current_ = std::move(fresh);
}

ApiResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto snap = snapshot();
  return dispatch(*snap, method, path, body);
}

}  // namespace cmf
