#pragma once

// HTTP/JSON surface. Handlers are pure functions of (snapshot, request); the
// Service owns the current snapshot and swaps it atomically on reload.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmf/catalog.hpp"
#include "cmf/json_io.hpp"

namespace cmf {

struct DataPaths {
  std::filesystem::path catalog = "catalog";
  std::filesystem::path rules = "rules";
  std::filesystem::path channels = "channels.json";

  static DataPaths under(const std::filesystem::path& root);
};

/// Everything a request may read. Never mutated after construction.
struct Snapshot {
  Catalog catalog;
  std::map<std::string, RuleSet> rulesets;
  std::vector<ChannelProfile> channels;

  const ChannelProfile* find_channel(const std::string& id) const;
};

class LoadFailure : public std::runtime_error {
 public:
  explicit LoadFailure(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// Throws LoadFailure with every problem found.
Snapshot load_snapshot(const DataPaths& paths);

/// Closed set of machine-readable error codes.
namespace api_error {
inline constexpr std::string_view kBadRequest = "bad_request";
inline constexpr std::string_view kValidationSchema = "validation_schema";
inline constexpr std::string_view kFactConflict = "fact_conflict";
inline constexpr std::string_view kUnknownRuleset = "unknown_ruleset";
inline constexpr std::string_view kUnknownTemplate = "unknown_template";
inline constexpr std::string_view kUnknownChannel = "unknown_channel";
inline constexpr std::string_view kMissingSlots = "missing_slots";
inline constexpr std::string_view kConfiguration = "configuration_error";
inline constexpr std::string_view kNotFound = "not_found";
inline constexpr std::string_view kMethodNotAllowed = "method_not_allowed";
}  // namespace api_error

struct ApiResponse {
  int status = 200;
  Json body;

  bool ok() const noexcept { return status == 200; }
  /// Canonical wire form: two-space indented JSON plus a trailing newline.
  std::string text() const;
};

ApiResponse api_error_response(int status, std::string_view code, const std::string& message,
                               Json details = Json::object());

inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::string_view kDefaultRuleset = "demo";
inline constexpr int kValidateDebounceMs = 300;

ApiResponse handle_channels(const Snapshot& snap);
ApiResponse handle_templates(const Snapshot& snap);
ApiResponse handle_config(const Snapshot& snap);
/// Body: {"facts": {...}, "ruleset": "demo", "k": 5}.
ApiResponse handle_recommend(const Snapshot& snap, const Json& request);
/// Body: {"template": id, "bindings": {...}, "channel": id}; channel
/// defaults to the template's own.
ApiResponse handle_validate(const Snapshot& snap, const Json& request);
/// Same request as validate; the response also carries the message.
ApiResponse handle_render(const Snapshot& snap, const Json& request);

/// Routes one request; body parse errors become 400 responses.
ApiResponse dispatch(const Snapshot& snap, std::string_view method, std::string_view path, std::string_view body);

class Service {
 public:
  explicit Service(DataPaths paths);
  Service(DataPaths paths, Snapshot initial);

  std::shared_ptr<const Snapshot> snapshot() const;
  /// Loads a fresh snapshot and publishes it; on failure the old one stays
  /// and LoadFailure propagates.
  void reload();
  void replace(Snapshot next);

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

 private:
  DataPaths paths_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
};

/// Blocks serving HTTP until the process is stopped. SIGHUP triggers reload.
int run_server(Service& service, const ServerOptions& options);

}  // namespace cmf
