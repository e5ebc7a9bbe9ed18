#pragma once

// On-disk storage: `catalog/*.cmt` templates, `rules/*.rules.json` rule sets
// and a `channels.json` profile file.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmf/composer.hpp"
#include "cmf/domain.hpp"
#include "cmf/rules.hpp"

namespace cmf {

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(FormatVocabulary formats) : formats_(std::move(formats)) {}

  /// Throws std::invalid_argument if the template breaks an invariant, uses
  /// a format outside the vocabulary, or reuses an id.
  void add(TemplateSpec spec);

  const TemplateSpec* find(const std::string& id) const;
  std::vector<TemplateSpec> list() const;
  std::size_t size() const noexcept { return templates_.size(); }
  const std::map<std::string, TemplateSpec>& templates() const noexcept { return templates_; }
  const FormatVocabulary& formats() const noexcept { return formats_; }

  std::vector<std::string> source_paths;

  bool operator==(const Catalog& o) const { return templates_ == o.templates_ && formats_ == o.formats_; }

 private:
  std::map<std::string, TemplateSpec> templates_;
  FormatVocabulary formats_ = default_format_vocabulary();
};

struct LoadError {
  std::string path;
  std::size_t line = 0;  // 0 when the error is not tied to a position
  std::size_t column = 0;
  std::string message;

  std::string to_string() const;
};

struct CatalogLoad {
  std::optional<Catalog> catalog;  // set only when `errors` is empty
  std::vector<LoadError> errors;
  std::vector<LoadError> warnings;
};

struct CatalogOptions {
  FormatVocabulary formats = default_format_vocabulary();
  /// When set, every template's channel must name one of these profiles.
  const std::vector<ChannelProfile>* channels = nullptr;
};

/// Reads every `*.cmt` under `root` recursively and reports all problems at
/// once. An optional `formats.json` (`{"formats": [...]}`) in `root` extends
/// the format vocabulary.
CatalogLoad load_catalog(const std::filesystem::path& root, const CatalogOptions& options = {});

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes one canonical `<id>.cmt` per template. Throws IoError.
void save_catalog(const Catalog& catalog, const std::filesystem::path& root);

/// Throws IoError, JsonSyntaxError or SchemaError.
std::vector<ChannelProfile> load_channel_profiles(const std::filesystem::path& path);

RuleSet load_ruleset(const std::filesystem::path& path);

/// Every `<name>.rules.json` in `dir`, keyed by name.
std::map<std::string, RuleSet> load_rulesets(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cmf
