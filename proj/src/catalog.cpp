#include "cmf/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cmf/dsl.hpp"
#include "cmf/json_io.hpp"

namespace fs = std::filesystem;

namespace cmf {

void Catalog::add(TemplateSpec spec) {
  auto problems = template_problems(spec);
  for (const auto& part : spec.parts) {
    if (!formats_.contains(part.format.name())) problems.push_back("unknown format '" + part.format.name() + "'");
  }
  if (templates_.contains(spec.id)) problems.push_back("duplicate template id '" + spec.id + "'");
  if (!problems.empty()) throw std::invalid_argument("template '" + spec.id + "': " + problems.front());
  auto id = spec.id;
  templates_.emplace(std::move(id), std::move(spec));
}

const TemplateSpec* Catalog::find(const std::string& id) const {
  const auto it = templates_.find(id);
  return it == templates_.end() ? nullptr : &it->second;
}

std::vector<TemplateSpec> Catalog::list() const {
  std::vector<TemplateSpec> out;
  out.reserve(templates_.size());
  for (const auto& [id, spec] : templates_) out.push_back(spec);
  return out;
}

std::string LoadError::to_string() const {
  std::string out = path;
  if (line > 0) out += ":" + std::to_string(line) + ":" + std::to_string(column);
  return out + ": " + message;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CatalogLoad load_catalog(const fs::path& root, const CatalogOptions& options) {
  CatalogLoad result;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    result.errors.push_back({root.string(), 0, 0, "catalog directory does not exist"});
    return result;
  }

  FormatVocabulary formats = options.formats;
  if (const auto extra = root / "formats.json"; fs::exists(extra, ec)) {
    try {
      const Json j = parse_json(read_text_file(extra));
      if (!j.is_object() || j.size() != 1 || !j.contains("formats") || !j["formats"].is_array()) {
        throw SchemaError("", "expected {\"formats\": [...]}");
      }
      for (std::size_t i = 0; i < j["formats"].size(); ++i) {
        const auto& f = j["formats"][i];
        if (!f.is_string() || !is_identifier(f.get<std::string>())) {
          throw SchemaError("/formats/" + std::to_string(i), "format name must match [a-z][a-z0-9_]*");
        }
        formats.insert(f.get<std::string>());
      }
    } catch (const std::exception& e) {
      result.errors.push_back({extra.string(), 0, 0, e.what()});
    }
  }

  std::vector<fs::path> files;
  for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file(ec) && it->path().extension() == ".cmt") files.push_back(it->path());
  }
  if (ec) result.errors.push_back({root.string(), 0, 0, "cannot list directory: " + ec.message()});
  std::sort(files.begin(), files.end());

  Catalog catalog(formats);
  std::map<std::string, std::string> origin_of;
  for (const auto& file : files) {
    const std::string path = file.string();
    std::string text;
    try {
      text = read_text_file(file);
    } catch (const IoError& e) {
      result.errors.push_back({path, 0, 0, e.what()});
      continue;
    }
    auto parsed = parse_templates(TemplateSource{std::move(text), path}, formats);
    for (const auto& d : parsed.diagnostics) {
      (d.severity == Severity::error ? result.errors : result.warnings)
          .push_back({path, d.line, d.column, d.message});
    }
    catalog.source_paths.push_back(path);
    for (auto& spec : parsed.templates) {
      if (const auto it = origin_of.find(spec.id); it != origin_of.end()) {
        result.errors.push_back(
            {path, 0, 0, "duplicate template id '" + spec.id + "' (also declared in " + it->second + ")"});
        continue;
      }
      if (options.channels) {
        const bool known = std::any_of(options.channels->begin(), options.channels->end(),
                                       [&](const ChannelProfile& c) { return c.id == spec.channel; });
        if (!known) {
          result.errors.push_back({path, 0, 0, "template '" + spec.id + "' uses unknown channel '" + spec.channel + "'"});
          continue;
        }
      }
      origin_of.emplace(spec.id, path);
      catalog.add(std::move(spec));
    }
  }
  if (result.errors.empty()) result.catalog = std::move(catalog);
  return result;
}

void save_catalog(const Catalog& catalog, const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) throw IoError("cannot create directory " + root.string());
  for (const auto& [id, spec] : catalog.templates()) {
    const auto file = root / (id + ".cmt");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << serialize_template(spec).text;
    if (!out) throw IoError("cannot write " + file.string());
  }
}

std::vector<ChannelProfile> load_channel_profiles(const fs::path& path) {
  return channels_from_json(parse_json(read_text_file(path)));
}

RuleSet load_ruleset(const fs::path& path) { return ruleset_from_json(parse_json(read_text_file(path))); }

std::map<std::string, RuleSet> load_rulesets(const fs::path& dir) {
  constexpr std::string_view kSuffix = ".rules.json";
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("rules directory does not exist: " + dir.string());
  std::map<std::string, RuleSet> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || !name.ends_with(kSuffix)) continue;
    const auto id = name.substr(0, name.size() - kSuffix.size());
    try {
      out.emplace(id, load_ruleset(entry.path()));
    } catch (const std::exception& e) {
      throw IoError(entry.path().string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cmf
