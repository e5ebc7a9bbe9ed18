#include "cmf/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cmf/dsl.hpp"
#include "cmf/service.hpp"

namespace fs = std::filesystem;

namespace cmf {

namespace {

struct Options {
  bool json = false;
  std::string root = ".";
  std::string catalog, rules, channels;

  std::vector<std::string> lint_paths;
  std::string facts, ruleset, template_id, bindings, channel;
  int k = static_cast<int>(kDefaultTopK);
  int port = 0;
  std::string host = "127.0.0.1";
  std::string static_dir;
};

DataPaths data_paths(const Options& o) {
  auto paths = DataPaths::under(o.root);
  if (!o.catalog.empty()) paths.catalog = o.catalog;
  if (!o.rules.empty()) paths.rules = o.rules;
  if (!o.channels.empty()) paths.channels = o.channels;
  return paths;
}

// `--facts` / `--bindings` accept inline JSON or a path to a JSON file.
std::string inline_or_file(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  return read_text_file(arg);
}

int exit_code_for(const ApiResponse& r) {
  if (r.status == 200) return kExitOk;
  return r.status == 400 ? kExitUsage : kExitDomainFailure;
}

void print_error(std::ostream& err, const ApiResponse& r) {
  err << "error [" << r.body.value("code", "") << "]: " << r.body.value("message", "") << "\n";
}

std::string fact_list_text(const Json& list) {
  std::string out;
  for (const auto& f : list) {
    if (!out.empty()) out += ", ";
    out += f["attr"].get<std::string>() + "=" + (f["value"].is_string() ? f["value"].get<std::string>() : f["value"].dump());
  }
  return out.empty() ? "-" : out;
}

int run_lint(const Options& o, std::ostream& out, std::ostream& err) {
  Json diagnostics = Json::array();
  std::size_t templates = 0, errors = 0, warnings = 0;
  auto add = [&](const std::string& path, std::size_t line, std::size_t column, bool is_error, const std::string& msg) {
    diagnostics.push_back(Json{{"path", path},
                               {"line", line},
                               {"column", column},
                               {"severity", is_error ? "error" : "warning"},
                               {"message", msg}});
    ++(is_error ? errors : warnings);
  };

  for (const auto& arg : o.lint_paths) {
    std::error_code ec;
    if (fs::is_directory(arg, ec)) {
      auto loaded = load_catalog(arg);
      for (const auto& e : loaded.errors) add(e.path, e.line, e.column, true, e.message);
      for (const auto& w : loaded.warnings) add(w.path, w.line, w.column, false, w.message);
      if (loaded.catalog) templates += loaded.catalog->size();
      continue;
    }
    std::string text;
    try {
      text = read_text_file(arg);
    } catch (const IoError& e) {
      add(arg, 0, 0, true, e.what());
      continue;
    }
    auto parsed = parse_templates(TemplateSource{std::move(text), arg});
    for (const auto& d : parsed.diagnostics) add(arg, d.line, d.column, d.severity == Severity::error, d.message);
    templates += parsed.templates.size();
  }

  if (o.json) {
    out << Json{{"templates", templates}, {"errors", errors}, {"warnings", warnings}, {"diagnostics", diagnostics}}
               .dump(2)
        << "\n";
  } else {
    for (const auto& d : diagnostics) {
      std::string where = d["path"].get<std::string>();
      if (d["line"].get<std::size_t>() > 0) {
        where += ":" + std::to_string(d["line"].get<std::size_t>()) + ":" + std::to_string(d["column"].get<std::size_t>());
      }
      (d["severity"] == "error" ? err : out)
          << where << ": " << d["severity"].get<std::string>() << ": " << d["message"].get<std::string>() << "\n";
    }
    out << templates << " template(s), " << errors << " error(s), " << warnings << " warning(s)\n";
  }
  return errors == 0 ? kExitOk : kExitDomainFailure;
}

std::optional<Snapshot> load_or_report(const Options& o, std::ostream& err) {
  try {
    return load_snapshot(data_paths(o));
  } catch (const LoadFailure& e) {
    for (const auto& m : e.messages()) err << m << "\n";
    return std::nullopt;
  }
}

std::optional<Json> read_json_arg(const std::string& flag, const std::string& arg, std::ostream& err) {
  try {
    return parse_json(inline_or_file(arg));
  } catch (const std::exception& e) {
    err << flag << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int run_recommend(const Options& o, std::ostream& out, std::ostream& err) {
  const auto facts = read_json_arg("--facts", o.facts, err);
  if (!facts) return kExitUsage;
  const auto snap = load_or_report(o, err);
  if (!snap) return kExitDomainFailure;

  Json request{{"facts", *facts}, {"k", o.k}};
  if (!o.ruleset.empty()) request["ruleset"] = o.ruleset;
  const auto response = handle_recommend(*snap, request);
  if (o.json) {
    out << response.text();
  } else if (!response.ok()) {
    print_error(err, response);
  } else {
    const auto& recs = response.body["recommendations"];
    out << "ruleset " << response.body["ruleset"].get<std::string>() << ", " << recs.size() << " recommendation(s)\n";
    int rank = 1;
    for (const auto& r : recs) {
      out << std::setw(3) << rank++ << "  " << std::left << std::setw(28) << r["template_id"].get<std::string>()
          << std::right << " score " << std::fixed << std::setprecision(3) << r["score"].get<double>()
          << "  matched: " << fact_list_text(r["matched"]) << "  unmatched: " << fact_list_text(r["unmatched"]) << "\n";
    }
    if (!recs.empty()) {
      out << "fired rules:\n";
      for (const auto& f : recs.front()["trace"]) {
        out << "  " << f["rule"].get<std::string>() << " -> " << fact_list_text(f["asserted"]) << "\n";
      }
    }
  }
  return exit_code_for(response);
}

int run_render(const Options& o, std::ostream& out, std::ostream& err) {
  Json bindings = Json::object();
  if (!o.bindings.empty()) {
    auto parsed = read_json_arg("--bindings", o.bindings, err);
    if (!parsed) return kExitUsage;
    bindings = std::move(*parsed);
  }
  const auto snap = load_or_report(o, err);
  if (!snap) return kExitDomainFailure;

  Json request{{"template", o.template_id}, {"bindings", bindings}};
  if (!o.channel.empty()) request["channel"] = o.channel;
  const auto response = handle_render(*snap, request);
  if (o.json) {
    out << response.text();
  } else if (!response.ok()) {
    print_error(err, response);
    if (response.body["code"] == api_error::kMissingSlots) {
      for (const auto& s : response.body["details"]["slots"]) err << "  missing: " << s.get<std::string>() << "\n";
    }
  } else {
    const auto& report = response.body["report"];
    out << response.body["template_id"].get<std::string>() << " on " << response.body["channel"].get<std::string>()
        << "\n";
    for (const auto& p : report["parts"]) {
      const auto limit = p["base"].get<std::size_t>() + p["extension"].get<std::size_t>();
      out << "  " << std::left << std::setw(15) << p["kind"].get<std::string>() << std::right << std::setw(4)
          << p["length"].get<std::size_t>() << "/" << std::left << std::setw(4) << limit << std::right << " "
          << std::left << std::setw(17) << p["status"].get<std::string>() << std::right << p["text"].get<std::string>()
          << "\n";
    }
    for (const auto& v : report["violations"]) {
      out << "  violation: " << (v["part"].is_null() ? "-" : v["part"].get<std::string>()) << " "
          << v["rule"].get<std::string>() << " (" << v["detail"].get<std::string>() << ")\n";
    }
    for (const auto& w : report["warnings"]) {
      out << "  warning: " << w["part"].get<std::string>() << " " << w["rule"].get<std::string>() << " ("
          << w["detail"].get<std::string>() << ")\n";
    }
    for (const auto& u : response.body["unused_bindings"]) out << "  unused binding: " << u.get<std::string>() << "\n";
    out << "verdict: " << report["verdict"].get<std::string>() << "\n";
  }
  if (!response.ok()) return exit_code_for(response);
  return response.body["report"]["verdict"] == "pass" ? kExitOk : kExitDomainFailure;
}

int run_catalog_list(const Options& o, std::ostream& out, std::ostream& err) {
  const auto snap = load_or_report(o, err);
  if (!snap) return kExitDomainFailure;
  const auto response = handle_templates(*snap);
  if (o.json) {
    out << response.text();
    return kExitOk;
  }
  for (const auto& [id, spec] : snap->catalog.templates()) {
    std::string parts, meta;
    for (const auto& p : spec.parts) parts += (parts.empty() ? "" : ",") + std::string(to_string(p.kind));
    for (const auto& [k, v] : spec.metadata) meta += (meta.empty() ? "" : " ") + k + "=" + v;
    out << std::left << std::setw(34) << id << ' ' << std::setw(17) << spec.channel << ' ' << std::setw(52) << parts
        << ' ' << meta << "\n";
  }
  out << snap->catalog.size() << " template(s)\n";
  return kExitOk;
}

int run_serve(const Options& o, std::ostream& err) {
  ServerOptions server;
  server.host = o.host;
  server.port = 8080;
  if (const char* env = std::getenv("CMF_PORT")) server.port = std::atoi(env);
  if (o.port > 0) server.port = o.port;
  if (!o.static_dir.empty()) server.static_dir = o.static_dir;
  try {
    Service service(data_paths(o));
    return run_server(service, server);
  } catch (const LoadFailure& e) {
    for (const auto& m : e.messages()) err << m << "\n";
    return kExitDomainFailure;
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Design, recommend and validate communication-message templates", "cmf"};
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Print JSON (same schema as the HTTP API)");
  app.add_option("--root", o.root, "Data root holding catalog/, rules/ and channels.json");
  app.add_option("--catalog", o.catalog, "Template catalog directory (default <root>/catalog)");
  app.add_option("--rules", o.rules, "Rule set directory (default <root>/rules)");
  app.add_option("--channels", o.channels, "Channel profile file (default <root>/channels.json)");

  auto* lint = app.add_subcommand("lint", "Parse templates and report diagnostics");
  lint->add_option("paths", o.lint_paths, "Template files or catalog directories")->required();

  auto* rec = app.add_subcommand("recommend", "Rank templates for a fact base");
  rec->add_option("--facts", o.facts, "Facts as inline JSON object or path to a JSON file")->required();
  rec->add_option("--k", o.k, "Number of results")->check(CLI::PositiveNumber);
  rec->add_option("--ruleset", o.ruleset, "Rule set id (default demo)");

  auto* render = app.add_subcommand("render", "Fill a template and validate it against a channel");
  render->add_option("--template", o.template_id, "Template id")->required();
  render->add_option("--bindings", o.bindings, "Slot values as inline JSON object or path to a JSON file");
  render->add_option("--channel", o.channel, "Channel id (default: the template's channel)");

  auto* catalog = app.add_subcommand("catalog", "Catalog operations");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List templates");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", o.port, "Listen port (default $CMF_PORT or 8080)")->check(CLI::Range(1, 65535));
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--static", o.static_dir, "Directory of UI assets served at /");

  for (auto* sub : {lint, rec, render, catalog, list, serve}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (lint->parsed()) return run_lint(o, out, err);
    if (rec->parsed()) return run_recommend(o, out, err);
    if (render->parsed()) return run_render(o, out, err);
    if (list->parsed()) return run_catalog_list(o, out, err);
    if (serve->parsed()) return run_serve(o, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  return kExitUsage;
}

}  // namespace cmf
