#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmf/cli.hpp"
#include "cmf/service.hpp"

using namespace cmf;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cmf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string kData = CMF_DATA_DIR;

fs::path scratch(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("cmf_cli_test_" + name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("lint exit codes") {
  const auto ok = run({"lint", kData + "/catalog"});
  CHECK(ok.code == kExitOk);
  const auto bad_file = scratch("bad.cmt", "template \"x\" {\n  channel: \"c\"\n  part title { text: \"{oops\" }\n}\n");
  const auto bad = run({"lint", bad_file.string()});
  CHECK(bad.code == kExitDomainFailure);
  CHECK(bad.err.find("bad.cmt:3:23: error: unclosed slot") != std::string::npos);

  const auto json = run({"--json", "lint", bad_file.string()});
  CHECK(json.code == kExitDomainFailure);
  const auto j = Json::parse(json.out);
  CHECK(j["errors"].get<int>() > 0);
  CHECK(j["diagnostics"][0]["line"] == 3);
  fs::remove(bad_file);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"--bogus"}).code == kExitUsage);
  CHECK(run({"recommend"}).code == kExitUsage);
  CHECK(run({"--root", kData, "recommend", "--facts", "{not json"}).code == kExitUsage);
  CHECK(run({"--root", kData, "recommend", "--facts", R"({"audience": 1.5})"}).code == kExitUsage);
  CHECK(run({"--root", kData, "recommend", "--facts", "{}", "--k", "0"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("recommend prints a table or the API body") {
  const auto table = run({"--root", kData, "recommend", "--facts", R"({"audience": "b2b", "stage": "awareness"})"});
  CHECK(table.code == kExitOk);
  CHECK(table.out.find("b2b_awareness_pain") != std::string::npos);

  const std::string facts = R"({"audience": "b2b", "stage": "awareness"})";
  const auto json = run({"--json", "--root", kData, "recommend", "--facts", facts, "--k", "3"});
  CHECK(json.code == kExitOk);
  const auto snap = load_snapshot(DataPaths::under(kData));
  const auto http = dispatch(snap, "POST", "/api/recommend", R"({"facts": )" + facts + R"(, "k": 3})");
  CHECK(json.out == http.text());

  CHECK(run({"--root", kData, "recommend", "--facts", "{}", "--ruleset", "nope"}).code == kExitDomainFailure);
}

TEST_CASE("facts and bindings may come from files") {
  const auto facts = scratch("facts.json", R"({"audience": "b2c"})");
  CHECK(run({"--root", kData, "recommend", "--facts", facts.string()}).code == kExitOk);
  fs::remove(facts);
}

TEST_CASE("render exit codes follow the verdict") {
  const auto ok = run({"--root", kData, "render", "--template", "b2b_awareness_pain", "--bindings",
                       R"({"pain_point": "manual reporting", "product": "AcmeCRM"})"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("Is manual reporting slowing your team down?") != std::string::npos);

  const std::string long_pain(34, 'p');
  const auto over = run({"--root", kData, "render", "--template", "b2b_awareness_pain", "--bindings",
                         R"({"pain_point": ")" + long_pain + R"(", "product": "AcmeCRM"})"});
  CHECK(over.code == kExitDomainFailure);
  CHECK(over.out.find("61 > 60") != std::string::npos);

  const std::string body = R"({"pain_point": "x", "product": "y"})";
  const auto json =
      run({"--json", "--root", kData, "render", "--template", "b2b_awareness_pain", "--bindings", body, "--channel",
           "yandex_direct"});
  const auto snap = load_snapshot(DataPaths::under(kData));
  const auto http = dispatch(snap, "POST", "/api/render",
                             R"({"template": "b2b_awareness_pain", "bindings": )" + body +
                                 R"(, "channel": "yandex_direct"})");
  CHECK(json.out == http.text());

  const auto missing = run({"--root", kData, "render", "--template", "b2b_awareness_pain"});
  CHECK(missing.code == kExitDomainFailure);
  CHECK(run({"--root", kData, "render", "--template", "nope"}).code == kExitDomainFailure);
}

TEST_CASE("catalog list") {
  const auto table = run({"--root", kData, "catalog", "list"});
  CHECK(table.code == kExitOk);
  CHECK(table.out.find("enterprise_purchase_pilot") != std::string::npos);
  const auto json = run({"--json", "--root", kData, "catalog", "list"});
  const auto snap = load_snapshot(DataPaths::under(kData));
  CHECK(json.out == dispatch(snap, "GET", "/api/templates", "").text());
}

TEST_CASE("a broken data root is a domain failure") {
  CHECK(run({"--root", "/nonexistent/cmf", "catalog", "list"}).code == kExitDomainFailure);
}
