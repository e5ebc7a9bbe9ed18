#include <doctest.h>

#include "cmf/recommender.hpp"
#include "support/generators.hpp"
#include "support/ranking_oracle.hpp"

using namespace cmf;

namespace {

TemplateSpec make_template(const std::string& id, std::map<std::string, std::string> meta, const std::string& format) {
  TemplateSpec spec;
  spec.id = id;
  spec.channel = "google_adwords";
  spec.metadata = std::move(meta);
  PartSpec title;
  title.kind = StructuralPartKind::title;
  title.semantics.insert(SemanticTag{"attention_draw"});
  title.format = Format{format};
  spec.parts.push_back(title);
  return spec;
}

}  // namespace

TEST_CASE("score examples") {
  const auto spec = make_template("t", {{"audience", "b2b"}, {"stage", "awareness"}}, "problem_appeal");
  CHECK(score_template(spec, {}).score.value() == 0.0);
  CHECK(score_template(spec, {}).score.total == 0);

  const std::vector<Fact> full = {{"rec_audience", Value{"b2b"}}, {"rec_format", Value{"problem_appeal"}}};
  const auto s = score_template(spec, full);
  CHECK(s.score.value() == 1.0);
  CHECK(s.matched == full);
  CHECK(s.unmatched.empty());

  const std::vector<Fact> half = {{"rec_audience", Value{"b2c"}}, {"rec_stage", Value{"awareness"}}};
  const auto h = score_template(spec, half);
  CHECK(h.score.value() == 0.5);
  CHECK(h.unmatched == std::vector<Fact>{{"rec_audience", Value{"b2c"}}});

  // Non-string facts match by their text form; non-rec facts are ignored.
  auto numeric = make_template("n", {{"tier", "2"}}, "argument");
  CHECK(score_template(numeric, {{"rec_tier", Value{std::int64_t{2}}}}).score.value() == 1.0);
  CHECK(recommendation_facts(FactBase{}.with({"audience", Value{"b2b"}}).with({"rec_goal", Value{"x"}})) ==
        std::vector<Fact>{{"rec_goal", Value{"x"}}});
}

TEST_CASE("exact score comparison") {
  CHECK(Score{1, 3} == Score{2, 6});
  CHECK(Score{2, 3} > Score{1, 2});
  CHECK_FALSE(Score{1, 2} > Score{1, 2});
  CHECK(Score{0, 0} == Score{0, 4});
  CHECK(Score{1, 4} > Score{0, 0});
}

TEST_CASE("demo-style ranking with tie on score") {
  const std::vector<TemplateSpec> catalog = {
      make_template("zeta", {{"audience", "b2b"}}, "argument"),
      make_template("alpha", {{"audience", "b2b"}}, "question"),
      make_template("best", {{"audience", "b2b"}}, "problem_appeal"),
      make_template("none", {{"audience", "b2c"}}, "argument"),
  };
  const RuleSet rules({ProductionRule{"r",
                                      0,
                                      {Condition{"audience", ConditionOp::eq, Value{"b2b"}}},
                                      {{"rec_audience", Value{"b2b"}}, {"rec_format", Value{"problem_appeal"}}}}});
  const auto recs = recommend(FactBase{}.with({"audience", Value{"b2b"}}), rules, catalog, 3);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].template_id == "best");
  CHECK(recs[1].template_id == "alpha");
  CHECK(recs[2].template_id == "zeta");
  CHECK(recs[1].score == recs[2].score);
  CHECK(recs[0].trace.size() == 1);

  CHECK(recommend(FactBase{}, rules, catalog, 10).size() == 4);
  CHECK(recommend(FactBase{}, rules, {}, 5).empty());
  CHECK(recommend(FactBase{}, rules, catalog, 0).empty());
  // With nothing derived every template scores 0 and ids decide.
  CHECK(recommend(FactBase{}, rules, catalog, 1)[0].template_id == "alpha");
}

TEST_CASE("ranking matches a brute-force oracle on random catalogs") {
  testing::Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const auto catalog = testing::random_catalog(rng, testing::uniform(rng, 0, 50));
    const auto rules = testing::random_recommendation_rules(rng);
    const auto base = FactBase{}.with({"trigger", Value{testing::coin(rng, 0.9)}});
    const auto k = testing::uniform(rng, 1, 10);
    const auto derived = recommendation_facts(run_forward_chain(base, RuleSet(rules)).facts);
    const auto expected = testing::oracle_ranking(catalog, derived, k);
    const auto got = recommend(base, RuleSet(rules), catalog, k);
    REQUIRE(got.size() == expected.size());
    for (std::size_t r = 0; r < got.size(); ++r) {
      CHECK(got[r].template_id == expected[r].id);
      CHECK(got[r].score.matched == expected[r].matched);
      CHECK(got[r].score.total == expected[r].total);
    }
  }
}

TEST_CASE("adding a template never reorders the others") {
  testing::Rng rng(52);
  for (int i = 0; i < 100; ++i) {
    auto catalog = testing::random_catalog(rng, testing::uniform(rng, 1, 30));
    const RuleSet rules(testing::random_recommendation_rules(rng));
    const auto base = FactBase{}.with({"trigger", Value{true}});
    const auto before = recommend(base, rules, catalog, catalog.size());
    catalog.push_back(testing::random_catalog(rng, 1)[0]);
    catalog.back().id = "zz_extra";
    const auto after = recommend(base, rules, catalog, catalog.size());
    std::vector<std::string> a, b;
    for (const auto& r : before) a.push_back(r.template_id);
    for (const auto& r : after) {
      if (r.template_id != "zz_extra") b.push_back(r.template_id);
    }
    CHECK(a == b);
  }
}

TEST_CASE("conflicts propagate out of recommend") {
  const RuleSet rules({ProductionRule{"a", 2, {Condition{"x", ConditionOp::eq, Value{true}}}, {{"rec_format", Value{"question"}}}},
                       ProductionRule{"b", 1, {Condition{"x", ConditionOp::eq, Value{true}}}, {{"rec_format", Value{"argument"}}}}});
  CHECK_THROWS_AS(recommend(FactBase{}.with({"x", Value{true}}), rules, {}, 5), FactConflict);
}
