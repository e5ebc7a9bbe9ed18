#include "cmf/recommender.hpp"

#include <algorithm>

namespace cmf {

std::vector<Fact> recommendation_facts(const FactBase& base) {
  std::vector<Fact> out;
  for (const auto& [attribute, value] : base.facts()) {
    if (attribute.starts_with(kRecommendationPrefix)) out.push_back(Fact{attribute, value});
  }
  return out;
}

TemplateScore score_template(const TemplateSpec& spec, const std::vector<Fact>& derived) {
  TemplateScore out;
  for (const auto& fact : derived) {
    const std::string key = fact.attribute.substr(kRecommendationPrefix.size());
    const std::string wanted = value_text(fact.value);
    bool hit = false;
    if (key == "format") {
      hit = std::any_of(spec.parts.begin(), spec.parts.end(),
                        [&](const PartSpec& p) { return p.format.name() == wanted; });
    } else if (const auto it = spec.metadata.find(key); it != spec.metadata.end()) {
      hit = it->second == wanted;
    }
    (hit ? out.matched : out.unmatched).push_back(fact);
  }
  out.score = Score{out.matched.size(), out.matched.size() + out.unmatched.size()};
  return out;
}

std::vector<Recommendation> recommend(const FactBase& base, const RuleSet& rules,
                                      const std::vector<TemplateSpec>& catalog, std::size_t k) {
  const ChainResult chain = run_forward_chain(base, rules);
  const std::vector<Fact> derived = recommendation_facts(chain.facts);

  std::vector<Recommendation> ranked;
  ranked.reserve(catalog.size());
  for (const auto& spec : catalog) {
    auto scored = score_template(spec, derived);
    ranked.push_back(Recommendation{spec.id, scored.score, std::move(scored.matched), std::move(scored.unmatched),
                                    chain.trace});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Recommendation& a, const Recommendation& b) {
    if (!(a.score == b.score)) return a.score > b.score;
    return a.template_id < b.template_id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace cmf
