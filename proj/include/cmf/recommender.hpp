#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cmf/domain.hpp"
#include "cmf/rules.hpp"

namespace cmf {

/// Prefix of attributes that carry recommendation advice.
inline constexpr std::string_view kRecommendationPrefix = "rec_";

/// Matched fraction kept as an exact ratio; compared by cross-multiplication.
/// An empty score (total 0) is 0.
struct Score {
  std::size_t matched = 0;
  std::size_t total = 0;

  double value() const noexcept { return static_cast<double>(matched) / static_cast<double>(denominator()); }
  bool operator==(const Score& o) const noexcept { return matched * o.denominator() == o.matched * denominator(); }
  bool operator>(const Score& o) const noexcept { return matched * o.denominator() > o.matched * denominator(); }

 private:
  std::size_t denominator() const noexcept { return total == 0 ? 1 : total; }
};

struct TemplateScore {
  Score score;
  std::vector<Fact> matched;
  std::vector<Fact> unmatched;
};

struct Recommendation {
  std::string template_id;
  Score score;
  std::vector<Fact> matched;
  std::vector<Fact> unmatched;
  FiringTrace trace;
};

/// The rec_* facts of `base`, in attribute order.
std::vector<Fact> recommendation_facts(const FactBase& base);

/// A derived fact (rec_X, v) matches when the template's metadata X equals v
/// as text; rec_format instead matches when any part uses format v.
TemplateScore score_template(const TemplateSpec& spec, const std::vector<Fact>& derived);

/// Runs the rules once, scores every template and returns the best `k` by
/// (score desc, id asc). Propagates FactConflict.
std::vector<Recommendation> recommend(const FactBase& base, const RuleSet& rules,
                                      const std::vector<TemplateSpec>& catalog, std::size_t k);

}  // namespace cmf
