#include "facetrank/scoring.hpp"

#include <algorithm>

namespace facetrank {

double background_facet_given_query(const Dataset& d, const RequestCase& request,
                                    const FacetId& f, int n) {
  if (n < 1) n = 1;
  std::size_t top = std::min<std::size_t>(request.results.size(),
                                          static_cast<std::size_t>(n));
  double sum = 0.0;
  for (std::size_t m = 0; m < top; ++m) {
    const ResultEntry& entry = request.results[m];
    const Venue& venue = d.venue(entry.venue);
    if (std::binary_search(venue.facets.begin(), venue.facets.end(), f)) {
      sum += entry.relevance;
    }
  }
  return sum / static_cast<double>(n);
}

double query_given_facet(const Dataset& d, const GlobalStats& global,
                         const RequestCase& request, const FacetId& f,
                         double c, int n) {
  double prior = global.facet_prior(f);
  if (prior <= 0.0) return 0.0;
  return c * background_facet_given_query(d, request, f, n) / prior;
}

FacetScoreMap user_facet_posterior(const Dataset& d, const UserProfile& profile,
                                   const GlobalStats& global,
                                   const RequestCase& request,
                                   const ScoringConfig& config) {
  FacetScoreMap posterior;
  if (profile.empty()) return posterior;

  double normalizer = 0.0;
  for (const auto& [facet, count] : profile.positive_count) {
    double w = profile.facet_prior(facet) *
               query_given_facet(d, global, request, facet, config.c,
                                 config.background_n);
    posterior[facet] = w;
    normalizer += w;
  }
  if (normalizer > 0.0) {
    for (auto& [facet, w] : posterior) w /= normalizer;
    return posterior;
  }
  // No profile facet has query support; fall back to the renormalized prior.
  double prior_total = 0.0;
  for (const auto& [facet, count] : profile.positive_count) {
    prior_total += static_cast<double>(count);
  }
  for (const auto& [facet, count] : profile.positive_count) {
    posterior[facet] = static_cast<double>(count) / prior_total;
  }
  return posterior;
}

namespace {

double weighted_coverage(const FacetScoreMap& weights, const Coverage& coverage,
                         const FacetId& target) {
  double sum = 0.0;
  for (const auto& [facet, w] : weights) {
    sum += w * coverage(facet, target);
  }
  return sum;
}

}  // namespace

double score_model1(const Dataset& d, const UserProfile& profile,
                    const GlobalStats& global, const RequestCase& request,
                    const Coverage& coverage, const FacetId& target,
                    const ScoringConfig& config) {
  FacetScoreMap posterior =
      user_facet_posterior(d, profile, global, request, config);
  return weighted_coverage(posterior, coverage, target);
}

double score_model2(const Dataset& d, const UserProfile& profile,
                    const GlobalStats& global, const RequestCase& request,
                    const Coverage& coverage, const FacetId& target,
                    const ScoringConfig& config, bool* background_unsupported) {
  double numerator =
      score_model1(d, profile, global, request, coverage, target, config);
  double denominator = 0.0;
  for (const FacetId& f : candidate_facets(d, request)) {
    denominator += background_facet_given_query(d, request, f,
                                                config.background_n) *
                   coverage(f, target);
  }
  bool floored = denominator < config.epsilon;
  if (background_unsupported) *background_unsupported = floored;
  return numerator / std::max(denominator, config.epsilon);
}

ScoreResult score_all(const Dataset& d, const UserProfile& profile,
                      const GlobalStats& global, const RequestCase& request,
                      const Coverage& coverage, const ScoringConfig& config) {
  ScoreResult out;
  std::vector<FacetId> candidates = candidate_facets(d, request);
  FacetScoreMap posterior =
      user_facet_posterior(d, profile, global, request, config);

  // The background masses are shared by every candidate under model2.
  FacetScoreMap background;
  if (config.model == Model::model2) {
    for (const FacetId& f : candidates) {
      background[f] =
          background_facet_given_query(d, request, f, config.background_n);
    }
  }

  for (const FacetId& target : candidates) {
    double numerator = weighted_coverage(posterior, coverage, target);
    if (config.model == Model::model1) {
      out.scores[target] = numerator;
      continue;
    }
    double denominator = weighted_coverage(background, coverage, target);
    if (denominator < config.epsilon) {
      out.background_unsupported.push_back(target);
    }
    out.scores[target] = numerator / std::max(denominator, config.epsilon);
  }
  return out;
}

ScoreResult score_all(const Dataset& d, const RequestCase& request,
                      const Coverage& coverage, const ScoringConfig& config) {
  UserProfile profile = build_profile(d, request.user, config.positive_min);
  GlobalStats global = build_global_stats(d, config.positive_min);
  return score_all(d, profile, global, request, coverage, config);
}

}  // namespace facetrank
