#pragma once

#include <map>
#include <vector>

#include "facetrank/coverage.hpp"
#include "facetrank/datastore.hpp"
#include "facetrank/profile.hpp"

namespace facetrank {

enum class Model { model1, model2 };

struct ScoringConfig {
  Model model = Model::model1;
  int background_n = 1;     // top-N results feeding the background distribution
  double c = 1.0;           // query-likelihood constant; cancels in the posterior
  double epsilon = 1e-9;    // denominator floor for the background-normalized model
  int positive_min = 3;     // rating threshold used when building profiles
};

using FacetScoreMap = std::map<FacetId, double>;

struct ScoreResult {
  FacetScoreMap scores;
  // Facets whose background denominator was floored to epsilon (model2 only).
  std::vector<FacetId> background_unsupported;
};

// Background relevance mass of facet f in the request's top-N results:
// (1/N) * sum of the result relevance over the top min(N, |results|) entries
// whose venue carries f. Venue facet assignments are taken as given.
double background_facet_given_query(const Dataset& d, const RequestCase& request,
                                    const FacetId& f, int n);

// Query likelihood of a facet: c * background(f|q) / global_prior(f), and 0
// when the facet has no global positive mass.
double query_given_facet(const Dataset& d, const GlobalStats& global,
                         const RequestCase& request, const FacetId& f,
                         double c, int n);

// Posterior preference over the profile's facets given the query:
// prior(f) * query_given_facet(f), normalized over the profile. When no
// profile facet has query support the renormalized prior is returned, so
// personalization survives an uninformative result list. Empty profile maps
// to an empty posterior.
FacetScoreMap user_facet_posterior(const Dataset& d, const UserProfile& profile,
                                   const GlobalStats& global,
                                   const RequestCase& request,
                                   const ScoringConfig& config);

// Posterior-weighted coverage of the target facet by the profile's facets.
double score_model1(const Dataset& d, const UserProfile& profile,
                    const GlobalStats& global, const RequestCase& request,
                    const Coverage& coverage, const FacetId& target,
                    const ScoringConfig& config);

// Model-1 numerator normalized by the background coverage mass, summed over
// the request's candidate facets. A zero denominator is floored to epsilon
// and reported through background_unsupported.
double score_model2(const Dataset& d, const UserProfile& profile,
                    const GlobalStats& global, const RequestCase& request,
                    const Coverage& coverage, const FacetId& target,
                    const ScoringConfig& config,
                    bool* background_unsupported = nullptr);

// Scores every candidate facet of the request with the configured model.
ScoreResult score_all(const Dataset& d, const UserProfile& profile,
                      const GlobalStats& global, const RequestCase& request,
                      const Coverage& coverage, const ScoringConfig& config);

// Convenience overload; builds the user profile and global stats internally.
ScoreResult score_all(const Dataset& d, const RequestCase& request,
                      const Coverage& coverage, const ScoringConfig& config);

}  // namespace facetrank
