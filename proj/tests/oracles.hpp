#pragma once

// Test-only reference implementations. Each is a literal transcription of
// the definition it checks, kept independent of the library code paths it
// is used to verify.

#include <map>
#include <string>
#include <vector>

#include "facetrank/coverage.hpp"
#include "facetrank/datastore.hpp"
#include "facetrank/evalsim.hpp"
#include "facetrank/treebuild.hpp"

namespace facetrank::oracle {

// Indicator or raw clamped cosine straight from the vectors.
struct RefCoverage {
  bool exact = true;
  const EmbeddingTable* table = nullptr;

  double operator()(const FacetId& fu, const FacetId& fi) const;
};

// Positive-rating tallies recomputed with a plain loop over the ratings.
struct RefProfile {
  std::map<FacetId, int> counts;
  int total = 0;
};
RefProfile ref_profile(const Dataset& d, const std::string& user, int positive_min);
RefProfile ref_global(const Dataset& d, int positive_min);

double ref_background(const Dataset& d, const RequestCase& request,
                      const FacetId& f, int n);

std::map<FacetId, double> ref_posterior(const Dataset& d,
                                        const RequestCase& request,
                                        const RefProfile& profile,
                                        const RefProfile& global, double c,
                                        int n);

// Literal summation of the scoring definitions over every candidate facet.
std::map<FacetId, double> ref_scores(const Dataset& d, const RequestCase& request,
                                     bool background_model,
                                     const RefCoverage& coverage, double c,
                                     int n, double epsilon, int positive_min);

// Tallies recomputed from the serialized dataset files with standalone
// parsing, bypassing the dataset loader.
RefProfile tally_from_files(const std::string& ratings_csv,
                            const std::string& venues_jsonl,
                            const std::string& user, int positive_min);

// Candidate set recomputed by scanning the serialized request and venue
// records.
std::vector<FacetId> candidates_from_files(const std::string& requests_jsonl,
                                           const std::string& venues_jsonl,
                                           const std::string& request_id);

// Plain re-implementation of the fixed-level construction.
RankedTree ref_build_tree(const Taxonomy& taxonomy, const FacetScoreMap& scores,
                          const BuildConfig& config);

// Exhaustive breadth-first enumeration of click sequences within the
// budgets; first success in display order wins.
struct RefSimResult {
  int actions = 0;
  int f_scan = 0;
  bool reachable = true;
};
RefSimResult ref_simulate(const RankedTree& tree, const Dataset& d,
                          const RequestCase& request, const SimConfig& config);

}  // namespace facetrank::oracle
