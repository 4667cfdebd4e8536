#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "facetrank/datastore.hpp"
#include "facetrank/profile.hpp"
#include "facetrank/scoring.hpp"
#include "facetrank/treebuild.hpp"

namespace facetrank {

struct SimConfig {
  int success_top_n = 5;    // success: a relevant venue within the top n
  int relevant_min = 1;     // judgment grade counting as relevant
  int max_more_clicks = 5;  // budget for pagination expansions
  int max_click_depth = 2;  // budget for facet selections
};

struct SimOutcome {
  std::string request_id;
  int actions = 0;
  int f_scan = 0;
  bool reachable = true;
};

// One click on the simulated interface: the 1-based position of the item in
// the display as rendered at the moment of the click.
struct ClickStep {
  int position = 0;
  DisplayItem item;
};

struct SimTrace {
  std::vector<ClickStep> clicks;
  int final_doc_rank = 0;  // 1-based rank of the first relevant document
};

// Result list restricted to venues carrying the facet; for a non-leaf facet,
// to venues carrying any of its descendant leaves. Order is preserved.
std::vector<ResultEntry> filter_results(const Dataset& d,
                                        const RequestCase& request,
                                        const FacetId& facet);

// Minimal user effort to surface a relevant venue into the top
// success_top_n of the (possibly filtered) result list. Clicks are facet
// selections (a new selection replaces the previous filter) and pagination
// expansions, each costing one action; the search over click sequences is an
// exhaustive breadth-first enumeration within the configured budgets. Ties
// between minimal sequences resolve to the one whose clicks come earliest in
// display order. Unreachable requests take the exhaustion penalty.
SimOutcome simulate_request(const RankedTree& tree, const Dataset& d,
                            const RequestCase& request, const SimConfig& config,
                            SimTrace* trace = nullptr);

int count_actions(const RankedTree& tree, const Dataset& d,
                  const RequestCase& request, const SimConfig& config);

// Scan effort along the minimal-action path: the display position of every
// click plus the rank of the first relevant document in the final list.
int f_scan(const RankedTree& tree, const Dataset& d, const RequestCase& request,
           const SimConfig& config);

// The user's own positive-rating frequencies, 0 for unseen facets.
FacetScoreMap baseline_most_probable_personal(const UserProfile& profile,
                                              const std::vector<FacetId>& candidates);

// The population's positive-rating frequencies; user independent.
FacetScoreMap baseline_most_probable_collab(const GlobalStats& global,
                                            const std::vector<FacetId>& candidates);

// Scorer selection for a full evaluation run.
struct ScorerChoice {
  std::string name;  // model1 | model2 | personal | collab
  Coverage coverage = Coverage::exact();  // used by model1/model2 only
  ScoringConfig scoring;
};

struct RunReport {
  std::string scorer;
  std::string coverage;  // "exact", "cosine", or "-" for the baselines
  std::string aggregation;
  std::string config_fingerprint;
  double mean_actions = 0.0;
  double mean_f_scan = 0.0;
  std::vector<SimOutcome> outcomes;
};

// Scores, builds and simulates every request; outcomes keep request order
// and the means include unreachable requests at their penalty values.
// Deterministic for fixed inputs, independent of the worker count.
RunReport evaluate_run(const Dataset& d, const ScorerChoice& scorer,
                       const BuildConfig& build, const SimConfig& sim,
                       int jobs = 1,
                       const std::string& config_fingerprint = "");

FacetScoreMap scores_for_request(const Dataset& d, const ScorerChoice& scorer,
                                 const UserProfile& profile,
                                 const GlobalStats& global,
                                 const RequestCase& request,
                                 std::vector<FacetId>* background_unsupported = nullptr);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

// Plain-text summary: one row per scoring method, per-aggregation column
// pairs of F-Scan and #Actions means.
std::string render_report_table(const std::vector<RunReport>& reports);

}  // namespace facetrank
