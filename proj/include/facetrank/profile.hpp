#pragma once

#include <map>
#include <string>

#include "facetrank/datastore.hpp"

namespace facetrank {

// Per-user facet preference statistics. total_rated counts every rating the
// user gave, positive or not; positive_count[f] counts the user's positively
// rated venues that carry f (a venue with k facets bumps k counters, once
// each).
struct UserProfile {
  std::string user;
  std::map<FacetId, int> positive_count;
  int total_rated = 0;

  // positive_count[f] / total_rated; 0 for facets not in the profile.
  double facet_prior(const FacetId& f) const;
  bool empty() const { return positive_count.empty(); }
};

// The same statistics aggregated over every user; the source of the global
// facet preference probability.
struct GlobalStats {
  std::map<FacetId, int> positive_count;
  int total_rated = 0;

  double facet_prior(const FacetId& f) const;
};

UserProfile build_profile(const Dataset& d, const std::string& user,
                          int positive_min);

GlobalStats build_global_stats(const Dataset& d, int positive_min);

// One profile per line: {"user", "total_rated", "positive_count": {...}}.
std::string profile_to_json(const UserProfile& p);

}  // namespace facetrank
