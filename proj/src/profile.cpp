#include "facetrank/profile.hpp"

#include <json.hpp>

namespace facetrank {

using json = nlohmann::ordered_json;

double UserProfile::facet_prior(const FacetId& f) const {
  auto it = positive_count.find(f);
  if (it == positive_count.end() || total_rated == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_rated);
}

double GlobalStats::facet_prior(const FacetId& f) const {
  auto it = positive_count.find(f);
  if (it == positive_count.end() || total_rated == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_rated);
}

UserProfile build_profile(const Dataset& d, const std::string& user,
                          int positive_min) {
  UserProfile p;
  p.user = user;
  for (const Rating& r : d.ratings) {
    if (r.user != user) continue;
    ++p.total_rated;
    if (r.value < positive_min) continue;
    for (const FacetId& f : d.venue(r.venue).facets) {
      ++p.positive_count[f];
    }
  }
  return p;
}

GlobalStats build_global_stats(const Dataset& d, int positive_min) {
  GlobalStats g;
  for (const Rating& r : d.ratings) {
    ++g.total_rated;
    if (r.value < positive_min) continue;
    for (const FacetId& f : d.venue(r.venue).facets) {
      ++g.positive_count[f];
    }
  }
  return g;
}

std::string profile_to_json(const UserProfile& p) {
  json obj;
  obj["user"] = p.user;
  obj["total_rated"] = p.total_rated;
  json counts = json::object();
  for (const auto& [facet, n] : p.positive_count) counts[facet] = n;
  obj["positive_count"] = std::move(counts);
  return obj.dump();
}

}  // namespace facetrank
