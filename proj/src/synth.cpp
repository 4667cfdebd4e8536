#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "facetrank/datastore.hpp"
#include "facetrank/errors.hpp"

namespace facetrank {

namespace {

// All randomness flows through these helpers so that generated datasets are
// a pure function of (seed, spec) regardless of standard library internals.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  std::uint64_t next() { return eng(); }

  int uniform(int n) {  // [0, n)
    return static_cast<int>(next() % static_cast<std::uint64_t>(n));
  }

  double u01() {  // [0, 1) with 53-bit resolution
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform(static_cast<int>(i))]);
    }
  }

  // Index into weights, proportional sampling.
  int weighted(const std::vector<double>& weights, double total) {
    double x = u01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      x -= weights[i];
      if (x < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }
};

std::string padded_id(const char* prefix, int index, int min_width, int count) {
  int digits = 1;
  for (int c = count - 1; c >= 10; c /= 10) ++digits;
  int width = std::clamp(std::max(min_width, digits), 1, 10);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

const char* kFamilyWords[] = {"Arts",    "Food",    "Nightlife", "Outdoors",
                              "Shops",   "Travel",  "Events",    "College",
                              "Residence", "Office", "Harbor",   "Garden"};
const char* kItemWords[] = {
    "Gallery",  "Museum",   "Cafe",      "Bistro",   "Tavern",  "Lounge",
    "Park",     "Trail",    "Market",    "Boutique", "Hotel",   "Hostel",
    "Arena",    "Studio",   "Library",   "Terrace",  "Bakery",  "Brewery",
    "Cinema",   "Theatre",  "Aquarium",  "Zoo",      "Pier",    "Plaza",
    "Foodtruck", "Diner",   "Rooftop",   "Casino",   "Chapel",  "Castle",
    "Stadium",  "Gym",      "Spa",       "Salon",    "Workshop", "Atelier",
    "Vineyard", "Orchard",  "Lighthouse", "Observatory"};
const char* kSubWords[] = {"Vintage", "Coastal", "Noodle",  "Alpine",
                           "Deluxe",  "Rustic",  "Urban",   "Royal",
                           "Golden",  "Hidden",  "Grand",   "Cozy",
                           "Moonlit", "Sunny",   "Twin",    "Velvet",
                           "Copper",  "Ivory",   "Silent",  "Bold",
                           "Amber",   "Frozen",  "Wild",    "Quiet"};

std::string cycled_word(const char* const* words, int n_words, int index) {
  std::string out = words[index % n_words];
  if (index >= n_words) {
    out += " " + std::to_string(index / n_words + 1);
  }
  return out;
}

// Relevance model shared by judgments and the fabricated ranked list. The
// judgment cut sits between the related tier and the relevant one, so only
// target carriers are judged relevant while same-family venues still rank
// high, the way a category-aware engine behaves.
constexpr double kRelevantTrue = 0.9;
constexpr double kRelatedTrue = 0.30;
constexpr double kIrrelevantTrue = 0.1;
constexpr double kJudgmentCut = 0.5;
constexpr double kSignalWeight = 0.45;  // estimate = w*truth + (1-w)*noise

}  // namespace

Dataset generate_synthetic(std::uint64_t seed, const SynthSpec& spec) {
  if (spec.users < 1 || spec.venues < 1 || spec.level1 < 1 || spec.level2 < 1 ||
      spec.ratings_per_user < 1 || spec.results_per_request < 1) {
    throw ConfigError("synthetic spec: all counts must be >= 1");
  }
  if (!(spec.positive_fraction >= 0.0 && spec.positive_fraction <= 1.0)) {
    throw ConfigError("synthetic spec: positive_fraction must be in [0,1]");
  }
  if (spec.level2 < spec.level1) {
    throw ConfigError("synthetic spec: level2 must be >= level1 so that every "
                      "level-1 node has a child");
  }

  Rng rng(seed);
  Dataset d;
  d.meta.rating_scale_max = 4;
  d.meta.positive_min = 3;

  // Two-level taxonomy; the first level1 leaves are spread round-robin so
  // every root has at least one child.
  std::vector<FacetNode> nodes;
  std::vector<FacetId> roots(spec.level1);
  std::vector<std::string> root_labels(spec.level1);
  for (int i = 0; i < spec.level1; ++i) {
    roots[i] = padded_id("C", i, 2, spec.level1);
    root_labels[i] = cycled_word(kFamilyWords, 12, i);
    nodes.push_back({roots[i], root_labels[i], std::nullopt, 1});
  }
  // Leaves pair up into subgroups inside each family; subgroup mates share a
  // second label word, so label similarity mirrors semantic closeness at two
  // granularities (family and subgroup).
  std::vector<FacetId> leaf_ids(spec.level2);
  std::vector<int> leaf_family(spec.level2);
  std::vector<int> leaf_subgroup(spec.level2);
  std::map<FacetId, int> family_by_leaf;
  std::vector<int> family_sizes(spec.level1, 0);
  int next_subgroup = 0;
  std::map<std::pair<int, int>, int> subgroup_of;  // (family, local pair) -> id
  for (int i = 0; i < spec.level2; ++i) {
    int family = i < spec.level1 ? i : rng.uniform(spec.level1);
    int local = family_sizes[family]++;
    auto key = std::make_pair(family, local / 2);
    auto it = subgroup_of.find(key);
    if (it == subgroup_of.end()) {
      it = subgroup_of.emplace(key, next_subgroup++).first;
    }
    leaf_ids[i] = padded_id("c", i, 3, spec.level2);
    leaf_family[i] = family;
    leaf_subgroup[i] = it->second;
    family_by_leaf[leaf_ids[i]] = family;
    std::string label = root_labels[family] + " " +
                        cycled_word(kSubWords, 24, it->second) + " " +
                        cycled_word(kItemWords, 40, i);
    nodes.push_back({leaf_ids[i], label, roots[family], 2});
  }
  d.taxonomy = Taxonomy::from_nodes(std::move(nodes));

  // Skewed leaf popularity: a zipf profile over a seeded permutation.
  std::vector<int> perm(spec.level2);
  for (int i = 0; i < spec.level2; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<double> popularity(spec.level2, 0.0);
  double pop_total = 0.0;
  for (int r = 0; r < spec.level2; ++r) {
    popularity[perm[r]] = 1.0 / std::pow(static_cast<double>(r + 1), 1.1);
    pop_total += popularity[perm[r]];
  }

  // Venues carry 2..3 leaves clustered in one family: the first leaf is
  // drawn by global popularity, co-assigned facets prefer its subgroup and
  // otherwise follow within-family popularity.
  std::vector<std::vector<double>> family_pop(spec.level1,
                                              std::vector<double>(spec.level2, 0.0));
  std::vector<double> family_pop_total(spec.level1, 0.0);
  for (int i = 0; i < spec.level2; ++i) {
    family_pop[leaf_family[i]][i] = popularity[i];
    family_pop_total[leaf_family[i]] += popularity[i];
  }
  std::vector<std::vector<int>> subgroup_members(next_subgroup);
  for (int i = 0; i < spec.level2; ++i) {
    subgroup_members[leaf_subgroup[i]].push_back(i);
  }
  std::vector<std::vector<std::string>> venues_by_leaf(spec.level2);
  std::vector<std::string> venue_ids(spec.venues);
  for (int i = 0; i < spec.venues; ++i) {
    venue_ids[i] = padded_id("v", i, 4, spec.venues);
    int n_facets = 2 + rng.uniform(2);
    int first = rng.weighted(popularity, pop_total);
    int family = leaf_family[first];
    const std::vector<int>& mates = subgroup_members[leaf_subgroup[first]];
    std::set<int> chosen{first};
    int tries = 0;
    while (static_cast<int>(chosen.size()) < n_facets && tries < 16) {
      if (mates.size() > 1 && rng.u01() < 0.65) {
        chosen.insert(mates[rng.uniform(static_cast<int>(mates.size()))]);
      } else {
        chosen.insert(rng.weighted(family_pop[family], family_pop_total[family]));
      }
      ++tries;
    }
    Venue v;
    v.id = venue_ids[i];
    for (int leaf : chosen) {
      v.facets.push_back(leaf_ids[leaf]);
      venues_by_leaf[leaf].push_back(v.id);
    }
    std::sort(v.facets.begin(), v.facets.end());
    d.venues.emplace(v.id, std::move(v));
  }

  // Per-user preference structure: several preferred leaves drawn by global
  // popularity, typically spanning more families than a result page shows.
  std::vector<std::string> user_ids(spec.users);
  std::vector<std::vector<int>> user_preferred(spec.users);
  for (int u = 0; u < spec.users; ++u) {
    user_ids[u] = padded_id("u", u, 2, spec.users);
    std::set<int> preferred;
    for (int slot = 0; slot < 5; ++slot) {
      for (int attempt = 0; attempt < 8; ++attempt) {
        int leaf = rng.weighted(popularity, pop_total);
        if (preferred.insert(leaf).second) break;
      }
    }
    user_preferred[u] = {preferred.begin(), preferred.end()};
  }

  // Ratings: one shared pool of rated venues for the whole population; users
  // differ only in which of those venues they liked. Positive values go to
  // venues matching the user's preferred leaves, up to the positive fraction.
  int per_user = std::min(spec.ratings_per_user, spec.venues);
  std::vector<std::string> rated_pool = venue_ids;
  rng.shuffle(rated_pool);
  rated_pool.resize(per_user);
  std::sort(rated_pool.begin(), rated_pool.end());
  for (int u = 0; u < spec.users; ++u) {
    std::set<std::string> preferred_leafset;
    for (int leaf : user_preferred[u]) preferred_leafset.insert(leaf_ids[leaf]);
    std::vector<std::string> matching;
    std::vector<std::string> rest;
    for (const std::string& vid : rated_pool) {
      const Venue& v = d.venues.at(vid);
      bool match = std::any_of(v.facets.begin(), v.facets.end(),
                               [&](const FacetId& f) {
                                 return preferred_leafset.count(f) > 0;
                               });
      (match ? matching : rest).push_back(vid);
    }
    rng.shuffle(matching);
    rng.shuffle(rest);

    int n_pos = static_cast<int>(
        std::llround(spec.positive_fraction * static_cast<double>(per_user)));
    std::map<std::string, int> values;
    int got = 0;
    for (const std::string& vid : matching) {
      values[vid] = got < n_pos ? 3 + rng.uniform(2) : rng.uniform(3);
      ++got;
    }
    for (const std::string& vid : rest) {
      values[vid] = got < n_pos ? 3 + rng.uniform(2) : rng.uniform(3);
      ++got;
    }
    for (const std::string& vid : rated_pool) {
      d.ratings.push_back({user_ids[u], vid, values.at(vid)});
    }
  }

  // One request per user. Ground truth: venues carrying the target leaf are
  // the relevant ones; the ranked list sees that truth only through noise.
  std::vector<int> carried_leaves;
  for (int i = 0; i < spec.level2; ++i) {
    if (!venues_by_leaf[i].empty()) carried_leaves.push_back(i);
  }
  std::vector<double> carried_pop(spec.level2, 0.0);
  double carried_total = 0.0;
  for (int leaf : carried_leaves) {
    carried_pop[leaf] = popularity[leaf];
    carried_total += popularity[leaf];
  }
  int per_request = std::min(spec.results_per_request, spec.venues);
  for (int u = 0; u < spec.users; ++u) {
    // The query target follows overall facet popularity, independent of the
    // user's rating history: a context need not match past preferences.
    int target = rng.weighted(carried_pop, carried_total);
    int family = leaf_family[target];
    const std::string target_leaf = leaf_ids[target];

    // Exactly one venue above the relevance cut per request; the rest of
    // the list leans toward the target's family, the way an engine
    // answering a typed query would, without carrying the target itself.
    std::vector<std::string> carriers = venues_by_leaf[target];
    rng.shuffle(carriers);
    std::set<std::string> picked{carriers.front()};
    std::set<std::string> excluded(carriers.begin(), carriers.end());
    std::vector<std::string> others;
    for (const std::string& vid : venue_ids) {
      if (excluded.find(vid) != excluded.end()) continue;
      const Venue& v = d.venues.at(vid);
      bool in_family = std::any_of(
          v.facets.begin(), v.facets.end(), [&](const FacetId& f) {
            return family_by_leaf.at(f) == family;
          });
      others.push_back(vid);
      if (in_family) {
        for (int copy = 0; copy < 14; ++copy) others.push_back(vid);
      }
    }
    rng.shuffle(others);
    for (std::size_t i = 0;
         static_cast<int>(picked.size()) < per_request && i < others.size();
         ++i) {
      picked.insert(others[i]);
    }

    RequestCase rc;
    rc.request_id = padded_id("r", u, 3, spec.users);
    rc.user = user_ids[u];
    rc.query = "q-" + user_ids[u];
    auto& judged = d.judgments[rc.request_id];
    const Venue& carrier_venue = d.venues.at(carriers.front());
    for (const std::string& vid : picked) {
      const Venue& v = d.venues.at(vid);
      bool carries = std::binary_search(v.facets.begin(), v.facets.end(),
                                        target_leaf);
      bool in_family = std::any_of(
          v.facets.begin(), v.facets.end(), [&](const FacetId& f) {
            return family_by_leaf.at(f) == family;
          });
      int shared = 0;
      for (const FacetId& f : v.facets) {
        if (std::binary_search(carrier_venue.facets.begin(),
                               carrier_venue.facets.end(), f)) {
          ++shared;
        }
      }
      double truth;
      if (carries) {
        truth = kRelevantTrue;
      } else if (in_family) {
        // venues resembling the relevant one rank higher, below the cut
        truth = kRelatedTrue + 0.095 * shared;
      } else {
        truth = kIrrelevantTrue;
      }
      double est = kSignalWeight * truth + (1.0 - kSignalWeight) * rng.u01();
      est = std::clamp(est, 0.001, 1.0);
      rc.results.push_back({vid, est});
      judged[vid] = truth > kJudgmentCut ? 1 : 0;
    }
    std::sort(rc.results.begin(), rc.results.end(),
              [](const ResultEntry& a, const ResultEntry& b) {
                if (a.relevance != b.relevance) return a.relevance > b.relevance;
                return a.venue < b.venue;
              });
    d.requests.push_back(std::move(rc));
  }

  return d;
}

}  // namespace facetrank
