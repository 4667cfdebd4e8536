#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "facetrank/taxonomy.hpp"

namespace facetrank {

struct Venue {
  std::string id;
  std::vector<FacetId> facets;  // sorted, unique, non-empty, all leaves
};

struct Rating {
  std::string user;
  std::string venue;
  int value = 0;
};

struct ResultEntry {
  std::string venue;
  double relevance = 0.0;  // P(rel(d,q)=1|q), in [0,1]
};

// One user+query instance with its ranked, relevance-scored result list.
struct RequestCase {
  std::string request_id;
  std::string user;
  std::string query;
  std::vector<ResultEntry> results;  // relevance desc, ties venue asc
};

struct DatasetMeta {
  int rating_scale_max = 4;
  int positive_min = 3;  // value >= positive_min counts as a positive rating
};

struct Dataset {
  Taxonomy taxonomy;
  std::map<std::string, Venue> venues;
  std::vector<Rating> ratings;
  std::vector<RequestCase> requests;
  // request_id -> venue -> graded judgment
  std::map<std::string, std::map<std::string, int>> judgments;
  DatasetMeta meta;

  const Venue& venue(const std::string& id) const;
  const RequestCase& request(const std::string& request_id) const;
  int judgment(const std::string& request_id, const std::string& venue_id) const;
  // Users seen in ratings or requests, sorted.
  std::vector<std::string> users() const;
};

struct DatasetPaths {
  std::string taxonomy;
  std::string venues;
  std::string ratings;
  std::string requests;
  std::string qrels;
  std::string meta;  // optional; defaults apply when empty
};

// Loads and fully validates a dataset; the first integrity failure aborts
// with the offending record identified. taxonomy_depth == 0 keeps all levels.
Dataset load_dataset(const DatasetPaths& paths, int taxonomy_depth = 2);

// In-memory equivalents, used by the file loader and by tests.
Dataset assemble_dataset(Taxonomy taxonomy, const std::string& venues_jsonl,
                         const std::string& ratings_csv,
                         const std::string& requests_jsonl,
                         const std::string& qrels_text,
                         const DatasetMeta& meta);

std::string serialize_venues(const Dataset& d);
std::string serialize_ratings(const Dataset& d);
std::string serialize_requests(const Dataset& d);
std::string serialize_qrels(const Dataset& d);
std::string serialize_meta(const Dataset& d);

// Writes the canonical file set (taxonomy.json, venues.jsonl, ratings.csv,
// requests.jsonl, qrels.txt, meta.json) into dir and returns the file names.
std::vector<std::string> save_dataset(const Dataset& d, const std::string& dir);

// Canonical file names inside a dataset directory.
DatasetPaths dataset_paths_in(const std::string& dir);

// Union of the leaf facets carried by the request's result venues; the
// scoring universe for that request. Sorted.
std::vector<FacetId> candidate_facets(const Dataset& d, const RequestCase& request);

struct SynthSpec {
  int users = 8;
  int venues = 60;
  int level1 = 4;
  int level2 = 12;
  int ratings_per_user = 12;
  int results_per_request = 10;
  double positive_fraction = 0.6;
};

// Deterministic synthetic dataset: a pure function of (seed, spec).
// One request per user; judgments mark the venues carrying the request's
// target facet; ranked-list relevance estimates are a noisy transform of
// that ground truth.
Dataset generate_synthetic(std::uint64_t seed, const SynthSpec& spec);

}  // namespace facetrank
