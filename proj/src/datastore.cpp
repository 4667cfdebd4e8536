#include "facetrank/datastore.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

using json = nlohmann::ordered_json;

const Venue& Dataset::venue(const std::string& id) const {
  auto it = venues.find(id);
  if (it == venues.end()) {
    throw DataError("unknown venue '" + id + "'");
  }
  return it->second;
}

const RequestCase& Dataset::request(const std::string& request_id) const {
  for (const RequestCase& r : requests) {
    if (r.request_id == request_id) return r;
  }
  throw DataError("unknown request '" + request_id + "'");
}

int Dataset::judgment(const std::string& request_id,
                      const std::string& venue_id) const {
  auto rit = judgments.find(request_id);
  if (rit == judgments.end()) return 0;
  auto vit = rit->second.find(venue_id);
  return vit == rit->second.end() ? 0 : vit->second;
}

std::vector<std::string> Dataset::users() const {
  std::set<std::string> seen;
  for (const Rating& r : ratings) seen.insert(r.user);
  for (const RequestCase& r : requests) seen.insert(r.user);
  return {seen.begin(), seen.end()};
}

namespace {

json parse_json_line(const std::string& line, const char* what, std::size_t lineno) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw DataError(std::string(what) + " line " + std::to_string(lineno) +
                    ": malformed JSON object");
  }
  return obj;
}

std::map<std::string, Venue> parse_venues(const std::string& jsonl,
                                          const Taxonomy& taxonomy) {
  std::map<std::string, Venue> venues;
  std::size_t lineno = 0;
  for (const std::string& line : split_lines(jsonl)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj = parse_json_line(line, "venues", lineno);
    if (!obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("facets") || !obj["facets"].is_array()) {
      throw DataError("venues line " + std::to_string(lineno) +
                      ": need string id and facets array");
    }
    Venue v;
    v.id = obj["id"].get<std::string>();
    if (v.id.empty() || has_whitespace(v.id)) {
      throw DataError("venues line " + std::to_string(lineno) +
                      ": venue id must be non-empty and whitespace-free");
    }
    for (const json& f : obj["facets"]) {
      if (!f.is_string()) {
        throw DataError("venue '" + v.id + "': facets must be strings");
      }
      v.facets.push_back(f.get<std::string>());
    }
    std::sort(v.facets.begin(), v.facets.end());
    v.facets.erase(std::unique(v.facets.begin(), v.facets.end()), v.facets.end());
    if (v.facets.empty()) {
      throw DataError("venue '" + v.id + "': needs at least one facet");
    }
    for (const FacetId& f : v.facets) {
      if (!taxonomy.contains(f) || !taxonomy.is_leaf(f)) {
        throw DataError("venue '" + v.id + "': facet '" + f +
                        "' is not a leaf of the taxonomy");
      }
    }
    if (!venues.emplace(v.id, v).second) {
      throw DataError("venue '" + v.id + "': duplicate id");
    }
  }
  return venues;
}

std::vector<Rating> parse_ratings(const std::string& csv,
                                  const std::map<std::string, Venue>& venues) {
  std::vector<std::string> lines = split_lines(csv);
  if (lines.empty() || trim(lines[0]) != "user,venue,value") {
    throw DataError("ratings: expected header 'user,venue,value'");
  }
  std::vector<Rating> ratings;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::vector<std::string> parts = split(lines[i], ',');
    if (parts.size() != 3) {
      throw DataError("ratings line " + std::to_string(i + 1) +
                      ": expected user,venue,value");
    }
    Rating r;
    r.user = trim(parts[0]);
    r.venue = trim(parts[1]);
    try {
      r.value = std::stoi(trim(parts[2]));
    } catch (const std::exception&) {
      throw DataError("ratings line " + std::to_string(i + 1) +
                      ": value is not an integer");
    }
    if (r.user.empty() || r.venue.empty()) {
      throw DataError("ratings line " + std::to_string(i + 1) + ": empty field");
    }
    if (venues.find(r.venue) == venues.end()) {
      throw DataError("ratings line " + std::to_string(i + 1) +
                      ": unknown venue '" + r.venue + "'");
    }
    if (!seen.emplace(r.user, r.venue).second) {
      throw DataError("ratings line " + std::to_string(i + 1) +
                      ": duplicate rating for (" + r.user + ", " + r.venue + ")");
    }
    ratings.push_back(std::move(r));
  }
  return ratings;
}

void sort_results(std::vector<ResultEntry>& results) {
  std::sort(results.begin(), results.end(),
            [](const ResultEntry& a, const ResultEntry& b) {
              if (a.relevance != b.relevance) return a.relevance > b.relevance;
              return a.venue < b.venue;
            });
}

std::vector<RequestCase> parse_requests(const std::string& jsonl,
                                        const std::map<std::string, Venue>& venues) {
  std::vector<RequestCase> requests;
  std::set<std::string> seen_ids;
  std::size_t lineno = 0;
  for (const std::string& line : split_lines(jsonl)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj = parse_json_line(line, "requests", lineno);
    if (!obj.contains("request_id") || !obj["request_id"].is_string() ||
        !obj.contains("user") || !obj["user"].is_string() ||
        !obj.contains("query") || !obj["query"].is_string() ||
        !obj.contains("results") || !obj["results"].is_array()) {
      throw DataError("requests line " + std::to_string(lineno) +
                      ": need request_id, user, query, results");
    }
    RequestCase rc;
    rc.request_id = obj["request_id"].get<std::string>();
    rc.user = obj["user"].get<std::string>();
    rc.query = obj["query"].get<std::string>();
    if (rc.request_id.empty() || has_whitespace(rc.request_id) ||
        rc.user.empty() || has_whitespace(rc.user)) {
      throw DataError("requests line " + std::to_string(lineno) +
                      ": ids must be non-empty and whitespace-free");
    }
    if (!seen_ids.insert(rc.request_id).second) {
      throw DataError("request '" + rc.request_id + "': duplicate request_id");
    }
    std::set<std::string> result_venues;
    for (const json& e : obj["results"]) {
      if (!e.is_object() || !e.contains("venue") || !e["venue"].is_string() ||
          !e.contains("relevance") || !e["relevance"].is_number()) {
        throw DataError("request '" + rc.request_id +
                        "': result entries need venue and numeric relevance");
      }
      ResultEntry r;
      r.venue = e["venue"].get<std::string>();
      r.relevance = e["relevance"].get<double>();
      if (venues.find(r.venue) == venues.end()) {
        throw DataError("request '" + rc.request_id + "': unknown venue '" +
                        r.venue + "'");
      }
      if (!(r.relevance >= 0.0 && r.relevance <= 1.0)) {
        throw DataError("request '" + rc.request_id + "': relevance of '" +
                        r.venue + "' outside [0,1]");
      }
      if (!result_venues.insert(r.venue).second) {
        throw DataError("request '" + rc.request_id + "': venue '" + r.venue +
                        "' listed twice in results");
      }
      rc.results.push_back(std::move(r));
    }
    sort_results(rc.results);
    requests.push_back(std::move(rc));
  }
  return requests;
}

std::map<std::string, std::map<std::string, int>> parse_qrels(
    const std::string& text, const std::vector<RequestCase>& requests,
    const std::map<std::string, Venue>& venues) {
  std::set<std::string> request_ids;
  for (const RequestCase& r : requests) request_ids.insert(r.request_id);

  std::map<std::string, std::map<std::string, int>> judgments;
  std::size_t lineno = 0;
  for (const std::string& line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty()) continue;
    // TREC qrels: request_id 0 venue grade
    std::vector<std::string> fields;
    for (const std::string& tok : split(line, ' ')) {
      std::string t = trim(tok);
      if (!t.empty()) fields.push_back(t);
    }
    if (fields.size() != 4) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": expected 'request_id 0 venue grade'");
    }
    int grade = 0;
    try {
      grade = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": grade is not an integer");
    }
    if (grade < 0) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": negative grade");
    }
    if (request_ids.find(fields[0]) == request_ids.end()) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": unknown request '" + fields[0] + "'");
    }
    if (venues.find(fields[2]) == venues.end()) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": unknown venue '" + fields[2] + "'");
    }
    auto& per_request = judgments[fields[0]];
    if (!per_request.emplace(fields[2], grade).second) {
      throw DataError("qrels line " + std::to_string(lineno) +
                      ": duplicate judgment for (" + fields[0] + ", " +
                      fields[2] + ")");
    }
  }
  return judgments;
}

DatasetMeta parse_meta(const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw DataError("meta: malformed JSON object");
  }
  DatasetMeta meta;
  if (obj.contains("rating_scale_max")) {
    meta.rating_scale_max = obj["rating_scale_max"].get<int>();
  }
  if (obj.contains("positive_min")) {
    meta.positive_min = obj["positive_min"].get<int>();
  }
  if (meta.rating_scale_max < 1 || meta.positive_min < 0 ||
      meta.positive_min > meta.rating_scale_max) {
    throw DataError("meta: inconsistent rating scale");
  }
  return meta;
}

}  // namespace

Dataset assemble_dataset(Taxonomy taxonomy, const std::string& venues_jsonl,
                         const std::string& ratings_csv,
                         const std::string& requests_jsonl,
                         const std::string& qrels_text,
                         const DatasetMeta& meta) {
  Dataset d;
  d.taxonomy = std::move(taxonomy);
  d.meta = meta;
  d.venues = parse_venues(venues_jsonl, d.taxonomy);
  d.ratings = parse_ratings(ratings_csv, d.venues);
  d.requests = parse_requests(requests_jsonl, d.venues);
  d.judgments = parse_qrels(qrels_text, d.requests, d.venues);
  return d;
}

Dataset load_dataset(const DatasetPaths& paths, int taxonomy_depth) {
  // the taxonomy file may be the flat form or a nested category export
  Taxonomy taxonomy =
      parse_taxonomy_any(read_file(paths.taxonomy), taxonomy_depth);
  DatasetMeta meta;
  if (!paths.meta.empty() && std::filesystem::exists(paths.meta)) {
    meta = parse_meta(read_file(paths.meta));
  }
  return assemble_dataset(std::move(taxonomy), read_file(paths.venues),
                          read_file(paths.ratings), read_file(paths.requests),
                          read_file(paths.qrels), meta);
}

std::string serialize_venues(const Dataset& d) {
  std::string out;
  for (const auto& [id, v] : d.venues) {
    json obj;
    obj["id"] = v.id;
    obj["facets"] = v.facets;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_ratings(const Dataset& d) {
  std::string out = "user,venue,value\n";
  for (const Rating& r : d.ratings) {
    out += r.user + "," + r.venue + "," + std::to_string(r.value) + "\n";
  }
  return out;
}

std::string serialize_requests(const Dataset& d) {
  std::string out;
  for (const RequestCase& rc : d.requests) {
    json obj;
    obj["request_id"] = rc.request_id;
    obj["user"] = rc.user;
    obj["query"] = rc.query;
    json results = json::array();
    for (const ResultEntry& r : rc.results) {
      json e;
      e["venue"] = r.venue;
      e["relevance"] = r.relevance;
      results.push_back(std::move(e));
    }
    obj["results"] = std::move(results);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_qrels(const Dataset& d) {
  std::string out;
  for (const auto& [request_id, per_venue] : d.judgments) {
    for (const auto& [venue_id, grade] : per_venue) {
      out += request_id + " 0 " + venue_id + " " + std::to_string(grade) + "\n";
    }
  }
  return out;
}

std::string serialize_meta(const Dataset& d) {
  json obj;
  obj["rating_scale_max"] = d.meta.rating_scale_max;
  obj["positive_min"] = d.meta.positive_min;
  return obj.dump(2) + "\n";
}

DatasetPaths dataset_paths_in(const std::string& dir) {
  DatasetPaths p;
  p.taxonomy = dir + "/taxonomy.json";
  p.venues = dir + "/venues.jsonl";
  p.ratings = dir + "/ratings.csv";
  p.requests = dir + "/requests.jsonl";
  p.qrels = dir + "/qrels.txt";
  p.meta = dir + "/meta.json";
  return p;
}

std::vector<std::string> save_dataset(const Dataset& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  DatasetPaths p = dataset_paths_in(dir);
  write_file(p.taxonomy, serialize_taxonomy(d.taxonomy));
  write_file(p.venues, serialize_venues(d));
  write_file(p.ratings, serialize_ratings(d));
  write_file(p.requests, serialize_requests(d));
  write_file(p.qrels, serialize_qrels(d));
  write_file(p.meta, serialize_meta(d));
  return {"taxonomy.json", "venues.jsonl", "ratings.csv",
          "requests.jsonl", "qrels.txt", "meta.json"};
}

std::vector<FacetId> candidate_facets(const Dataset& d, const RequestCase& request) {
  std::set<FacetId> out;
  for (const ResultEntry& r : request.results) {
    const Venue& v = d.venue(r.venue);
    out.insert(v.facets.begin(), v.facets.end());
  }
  return {out.begin(), out.end()};
}

}  // namespace facetrank
