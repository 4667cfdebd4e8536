#include "facetrank/runconfig.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

using json = nlohmann::ordered_json;

namespace {

using KeyValues = std::map<std::string, std::string>;
using Sections = std::map<std::string, KeyValues>;

Sections parse_sections(const std::string& text) {
  Sections sections;
  std::string current;
  std::size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      }
      sections[current];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (current.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside any [section]");
    }
    sections[current][key] = value;
  }
  return sections;
}

int to_int(const std::string& value, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + what + " must be an integer, got '" +
                      value + "'");
  }
}

double to_double(const std::string& value, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + what + " must be a number, got '" + value +
                      "'");
  }
}

std::uint64_t to_u64(const std::string& value, const std::string& what) {
  try {
    // stoull would silently wrap a leading minus
    if (value.empty() || value[0] == '-') throw std::invalid_argument(value);
    std::size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + what + " must be a non-negative integer, "
                      "got '" + value + "'");
  }
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& part : split(value, ',')) {
    std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

const std::set<std::string> kScorers = {"model1", "model2", "personal", "collab"};
const std::set<std::string> kCoverages = {"exact", "cosine"};

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Sections sections = parse_sections(text);
  RunConfig config;

  auto get = [&](const char* section, const char* key) -> const std::string* {
    auto sit = sections.find(section);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
  };

  if (sections.count("dataset")) {
    DatasetPaths p;
    if (const std::string* v = get("dataset", "dir")) {
      p = dataset_paths_in(*v);
    }
    if (const std::string* v = get("dataset", "taxonomy")) p.taxonomy = *v;
    if (const std::string* v = get("dataset", "venues")) p.venues = *v;
    if (const std::string* v = get("dataset", "ratings")) p.ratings = *v;
    if (const std::string* v = get("dataset", "requests")) p.requests = *v;
    if (const std::string* v = get("dataset", "qrels")) p.qrels = *v;
    if (const std::string* v = get("dataset", "meta")) p.meta = *v;
    config.dataset = std::move(p);
  }
  if (sections.count("synth")) {
    SynthSpec s;
    if (const std::string* v = get("synth", "seed")) config.seed = to_u64(*v, "synth.seed");
    if (const std::string* v = get("synth", "users")) s.users = to_int(*v, "synth.users");
    if (const std::string* v = get("synth", "venues")) s.venues = to_int(*v, "synth.venues");
    if (const std::string* v = get("synth", "level1")) s.level1 = to_int(*v, "synth.level1");
    if (const std::string* v = get("synth", "level2")) s.level2 = to_int(*v, "synth.level2");
    if (const std::string* v = get("synth", "ratings_per_user")) {
      s.ratings_per_user = to_int(*v, "synth.ratings_per_user");
    }
    if (const std::string* v = get("synth", "results_per_request")) {
      s.results_per_request = to_int(*v, "synth.results_per_request");
    }
    if (const std::string* v = get("synth", "positive_fraction")) {
      s.positive_fraction = to_double(*v, "synth.positive_fraction");
    }
    config.synth = s;
  }

  if (const std::string* v = get("scoring", "models")) config.scorers = to_list(*v);
  if (const std::string* v = get("scoring", "coverage")) config.coverages = to_list(*v);
  if (const std::string* v = get("scoring", "embeddings")) config.embeddings_path = *v;
  if (const std::string* v = get("scoring", "fallback_dim")) {
    config.fallback_dim = to_int(*v, "scoring.fallback_dim");
  }
  if (const std::string* v = get("scoring", "background_n")) {
    config.scoring.background_n = to_int(*v, "scoring.background_n");
  }
  if (const std::string* v = get("scoring", "c")) {
    config.scoring.c = to_double(*v, "scoring.c");
  }
  if (const std::string* v = get("scoring", "epsilon")) {
    config.scoring.epsilon = to_double(*v, "scoring.epsilon");
  }
  if (const std::string* v = get("scoring", "positive_min")) {
    config.scoring.positive_min = to_int(*v, "scoring.positive_min");
  }

  if (const std::string* v = get("tree", "agg")) {
    config.aggregations.clear();
    for (const std::string& name : to_list(*v)) {
      config.aggregations.push_back(aggregation_from_name(name));
    }
  }
  if (const std::string* v = get("tree", "k")) {
    config.build.top_k_children = to_int(*v, "tree.k");
  }
  if (const std::string* v = get("tree", "page1")) {
    config.build.page_size_level1 = to_int(*v, "tree.page1");
  }
  if (const std::string* v = get("tree", "page2")) {
    config.build.page_size_level2 = to_int(*v, "tree.page2");
  }

  if (const std::string* v = get("sim", "top_n")) {
    config.sim.success_top_n = to_int(*v, "sim.top_n");
  }
  if (const std::string* v = get("sim", "relevant_min")) {
    config.sim.relevant_min = to_int(*v, "sim.relevant_min");
  }
  if (const std::string* v = get("sim", "max_more_clicks")) {
    config.sim.max_more_clicks = to_int(*v, "sim.max_more_clicks");
  }
  if (const std::string* v = get("sim", "max_click_depth")) {
    config.sim.max_click_depth = to_int(*v, "sim.max_click_depth");
  }

  if (const std::string* v = get("output", "dir")) config.out_dir = *v;
  if (const std::string* v = get("output", "jobs")) {
    config.jobs = to_int(*v, "output.jobs");
  }
  if (const std::string* v = get("dataset", "taxonomy_depth")) {
    config.taxonomy_depth = to_int(*v, "dataset.taxonomy_depth");
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

void validate_run_config(const RunConfig& config) {
  if (config.dataset.has_value() == config.synth.has_value()) {
    throw ConfigError("config: exactly one of [dataset] and [synth] is required");
  }
  if (config.scorers.empty()) throw ConfigError("config: no scorers selected");
  for (const std::string& s : config.scorers) {
    if (!kScorers.count(s)) throw ConfigError("config: unknown scorer '" + s + "'");
  }
  if (config.coverages.empty()) throw ConfigError("config: no coverage selected");
  for (const std::string& c : config.coverages) {
    if (!kCoverages.count(c)) throw ConfigError("config: unknown coverage '" + c + "'");
  }
  if (config.aggregations.empty()) {
    throw ConfigError("config: no aggregation selected");
  }
  if (config.scoring.background_n < 1) {
    throw ConfigError("config: background_n must be >= 1");
  }
  if (config.scoring.c <= 0.0) throw ConfigError("config: c must be positive");
  if (config.scoring.epsilon <= 0.0) {
    throw ConfigError("config: epsilon must be positive");
  }
  if (config.sim.success_top_n < 1 || config.sim.max_more_clicks < 1 ||
      config.sim.max_click_depth < 1 || config.sim.relevant_min < 0) {
    throw ConfigError("config: sim bounds out of range");
  }
  if (config.jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (config.fallback_dim < 8) {
    throw ConfigError("config: fallback_dim must be >= 8");
  }
}

std::string canonical_config_string(const RunConfig& c) {
  std::string out;
  auto add = [&](const std::string& key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  if (c.dataset) {
    add("dataset.taxonomy", c.dataset->taxonomy);
    add("dataset.venues", c.dataset->venues);
    add("dataset.ratings", c.dataset->ratings);
    add("dataset.requests", c.dataset->requests);
    add("dataset.qrels", c.dataset->qrels);
    add("dataset.meta", c.dataset->meta);
  }
  if (c.synth) {
    add("synth.users", std::to_string(c.synth->users));
    add("synth.venues", std::to_string(c.synth->venues));
    add("synth.level1", std::to_string(c.synth->level1));
    add("synth.level2", std::to_string(c.synth->level2));
    add("synth.ratings_per_user", std::to_string(c.synth->ratings_per_user));
    add("synth.results_per_request", std::to_string(c.synth->results_per_request));
    add("synth.positive_fraction", format_score(c.synth->positive_fraction));
  }
  add("seed", std::to_string(c.seed));
  std::string scorers;
  for (const std::string& s : c.scorers) scorers += (scorers.empty() ? "" : ",") + s;
  add("scoring.models", scorers);
  std::string coverages;
  for (const std::string& s : c.coverages) {
    coverages += (coverages.empty() ? "" : ",") + s;
  }
  add("scoring.coverage", coverages);
  add("scoring.embeddings", c.embeddings_path);
  add("scoring.fallback_dim", std::to_string(c.fallback_dim));
  add("scoring.background_n", std::to_string(c.scoring.background_n));
  add("scoring.c", format_score(c.scoring.c));
  add("scoring.epsilon", format_score(c.scoring.epsilon));
  add("scoring.positive_min", std::to_string(c.scoring.positive_min));
  std::string aggs;
  for (Aggregation a : c.aggregations) {
    aggs += (aggs.empty() ? "" : ",") + std::string(aggregation_name(a));
  }
  add("tree.agg", aggs);
  add("tree.k", std::to_string(c.build.top_k_children));
  add("tree.page1", std::to_string(c.build.page_size_level1));
  add("tree.page2", std::to_string(c.build.page_size_level2));
  add("sim.top_n", std::to_string(c.sim.success_top_n));
  add("sim.relevant_min", std::to_string(c.sim.relevant_min));
  add("sim.max_more_clicks", std::to_string(c.sim.max_more_clicks));
  add("sim.max_click_depth", std::to_string(c.sim.max_click_depth));
  add("dataset.taxonomy_depth", std::to_string(c.taxonomy_depth));
  return out;
}

std::string config_fingerprint(const RunConfig& config) {
  return "fnv1a64:" + to_hex(fnv1a64(canonical_config_string(config)));
}

void write_manifest(const RunConfig& config, const std::string& command,
                    const std::vector<std::string>& artifact_names) {
  json obj;
  obj["command"] = command;
  obj["config_fingerprint"] = config_fingerprint(config);
  obj["seed"] = config.seed;
  json artifacts = json::object();
  std::vector<std::string> sorted = artifact_names;
  std::sort(sorted.begin(), sorted.end());
  for (const std::string& name : sorted) {
    std::string content = read_file(config.out_dir + "/" + name);
    artifacts[name] = "fnv1a64:" + to_hex(fnv1a64(content));
  }
  obj["artifacts"] = std::move(artifacts);
  write_file(config.out_dir + "/manifest.json", obj.dump(2) + "\n");
}

}  // namespace facetrank
