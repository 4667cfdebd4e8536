#include "facetrank/evalsim.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

using json = nlohmann::ordered_json;

std::vector<ResultEntry> filter_results(const Dataset& d,
                                        const RequestCase& request,
                                        const FacetId& facet) {
  std::vector<FacetId> leaves = d.taxonomy.descendant_leaves(facet);
  std::vector<ResultEntry> out;
  for (const ResultEntry& r : request.results) {
    const Venue& v = d.venue(r.venue);
    bool carries = std::any_of(v.facets.begin(), v.facets.end(),
                               [&](const FacetId& f) {
                                 return std::binary_search(leaves.begin(),
                                                           leaves.end(), f);
                               });
    if (carries) out.push_back(r);
  }
  return out;
}

namespace {

// 1-based rank of the first relevant document; 0 when none.
int first_relevant_rank(const Dataset& d, const std::string& request_id,
                        const std::vector<ResultEntry>& results,
                        int relevant_min) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (d.judgment(request_id, results[i].venue) >= relevant_min) {
      return static_cast<int>(i) + 1;
    }
  }
  return 0;
}

struct FilterOutcome {
  bool success = false;
  int rank = 0;  // 1-based rank of the first relevant document when filtered
};

// Static view over the tree used by the click search.
struct SimTree {
  struct ParentRef {
    const ParentEntry* entry;
    int page;
  };
  std::vector<ParentRef> parents;  // global rank order
  int num_pages = 0;
};

SimTree index_tree(const RankedTree& tree) {
  SimTree st;
  st.num_pages = static_cast<int>(tree.pages.size());
  for (std::size_t p = 0; p < tree.pages.size(); ++p) {
    for (const ParentEntry& parent : tree.pages[p]) {
      st.parents.push_back({&parent, static_cast<int>(p)});
    }
  }
  return st;
}

// What the user currently sees: level-1 pages up to visible_pages, and per
// parent the child pages up to child_vis. Markers appear only where content
// is still hidden.
struct SimState {
  int visible_pages = 0;
  std::vector<int> child_vis;  // visible child pages per parent, >= 1
  FacetId filter;              // empty = no active facet filter
  int facet_clicks = 0;

  int more_used() const {
    int used = visible_pages > 0 ? visible_pages - 1 : 0;
    for (int v : child_vis) used += v - 1;
    return used;
  }

  std::string key() const {
    std::string k = std::to_string(visible_pages);
    for (int v : child_vis) {
      k += ',';
      k += std::to_string(v);
    }
    k += '|';
    k += filter;
    k += '|';
    k += std::to_string(facet_clicks);
    return k;
  }
};

struct VisItem {
  DisplayItem item;
  int parent_idx = -1;  // owner of a more_children marker
};

std::vector<VisItem> visible_items(const SimTree& st, const SimState& s) {
  std::vector<VisItem> out;
  for (std::size_t i = 0; i < st.parents.size(); ++i) {
    if (st.parents[i].page >= s.visible_pages) break;
    const ParentEntry& pe = *st.parents[i].entry;
    out.push_back({{DisplayItem::Kind::parent, pe.id, pe.aggregate, 1}, -1});
    int vis = std::min<int>(s.child_vis[i],
                            static_cast<int>(pe.child_pages.size()));
    for (int cp = 0; cp < vis; ++cp) {
      for (const LeafEntry& leaf : pe.child_pages[cp]) {
        out.push_back({{DisplayItem::Kind::leaf, leaf.id, leaf.score, 2}, -1});
      }
    }
    if (vis < static_cast<int>(pe.child_pages.size())) {
      out.push_back(
          {{DisplayItem::Kind::more_children, pe.id, 0.0, 2},
           static_cast<int>(i)});
    }
  }
  if (s.visible_pages < st.num_pages) {
    out.push_back({{DisplayItem::Kind::more_pages, FacetId(), 0.0, 1}, -1});
  }
  return out;
}

}  // namespace

SimOutcome simulate_request(const RankedTree& tree, const Dataset& d,
                            const RequestCase& request, const SimConfig& config,
                            SimTrace* trace) {
  SimOutcome outcome;
  outcome.request_id = request.request_id;

  int unfiltered_rank =
      first_relevant_rank(d, request.request_id, request.results,
                          config.relevant_min);
  if (unfiltered_rank > 0 && unfiltered_rank <= config.success_top_n) {
    outcome.actions = 0;
    outcome.f_scan = unfiltered_rank;
    if (trace) *trace = {{}, unfiltered_rank};
    return outcome;
  }

  SimTree st = index_tree(tree);

  // A click outcome depends only on the selected facet; resolve each facet
  // filter once up front.
  std::map<FacetId, FilterOutcome> by_facet;
  auto filter_outcome = [&](const FacetId& facet) -> const FilterOutcome& {
    auto it = by_facet.find(facet);
    if (it == by_facet.end()) {
      std::vector<ResultEntry> filtered = filter_results(d, request, facet);
      int rank = first_relevant_rank(d, request.request_id, filtered,
                                     config.relevant_min);
      FilterOutcome fo;
      fo.rank = rank;
      fo.success = rank > 0 && rank <= config.success_top_n;
      it = by_facet.emplace(facet, fo).first;
    }
    return it->second;
  };

  struct SearchNode {
    SimState state;
    std::vector<ClickStep> clicks;
  };

  SimState start;
  start.visible_pages = st.num_pages > 0 ? 1 : 0;
  start.child_vis.assign(st.parents.size(), 1);

  std::deque<SearchNode> queue;
  std::set<std::string> visited;
  visited.insert(start.key());
  queue.push_back({start, {}});

  while (!queue.empty()) {
    SearchNode node = std::move(queue.front());
    queue.pop_front();
    std::vector<VisItem> items = visible_items(st, node.state);
    for (std::size_t idx = 0; idx < items.size(); ++idx) {
      const VisItem& vi = items[idx];
      int position = static_cast<int>(idx) + 1;
      if (vi.item.is_facet()) {
        if (node.state.facet_clicks >= config.max_click_depth) continue;
        SimState next = node.state;
        next.filter = vi.item.id;
        next.facet_clicks += 1;
        if (!visited.insert(next.key()).second) continue;
        std::vector<ClickStep> clicks = node.clicks;
        clicks.push_back({position, vi.item});
        const FilterOutcome& fo = filter_outcome(vi.item.id);
        if (fo.success) {
          outcome.actions = static_cast<int>(clicks.size());
          int scan = fo.rank;
          for (const ClickStep& step : clicks) scan += step.position;
          outcome.f_scan = scan;
          if (trace) *trace = {std::move(clicks), fo.rank};
          return outcome;
        }
        queue.push_back({std::move(next), std::move(clicks)});
      } else {
        if (node.state.more_used() >= config.max_more_clicks) continue;
        SimState next = node.state;
        if (vi.item.kind == DisplayItem::Kind::more_pages) {
          next.visible_pages += 1;
        } else {
          next.child_vis[vi.parent_idx] += 1;
        }
        if (!visited.insert(next.key()).second) continue;
        std::vector<ClickStep> clicks = node.clicks;
        clicks.push_back({position, vi.item});
        queue.push_back({std::move(next), std::move(clicks)});
      }
    }
  }

  // Exhausted every click sequence within the budgets.
  outcome.reachable = false;
  outcome.actions = config.max_click_depth + config.max_more_clicks + 1;
  outcome.f_scan = static_cast<int>(flatten_display_order(tree).size()) +
                   static_cast<int>(request.results.size());
  if (trace) *trace = {{}, 0};
  return outcome;
}

int count_actions(const RankedTree& tree, const Dataset& d,
                  const RequestCase& request, const SimConfig& config) {
  return simulate_request(tree, d, request, config).actions;
}

int f_scan(const RankedTree& tree, const Dataset& d, const RequestCase& request,
           const SimConfig& config) {
  return simulate_request(tree, d, request, config).f_scan;
}

FacetScoreMap baseline_most_probable_personal(
    const UserProfile& profile, const std::vector<FacetId>& candidates) {
  FacetScoreMap scores;
  for (const FacetId& f : candidates) {
    scores[f] = profile.facet_prior(f);
  }
  return scores;
}

FacetScoreMap baseline_most_probable_collab(
    const GlobalStats& global, const std::vector<FacetId>& candidates) {
  FacetScoreMap scores;
  for (const FacetId& f : candidates) {
    scores[f] = global.facet_prior(f);
  }
  return scores;
}

FacetScoreMap scores_for_request(const Dataset& d, const ScorerChoice& scorer,
                                 const UserProfile& profile,
                                 const GlobalStats& global,
                                 const RequestCase& request,
                                 std::vector<FacetId>* background_unsupported) {
  if (scorer.name == "personal") {
    return baseline_most_probable_personal(profile, candidate_facets(d, request));
  }
  if (scorer.name == "collab") {
    return baseline_most_probable_collab(global, candidate_facets(d, request));
  }
  if (scorer.name != "model1" && scorer.name != "model2") {
    throw ConfigError("unknown scorer '" + scorer.name + "'");
  }
  ScoringConfig cfg = scorer.scoring;
  cfg.model = scorer.name == "model1" ? Model::model1 : Model::model2;
  ScoreResult result =
      score_all(d, profile, global, request, scorer.coverage, cfg);
  if (background_unsupported) {
    *background_unsupported = std::move(result.background_unsupported);
  }
  return std::move(result.scores);
}

RunReport evaluate_run(const Dataset& d, const ScorerChoice& scorer,
                       const BuildConfig& build, const SimConfig& sim,
                       int jobs, const std::string& config_fingerprint) {
  bool baseline = scorer.name == "personal" || scorer.name == "collab";
  RunReport report;
  report.scorer = scorer.name;
  report.coverage = baseline ? "-" : scorer.coverage.kind_name();
  report.aggregation = aggregation_name(build.aggregation);
  report.config_fingerprint = config_fingerprint;

  GlobalStats global = build_global_stats(d, scorer.scoring.positive_min);
  std::map<std::string, UserProfile> profiles;
  for (const RequestCase& request : d.requests) {
    if (profiles.find(request.user) == profiles.end()) {
      profiles.emplace(request.user,
                       build_profile(d, request.user, scorer.scoring.positive_min));
    }
  }

  std::size_t n = d.requests.size();
  report.outcomes.resize(n);
  auto evaluate_one = [&](std::size_t i) {
    const RequestCase& request = d.requests[i];
    FacetScoreMap scores = scores_for_request(d, scorer, profiles.at(request.user),
                                              global, request, nullptr);
    RankedTree tree = build_fixed_level(d.taxonomy, scores, build);
    report.outcomes[i] = simulate_request(tree, d, request, sim);
  };

  int workers = std::max(1, jobs);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) evaluate_one(i);
  } else {
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) {
      threads.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < n;
             i += static_cast<std::size_t>(workers)) {
          try {
            evaluate_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  double actions_sum = 0.0;
  double f_scan_sum = 0.0;
  for (const SimOutcome& o : report.outcomes) {
    actions_sum += o.actions;
    f_scan_sum += o.f_scan;
  }
  if (n > 0) {
    report.mean_actions = actions_sum / static_cast<double>(n);
    report.mean_f_scan = f_scan_sum / static_cast<double>(n);
  }
  return report;
}

std::string report_to_json(const RunReport& report) {
  json obj;
  obj["scorer"] = report.scorer;
  obj["coverage"] = report.coverage;
  obj["aggregation"] = report.aggregation;
  obj["config_fingerprint"] = report.config_fingerprint;
  obj["mean_actions"] = report.mean_actions;
  obj["mean_f_scan"] = report.mean_f_scan;
  json requests = json::array();
  for (const SimOutcome& o : report.outcomes) {
    json e;
    e["request_id"] = o.request_id;
    e["actions"] = o.actions;
    e["f_scan"] = o.f_scan;
    e["reachable"] = o.reachable;
    requests.push_back(std::move(e));
  }
  obj["requests"] = std::move(requests);
  return obj.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw DataError("report: malformed JSON");
  }
  RunReport report;
  report.scorer = obj.at("scorer").get<std::string>();
  report.coverage = obj.at("coverage").get<std::string>();
  report.aggregation = obj.at("aggregation").get<std::string>();
  report.config_fingerprint = obj.at("config_fingerprint").get<std::string>();
  report.mean_actions = obj.at("mean_actions").get<double>();
  report.mean_f_scan = obj.at("mean_f_scan").get<double>();
  for (const json& e : obj.at("requests")) {
    SimOutcome o;
    o.request_id = e.at("request_id").get<std::string>();
    o.actions = e.at("actions").get<int>();
    o.f_scan = e.at("f_scan").get<int>();
    o.reachable = e.at("reachable").get<bool>();
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

namespace {

std::string method_display_name(const std::string& scorer,
                                const std::string& coverage) {
  if (scorer == "model1") return "Model-1 + " + coverage;
  if (scorer == "model2") return "Model-2 + " + coverage;
  if (scorer == "personal") return "Most Prob. (Person)";
  if (scorer == "collab") return "Most Prob. (Collab)";
  return scorer + (coverage == "-" ? "" : " + " + coverage);
}

int method_sort_rank(const std::string& scorer, const std::string& coverage) {
  if (scorer == "model1") return coverage == "exact" ? 0 : 1;
  if (scorer == "model2") return coverage == "exact" ? 2 : 3;
  if (scorer == "personal") return 4;
  if (scorer == "collab") return 5;
  return 6;
}

}  // namespace

std::string render_report_table(const std::vector<RunReport>& reports) {
  std::vector<std::string> aggs;
  for (const char* a : {"max", "avg"}) {
    if (std::any_of(reports.begin(), reports.end(),
                    [&](const RunReport& r) { return r.aggregation == a; })) {
      aggs.push_back(a);
    }
  }

  struct Row {
    int rank;
    std::string name;
    std::map<std::string, std::pair<double, double>> cells;  // agg -> (fscan, actions)
  };
  std::map<std::string, Row> rows;
  for (const RunReport& r : reports) {
    std::string name = method_display_name(r.scorer, r.coverage);
    Row& row = rows[name];
    row.rank = method_sort_rank(r.scorer, r.coverage);
    row.name = name;
    row.cells[r.aggregation] = {r.mean_f_scan, r.mean_actions};
  }
  std::vector<const Row*> ordered;
  for (const auto& [name, row] : rows) ordered.push_back(&row);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Row* a, const Row* b) {
                     if (a->rank != b->rank) return a->rank < b->rank;
                     return a->name < b->name;
                   });

  const int name_width = 22;
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-*s", name_width, "Scoring Method");
  out += buf;
  for (const std::string& agg : aggs) {
    std::string label = agg == "max" ? "Max" : "Avg";
    std::snprintf(buf, sizeof(buf), "  %-20s", label.c_str());
    out += buf;
  }
  out += '\n';
  std::snprintf(buf, sizeof(buf), "%-*s", name_width, "");
  out += buf;
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "  %8s  %10s", "F-Scan", "#Actions");
    out += buf;
  }
  out += '\n';
  for (const Row* row : ordered) {
    std::snprintf(buf, sizeof(buf), "%-*s", name_width, row->name.c_str());
    out += buf;
    for (const std::string& agg : aggs) {
      auto it = row->cells.find(agg);
      if (it == row->cells.end()) {
        std::snprintf(buf, sizeof(buf), "  %8s  %10s", "-", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "  %8.3f  %10.3f", it->second.first,
                      it->second.second);
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace facetrank
