#include <doctest.h>

#include <string>
#include <vector>

#include "facetrank/evalsim.hpp"
#include "oracles.hpp"

using namespace facetrank;

namespace {

// Taxonomy with parents W1..W3 (one leaf each) and P (five leaves); venues
// carry exactly one leaf unless stated otherwise.
struct Fixture {
  Dataset dataset;
  FacetScoreMap scores;

  const RequestCase& request() const { return dataset.requests[0]; }
};

std::string venue_line(const std::string& id, const std::string& facet) {
  return "{\"id\":\"" + id + "\",\"facets\":[\"" + facet + "\"]}\n";
}

// The needed leaf p4 sits on the second child page of the second level-1
// page; every cheaper route fails: the unfiltered list, every other leaf,
// and every parent (P's filtered list hides the relevant venue beyond the
// success window).
Fixture deep_fixture() {
  std::string tax = R"([
    {"id":"W1","label":"W one","parent":null,"level":1},
    {"id":"W2","label":"W two","parent":null,"level":1},
    {"id":"W3","label":"W three","parent":null,"level":1},
    {"id":"P","label":"P","parent":null,"level":1},
    {"id":"w1","label":"w one","parent":"W1","level":2},
    {"id":"w2","label":"w two","parent":"W2","level":2},
    {"id":"w3","label":"w three","parent":"W3","level":2},
    {"id":"p1","label":"p one","parent":"P","level":2},
    {"id":"p2","label":"p two","parent":"P","level":2},
    {"id":"p3","label":"p three","parent":"P","level":2},
    {"id":"p4","label":"p four","parent":"P","level":2},
    {"id":"p5","label":"p five","parent":"P","level":2}])";
  std::string venues = venue_line("vw1", "w1") + venue_line("vw2", "w2") +
                       venue_line("vw3", "w3") + venue_line("vp1a", "p1") +
                       venue_line("vp1b", "p1") + venue_line("vp2a", "p2") +
                       venue_line("vp2b", "p2") + venue_line("vp3a", "p3") +
                       venue_line("vp3b", "p3") + venue_line("vp5", "p5") +
                       venue_line("vz", "p4");
  std::string results =
      "{\"venue\":\"vw1\",\"relevance\":0.99},"
      "{\"venue\":\"vw2\",\"relevance\":0.98},"
      "{\"venue\":\"vw3\",\"relevance\":0.97},"
      "{\"venue\":\"vp1a\",\"relevance\":0.96},"
      "{\"venue\":\"vp1b\",\"relevance\":0.95},"
      "{\"venue\":\"vp2a\",\"relevance\":0.94},"
      "{\"venue\":\"vp2b\",\"relevance\":0.93},"
      "{\"venue\":\"vp3a\",\"relevance\":0.92},"
      "{\"venue\":\"vp3b\",\"relevance\":0.91},"
      "{\"venue\":\"vp5\",\"relevance\":0.90},"
      "{\"venue\":\"vz\",\"relevance\":0.10}";
  std::string requests =
      "{\"request_id\":\"r\",\"user\":\"u\",\"query\":\"q\",\"results\":[" +
      results + "]}\n";
  Fixture f;
  f.dataset = assemble_dataset(parse_taxonomy(tax), venues,
                               "user,venue,value\n", requests, "r 0 vz 1\n",
                               DatasetMeta{});
  f.scores = {{"w1", 0.9}, {"w2", 0.8}, {"w3", 0.7}, {"p1", 0.6},
              {"p2", 0.5}, {"p3", 0.4}, {"p4", 0.3}, {"p5", 0.2}};
  return f;
}

}  // namespace

TEST_CASE("filter_results") {
  Fixture f = deep_fixture();

  auto by_leaf = filter_results(f.dataset, f.request(), "p1");
  REQUIRE(by_leaf.size() == 2);
  CHECK(by_leaf[0].venue == "vp1a");  // original order preserved
  CHECK(by_leaf[1].venue == "vp1b");

  auto by_parent = filter_results(f.dataset, f.request(), "P");
  CHECK(by_parent.size() == 8);
  CHECK(by_parent.front().venue == "vp1a");
  CHECK(by_parent.back().venue == "vz");

  CHECK(filter_results(f.dataset, f.request(), "w1").size() == 1);
}

TEST_CASE("zero clicks when the unfiltered list already succeeds") {
  Fixture f = deep_fixture();
  // make the venue at unfiltered rank 3 relevant
  f.dataset.judgments["r"] = {{"vw3", 1}};
  SimConfig sim;
  RankedTree tree = build_fixed_level(f.dataset.taxonomy, f.scores, BuildConfig{});
  SimTrace trace;
  SimOutcome out = simulate_request(tree, f.dataset, f.request(), sim, &trace);
  CHECK(out.actions == 0);
  CHECK(out.f_scan == 3);
  CHECK(out.reachable);
  CHECK(trace.clicks.empty());
}

TEST_CASE("single forced click on a visible leaf") {
  // The relevant venue sits at unfiltered rank 8 but carries w2, shown on
  // page 1. Clicking the parent W2 fails because five sibling venues crowd
  // the filtered window; clicking w2 itself (4th display item) succeeds.
  std::string tax = R"([
    {"id":"W1","label":"W one","parent":null,"level":1},
    {"id":"W2","label":"W two","parent":null,"level":1},
    {"id":"W3","label":"W three","parent":null,"level":1},
    {"id":"w1","label":"w one","parent":"W1","level":2},
    {"id":"w2","label":"w two","parent":"W2","level":2},
    {"id":"w2b","label":"w two b","parent":"W2","level":2},
    {"id":"w3","label":"w three","parent":"W3","level":2}])";
  std::string venues = venue_line("vw1", "w1") + venue_line("vw2", "w2") +
                       venue_line("vw3", "w3") + venue_line("vb1", "w2b") +
                       venue_line("vb2", "w2b") + venue_line("vb3", "w2b") +
                       venue_line("vb4", "w2b") + venue_line("vb5", "w2b");
  std::string requests =
      "{\"request_id\":\"r\",\"user\":\"u\",\"query\":\"q\",\"results\":["
      "{\"venue\":\"vb1\",\"relevance\":0.99},"
      "{\"venue\":\"vb2\",\"relevance\":0.98},"
      "{\"venue\":\"vb3\",\"relevance\":0.97},"
      "{\"venue\":\"vb4\",\"relevance\":0.96},"
      "{\"venue\":\"vb5\",\"relevance\":0.95},"
      "{\"venue\":\"vw1\",\"relevance\":0.94},"
      "{\"venue\":\"vw3\",\"relevance\":0.93},"
      "{\"venue\":\"vw2\",\"relevance\":0.10}]}\n";
  Dataset d = assemble_dataset(parse_taxonomy(tax), venues,
                               "user,venue,value\n", requests, "r 0 vw2 1\n",
                               DatasetMeta{});
  FacetScoreMap scores{
      {"w1", 0.9}, {"w2", 0.8}, {"w2b", 0.75}, {"w3", 0.7}};
  SimConfig sim;
  RankedTree tree = build_fixed_level(d.taxonomy, scores, BuildConfig{});
  // display: W1(1), w1(2), W2(3), w2(4), w2b(5), W3(6), w3(7)
  SimTrace trace;
  SimOutcome out = simulate_request(tree, d, d.requests[0], sim, &trace);
  CHECK(out.actions == 1);
  REQUIRE(trace.clicks.size() == 1);
  CHECK(trace.clicks[0].item.id == "w2");
  CHECK(trace.clicks[0].position == 4);
  CHECK(trace.final_doc_rank == 1);
  CHECK(out.f_scan == 5);  // position 4 + document rank 1
  CHECK(out.reachable);

  oracle::RefSimResult ref = oracle::ref_simulate(tree, d, d.requests[0], sim);
  CHECK(ref.actions == out.actions);
  CHECK(ref.f_scan == out.f_scan);
}

TEST_CASE("three clicks through both pagination levels") {
  Fixture f = deep_fixture();
  SimConfig sim;
  RankedTree tree = build_fixed_level(f.dataset.taxonomy, f.scores, BuildConfig{});
  SimTrace trace;
  SimOutcome out = simulate_request(tree, f.dataset, f.request(), sim, &trace);
  CHECK(out.actions == 3);
  REQUIRE(trace.clicks.size() == 3);
  CHECK(trace.clicks[0].item.kind == DisplayItem::Kind::more_pages);
  CHECK(trace.clicks[0].position == 7);  // W1,w1,W2,w2,W3,w3,MORE
  CHECK(trace.clicks[1].item.kind == DisplayItem::Kind::more_children);
  CHECK(trace.clicks[1].position == 11);  // ...P,p1,p2,p3,MORE
  CHECK(trace.clicks[2].item.id == "p4");
  CHECK(trace.clicks[2].position == 11);  // marker replaced by p4,p5
  CHECK(out.f_scan == 7 + 11 + 11 + 1);
  CHECK(out.reachable);

  oracle::RefSimResult ref =
      oracle::ref_simulate(tree, f.dataset, f.request(), sim);
  CHECK(ref.actions == 3);
  CHECK(ref.f_scan == out.f_scan);

  // anti-monotony: surfacing p4 earlier can only help
  FacetScoreMap promoted = f.scores;
  promoted["p4"] = 0.65;  // first child page of P
  RankedTree better =
      build_fixed_level(f.dataset.taxonomy, promoted, BuildConfig{});
  SimOutcome improved = simulate_request(better, f.dataset, f.request(), sim);
  CHECK(improved.actions <= out.actions);
  CHECK(improved.f_scan <= out.f_scan);
}

TEST_CASE("unreachable requests take the exhaustion penalty") {
  Fixture f = deep_fixture();
  f.dataset.judgments.clear();  // nothing is relevant
  SimConfig sim;
  RankedTree tree = build_fixed_level(f.dataset.taxonomy, f.scores, BuildConfig{});
  SimOutcome out = simulate_request(tree, f.dataset, f.request(), sim);
  CHECK_FALSE(out.reachable);
  CHECK(out.actions == sim.max_click_depth + sim.max_more_clicks + 1);
  int display_items = static_cast<int>(flatten_display_order(tree).size());
  CHECK(out.f_scan == display_items + 11);

  oracle::RefSimResult ref =
      oracle::ref_simulate(tree, f.dataset, f.request(), sim);
  CHECK_FALSE(ref.reachable);
  CHECK(ref.actions == out.actions);
  CHECK(ref.f_scan == out.f_scan);
}

TEST_CASE("pagination budget can make a relevant leaf unreachable") {
  // reaching p4 takes two expansions; with a budget of one the request is
  // unreachable even though a relevant venue exists
  Fixture f = deep_fixture();
  SimConfig sim;
  sim.max_more_clicks = 1;
  RankedTree tree = build_fixed_level(f.dataset.taxonomy, f.scores, BuildConfig{});
  SimOutcome out = simulate_request(tree, f.dataset, f.request(), sim);
  CHECK_FALSE(out.reachable);
  CHECK(out.actions == sim.max_click_depth + sim.max_more_clicks + 1);

  oracle::RefSimResult ref =
      oracle::ref_simulate(tree, f.dataset, f.request(), sim);
  CHECK_FALSE(ref.reachable);
  CHECK(ref.actions == out.actions);
  CHECK(ref.f_scan == out.f_scan);

  // with two expansions allowed the three-click path exists again
  sim.max_more_clicks = 2;
  CHECK(simulate_request(tree, f.dataset, f.request(), sim).actions == 3);
}

TEST_CASE("simulation agrees with the exhaustive oracle on synthetic runs") {
  Dataset d = generate_synthetic(53, SynthSpec{});
  ScoringConfig cfg;
  cfg.positive_min = d.meta.positive_min;
  SimConfig sim;
  BuildConfig build;
  for (const RequestCase& request : d.requests) {
    ScoreResult scored = score_all(d, request, Coverage::exact(), cfg);
    RankedTree tree = build_fixed_level(d.taxonomy, scored.scores, build);
    SimOutcome got = simulate_request(tree, d, request, sim);
    oracle::RefSimResult ref = oracle::ref_simulate(tree, d, request, sim);
    CHECK(got.actions == ref.actions);
    CHECK(got.f_scan == ref.f_scan);
    CHECK(got.reachable == ref.reachable);
    if (got.reachable) {
      CHECK(got.f_scan >= got.actions + 1);
    }
  }
}

TEST_CASE("baselines") {
  UserProfile p;
  p.user = "u";
  p.total_rated = 4;
  p.positive_count = {{"A", 3}, {"B", 1}};
  auto personal = baseline_most_probable_personal(p, {"A", "B", "C"});
  CHECK(personal.at("A") == doctest::Approx(0.75));
  CHECK(personal.at("B") == doctest::Approx(0.25));
  CHECK(personal.at("C") == 0.0);

  UserProfile empty;
  for (const auto& [facet, score] :
       baseline_most_probable_personal(empty, {"A", "B"})) {
    CHECK(score == 0.0);
  }

  GlobalStats g;
  g.total_rated = 20;
  g.positive_count = {{"A", 10}, {"B", 5}};
  auto collab = baseline_most_probable_collab(g, {"A", "B", "C"});
  CHECK(collab.at("A") == doctest::Approx(0.5));
  CHECK(collab.at("B") == doctest::Approx(0.25));
  CHECK(collab.at("C") == 0.0);
}

TEST_CASE("personal baseline equals the tally oracle on synthetic data") {
  Dataset d = generate_synthetic(7, SynthSpec{});
  oracle::RefProfile ref = oracle::tally_from_files(
      serialize_ratings(d), serialize_venues(d), "u03", d.meta.positive_min);
  UserProfile p = build_profile(d, "u03", d.meta.positive_min);
  for (const RequestCase& request : d.requests) {
    if (request.user != "u03") continue;
    auto scores =
        baseline_most_probable_personal(p, candidate_facets(d, request));
    for (const auto& [facet, score] : scores) {
      double expected =
          ref.counts.count(facet)
              ? static_cast<double>(ref.counts.at(facet)) / ref.total
              : 0.0;
      CHECK(score == doctest::Approx(expected));
    }
  }
}

TEST_CASE("collab baseline is user independent") {
  // two users, two requests over identical results
  std::string tax = R"([
    {"id":"T","label":"Top","parent":null,"level":1},
    {"id":"a","label":"Top a","parent":"T","level":2},
    {"id":"b","label":"Top b","parent":"T","level":2}])";
  std::string venues = venue_line("v1", "a") + venue_line("v2", "b");
  std::string requests =
      "{\"request_id\":\"r1\",\"user\":\"u1\",\"query\":\"q\",\"results\":["
      "{\"venue\":\"v1\",\"relevance\":0.9},{\"venue\":\"v2\",\"relevance\":0.5}]}\n"
      "{\"request_id\":\"r2\",\"user\":\"u2\",\"query\":\"q\",\"results\":["
      "{\"venue\":\"v1\",\"relevance\":0.9},{\"venue\":\"v2\",\"relevance\":0.5}]}\n";
  Dataset d = assemble_dataset(
      parse_taxonomy(tax), venues,
      "user,venue,value\nu1,v1,4\nu2,v2,4\nu2,v1,1\n", requests, "",
      DatasetMeta{});
  GlobalStats g = build_global_stats(d, 3);
  ScorerChoice collab;
  collab.name = "collab";
  auto s1 = scores_for_request(d, collab, build_profile(d, "u1", 3), g,
                               d.requests[0]);
  auto s2 = scores_for_request(d, collab, build_profile(d, "u2", 3), g,
                               d.requests[1]);
  CHECK(s1 == s2);
  RankedTree t1 = build_fixed_level(d.taxonomy, s1, BuildConfig{});
  RankedTree t2 = build_fixed_level(d.taxonomy, s2, BuildConfig{});
  CHECK(render_tree_text(t1) == render_tree_text(t2));
}

TEST_CASE("evaluate_run on a single trivially satisfiable request") {
  Fixture f = deep_fixture();
  Dataset d = f.dataset;
  d.judgments["r"] = {{"vw1", 1}};  // unfiltered rank 1
  ScorerChoice scorer;
  scorer.name = "collab";
  RunReport report = evaluate_run(d, scorer, BuildConfig{}, SimConfig{});
  REQUIRE(report.outcomes.size() == 1);
  CHECK(report.outcomes[0].actions == 0);
  CHECK(report.outcomes[0].f_scan == 1);
  CHECK(report.mean_actions == 0.0);
  CHECK(report.mean_f_scan == 1.0);
}

TEST_CASE("zero-click invariant holds for every scoring configuration") {
  Fixture f = deep_fixture();
  Dataset d = f.dataset;
  d.judgments["r"] = {{"vw2", 1}};  // unfiltered rank 2
  d.ratings.push_back({"u", "vp1a", 4});
  EmbeddingTable table = fallback_embeddings(d.taxonomy, 64);
  SimConfig sim;
  for (const char* name : std::initializer_list<const char*>{"model1", "model2"}) {
    for (bool cosine : {false, true}) {
      ScorerChoice scorer;
      scorer.name = name;
      scorer.coverage =
          cosine ? Coverage::cosine(table) : Coverage::exact();
      RunReport report = evaluate_run(d, scorer, BuildConfig{}, sim);
      REQUIRE(report.outcomes.size() == 1);
      CHECK(report.outcomes[0].actions == 0);
      CHECK(report.outcomes[0].f_scan == 2);
    }
  }
}

TEST_CASE("full pipeline equals the oracle pipeline on synthetic seed 7") {
  Dataset d = generate_synthetic(7, SynthSpec{});
  ScorerChoice scorer;
  scorer.name = "model1";
  scorer.coverage = Coverage::exact();
  scorer.scoring.positive_min = d.meta.positive_min;
  BuildConfig build;
  SimConfig sim;
  RunReport report = evaluate_run(d, scorer, build, sim);

  double actions_sum = 0.0;
  double f_scan_sum = 0.0;
  for (std::size_t i = 0; i < d.requests.size(); ++i) {
    const RequestCase& request = d.requests[i];
    oracle::RefCoverage exact;
    auto ref_scores =
        oracle::ref_scores(d, request, false, exact, scorer.scoring.c,
                           scorer.scoring.background_n, scorer.scoring.epsilon,
                           scorer.scoring.positive_min);
    RankedTree ref_tree = oracle::ref_build_tree(d.taxonomy, ref_scores, build);
    oracle::RefSimResult ref = oracle::ref_simulate(ref_tree, d, request, sim);
    CHECK(report.outcomes[i].actions == ref.actions);
    CHECK(report.outcomes[i].f_scan == ref.f_scan);
    CHECK(report.outcomes[i].reachable == ref.reachable);
    actions_sum += ref.actions;
    f_scan_sum += ref.f_scan;
  }
  CHECK(report.mean_actions ==
        doctest::Approx(actions_sum / d.requests.size()).epsilon(1e-12));
  CHECK(report.mean_f_scan ==
        doctest::Approx(f_scan_sum / d.requests.size()).epsilon(1e-12));
}

TEST_CASE("evaluation is deterministic and independent of the worker count") {
  Dataset d = generate_synthetic(61, SynthSpec{});
  ScorerChoice scorer;
  scorer.name = "model2";
  scorer.coverage = Coverage::cosine(fallback_embeddings(d.taxonomy, 64));
  scorer.scoring.positive_min = d.meta.positive_min;
  RunReport a = evaluate_run(d, scorer, BuildConfig{}, SimConfig{}, 1, "fp");
  RunReport b = evaluate_run(d, scorer, BuildConfig{}, SimConfig{}, 4, "fp");
  RunReport c = evaluate_run(d, scorer, BuildConfig{}, SimConfig{}, 4, "fp");
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_json(b) == report_to_json(c));
}

TEST_CASE("report json round-trip and table rendering") {
  Dataset d = generate_synthetic(67, SynthSpec{});
  std::vector<RunReport> reports;
  for (const char* name : {"model1", "personal"}) {
    for (Aggregation agg : {Aggregation::max, Aggregation::avg}) {
      ScorerChoice scorer;
      scorer.name = name;
      scorer.scoring.positive_min = d.meta.positive_min;
      BuildConfig build;
      build.aggregation = agg;
      reports.push_back(evaluate_run(d, scorer, build, SimConfig{}, 1, "fp"));
    }
  }
  RunReport parsed = report_from_json(report_to_json(reports[0]));
  CHECK(report_to_json(parsed) == report_to_json(reports[0]));

  std::string table = render_report_table(reports);
  CHECK(table.find("Model-1 + exact") != std::string::npos);
  CHECK(table.find("Most Prob. (Person)") != std::string::npos);
  CHECK(table.find("F-Scan") != std::string::npos);
  CHECK(table.find("#Actions") != std::string::npos);
}
