// Command-line entry point: wires ingestion, synthesis, scoring, tree
// building and evaluation into reproducible runs driven by a config file
// plus flag overrides.

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "facetrank/coverage.hpp"
#include "facetrank/datastore.hpp"
#include "facetrank/errors.hpp"
#include "facetrank/evalsim.hpp"
#include "facetrank/profile.hpp"
#include "facetrank/runconfig.hpp"
#include "facetrank/scoring.hpp"
#include "facetrank/treebuild.hpp"
#include "facetrank/util.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace facetrank;

struct FlagOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string coverage;
  std::string embeddings;
  std::string agg;
  std::optional<int> k;
  std::optional<int> page1;
  std::optional<int> page2;
  std::optional<int> top_n;
  std::optional<int> jobs;
  std::string out_dir;
  std::vector<std::string> reports;  // compare positionals
};

RunConfig effective_config(const FlagOverrides& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = load_run_config(flags.config_path);
  }
  if (flags.seed) {
    config.seed = *flags.seed;
    if (!config.synth && !config.dataset) config.synth = SynthSpec{};
  }
  if (!flags.model.empty()) config.scorers = {flags.model};
  if (!flags.coverage.empty()) config.coverages = {flags.coverage};
  if (!flags.embeddings.empty()) config.embeddings_path = flags.embeddings;
  if (!flags.agg.empty()) config.aggregations = {aggregation_from_name(flags.agg)};
  if (flags.k) config.build.top_k_children = *flags.k;
  if (flags.page1) config.build.page_size_level1 = *flags.page1;
  if (flags.page2) config.build.page_size_level2 = *flags.page2;
  if (flags.top_n) config.sim.success_top_n = *flags.top_n;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  return config;
}

Dataset materialize_dataset(const RunConfig& config) {
  if (config.synth) {
    return generate_synthetic(config.seed, *config.synth);
  }
  return load_dataset(*config.dataset, config.taxonomy_depth);
}

Coverage make_coverage(const RunConfig& config, const std::string& kind,
                       const Dataset& dataset) {
  if (kind == "exact") return Coverage::exact();
  if (!config.embeddings_path.empty()) {
    return Coverage::cosine(load_embeddings(config.embeddings_path));
  }
  return Coverage::cosine(fallback_embeddings(dataset.taxonomy,
                                              config.fallback_dim));
}

struct Combo {
  std::string scorer;
  std::string coverage;  // "-" for baselines
};

std::vector<Combo> scorer_combos(const RunConfig& config) {
  std::vector<Combo> combos;
  for (const std::string& scorer : config.scorers) {
    if (scorer == "personal" || scorer == "collab") {
      combos.push_back({scorer, "-"});
    } else {
      for (const std::string& coverage : config.coverages) {
        combos.push_back({scorer, coverage});
      }
    }
  }
  return combos;
}

std::string combo_file_tag(const Combo& combo) {
  return combo.coverage == "-" ? combo.scorer
                               : combo.scorer + "_" + combo.coverage;
}

ScorerChoice make_scorer(const RunConfig& config, const Combo& combo,
                         const Dataset& dataset,
                         std::map<std::string, Coverage>& coverage_cache) {
  ScorerChoice choice;
  choice.name = combo.scorer;
  choice.scoring = config.scoring;
  if (combo.coverage != "-") {
    auto it = coverage_cache.find(combo.coverage);
    if (it == coverage_cache.end()) {
      it = coverage_cache
               .emplace(combo.coverage,
                        make_coverage(config, combo.coverage, dataset))
               .first;
    }
    choice.coverage = it->second;
  }
  return choice;
}

int cmd_synth(const RunConfig& config) {
  if (!config.synth) {
    throw ConfigError("synth: a [synth] section or --seed is required");
  }
  Dataset dataset = generate_synthetic(config.seed, *config.synth);
  std::vector<std::string> files = save_dataset(dataset, config.out_dir);
  write_manifest(config, "synth", files);
  std::printf("synth: %zu venues, %zu ratings, %zu requests -> %s\n",
              dataset.venues.size(), dataset.ratings.size(),
              dataset.requests.size(), config.out_dir.c_str());
  return 0;
}

int cmd_ingest(const RunConfig& config) {
  if (!config.dataset) {
    throw ConfigError("ingest: a [dataset] section is required");
  }
  Dataset dataset = load_dataset(*config.dataset, config.taxonomy_depth);
  std::vector<std::string> files = save_dataset(dataset, config.out_dir);
  write_manifest(config, "ingest", files);
  std::printf("ingest: %zu venues, %zu ratings, %zu requests -> %s\n",
              dataset.venues.size(), dataset.ratings.size(),
              dataset.requests.size(), config.out_dir.c_str());
  return 0;
}

int cmd_profile_dump(const RunConfig& config) {
  Dataset dataset = materialize_dataset(config);
  std::string out;
  for (const std::string& user : dataset.users()) {
    out += profile_to_json(
        build_profile(dataset, user, config.scoring.positive_min));
    out += '\n';
  }
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir + "/profiles.jsonl", out);
  write_manifest(config, "profile-dump", {"profiles.jsonl"});
  std::printf("profile-dump: %s/profiles.jsonl\n", config.out_dir.c_str());
  return 0;
}

int cmd_score(const RunConfig& config) {
  Dataset dataset = materialize_dataset(config);
  GlobalStats global = build_global_stats(dataset, config.scoring.positive_min);
  std::map<std::string, UserProfile> profiles;
  for (const RequestCase& request : dataset.requests) {
    if (!profiles.count(request.user)) {
      profiles.emplace(request.user,
                       build_profile(dataset, request.user,
                                     config.scoring.positive_min));
    }
  }
  std::map<std::string, Coverage> coverage_cache;
  std::vector<std::string> files;
  for (const Combo& combo : scorer_combos(config)) {
    ScorerChoice scorer = make_scorer(config, combo, dataset, coverage_cache);
    std::string out;
    for (const RequestCase& request : dataset.requests) {
      std::vector<FacetId> unsupported;
      FacetScoreMap scores =
          scores_for_request(dataset, scorer, profiles.at(request.user),
                             global, request, &unsupported);
      json line;
      line["request_id"] = request.request_id;
      line["model"] = combo.scorer;
      line["coverage"] = combo.coverage;
      json score_obj = json::object();
      for (const auto& [facet, value] : scores) score_obj[facet] = value;
      line["scores"] = std::move(score_obj);
      if (!unsupported.empty()) {
        line["background_unsupported"] = unsupported;
      }
      out += line.dump();
      out += '\n';
    }
    std::string name = "scores_" + combo_file_tag(combo) + ".jsonl";
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir + "/" + name, out);
    files.push_back(name);
  }
  write_manifest(config, "score", files);
  std::printf("score: %zu file(s) -> %s\n", files.size(), config.out_dir.c_str());
  return 0;
}

int cmd_build_tree(const RunConfig& config) {
  Dataset dataset = materialize_dataset(config);
  GlobalStats global = build_global_stats(dataset, config.scoring.positive_min);
  std::map<std::string, UserProfile> profiles;
  for (const RequestCase& request : dataset.requests) {
    if (!profiles.count(request.user)) {
      profiles.emplace(request.user,
                       build_profile(dataset, request.user,
                                     config.scoring.positive_min));
    }
  }
  // One configuration per invocation: the first scorer/coverage/aggregation.
  Combo combo = scorer_combos(config).front();
  std::map<std::string, Coverage> coverage_cache;
  ScorerChoice scorer = make_scorer(config, combo, dataset, coverage_cache);
  BuildConfig build = config.build;
  build.aggregation = config.aggregations.front();

  std::filesystem::create_directories(config.out_dir + "/trees");
  std::vector<std::string> files;
  for (const RequestCase& request : dataset.requests) {
    FacetScoreMap scores = scores_for_request(
        dataset, scorer, profiles.at(request.user), global, request, nullptr);
    RankedTree tree = build_fixed_level(dataset.taxonomy, scores, build);
    std::string base = "trees/" + request.request_id;
    write_file(config.out_dir + "/" + base + ".txt", render_tree_text(tree));
    write_file(config.out_dir + "/" + base + ".json", render_tree_json(tree));
    files.push_back(base + ".txt");
    files.push_back(base + ".json");
  }
  write_manifest(config, "build-tree", files);
  std::printf("build-tree: %zu request(s), %s + %s, %s -> %s/trees\n",
              dataset.requests.size(), combo.scorer.c_str(),
              combo.coverage.c_str(), aggregation_name(build.aggregation),
              config.out_dir.c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  Dataset dataset = materialize_dataset(config);
  std::map<std::string, Coverage> coverage_cache;
  std::vector<RunReport> reports;
  std::vector<std::string> files;
  std::filesystem::create_directories(config.out_dir);
  std::string fingerprint = config_fingerprint(config);
  for (const Combo& combo : scorer_combos(config)) {
    ScorerChoice scorer = make_scorer(config, combo, dataset, coverage_cache);
    for (Aggregation agg : config.aggregations) {
      BuildConfig build = config.build;
      build.aggregation = agg;
      RunReport report = evaluate_run(dataset, scorer, build, config.sim,
                                      config.jobs, fingerprint);
      std::string name = "report_" + combo_file_tag(combo) + "_" +
                         aggregation_name(agg) + ".json";
      write_file(config.out_dir + "/" + name, report_to_json(report));
      files.push_back(name);
      reports.push_back(std::move(report));
    }
  }
  std::string table = render_report_table(reports);
  write_file(config.out_dir + "/summary.txt", table);
  files.push_back("summary.txt");
  write_manifest(config, "evaluate", files);
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_compare(const RunConfig& config, const std::vector<std::string>& paths) {
  if (paths.empty()) {
    throw ConfigError("compare: at least one report file is required");
  }
  std::vector<RunReport> reports;
  for (const std::string& path : paths) {
    reports.push_back(report_from_json(read_file(path)));
  }
  std::string table = render_report_table(reports);
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir + "/comparison.txt", table);
  std::fputs(table.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized type-facet ranking and evaluation workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  FlagOverrides flags;
  app.add_option("--config", flags.config_path, "Run config file");
  app.add_option("--seed", flags.seed, "Synthetic dataset seed");
  app.add_option("--model", flags.model, "Scorer")
      ->check(CLI::IsMember({"model1", "model2", "personal", "collab"}));
  app.add_option("--coverage", flags.coverage, "Coverage estimator")
      ->check(CLI::IsMember({"exact", "cosine"}));
  app.add_option("--embeddings", flags.embeddings, "Embedding table path");
  app.add_option("--agg", flags.agg, "Aggregation")
      ->check(CLI::IsMember({"avg", "max"}));
  app.add_option("--k", flags.k, "Top-k children for parent aggregation");
  app.add_option("--page1", flags.page1, "Level-1 page size");
  app.add_option("--page2", flags.page2, "Level-2 page size");
  app.add_option("--top-n", flags.top_n, "Success window in the result list");
  app.add_option("--jobs", flags.jobs, "Worker threads");
  app.add_option("--out", flags.out_dir, "Output directory");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  CLI::App* ingest = app.add_subcommand("ingest", "Validate and normalize a dataset");
  CLI::App* score = app.add_subcommand("score", "Emit per-request facet scores");
  CLI::App* build_tree = app.add_subcommand("build-tree", "Emit ranked facet trees");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Run the effort simulation");
  CLI::App* compare = app.add_subcommand("compare", "Join evaluation reports");
  CLI::App* profile_dump =
      app.add_subcommand("profile-dump", "Emit user preference profiles");
  compare->add_option("reports", flags.reports, "Report JSON files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = effective_config(flags);
    if (!compare->parsed()) {
      if (synth->parsed() && !config.synth && !config.dataset) {
        config.synth = SynthSpec{};
      }
      validate_run_config(config);
    }
    if (synth->parsed()) return cmd_synth(config);
    if (ingest->parsed()) return cmd_ingest(config);
    if (score->parsed()) return cmd_score(config);
    if (build_tree->parsed()) return cmd_build_tree(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (compare->parsed()) return cmd_compare(config, flags.reports);
    if (profile_dump->parsed()) return cmd_profile_dump(config);
    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}
