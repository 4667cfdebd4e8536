#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "facetrank/datastore.hpp"
#include "facetrank/evalsim.hpp"
#include "facetrank/scoring.hpp"
#include "facetrank/treebuild.hpp"

namespace facetrank {

// Everything a run needs, collected from the config file plus flag
// overrides. Exactly one of dataset/synth must be set by the time a command
// touches data.
struct RunConfig {
  std::optional<DatasetPaths> dataset;
  std::optional<SynthSpec> synth;
  std::uint64_t seed = 0;

  std::vector<std::string> scorers = {"model1"};   // model1 model2 personal collab
  std::vector<std::string> coverages = {"exact"};  // exact cosine
  std::string embeddings_path;                     // empty: deterministic fallback
  int fallback_dim = 256;
  ScoringConfig scoring;

  std::vector<Aggregation> aggregations = {Aggregation::max};
  BuildConfig build;
  SimConfig sim;

  int taxonomy_depth = 2;
  std::string out_dir = "out";
  int jobs = 1;
};

// Key = value lines under [section] headers; '#' starts a comment.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical flat rendering of every effective setting; the fingerprint is
// its 64-bit hash, so identical configurations hash identically regardless
// of file formatting.
std::string canonical_config_string(const RunConfig& config);
std::string config_fingerprint(const RunConfig& config);

void validate_run_config(const RunConfig& config);

// manifest.json in out_dir: command, fingerprint, seed, checksums of the
// artifacts written by the command.
void write_manifest(const RunConfig& config, const std::string& command,
                    const std::vector<std::string>& artifact_names);

}  // namespace facetrank
