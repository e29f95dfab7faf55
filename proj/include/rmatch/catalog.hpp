#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmatch/montecarlo.hpp"
#include "rmatch/records.hpp"

namespace rmatch {

// Resolved experiment configuration keys:
//   experiment  catalog name
//   model       complete_bipartite | gnnp | complete | gnp
//   n           array of sizes; one run per entry, same seed
//   p, trials, seed, threads, format ("jsonl" | "csv")
//   r, lambda, epsilon (array), mu_constant, max_edge_constant, pairs, k
// Keys that an entry does not use are absent from its defaults and rejected.

std::span<const std::string_view> catalog_names();

/// Throws InvalidArgument for an unknown name.
json catalog_defaults(std::string_view name);

/// Overlays `overrides` on a resolved config. Unknown keys and type
/// mismatches raise ParseError; a scalar n is promoted to a one-element array.
json merge_config(json base, const json& overrides);

/// Resolved config for an arbitrary document holding at least "experiment".
json resolve_config(const json& doc);

struct CatalogRun {
  json config;
  std::vector<ExperimentSpec> specs;  // one per entry of config["n"]
  std::vector<ExperimentResult> results;
  json analysis;  // per-entry tables plus a "checks" object of booleans
  std::vector<std::string> report;  // theory comparison lines
};

/// Builds the ExperimentSpec for each n. Throws InvalidArgument on bad values.
std::vector<ExperimentSpec> catalog_specs(const json& config);

CatalogRun run_catalog(const json& config);

/// {"record":"summary", artifact, version, config, created_at, runs, analysis}
json summary_document(const CatalogRun& run, const std::string& created_at);

}  // namespace rmatch
