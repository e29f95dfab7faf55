#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "rmatch/montecarlo.hpp"

namespace rmatch {

using nlohmann::json;

inline constexpr const char* kArtifactName = "rmatch";
inline constexpr const char* kArtifactVersion = RMATCH_VERSION;

// JSONL schema, one object per line:
//   {"record":"header","artifact":..,"version":..,"config":{..},"created_at":..}
//   {"record":"trial","run":i,"n":n,"trial_index":t,"stream_id":s,
//    "outcome":"ok"|"infeasible","scalars":{name: value, ...}}
// CSV: "# artifact", "# version", "# created_at" and "# config" comment lines,
// then run,n,trial_index,stream_id,outcome followed by the sorted union of
// scalar names; missing scalars are empty cells.

json to_json(const Summary& s);
json to_json(const TrialRecord& r);
TrialRecord trial_from_json(const json& j);

/// One batch of trials produced by a single ExperimentSpec.
struct RunRecords {
  std::size_t n = 0;
  std::span<const TrialRecord> records;
};

json make_header(const json& config, const std::string& created_at);

void write_jsonl(std::ostream& out, const json& header, std::span<const RunRecords> runs);
void write_csv(std::ostream& out, const json& header, std::span<const RunRecords> runs);

struct LoadedRecords {
  json header;
  std::vector<std::size_t> run;  // parallel to trials
  std::vector<TrialRecord> trials;
};

/// Reads a JSONL file written by write_jsonl; throws ParseError with the
/// offending line number on malformed input.
LoadedRecords read_jsonl(std::istream& in);

/// UTC timestamp, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace rmatch
