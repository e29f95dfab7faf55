#include "rmatch/records.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <set>

#include "rmatch/error.hpp"

namespace rmatch {
namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view outcome_name(Outcome o) { return o == Outcome::ok ? "ok" : "infeasible"; }

}  // namespace

json to_json(const Summary& s) {
  json j;
  j["trials_ok"] = s.trials_ok;
  j["trials_infeasible"] = s.trials_infeasible;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["standard_error"] = s.standard_error;
  json q = json::object();
  for (std::size_t i = 0; i < Summary::kQuantileLevels.size(); ++i) {
    char key[8];
    std::snprintf(key, sizeof key, "q%02d", static_cast<int>(Summary::kQuantileLevels[i] * 100 + 0.5));
    q[key] = s.quantiles[i];
  }
  j["quantiles"] = q;
  if (s.comparison) {
    j["comparison"] = {{"theory_value", s.comparison->theory_value},
                       {"relative_deviation", s.comparison->relative_deviation},
                       {"z_score", s.comparison->z_score}};
  } else {
    j["comparison"] = nullptr;
  }
  return j;
}

json to_json(const TrialRecord& r) {
  return {{"trial_index", r.trial_index},
          {"stream_id", r.stream_id},
          {"outcome", outcome_name(r.outcome)},
          {"scalars", r.scalars}};
}

TrialRecord trial_from_json(const json& j) {
  TrialRecord r;
  r.trial_index = j.at("trial_index").get<std::uint64_t>();
  r.stream_id = j.at("stream_id").get<std::uint64_t>();
  const auto outcome = j.at("outcome").get<std::string>();
  if (outcome == "ok") {
    r.outcome = Outcome::ok;
  } else if (outcome == "infeasible") {
    r.outcome = Outcome::infeasible;
  } else {
    throw ParseError(0, "unknown outcome '" + outcome + "'");
  }
  r.scalars = j.at("scalars").get<std::map<std::string, double>>();
  return r;
}

json make_header(const json& config, const std::string& created_at) {
  return {{"record", "header"},
          {"artifact", kArtifactName},
          {"version", kArtifactVersion},
          {"config", config},
          {"created_at", created_at}};
}

void write_jsonl(std::ostream& out, const json& header, std::span<const RunRecords> runs) {
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& rec : runs[i].records) {
      json line = {{"record", "trial"}, {"run", i}, {"n", runs[i].n}};
      line.update(to_json(rec));
      out << line.dump() << '\n';
    }
  }
}

void write_csv(std::ostream& out, const json& header, std::span<const RunRecords> runs) {
  out << "# artifact: " << header.at("artifact").get<std::string>() << '\n'
      << "# version: " << header.at("version").get<std::string>() << '\n'
      << "# created_at: " << header.at("created_at").get<std::string>() << '\n'
      << "# config: " << header.at("config").dump() << '\n';
  std::set<std::string> names;
  for (const auto& run : runs) {
    for (const auto& rec : run.records) {
      for (const auto& [k, v] : rec.scalars) names.insert(k);
    }
  }
  out << "run,n,trial_index,stream_id,outcome";
  for (const auto& k : names) out << ',' << k;
  out << '\n';
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& rec : runs[i].records) {
      out << i << ',' << runs[i].n << ',' << rec.trial_index << ',' << rec.stream_id << ','
          << outcome_name(rec.outcome);
      for (const auto& k : names) {
        out << ',';
        if (auto it = rec.scalars.find(k); it != rec.scalars.end()) out << format_double(it->second);
      }
      out << '\n';
    }
  }
}

LoadedRecords read_jsonl(std::istream& in) {
  LoadedRecords loaded;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      const auto kind = j.at("record").get<std::string>();
      if (kind == "header") {
        if (have_header) throw ParseError(lineno, "duplicate header");
        loaded.header = j;
        have_header = true;
      } else if (kind == "trial") {
        if (!have_header) throw ParseError(lineno, "trial before header");
        loaded.run.push_back(j.at("run").get<std::size_t>());
        loaded.trials.push_back(trial_from_json(j));
      } else {
        throw ParseError(lineno, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError(0, "missing header record");
  return loaded;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rmatch
