// rmatch command-line front end.
//
// Exit codes: 0 success, 1 internal error, 2 infeasible instance,
// 3 parse or schema error, 4 usage or precondition violation.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rmatch/bipartite.hpp"
#include "rmatch/blossom.hpp"
#include "rmatch/catalog.hpp"
#include "rmatch/diagnostics.hpp"
#include "rmatch/error.hpp"
#include "rmatch/records.hpp"
#include "rmatch/theory.hpp"

namespace {

using namespace rmatch;

enum Exit { kOk = 0, kInternal = 1, kInfeasible = 2, kParse = 3, kUsage = 4 };

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  std::string model;
  int n = 0;
  std::optional<double> p;
  double rate = 1.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateOpts& o) {
  ModelSpec spec{parse_model(o.model), o.n, o.p.value_or(1.0), o.rate};
  if (o.p && is_complete(spec.model) && *o.p != 1.0) {
    throw InvalidArgument("complete models take p = 1");
  }
  spec.validate();
  // Same stream as trial 0 of an experiment with this seed.
  RngStream rng = derive_stream(trial_stream_id(o.seed, 0), "graph", 0);
  const Graph g = generate(spec, rng);
  std::ostringstream text;
  text << "# " << kArtifactName << ' ' << kArtifactVersion << " generate model=" << o.model
       << " n=" << o.n << " p=" << num(spec.normalized().p) << " rate=" << num(o.rate)
       << " seed=" << o.seed << '\n';
  write_graph(g, text);
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    auto f = open_out(o.out);
    f << text.str();
  }
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveOpts {
  std::string file;
  std::string mode;
  std::optional<std::size_t> rmax;
};

void print_pairs(const Matching& m) {
  std::cout << "matching";
  for (const auto& p : m.pairs) std::cout << ' ' << p.u << '-' << p.v;
  std::cout << '\n';
}

int cmd_solve(const SolveOpts& o) {
  const Graph g = read_graph(o.file);
  const bool bip = std::holds_alternative<BipartiteWeightedGraph>(g);
  const std::string mode = o.mode.empty() ? (bip ? "assignment" : "general") : o.mode;
  if ((mode == "general") == bip) {
    throw InvalidArgument("mode " + mode + " does not fit a " +
                          (bip ? "bipartite" : "general") + " graph");
  }
  if (o.rmax && mode != "sequence") throw InvalidArgument("--rmax needs --mode sequence");
  std::cout << "mode " << mode << '\n';
  if (mode == "assignment") {
    const auto& b = std::get<BipartiteWeightedGraph>(g);
    if (b.n_left() != b.n_right()) throw InvalidArgument("assignment needs n_left == n_right");
    const auto seq = [&] {
      try {
        return solve_sequence(b, static_cast<std::size_t>(b.n_left()));
      } catch (const NoMatching&) {
        throw NoPerfectMatching();
      }
    }();
    std::cout << "cost " << num(seq.final_matching.cost) << '\n';
    print_pairs(seq.final_matching);
    const bool ok = check_certificate(b, seq.r_max, seq.final_matching, seq.final_certificate);
    std::cout << "certificate " << (ok ? "ok" : "FAILED") << '\n';
    return ok ? kOk : kInternal;
  }
  if (mode == "sequence") {
    const auto& b = std::get<BipartiteWeightedGraph>(g);
    const std::size_t r_max = o.rmax.value_or(static_cast<std::size_t>(b.n_left()));
    if (r_max > static_cast<std::size_t>(b.n_left())) throw InvalidArgument("--rmax exceeds n_left");
    const auto seq = solve_sequence(b, r_max, true);
    bool ok = true;
    for (std::size_t r = 1; r <= r_max; ++r) {
      std::cout << "r " << r << " cost " << num(seq.cost(r)) << " increment "
                << num(seq.increments[r - 1]) << '\n';
      ok = ok && check_certificate(b, r, seq.matchings[r - 1], seq.certificates[r - 1]);
    }
    print_pairs(seq.final_matching);
    std::cout << "certificate " << (ok ? "ok" : "FAILED") << '\n';
    return ok ? kOk : kInternal;
  }
  if (mode != "general") throw InvalidArgument("unknown mode '" + mode + "'");
  const auto& wg = std::get<WeightedGraph>(g);
  const auto res = solve_perfect_matching(wg);
  std::cout << "cost " << num(res.matching.cost) << '\n';
  print_pairs(res.matching);
  const auto report = verify_certificate(wg, res.matching, res.certificate);
  std::cout << "blossoms " << res.certificate.blossoms.size() << '\n';
  std::cout << "certificate " << (report ? "ok" : "FAILED") << '\n';
  for (const auto& v : report.violations) std::cout << "  " << v << '\n';
  return report ? kOk : kInternal;
}

// ---------------------------------------------------------------- experiment

struct ExperimentOpts {
  std::string name;
  std::string config;
  std::string out;
  std::optional<std::string> format;
  std::optional<std::string> model;
  std::vector<long long> n;
  std::optional<double> p;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<long long> threads;
  std::optional<long long> r;
  std::optional<double> lambda;
  std::vector<double> epsilon;
  std::optional<double> mu_constant;
  std::optional<double> max_edge_constant;
  std::optional<long long> pairs;
  std::optional<long long> k;
};

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
  }
  // A JSONL records file: take its header line.
  std::istringstream lines(text);
  std::string first;
  std::getline(lines, first);
  try {
    return json::parse(first);
  } catch (const json::parse_error& e) {
    throw ParseError(1, path + ": " + e.what());
  }
}

json config_from_document(json doc) {
  // Header and summary records carry the resolved config under "config".
  if (doc.is_object() && doc.contains("record") && doc.contains("config")) {
    return doc["config"];
  }
  return doc;
}

json resolve_experiment(const ExperimentOpts& o) {
  json file_cfg = json::object();
  if (!o.config.empty()) file_cfg = config_from_document(load_json_file(o.config));
  if (!file_cfg.is_object()) throw ParseError(0, "config must be a JSON object");
  std::string name = o.name;
  if (file_cfg.contains("experiment")) {
    if (!file_cfg["experiment"].is_string()) throw ParseError(0, "'experiment' must be a string");
    const auto from_file = file_cfg["experiment"].get<std::string>();
    if (!name.empty() && name != from_file) {
      throw ParseError(0, "config file names experiment " + from_file);
    }
    name = from_file;
  }
  if (name.empty()) throw InvalidArgument("experiment needs a catalog name or --config");
  json cfg = catalog_defaults(name);

  json env = json::object();
  if (const char* s = std::getenv("RMATCH_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') throw InvalidArgument("RMATCH_SEED must be an integer");
    env["seed"] = static_cast<std::uint64_t>(v);
  }
  cfg = merge_config(std::move(cfg), env);
  cfg = merge_config(std::move(cfg), file_cfg);

  json flags = json::object();
  if (o.format) flags["format"] = *o.format;
  if (o.model) flags["model"] = *o.model;
  if (!o.n.empty()) flags["n"] = o.n;
  if (o.p) flags["p"] = *o.p;
  if (o.trials) flags["trials"] = *o.trials;
  if (o.seed) flags["seed"] = *o.seed;
  if (o.threads) flags["threads"] = *o.threads;
  if (o.r) flags["r"] = *o.r;
  if (o.lambda) flags["lambda"] = *o.lambda;
  if (!o.epsilon.empty()) flags["epsilon"] = o.epsilon;
  if (o.mu_constant) flags["mu_constant"] = *o.mu_constant;
  if (o.max_edge_constant) flags["max_edge_constant"] = *o.max_edge_constant;
  if (o.pairs) flags["pairs"] = *o.pairs;
  if (o.k) flags["k"] = *o.k;
  try {
    return merge_config(std::move(cfg), flags);
  } catch (const ParseError& e) {
    throw InvalidArgument(e.what());  // a flag the experiment does not take
  }
}

int cmd_experiment(const ExperimentOpts& o) {
  const json cfg = resolve_experiment(o);
  const CatalogRun run = run_catalog(cfg);
  const std::string created_at = utc_timestamp();
  for (const auto& line : run.report) std::cout << line << '\n';
  std::cout << "checks:";
  for (const auto& [k, v] : run.analysis["checks"].items()) {
    std::cout << ' ' << k << '=' << (v.get<bool>() ? "pass" : "fail");
  }
  std::cout << '\n';
  if (!o.out.empty()) {
    std::vector<RunRecords> runs;
    for (std::size_t i = 0; i < run.specs.size(); ++i) {
      runs.push_back({static_cast<std::size_t>(run.specs[i].model.n), run.results[i].records});
    }
    const json header = make_header(cfg, created_at);
    {
      auto f = open_out(o.out);
      if (cfg["format"] == "csv") {
        write_csv(f, header, runs);
      } else {
        write_jsonl(f, header, runs);
      }
    }
    auto s = open_out(o.out + ".summary.json");
    s << summary_document(run, created_at).dump(2) << '\n';
    std::cout << "wrote " << o.out << " and " << o.out << ".summary.json\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- plotdata

struct PlotOpts {
  std::string kind;
  std::vector<std::string> inputs;
  std::string out;
};

const json& require(const json& j, const char* key, const std::string& file) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(0, file + ": missing '" + key + "' (not a summary of the right kind)");
  }
  return j[key];
}

int cmd_plotdata(const PlotOpts& o) {
  std::ostringstream table;
  table << "# " << kArtifactName << ' ' << kArtifactVersion << " plotdata kind=" << o.kind << '\n';
  if (o.kind == "convergence") {
    table << "experiment,model,n,p,scaled_mean,scaled_standard_error,theory_scaled,"
             "relative_deviation\n";
  } else if (o.kind == "increments") {
    table << "n,r,empirical,standard_error,theory,z\n";
  } else if (o.kind == "concentration") {
    table << "n,epsilon,exceedance,exceedance_truncated\n";
  } else {
    throw InvalidArgument("unknown plot kind '" + o.kind + "'");
  }
  for (const auto& path : o.inputs) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (buf.str().find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ParseError(0, path + ": " + e.what());
    }
    const json& analysis = require(doc, "analysis", path);
    try {
      if (o.kind == "convergence") {
        const auto& cfg = require(doc, "config", path);
        for (const auto& r : require(analysis, "convergence", path)) {
          table << cfg.at("experiment").get<std::string>() << ','
                << cfg.at("model").get<std::string>() << ',' << r.at("n").get<long long>() << ','
                << num(r.at("p").get<double>()) << ',' << num(r.at("scaled_mean").get<double>())
                << ',' << num(r.at("scaled_standard_error").get<double>()) << ','
                << num(r.at("theory_scaled").get<double>()) << ','
                << num(r.at("relative_deviation").get<double>()) << '\n';
        }
      } else if (o.kind == "increments") {
        for (const auto& block : require(analysis, "increments", path)) {
          for (const auto& r : block.at("rows")) {
            table << block.at("n").get<long long>() << ',' << r.at("r").get<long long>() << ','
                  << num(r.at("empirical").get<double>()) << ','
                  << num(r.at("standard_error").get<double>()) << ','
                  << num(r.at("theory").get<double>()) << ',' << num(r.at("z").get<double>())
                  << '\n';
          }
        }
      } else {
        for (const auto& block : require(analysis, "concentration", path)) {
          for (const auto& r : block.at("rows")) {
            table << block.at("n").get<long long>() << ',' << num(r.at("epsilon").get<double>())
                  << ',' << num(r.at("exceedance").get<double>()) << ','
                  << num(r.at("exceedance_truncated").get<double>()) << '\n';
          }
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(0, path + ": " + e.what());
    }
  }
  if (o.out.empty()) {
    std::cout << table.str();
  } else {
    auto f = open_out(o.out);
    f << table.str();
  }
  return kOk;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseOpts {
  std::string file;
  std::optional<std::size_t> r;
  std::optional<std::size_t> k;
  std::size_t pairs = 100;
  std::uint64_t seed = 1;
};

void print_diameter(const DiameterReport& rep, std::size_t k0) {
  std::cout << "pairs " << rep.hops.size() << '\n'
            << "max_hops " << rep.max_hops << '\n'
            << "unreachable " << rep.unreachable << '\n'
            << "k0 " << k0 << '\n'
            << "within_k0 " << (rep.unreachable == 0 && rep.max_hops <= static_cast<int>(k0) ? "yes" : "no")
            << '\n';
}

int cmd_diagnose(const DiagnoseOpts& o) {
  const Graph g = read_graph(o.file);
  RngStream probe = derive_stream(o.seed, "pairs", 0);
  if (const auto* b = std::get_if<BipartiteWeightedGraph>(&g)) {
    const auto n = static_cast<std::size_t>(b->n_left());
    const std::size_t r = o.r.value_or(n - theory::default_cutoff(n));
    if (r >= n) throw InvalidArgument("diagnose needs r < n_left");
    auto cfg = DiagnosticsConfig::bipartite_defaults(static_cast<std::size_t>(b->n_right()));
    if (o.k) cfg.k = *o.k;
    const auto seq = solve_sequence(*b, r);
    const auto d = build_alternating_digraph(*b, seq.final_matching, cfg);
    const auto pairs = sample_pairs(d, o.pairs, probe);
    const auto rep = ab_diameter(d, pairs);
    std::cout << "graph bipartite\nr " << r << "\nk " << cfg.k << "\narcs " << d.num_arcs() << '\n';
    print_diameter(rep, cfg.k0);
    std::cout << "max_hops_free " << rep.max_hops_to_free << '\n'
              << "unreachable_free " << rep.unreachable_free << '\n';
    if (!seq.final_matching.empty()) {
      std::cout << "max_edge " << num(max_matching_edge_cost(b->edges(), seq.final_matching)) << '\n';
    }
    // Label-correcting probe; raises OptimalityViolation on a negative cycle.
    for (const auto& [a, t] : pairs) (void)min_alternating_cost(d, a, t);
    std::cout << "negative_cycle none\n";
    return kOk;
  }
  const auto& wg = std::get<WeightedGraph>(g);
  auto cfg = DiagnosticsConfig::general_defaults(static_cast<std::size_t>(wg.n()));
  if (o.k) cfg.k = *o.k;
  if (o.r) throw InvalidArgument("--r applies to bipartite graphs only");
  const auto res = solve_perfect_matching(wg);
  RngStream orient = derive_stream(o.seed, "orientation", 0);
  const auto d = build_alternating_digraph(wg, res.matching, cfg, orient);
  const auto pairs = sample_pairs(d, o.pairs, probe);
  const auto rep = ab_diameter(d, pairs);
  std::cout << "graph general\nk " << cfg.k << "\narcs " << d.num_arcs() << '\n';
  print_diameter(rep, cfg.k0);
  std::cout << "max_edge " << num(max_matching_edge_cost(wg.edges(), res.matching)) << '\n';
  for (const auto& [a, t] : pairs) (void)min_alternating_cost(d, a, t);
  std::cout << "negative_cycle none\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact matchings on random weighted graphs and Monte Carlo experiments"};
  app.set_version_flag("--version", std::string(kArtifactName) + " " + kArtifactVersion);
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Draw a random graph in edge-list format");
  g->add_option("--model", gen.model, "complete_bipartite | gnnp | complete | gnp")->required();
  g->add_option("--n", gen.n, "Vertices per side (bipartite) or in total")->required();
  g->add_option("--p", gen.p, "Edge probability");
  g->add_option("--rate", gen.rate, "Exponential rate of edge costs");
  g->add_option("--seed", gen.seed, "Base seed");
  g->add_option("--out", gen.out, "Output file (default stdout)");

  SolveOpts sol;
  auto* s = app.add_subcommand("solve", "Solve a graph file exactly");
  s->add_option("file", sol.file, "Edge-list graph file")->required()->check(CLI::ExistingFile);
  s->add_option("--mode", sol.mode, "assignment | sequence | general")
      ->check(CLI::IsMember({"assignment", "sequence", "general"}));
  s->add_option("--rmax", sol.rmax, "Largest prefix for --mode sequence");

  ExperimentOpts ex;
  auto* e = app.add_subcommand("experiment", "Run a catalog experiment");
  e->add_option("name", ex.name, "Catalog name");
  e->add_option("--config", ex.config, "JSON config, or a header/summary written earlier")
      ->check(CLI::ExistingFile);
  e->add_option("--out", ex.out, "Records file; the summary goes to <out>.summary.json");
  e->add_option("--format", ex.format, "jsonl | csv");
  e->add_option("--model", ex.model, "complete_bipartite | gnnp | complete | gnp");
  e->add_option("--n", ex.n, "Size, or comma-separated sizes")->delimiter(',');
  e->add_option("--p", ex.p, "Edge probability");
  e->add_option("--trials", ex.trials, "Trials per size");
  e->add_option("--seed", ex.seed, "Base seed (default RMATCH_SEED or 1)");
  e->add_option("--threads", ex.threads, "Worker threads, 0 = auto");
  e->add_option("--r", ex.r, "Prefix size (pnr, membership, diameter)");
  e->add_option("--lambda", ex.lambda, "Special-vertex edge rate (pnr)");
  e->add_option("--epsilon", ex.epsilon, "Comma-separated tail levels (concentration)")
      ->delimiter(',');
  e->add_option("--mu-constant", ex.mu_constant, "Truncation cap constant (concentration)");
  e->add_option("--max-edge-constant", ex.max_edge_constant, "Threshold constant (maxedge)");
  e->add_option("--pairs", ex.pairs, "Sampled pairs per trial (diameter)");
  e->add_option("--k", ex.k, "Out-degree truncation (diameter)");

  PlotOpts plot;
  auto* pl = app.add_subcommand("plotdata", "Tidy CSV tables from summary files");
  pl->add_option("kind", plot.kind, "convergence | increments | concentration")->required();
  pl->add_option("inputs", plot.inputs, "Summary JSON files")->check(CLI::ExistingFile);
  pl->add_option("--out", plot.out, "Output file (default stdout)");

  DiagnoseOpts diag;
  auto* d = app.add_subcommand("diagnose", "Alternating-digraph diameter and max-edge probe");
  d->add_option("file", diag.file, "Edge-list graph file")->required()->check(CLI::ExistingFile);
  d->add_option("--r", diag.r, "Matched prefix (bipartite)");
  d->add_option("--k", diag.k, "Out-degree truncation");
  d->add_option("--pairs", diag.pairs, "Sampled pairs");
  d->add_option("--seed", diag.seed, "Seed for pair sampling and orientation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*e) return cmd_experiment(ex);
    if (*pl) return cmd_plotdata(plot);
    if (*d) return cmd_diagnose(diag);
  } catch (const ParseError& err) {
    std::cerr << "parse error: " << err.what() << '\n';
    return kParse;
  } catch (const NoPerfectMatching& err) {
    std::cerr << "infeasible: NoPerfectMatching: " << err.what() << '\n';
    return kInfeasible;
  } catch (const NoMatching& err) {
    std::cerr << "infeasible: NoMatching: " << err.what() << '\n';
    return kInfeasible;
  } catch (const InvalidArgument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const OddVertexCount& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
