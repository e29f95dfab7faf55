#include "rmatch/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rmatch/error.hpp"
#include "rmatch/theory.hpp"

namespace rmatch {
namespace {

constexpr std::string_view kNames[] = {"theorem1",   "theorem2",   "parisi",
                                       "pnr",        "increments", "membership",
                                       "concentration", "maxedge", "diameter"};

double diameter_default_p() {
  const double l = std::log(300.0);
  return 3.0 * l * l / 300.0;
}

json base_entry(std::string_view name, std::string_view model, json n, double p,
                std::size_t trials) {
  return {{"experiment", name}, {"model", model}, {"n", std::move(n)}, {"p", p},
          {"trials", trials},   {"seed", 1},      {"threads", 0},      {"format", "jsonl"}};
}

Quantity quantity_of(std::string_view name) {
  if (name == "theorem1" || name == "theorem2" || name == "parisi") return Quantity::perfect_cost;
  if (name == "pnr") return Quantity::pnr;
  if (name == "increments") return Quantity::cost_sequence;
  if (name == "membership") return Quantity::membership;
  if (name == "concentration") return Quantity::concentration;
  if (name == "maxedge") return Quantity::max_edge;
  return Quantity::diameter;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  if (a.is_null() || b.is_null()) return true;  // nullable keys
  return a.type() == b.type();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.7g", x);
  return buf;
}

// Theory value for p * mean cost.
double scaled_theory(const ModelSpec& m) {
  switch (m.model) {
    case Model::complete_bipartite: return theory::parisi_sum(static_cast<std::size_t>(m.n));
    case Model::gnnp: return theory::kZeta2;
    case Model::complete:
    case Model::gnp: return theory::kHalfZeta2;
  }
  return 0.0;
}

void analyze_perfect(const json& cfg, CatalogRun& run) {
  json rows = json::array();
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    const ModelSpec m = run.specs[i].model.normalized();
    const Summary& s = run.results[i].summary;
    const double target = scaled_theory(m);
    const double scaled = m.p * s.mean;
    const double scaled_se = m.p * s.standard_error;
    const double rel = std::abs(scaled - target) / target;
    const double z = scaled_se > 0 ? (scaled - target) / scaled_se : 0.0;
    rows.push_back({{"n", m.n},
                    {"p", m.p},
                    {"mean", s.mean},
                    {"standard_error", s.standard_error},
                    {"scaled_mean", scaled},
                    {"scaled_standard_error", scaled_se},
                    {"theory_scaled", target},
                    {"relative_deviation", rel},
                    {"z", z},
                    {"trials_ok", s.trials_ok},
                    {"trials_infeasible", s.trials_infeasible}});
    run.report.push_back(std::string(cfg["experiment"].get<std::string>()) + " n=" +
                         std::to_string(m.n) + ": p*mean " + fmt(scaled) + " +- " +
                         fmt(scaled_se) + ", theory " + fmt(target) + ", relative deviation " +
                         fmt(rel) + ", z " + fmt(z));
  }
  json checks = json::object();
  if (cfg.contains("tolerance")) {
    const double tol = cfg["tolerance"].get<double>();
    checks["within_tolerance"] = rows.back()["relative_deviation"].get<double>() <= tol;
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      monotone = monotone && rows[i]["relative_deviation"].get<double>() <=
                                 rows[i - 1]["relative_deviation"].get<double>();
    }
    checks["deviation_non_increasing"] = monotone;
  } else {
    bool within = true;
    for (const auto& r : rows) within = within && std::abs(r["z"].get<double>()) <= 3.0;
    checks["within_3se"] = within;
  }
  run.analysis = {{"convergence", rows}, {"checks", checks}};
}

void analyze_increments(CatalogRun& run) {
  json per_n = json::array();
  bool all_rows = true, telescoped = true, exact = true;
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    const auto prof = summarize_increments(run.specs[i], run.results[i].records);
    json rows = json::array();
    for (const auto& row : prof.rows) {
      rows.push_back({{"r", row.r},
                      {"empirical", row.empirical},
                      {"standard_error", row.standard_error},
                      {"theory", row.theory},
                      {"z", row.z},
                      {"trials", row.trials}});
      all_rows = all_rows && std::abs(row.z) <= 3.0;
    }
    const double total_theory = *theory_value(run.specs[i]);
    const bool tel = std::abs(prof.sum_of_increment_means - total_theory) <=
                     3.0 * prof.total_standard_error;
    telescoped = telescoped && tel;
    exact = exact && prof.max_telescoping_error <= 1e-9;
    per_n.push_back({{"n", prof.n},
                     {"p", prof.p},
                     {"rows", rows},
                     {"total_mean", prof.total_mean},
                     {"total_standard_error", prof.total_standard_error},
                     {"sum_of_increment_means", prof.sum_of_increment_means},
                     {"total_theory", total_theory},
                     {"max_telescoping_error", prof.max_telescoping_error}});
    run.report.push_back("increments n=" + std::to_string(prof.n) + ": sum of means " +
                         fmt(prof.sum_of_increment_means) + " +- " +
                         fmt(prof.total_standard_error) + ", theory " + fmt(total_theory));
    for (const auto& row : prof.rows) {
      run.report.push_back("  r=" + std::to_string(row.r) + ": " + fmt(row.empirical) + " +- " +
                           fmt(row.standard_error) + ", theory " + fmt(row.theory) + ", z " +
                           fmt(row.z));
    }
  }
  run.analysis = {{"increments", per_n},
                  {"checks",
                   {{"all_within_3se", all_rows},
                    {"telescoped_within_3se", telescoped},
                    {"telescoping_exact", exact}}}};
}

void analyze_pnr(CatalogRun& run) {
  json rows = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    const auto est = summarize_pnr(run.specs[i], run.results[i].records);
    const double allowance = std::max(3.0 * est.standard_error, 0.02 * est.theory);
    const bool within = std::abs(est.estimate - est.theory) <= allowance;
    ok = ok && within;
    rows.push_back({{"n", est.n},
                    {"r", est.r},
                    {"p", est.p},
                    {"lambda", est.lambda},
                    {"trials", est.trials},
                    {"infeasible", est.infeasible},
                    {"hits", est.hits},
                    {"estimate", est.estimate},
                    {"standard_error", est.standard_error},
                    {"theory", est.theory},
                    {"theory_finite_lambda", est.theory_finite_lambda},
                    {"allowance", allowance},
                    {"bias_note", est.bias_note}});
    run.report.push_back("pnr n=" + std::to_string(est.n) + " r=" + std::to_string(est.r) +
                         ": estimate " + fmt(est.estimate) + " +- " + fmt(est.standard_error) +
                         ", theory " + fmt(est.theory) + " (finite lambda " +
                         fmt(est.theory_finite_lambda) + ")");
  }
  run.analysis = {{"pnr", rows}, {"checks", {{"within_allowance", ok}}}};
}

void analyze_membership(CatalogRun& run) {
  json rows = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    const auto res = summarize_membership(run.specs[i], run.results[i].records);
    ok = ok && res.p_value >= 1e-3;
    rows.push_back({{"n", res.n},
                    {"r", res.r},
                    {"trials", res.trials},
                    {"frequencies", res.frequencies},
                    {"standard_errors", res.standard_errors},
                    {"expected", res.n ? static_cast<double>(res.r) / static_cast<double>(res.n) : 0.0},
                    {"chi_square", res.chi_square},
                    {"degrees_of_freedom", res.degrees_of_freedom},
                    {"p_value", res.p_value}});
    run.report.push_back("membership n=" + std::to_string(res.n) + " r=" +
                         std::to_string(res.r) + ": chi-square " + fmt(res.chi_square) +
                         " on " + fmt(res.degrees_of_freedom) + " df, p-value " +
                         fmt(res.p_value));
  }
  run.analysis = {{"membership", rows}, {"checks", {{"uniform_at_0.001", ok}}}};
}

void analyze_concentration(const json& cfg, CatalogRun& run) {
  const auto eps = cfg["epsilon"].get<std::vector<double>>();
  const double trend_eps = cfg["trend_epsilon"].get<double>();
  const double trunc_tol = cfg["truncation_tolerance"].get<double>();
  json tables = json::array();
  std::vector<double> trend;
  bool trunc_ok = true;
  std::vector<double> probe = eps;
  probe.push_back(trend_eps);
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    const auto t = summarize_concentration(run.specs[i], run.results[i].records, probe);
    json rows = json::array();
    for (std::size_t k = 0; k < eps.size(); ++k) {
      rows.push_back({{"epsilon", t.rows[k].epsilon},
                      {"exceedance", t.rows[k].exceedance},
                      {"exceedance_truncated", t.rows[k].exceedance_truncated}});
    }
    trend.push_back(t.rows.back().exceedance);
    trunc_ok = trunc_ok && t.truncation_changed_fraction <= trunc_tol;
    tables.push_back({{"n", t.n},
                      {"p", t.p},
                      {"center", t.center},
                      {"mu", t.mu},
                      {"trials", t.trials},
                      {"infeasible", t.infeasible},
                      {"rows", rows},
                      {"trend_exceedance", t.rows.back().exceedance},
                      {"truncation_changed_fraction", t.truncation_changed_fraction}});
    run.report.push_back("concentration n=" + std::to_string(t.n) + ": exceedance at eps " +
                         fmt(trend_eps) + " = " + fmt(t.rows.back().exceedance) +
                         ", truncation changed " + fmt(t.truncation_changed_fraction));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < trend.size(); ++i) monotone = monotone && trend[i] <= trend[i - 1];
  run.analysis = {{"concentration", tables},
                  {"checks",
                   {{"exceedance_non_increasing", monotone}, {"truncation_rare", trunc_ok}}}};
}

void analyze_maxedge(const json& cfg, CatalogRun& run) {
  const double min_fraction = cfg["min_fraction"].get<double>();
  json rows = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    std::size_t within = 0, counted = 0;
    double worst = 0.0, threshold = 0.0;
    for (const auto& rec : run.results[i].records) {
      if (rec.outcome != Outcome::ok) continue;
      ++counted;
      threshold = rec.scalars.at("threshold");
      within += rec.scalars.at("within_threshold") != 0.0;
      worst = std::max(worst, rec.scalars.at("max_edge") / threshold);
    }
    const double frac = counted ? static_cast<double>(within) / static_cast<double>(counted) : 0.0;
    ok = ok && frac >= min_fraction;
    rows.push_back({{"n", run.specs[i].model.n},
                    {"threshold", threshold},
                    {"trials_ok", counted},
                    {"within", within},
                    {"fraction_within", frac},
                    {"worst_ratio", worst},
                    {"mean_max_edge", run.results[i].summary.mean}});
    run.report.push_back("maxedge n=" + std::to_string(run.specs[i].model.n) + ": " +
                         std::to_string(within) + "/" + std::to_string(counted) +
                         " within " + fmt(threshold) + ", worst ratio " + fmt(worst));
  }
  run.analysis = {{"maxedge", rows}, {"checks", {{"fraction_within", ok}}}};
}

void analyze_diameter(const json& cfg, CatalogRun& run) {
  const double min_fraction = cfg["min_fraction"].get<double>();
  json out = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    json trials = json::array();
    std::size_t within = 0, counted = 0, within_free = 0;
    double k0 = 0.0, r = 0.0;
    for (const auto& rec : run.results[i].records) {
      if (rec.outcome != Outcome::ok) continue;
      ++counted;
      const auto& s = rec.scalars;
      k0 = s.at("k0");
      within += s.at("within_k0") != 0.0;
      json row = {{"trial_index", rec.trial_index},
                  {"max_hops", s.at("max_hops")},
                  {"unreachable", s.at("unreachable")}};
      if (auto it = s.find("r"); it != s.end()) {
        r = it->second;
        row["max_hops_free"] = s.at("max_hops_free");
        row["unreachable_free"] = s.at("unreachable_free");
        within_free += s.at("unreachable_free") == 0.0 && s.at("max_hops_free") <= k0;
      }
      trials.push_back(std::move(row));
    }
    const double frac = counted ? static_cast<double>(within) / static_cast<double>(counted) : 0.0;
    ok = ok && frac >= min_fraction;
    json entry = {{"n", run.specs[i].model.n},
                  {"p", run.specs[i].model.p},
                  {"k0", k0},
                  {"trials_ok", counted},
                  {"within", within},
                  {"fraction_within", frac},
                  {"trials", trials}};
    if (r > 0) {
      entry["r"] = r;
      entry["within_free"] = within_free;
    }
    out.push_back(std::move(entry));
    run.report.push_back("diameter n=" + std::to_string(run.specs[i].model.n) + ": " +
                         std::to_string(within) + "/" + std::to_string(counted) +
                         " trials with every sampled pair within " + fmt(k0) + " hops");
  }
  run.analysis = {{"diameter", out}, {"checks", {{"fraction_within", ok}}}};
}

}  // namespace

std::span<const std::string_view> catalog_names() { return kNames; }

json catalog_defaults(std::string_view name) {
  if (name == "parisi") return base_entry(name, "complete_bipartite", json::array({10}), 1.0, 20000);
  if (name == "theorem1") {
    json j = base_entry(name, "gnnp", json::array({100, 400}), 0.25, 200);
    j["tolerance"] = 0.10;
    return j;
  }
  if (name == "theorem2") {
    json j = base_entry(name, "gnp", json::array({400}), 0.25, 200);
    j["tolerance"] = 0.10;
    return j;
  }
  if (name == "increments") return base_entry(name, "complete_bipartite", json::array({10}), 1.0, 20000);
  if (name == "pnr") {
    json j = base_entry(name, "complete_bipartite", json::array({20}), 1.0, 1000000);
    j["r"] = 10;
    j["lambda"] = 0.01;
    return j;
  }
  if (name == "membership") {
    json j = base_entry(name, "complete_bipartite", json::array({6}), 1.0, 10000);
    j["r"] = 3;
    return j;
  }
  if (name == "concentration") {
    json j = base_entry(name, "gnnp", json::array({100, 200, 400}), 0.25, 300);
    j["epsilon"] = {0.0, 0.1, 0.2, 0.3, 0.5, 1.0};
    j["trend_epsilon"] = 0.3;
    j["mu_constant"] = 20.0;
    j["truncation_tolerance"] = 0.01;
    return j;
  }
  if (name == "maxedge") {
    json j = base_entry(name, "gnnp", json::array({400}), 0.25, 100);
    j["max_edge_constant"] = 20.0;
    j["min_fraction"] = 0.99;
    return j;
  }
  if (name == "diameter") {
    json j = base_entry(name, "gnnp", json::array({300}), diameter_default_p(), 20);
    j["r"] = nullptr;
    j["pairs"] = 50;
    j["k"] = 40;
    j["min_fraction"] = 0.95;
    return j;
  }
  throw InvalidArgument("unknown experiment '" + std::string(name) + "'");
}

json merge_config(json base, const json& overrides) {
  if (!overrides.is_object()) throw ParseError(0, "config must be a JSON object");
  const std::string name = base.at("experiment").get<std::string>();
  for (const auto& [key, value] : overrides.items()) {
    if (!base.contains(key)) {
      throw ParseError(0, "unknown key '" + key + "' for experiment " + name);
    }
    if (key == "experiment") {
      if (value != base[key]) throw ParseError(0, "config names a different experiment");
      continue;
    }
    json v = value;
    if (key == "n" && v.is_number()) v = json::array({v});
    if (!same_kind(base[key], v)) throw ParseError(0, "wrong type for key '" + key + "'");
    if (key == "n" || key == "epsilon") {
      if (v.empty()) throw ParseError(0, "'" + key + "' must be non-empty");
      for (const auto& x : v) {
        if (!x.is_number()) throw ParseError(0, "'" + key + "' must hold numbers");
        if (key == "n" && !x.is_number_integer()) {
          throw ParseError(0, "'n' must hold integers");
        }
      }
    }
    base[key] = std::move(v);
  }
  return base;
}

json resolve_config(const json& doc) {
  if (!doc.is_object() || !doc.contains("experiment") || !doc["experiment"].is_string()) {
    throw ParseError(0, "config needs a string 'experiment' key");
  }
  json base;
  try {
    base = catalog_defaults(doc["experiment"].get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ParseError(0, e.what());
  }
  return merge_config(std::move(base), doc);
}

std::vector<ExperimentSpec> catalog_specs(const json& cfg) {
  const std::string name = cfg.at("experiment").get<std::string>();
  const std::string format = cfg.at("format").get<std::string>();
  if (format != "jsonl" && format != "csv") throw InvalidArgument("format must be jsonl or csv");
  auto nonneg = [&](const char* key) {
    if (cfg.at(key).is_number_integer() && cfg.at(key).get<long long>() < 0) {
      throw InvalidArgument(std::string(key) + " must be non-negative");
    }
  };
  nonneg("trials");
  nonneg("threads");
  if (!cfg.at("seed").is_number_integer()) throw InvalidArgument("seed must be an integer");
  std::vector<ExperimentSpec> specs;
  for (const auto& nj : cfg.at("n")) {
    if (nj.get<long long>() < 1 || nj.get<long long>() > 1000000) {
      throw InvalidArgument("n must lie in [1, 10^6]");
    }
    ExperimentSpec spec;
    spec.name = name;
    spec.model.model = parse_model(cfg.at("model").get<std::string>());
    spec.model.n = nj.get<Vertex>();
    spec.model.p = cfg.at("p").get<double>();
    spec.trials = cfg.at("trials").get<std::size_t>();
    spec.base_seed = cfg.at("seed").get<std::uint64_t>();
    spec.quantity = quantity_of(name);
    spec.threads = cfg.at("threads").get<std::size_t>();
    auto& pr = spec.params;
    if (cfg.contains("r") && !cfg["r"].is_null()) {
      if (cfg["r"].get<long long>() < 0) throw InvalidArgument("r must be non-negative");
      pr.r = cfg["r"].get<std::size_t>();
    }
    if (cfg.contains("lambda")) pr.lambda = cfg["lambda"].get<double>();
    if (cfg.contains("mu_constant")) pr.mu_constant = cfg["mu_constant"].get<double>();
    if (cfg.contains("max_edge_constant")) {
      pr.max_edge_constant = cfg["max_edge_constant"].get<double>();
    }
    if (cfg.contains("pairs")) {
      if (cfg["pairs"].get<long long>() < 1) throw InvalidArgument("pairs must be >= 1");
      pr.pair_samples = cfg["pairs"].get<std::size_t>();
    }
    if (cfg.contains("k")) {
      if (cfg["k"].get<long long>() < 1) throw InvalidArgument("k must be >= 1");
      pr.k = cfg["k"].get<std::size_t>();
    }
    spec.validate();
    specs.push_back(std::move(spec));
  }
  return specs;
}

CatalogRun run_catalog(const json& config) {
  CatalogRun run;
  run.config = config;
  run.specs = catalog_specs(config);
  for (const auto& spec : run.specs) run.results.push_back(run_experiment(spec));
  const std::string name = config["experiment"].get<std::string>();
  switch (quantity_of(name)) {
    case Quantity::perfect_cost: analyze_perfect(config, run); break;
    case Quantity::cost_sequence: analyze_increments(run); break;
    case Quantity::pnr: analyze_pnr(run); break;
    case Quantity::membership: analyze_membership(run); break;
    case Quantity::concentration: analyze_concentration(config, run); break;
    case Quantity::max_edge: analyze_maxedge(config, run); break;
    case Quantity::diameter: analyze_diameter(config, run); break;
  }
  return run;
}

json summary_document(const CatalogRun& run, const std::string& created_at) {
  json runs = json::array();
  for (std::size_t i = 0; i < run.specs.size(); ++i) {
    runs.push_back({{"n", run.specs[i].model.n},
                    {"quantity", to_string(run.specs[i].quantity)},
                    {"primary_scalar", primary_scalar(run.specs[i].quantity)},
                    {"summary", to_json(run.results[i].summary)}});
  }
  return {{"record", "summary"},    {"artifact", kArtifactName},
          {"version", kArtifactVersion}, {"config", run.config},
          {"created_at", created_at}, {"runs", runs},
          {"analysis", run.analysis}};
}

}  // namespace rmatch
