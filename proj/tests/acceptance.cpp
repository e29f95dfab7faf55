// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Catalog-backed criteria go through the rmatch CLI and re-derive
// their verdict from the written summary document.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "rmatch/bipartite.hpp"
#include "rmatch/blossom.hpp"
#include "rmatch/error.hpp"
#include "rmatch/rng.hpp"
#include "rmatch/stats.hpp"
#include "rmatch/theory.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rmatch;
using nlohmann::json;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.7g", x);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("rmatch_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs `rmatch experiment <name> [extra]` and returns its summary document.
json run_catalog_entry(const std::string& name, const std::string& extra = "") {
  const auto out = work_dir() / (name + ".jsonl");
  const auto log = work_dir() / (name + ".log");
  const std::string cmd = std::string(RMATCH_CLI) + " experiment " + name + " " + extra +
                          " --out " + out.string() + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::ifstream in(log);
    std::stringstream buf;
    buf << in.rdbuf();
    throw Error("rmatch experiment " + name + " failed: " + buf.str());
  }
  std::ifstream in(out.string() + ".summary.json");
  return json::parse(in);
}

// ------------------------------------------------------------ library criteria

Verdict oracle_bipartite() {
  std::size_t checked = 0, infeasible = 0, mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    RngStream rng = derive_stream(20261, "acceptance-bipartite", static_cast<std::uint64_t>(i));
    const auto n = static_cast<Vertex>(2 + i % 6);
    const bool complete = (i / 6) % 2 == 0;
    const double p = complete ? 1.0 : ((i / 12) % 2 == 0 ? 0.5 : 1.0);
    const auto g = generate_bipartite(
        {complete ? Model::complete_bipartite : Model::gnnp, n, p}, rng);
    const auto nn = static_cast<std::size_t>(n);

    std::size_t feasible = nn;
    for (std::size_t r = 1; r <= nn; ++r) {
      try {
        brute_force_bipartite(g, r);
      } catch (const NoMatching&) {
        feasible = r - 1;
        break;
      }
    }
    try {
      const auto seq = solve_sequence(g, nn);
      if (feasible != nn) ++mismatches;
      for (std::size_t r = 1; r <= nn; ++r) {
        if (std::abs(seq.cost(r) - brute_force_bipartite(g, r).cost) > 1e-9) ++mismatches;
      }
    } catch (const NoMatching& e) {
      if (e.r() != feasible + 1) ++mismatches;
      if (feasible > 0) {
        const auto seq = solve_sequence(g, feasible);
        for (std::size_t r = 1; r <= feasible; ++r) {
          if (std::abs(seq.cost(r) - brute_force_bipartite(g, r).cost) > 1e-9) ++mismatches;
        }
      }
    }
    try {
      const double c = solve_assignment(g).cost;
      if (feasible != nn || std::abs(c - brute_force_bipartite(g, nn).cost) > 1e-9) ++mismatches;
    } catch (const NoPerfectMatching&) {
      if (feasible == nn) ++mismatches;
    }
    infeasible += feasible != nn;
    ++checked;
  }
  return {mismatches == 0, std::to_string(checked) + " instances, " + std::to_string(infeasible) +
                               " infeasible, " + std::to_string(mismatches) + " mismatches"};
}

Verdict oracle_general() {
  const Vertex sizes[] = {4, 6, 8, 10};
  const double probs[] = {0.5, 0.9};
  std::size_t infeasible = 0, mismatches = 0, bad_certificates = 0;
  for (int i = 0; i < 500; ++i) {
    RngStream rng = derive_stream(20262, "acceptance-general", static_cast<std::uint64_t>(i));
    const auto g = generate_general({Model::gnp, sizes[i % 4], probs[(i / 4) % 2]}, rng);
    bool oracle_feasible = true;
    double expected = 0.0;
    try {
      expected = brute_force_general(g).cost;
    } catch (const NoPerfectMatching&) {
      oracle_feasible = false;
    }
    try {
      const auto res = solve_perfect_matching(g);
      if (!oracle_feasible || std::abs(res.matching.cost - expected) > 1e-9) ++mismatches;
      if (!verify_certificate(g, res.matching, res.certificate)) ++bad_certificates;
    } catch (const NoPerfectMatching&) {
      if (oracle_feasible) ++mismatches;
      ++infeasible;
    }
  }
  return {mismatches == 0 && bad_certificates == 0,
          "500 instances, " + std::to_string(infeasible) + " infeasible, " +
              std::to_string(mismatches) + " mismatches, " + std::to_string(bad_certificates) +
              " failed certificates"};
}

Verdict numeric_limits() {
  const std::size_t n = 1000000;
  const double ds = theory::double_sum(n, theory::default_cutoff(n));
  const double ds_rel = std::abs(ds - theory::kZeta2) / theory::kZeta2;
  const double integral = theory::mlim_integral(1e-8);
  const double integral_err = std::abs(integral - M_PI * M_PI / 12.0);
  double worst_ratio = 0.0;
  for (std::size_t k = 10; k <= 10000; ++k) {
    const double x = static_cast<double>(k);
    worst_ratio = std::max(
        worst_ratio, std::abs(theory::harmonic(k) - theory::harmonic_asymptotic(k)) * x * x);
  }
  const bool pass = ds_rel <= 0.03 && integral_err <= 1e-8 && worst_ratio <= 1.0;
  return {pass, "double sum " + num(ds) + " (relative gap " + num(ds_rel) + "), integral error " +
                    num(integral_err) + ", max n^2 |H_n - asymptotic| " + num(worst_ratio)};
}

// ------------------------------------------------------------ catalog criteria

Verdict parisi_exact() {
  const auto doc = run_catalog_entry("parisi", "--n 10 --trials 20000 --seed 1");
  const auto& s = doc["runs"][0]["summary"];
  const double mean = s["mean"], se = s["standard_error"];
  const double target = 1.5497677311665408;
  const bool pass = s["trials_ok"] == 20000 && std::abs(mean - target) <= 3 * se;
  return {pass, "mean " + num(mean) + " +- " + num(se) + " vs " + num(target)};
}

Verdict limit_check(const std::string& name, std::size_t n_small, bool need_monotone,
                    double target) {
  const auto doc = run_catalog_entry(name);
  const auto& rows = doc["analysis"]["convergence"];
  const auto& last = rows.back();
  const double p = last["p"], scaled = p * last["mean"].get<double>();
  const double rel = std::abs(scaled - target) / target;
  bool pass = last["n"] == 400 && p == 0.25 && last["trials_ok"].get<std::size_t>() +
                                                      last["trials_infeasible"].get<std::size_t>() ==
                                                  200;
  pass = pass && rel <= 0.10;
  std::string detail = "n=400 p*mean " + num(scaled) + ", relative deviation " + num(rel);
  if (need_monotone) {
    const auto& first = rows.front();
    const double rel_small =
        std::abs(first["p"].get<double>() * first["mean"].get<double>() - target) / target;
    pass = pass && first["n"] == n_small && rel <= rel_small;
    detail += "; n=" + std::to_string(n_small) + " relative deviation " + num(rel_small);
  }
  return {pass, detail};
}

Verdict increment_law() {
  const auto doc = run_catalog_entry("increments", "--n 10 --trials 20000");
  const auto& block = doc["analysis"]["increments"][0];
  bool pass = block["rows"].size() == 10;
  double worst_z = 0.0;
  for (const auto& row : block["rows"]) {
    const std::size_t r = row["r"];
    const double theory = theory::expected_increment(10, r, 1.0);
    const double emp = row["empirical"], se = row["standard_error"];
    worst_z = std::max(worst_z, std::abs(emp - theory) / se);
    pass = pass && std::abs(emp - theory) <= 3 * se && row["trials"] == 20000;
  }
  const double sum = block["sum_of_increment_means"], total_se = block["total_standard_error"];
  const bool telescoped = std::abs(sum - 1.5497677311665408) <= 3 * total_se &&
                          block["max_telescoping_error"].get<double>() <= 1e-9;
  return {pass && telescoped, "max |z| " + num(worst_z) + ", telescoped sum " + num(sum) +
                                  " +- " + num(total_se)};
}

Verdict pnr_probe() {
  const auto doc = run_catalog_entry("pnr", "--n 20 --r 10 --lambda 0.01 --trials 1000000");
  const auto& row = doc["analysis"]["pnr"][0];
  const double est = row["estimate"], se = row["standard_error"];
  const double target = 0.6687714031754279;
  const double allowance = std::max(3 * se, 0.02 * target);
  const bool pass = row["trials"] == 1000000 && std::abs(est - target) <= allowance;
  return {pass, "estimate " + num(est) + " +- " + num(se) + ", allowance " + num(allowance)};
}

Verdict subset_uniformity() {
  const auto doc = run_catalog_entry("membership", "--n 6 --r 3 --trials 10000");
  const auto& row = doc["analysis"]["membership"][0];
  const double trials = row["trials"].get<double>();
  const double expected = trials * 0.5;
  double pearson = 0.0;
  for (const auto& f : row["frequencies"]) {
    const double c = f.get<double>() * trials;
    pearson += (c - expected) * (c - expected) / expected;
  }
  // Counts of a uniform r-subset are negatively correlated; (n-1)/(n-r)
  // rescales the Pearson sum to chi-square with n-1 degrees of freedom.
  const double stat = pearson * 5.0 / 3.0;
  const double pv = chi_square_sf(stat, 5.0);
  const bool pass = trials == 10000 && pv >= 1e-3;
  return {pass, "chi-square " + num(stat) + " on 5 df, p-value " + num(pv)};
}

Verdict alternating_diameter() {
  const auto doc = run_catalog_entry("diameter");
  const auto& cfg = doc["config"];
  const auto& entry = doc["analysis"]["diameter"][0];
  const double n = 300.0, logn = std::log(n);
  const double expected_r = n - std::floor(n / (logn * logn));
  const double np = cfg["p"].get<double>() * n;
  std::size_t within = 0, counted = 0;
  for (const auto& t : entry["trials"]) {
    ++counted;
    within += t["unreachable"] == 0 && t["max_hops"].get<double>() <= 13.0;
  }
  const bool setup = entry["n"] == 300 && entry["k0"] == 13 && entry["r"] == expected_r &&
                     std::abs(np - 3 * logn * logn) <= 1e-9 && cfg["pairs"] == 50 &&
                     cfg["trials"] == 20 && counted == 20;
  const double frac = counted ? static_cast<double>(within) / static_cast<double>(counted) : 0.0;
  return {setup && frac >= 0.95, std::to_string(within) + "/" + std::to_string(counted) +
                                     " seeds within 13 hops at r=" + num(expected_r)};
}

Verdict max_edge() {
  const auto doc = run_catalog_entry("maxedge");
  const auto& row = doc["analysis"]["maxedge"][0];
  const double threshold = 20.0 * std::log(400.0) / 100.0;
  const std::size_t within = row["within"];
  const bool pass = row["n"] == 400 && std::abs(row["threshold"].get<double>() - threshold) < 1e-12 &&
                    row["trials_ok"] == 100 && within >= 99;
  return {pass, std::to_string(within) + "/100 seeds with max edge <= " + num(threshold) +
                    ", worst ratio " + num(row["worst_ratio"])};
}

Verdict concentration_trend() {
  const auto doc = run_catalog_entry("concentration");
  const auto& tables = doc["analysis"]["concentration"];
  bool pass = tables.size() == 3 && doc["config"]["trend_epsilon"] == 0.3;
  std::string detail;
  double prev = 2.0;
  const std::size_t sizes[] = {100, 200, 400};
  for (std::size_t i = 0; i < tables.size() && i < 3; ++i) {
    const auto& t = tables[i];
    const double n = static_cast<double>(sizes[i]);
    const double mu = 20.0 * std::log(n) / (n * t["p"].get<double>());
    const double e = t["trend_exceedance"], changed = t["truncation_changed_fraction"];
    pass = pass && t["n"] == sizes[i] && t["trials"].get<std::size_t>() +
                                                 t["infeasible"].get<std::size_t>() ==
                                             300;
    pass = pass && std::abs(t["mu"].get<double>() - mu) <= 1e-12 * mu;
    pass = pass && e <= prev && changed <= 0.01;
    prev = e;
    detail += (i ? "; " : "") + std::string("n=") + std::to_string(sizes[i]) + " exceedance " +
              num(e) + ", truncation changed " + num(changed);
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* label;
  double limit_seconds;  // 0: no runtime bound
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "bipartite oracle equivalence", 60, oracle_bipartite},
      {2, "general oracle equivalence", 120, oracle_general},
      {3, "complete bipartite mean at n=10", 60, parisi_exact},
      {4, "bipartite random-graph limit", 600,
       [] { return limit_check("theorem1", 100, true, theory::kZeta2); }},
      {5, "general random-graph limit", 900,
       [] { return limit_check("theorem2", 0, false, theory::kHalfZeta2); }},
      {6, "increment law", 0, increment_law},
      {7, "special-vertex probe", 600, pnr_probe},
      {8, "matched-subset uniformity", 0, subset_uniformity},
      {9, "numeric limits", 30, numeric_limits},
      {10, "alternating hop diameter", 600, alternating_diameter},
      {11, "maximum matching edge", 0, max_edge},
      {12, "concentration trend", 0, concentration_trend},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = num(secs) + " s";
    if (c.limit_seconds > 0) {
      timing += " (limit " + num(c.limit_seconds) + " s)";
      if (secs >= c.limit_seconds) v.pass = false;
    }
    std::printf("criterion %2d %-32s %s  %s; %s\n", c.id, c.label, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  fs::remove_all(work_dir());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
