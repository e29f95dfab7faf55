#include "rmatch/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "rmatch/bipartite.hpp"
#include "rmatch/blossom.hpp"
#include "rmatch/diagnostics.hpp"
#include "rmatch/error.hpp"
#include "rmatch/theory.hpp"

namespace rmatch {
namespace {

constexpr std::string_view kQuantityNames[] = {
    "perfect_cost", "cost_sequence", "pnr", "membership", "concentration", "max_edge",
    "diameter"};

std::string key(std::string_view prefix, std::size_t i) {
  return std::string(prefix) + std::to_string(i);
}

double log_n_over_np(const ModelSpec& m) {
  const double n = m.n;
  return std::log(n) / (n * m.p);
}

Matching solve_perfect(const Graph& g) {
  if (const auto* b = std::get_if<BipartiteWeightedGraph>(&g)) return solve_assignment(*b);
  return solve_perfect_matching(std::get<WeightedGraph>(g)).matching;
}

Matching solve_perfect_truncated(const Graph& g, double cap) {
  if (const auto* b = std::get_if<BipartiteWeightedGraph>(&g)) {
    return solve_assignment(b->truncated(cap));
  }
  return solve_perfect_matching(std::get<WeightedGraph>(g).truncated(cap)).matching;
}

std::span<const WeightedEdge> edges_of(const Graph& g) {
  return std::visit([](const auto& x) { return x.edges(); }, g);
}

double center_for(const ModelSpec& m) {
  return is_bipartite(m.model) ? theory::kZeta2 : theory::kHalfZeta2;
}

void fill_trial(const ExperimentSpec& spec, RngStream& graph_rng, std::uint64_t stream_id,
                TrialRecord& rec) {
  const ModelSpec model = spec.model.normalized();
  const auto n = static_cast<std::size_t>(model.n);
  auto& s = rec.scalars;

  switch (spec.quantity) {
    case Quantity::perfect_cost:
    case Quantity::max_edge: {
      const Graph g = generate(model, graph_rng);
      const Matching m = solve_perfect(g);
      s["cost"] = m.cost;
      s["scaled_cost"] = model.p * m.cost;
      const double max_edge = m.empty() ? 0.0 : max_matching_edge_cost(edges_of(g), m);
      s["max_edge"] = max_edge;
      if (spec.quantity == Quantity::max_edge) {
        const double threshold = spec.params.max_edge_constant * log_n_over_np(model);
        s["threshold"] = threshold;
        s["within_threshold"] = max_edge <= threshold ? 1.0 : 0.0;
      }
      return;
    }
    case Quantity::cost_sequence: {
      const auto g = generate_bipartite(model, graph_rng);
      const std::size_t r_max = spec.params.r.value_or(n) == 0 ? n : spec.params.r.value_or(n);
      const auto seq = solve_sequence(g, r_max);
      for (std::size_t r = 1; r <= r_max; ++r) {
        s[key("C_", r)] = seq.cost(r);
        s[key("inc_", r)] = seq.increments[r - 1];
      }
      s["cost"] = seq.cost(r_max);
      return;
    }
    case Quantity::pnr: {
      const auto g = generate_bipartite(model, graph_rng);
      RngStream special = derive_stream(stream_id, "special", 0);
      const auto aug = augment_special_vertex(g, {spec.params.lambda}, special);
      const std::size_t r = *spec.params.r;
      const auto seq = solve_sequence(aug, r);
      bool hit = false;
      for (const auto& p : seq.final_matching.pairs) hit = hit || p.v == model.n;
      s["hit"] = hit ? 1.0 : 0.0;
      s["cost"] = seq.cost(r);
      return;
    }
    case Quantity::membership: {
      const auto g = generate_bipartite(model, graph_rng);
      const std::size_t r = *spec.params.r;
      IncrementalAssignment solver(g);
      for (std::size_t i = 0; i < r; ++i) solver.step();
      std::vector<char> in(n, 0);
      for (std::size_t u = 0; u < r; ++u) in[solver.mate_of_left(static_cast<Vertex>(u))] = 1;
      for (std::size_t v = 0; v < n; ++v) s[key("member_", v)] = in[v];
      s["cost"] = solver.cost();
      return;
    }
    case Quantity::concentration: {
      const Graph g = generate(model, graph_rng);
      const Matching m = solve_perfect(g);
      const double mu = spec.params.mu_constant * log_n_over_np(model);
      const Matching truncated = solve_perfect_truncated(g, mu);
      const double center = center_for(model);
      s["cost"] = m.cost;
      s["scaled_cost"] = model.p * m.cost;
      s["deviation"] = std::abs(model.p * m.cost - center);
      s["truncated_cost"] = truncated.cost;
      s["truncated_deviation"] = std::abs(model.p * truncated.cost - center);
      s["truncation_changed"] =
          std::abs(truncated.cost - m.cost) > 1e-9 * std::max(1.0, m.cost) ? 1.0 : 0.0;
      s["mu"] = mu;
      return;
    }
    case Quantity::diameter: {
      const Graph g = generate(model, graph_rng);
      RngStream probe = derive_stream(stream_id, "pairs", 0);
      if (const auto* b = std::get_if<BipartiteWeightedGraph>(&g)) {
        auto cfg = DiagnosticsConfig::bipartite_defaults(n);
        if (spec.params.k) cfg.k = spec.params.k;
        cfg.pair_samples = spec.params.pair_samples;
        const std::size_t r = spec.params.r.value_or(n - theory::default_cutoff(n));
        const auto seq = solve_sequence(*b, r);
        const auto d = build_alternating_digraph(*b, seq.final_matching, cfg);
        const auto pairs = sample_pairs(d, cfg.pair_samples, probe);
        const auto rep = ab_diameter(d, pairs);
        s["r"] = static_cast<double>(r);
        s["k0"] = static_cast<double>(cfg.k0);
        s["max_hops"] = rep.max_hops;
        s["unreachable"] = static_cast<double>(rep.unreachable);
        s["max_hops_free"] = rep.max_hops_to_free;
        s["unreachable_free"] = static_cast<double>(rep.unreachable_free);
        s["within_k0"] = (rep.unreachable == 0 && rep.max_hops <= static_cast<int>(cfg.k0)) ? 1.0 : 0.0;
      } else {
        const auto& wg = std::get<WeightedGraph>(g);
        auto cfg = DiagnosticsConfig::general_defaults(n);
        if (spec.params.k) cfg.k = spec.params.k;
        cfg.pair_samples = spec.params.pair_samples;
        const auto pm = solve_perfect_matching(wg);
        RngStream orient = derive_stream(stream_id, "orientation", 0);
        const auto d = build_alternating_digraph(wg, pm.matching, cfg, orient);
        const auto pairs = sample_pairs(d, cfg.pair_samples, probe);
        const auto rep = ab_diameter(d, pairs);
        s["k0"] = static_cast<double>(cfg.k0);
        s["max_hops"] = rep.max_hops;
        s["unreachable"] = static_cast<double>(rep.unreachable);
        s["within_k0"] = (rep.unreachable == 0 && rep.max_hops <= static_cast<int>(cfg.k0)) ? 1.0 : 0.0;
      }
      return;
    }
  }
}

}  // namespace

std::string_view to_string(Quantity q) { return kQuantityNames[static_cast<int>(q)]; }

Quantity parse_quantity(std::string_view name) {
  for (int i = 0; i < 7; ++i) {
    if (kQuantityNames[i] == name) return static_cast<Quantity>(i);
  }
  throw InvalidArgument("unknown quantity '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  model.normalized().validate();
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  const auto n = static_cast<std::size_t>(model.n);
  const bool bip = is_bipartite(model.model);
  switch (quantity) {
    case Quantity::cost_sequence:
      if (!bip) throw InvalidArgument("cost_sequence needs a bipartite model");
      if (params.r && *params.r > n) throw InvalidArgument("r exceeds n");
      break;
    case Quantity::pnr:
      if (!bip) throw InvalidArgument("pnr needs a bipartite model");
      if (!params.r) throw InvalidArgument("pnr needs r");
      if (*params.r > n) throw InvalidArgument("r exceeds n");
      if (!(params.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
      break;
    case Quantity::membership:
      if (!bip) throw InvalidArgument("membership needs a bipartite model");
      if (!params.r) throw InvalidArgument("membership needs r");
      if (*params.r > n) throw InvalidArgument("r exceeds n");
      break;
    case Quantity::perfect_cost:
    case Quantity::max_edge:
    case Quantity::concentration:
      if (!bip && n % 2 != 0) throw InvalidArgument("general models need even n");
      if (!(params.mu_constant > 0.0) || !(params.max_edge_constant > 0.0)) {
        throw InvalidArgument("threshold constants must be positive");
      }
      break;
    case Quantity::diameter:
      if (!bip && n % 2 != 0) throw InvalidArgument("general models need even n");
      if (bip && params.r && *params.r >= n) throw InvalidArgument("diameter needs r < n");
      if (params.pair_samples < 1) throw InvalidArgument("pair_samples must be >= 1");
      if (n < 2) throw InvalidArgument("diameter needs n >= 2");
      break;
  }
}

std::uint64_t trial_stream_id(std::uint64_t base_seed, std::uint64_t trial_index) {
  return derive_stream_id(base_seed, "trial", trial_index);
}

TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t trial_index) {
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.stream_id = trial_stream_id(spec.base_seed, trial_index);
  RngStream graph_rng = derive_stream(rec.stream_id, "graph", 0);
  try {
    fill_trial(spec, graph_rng, rec.stream_id, rec);
  } catch (const NoMatching&) {
    rec.outcome = Outcome::infeasible;
    rec.scalars.clear();
  } catch (const NoPerfectMatching&) {
    rec.outcome = Outcome::infeasible;
    rec.scalars.clear();
  } catch (const std::exception& e) {
    throw Error(spec.name + ": trial " + std::to_string(trial_index) + ": " + e.what());
  }
  return rec;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RMATCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string_view primary_scalar(Quantity q) {
  switch (q) {
    case Quantity::pnr: return "hit";
    case Quantity::concentration: return "scaled_cost";
    case Quantity::max_edge: return "max_edge";
    case Quantity::diameter: return "max_hops";
    default: return "cost";
  }
}

std::optional<double> theory_value(const ExperimentSpec& spec) {
  const ModelSpec m = spec.model.normalized();
  const auto n = static_cast<std::size_t>(m.n);
  switch (spec.quantity) {
    case Quantity::perfect_cost:
      switch (m.model) {
        case Model::complete_bipartite: return theory::parisi_sum(n);
        case Model::gnnp: return theory::kZeta2 / m.p;
        case Model::complete: return theory::kHalfZeta2;
        case Model::gnp: return theory::kHalfZeta2 / m.p;
      }
      return std::nullopt;
    case Quantity::cost_sequence: {
      const std::size_t r = spec.params.r.value_or(n) == 0 ? n : spec.params.r.value_or(n);
      double total = 0.0;
      for (std::size_t k = 1; k <= r; ++k) total += theory::expected_increment(n, k, m.p);
      return total;
    }
    case Quantity::pnr:
      return spec.params.lambda * theory::pnr_theory(n, *spec.params.r, m.p);
    case Quantity::concentration: return center_for(m);
    default: return std::nullopt;
  }
}

Summary summarize_scalar(std::span<const TrialRecord> records, std::string_view key,
                         std::optional<double> theory) {
  std::vector<double> values;
  std::size_t infeasible = 0;
  for (const auto& rec : records) {
    if (rec.outcome == Outcome::infeasible) {
      ++infeasible;
      continue;
    }
    if (auto it = rec.scalars.find(std::string(key)); it != rec.scalars.end()) {
      values.push_back(it->second);
    }
  }
  return summarize(std::move(values), infeasible, theory);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.records.resize(spec.trials);
  const std::size_t workers = std::min(resolve_threads(spec.threads), spec.trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.trials) return;
      try {
        result.records[i] = run_trial(spec, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = spec.trials;
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.summary = summarize_scalar(result.records, primary_scalar(spec.quantity),
                                    theory_value(spec));
  return result;
}

// ---------------------------------------------------------------------------

PnrEstimate summarize_pnr(const ExperimentSpec& spec, std::span<const TrialRecord> records) {
  const ModelSpec m = spec.model.normalized();
  PnrEstimate est;
  est.n = static_cast<std::size_t>(m.n);
  est.r = *spec.params.r;
  est.p = m.p;
  est.lambda = spec.params.lambda;
  for (const auto& rec : records) {
    if (rec.outcome == Outcome::infeasible) {
      ++est.infeasible;
      continue;
    }
    ++est.trials;
    if (rec.scalars.at("hit") != 0.0) ++est.hits;
  }
  if (est.trials > 0) {
    const double t = static_cast<double>(est.trials);
    const double rate = static_cast<double>(est.hits) / t;
    est.estimate = rate / est.lambda;
    est.standard_error = std::sqrt(rate * (1.0 - rate) / t) / est.lambda;
  }
  est.theory = theory::pnr_theory(est.n, est.r, est.p);
  est.theory_finite_lambda =
      est.r == 0 ? 0.0 : theory::pnr_finite_lambda(est.n, est.r, est.p, est.lambda);
  est.bias_note =
      "finite lambda biases the estimate by O(lambda) relative to the lambda -> 0 limit";
  return est;
}

PnrEstimate estimate_pnr(std::size_t n, std::size_t r, double p, double lambda,
                         std::size_t trials, std::uint64_t base_seed, std::size_t threads) {
  ExperimentSpec spec;
  spec.name = "pnr";
  spec.model = {p == 1.0 ? Model::complete_bipartite : Model::gnnp, static_cast<Vertex>(n), p};
  spec.trials = trials;
  spec.base_seed = base_seed;
  spec.quantity = Quantity::pnr;
  spec.params.r = r;
  spec.params.lambda = lambda;
  spec.threads = threads;
  const auto res = run_experiment(spec);
  return summarize_pnr(spec, res.records);
}

MembershipResult summarize_membership(const ExperimentSpec& spec,
                                      std::span<const TrialRecord> records) {
  const auto n = static_cast<std::size_t>(spec.model.n);
  const std::size_t r = *spec.params.r;
  MembershipResult out;
  out.n = n;
  out.r = r;
  std::vector<double> counts(n, 0.0);
  for (const auto& rec : records) {
    if (rec.outcome == Outcome::infeasible) continue;
    ++out.trials;
    for (std::size_t v = 0; v < n; ++v) counts[v] += rec.scalars.at(key("member_", v));
  }
  out.frequencies.resize(n);
  out.standard_errors.resize(n);
  const double t = static_cast<double>(out.trials);
  const double q = static_cast<double>(r) / static_cast<double>(n);
  for (std::size_t v = 0; v < n; ++v) {
    out.frequencies[v] = t > 0 ? counts[v] / t : 0.0;
    out.standard_errors[v] = t > 0 ? std::sqrt(q * (1.0 - q) / t) : 0.0;
  }
  out.degrees_of_freedom = static_cast<double>(n) - 1.0;
  if (r > 0 && r < n && out.trials > 0 && n > 1) {
    const double expected = t * q;
    double pearson = 0.0;
    for (double c : counts) pearson += (c - expected) * (c - expected) / expected;
    out.chi_square = pearson * static_cast<double>(n - 1) / static_cast<double>(n - r);
    out.p_value = chi_square_sf(out.chi_square, out.degrees_of_freedom);
  }
  return out;
}

MembershipResult membership_frequency(std::size_t n, std::size_t r, double p,
                                      std::size_t trials, std::uint64_t base_seed,
                                      std::size_t threads) {
  ExperimentSpec spec;
  spec.name = "membership";
  spec.model = {p == 1.0 ? Model::complete_bipartite : Model::gnnp, static_cast<Vertex>(n), p};
  spec.trials = trials;
  spec.base_seed = base_seed;
  spec.quantity = Quantity::membership;
  spec.params.r = r;
  spec.threads = threads;
  const auto res = run_experiment(spec);
  return summarize_membership(spec, res.records);
}

IncrementProfile summarize_increments(const ExperimentSpec& spec,
                                      std::span<const TrialRecord> records) {
  const ModelSpec m = spec.model.normalized();
  const auto n = static_cast<std::size_t>(m.n);
  const std::size_t r_max = spec.params.r.value_or(n) == 0 ? n : spec.params.r.value_or(n);
  IncrementProfile prof;
  prof.n = n;
  prof.p = m.p;
  for (std::size_t r = 1; r <= r_max; ++r) {
    const auto s = summarize_scalar(records, key("inc_", r));
    IncrementRow row;
    row.r = r;
    row.empirical = s.mean;
    row.standard_error = s.standard_error;
    row.theory = theory::expected_increment(n, r, m.p);
    row.z = s.standard_error > 0 ? (s.mean - row.theory) / s.standard_error : 0.0;
    row.trials = s.trials_ok;
    prof.rows.push_back(row);
    prof.sum_of_increment_means += s.mean;
  }
  const auto total = summarize_scalar(records, "cost");
  prof.total_mean = total.mean;
  prof.total_standard_error = total.standard_error;
  for (const auto& rec : records) {
    if (rec.outcome == Outcome::infeasible) continue;
    double sum = 0.0;
    for (std::size_t r = 1; r <= r_max; ++r) sum += rec.scalars.at(key("inc_", r));
    prof.max_telescoping_error =
        std::max(prof.max_telescoping_error, std::abs(sum - rec.scalars.at("cost")));
  }
  return prof;
}

IncrementProfile increment_profile(std::size_t n, double p, std::size_t trials,
                                   std::uint64_t base_seed, std::size_t threads) {
  ExperimentSpec spec;
  spec.name = "increments";
  spec.model = {p == 1.0 ? Model::complete_bipartite : Model::gnnp, static_cast<Vertex>(n), p};
  spec.trials = trials;
  spec.base_seed = base_seed;
  spec.quantity = Quantity::cost_sequence;
  spec.threads = threads;
  const auto res = run_experiment(spec);
  return summarize_increments(spec, res.records);
}

ConcentrationTable summarize_concentration(const ExperimentSpec& spec,
                                           std::span<const TrialRecord> records,
                                           std::span<const double> epsilons) {
  const ModelSpec m = spec.model.normalized();
  ConcentrationTable table;
  table.n = static_cast<std::size_t>(m.n);
  table.p = m.p;
  table.center = center_for(m);
  table.mu = spec.params.mu_constant * log_n_over_np(m);
  std::size_t changed = 0;
  std::vector<double> dev, dev_trunc;
  for (const auto& rec : records) {
    if (rec.outcome == Outcome::infeasible) {
      ++table.infeasible;
      continue;
    }
    ++table.trials;
    dev.push_back(rec.scalars.at("deviation"));
    dev_trunc.push_back(rec.scalars.at("truncated_deviation"));
    if (rec.scalars.at("truncation_changed") != 0.0) ++changed;
  }
  const double t = static_cast<double>(table.trials);
  for (double eps : epsilons) {
    ConcentrationRow row;
    row.epsilon = eps;
    if (table.trials > 0) {
      row.exceedance = static_cast<double>(std::count_if(
                           dev.begin(), dev.end(), [&](double d) { return d >= eps; })) / t;
      row.exceedance_truncated =
          static_cast<double>(std::count_if(dev_trunc.begin(), dev_trunc.end(),
                                            [&](double d) { return d >= eps; })) / t;
    }
    table.rows.push_back(row);
  }
  table.truncation_changed_fraction = table.trials > 0 ? static_cast<double>(changed) / t : 0.0;
  return table;
}

ConcentrationTable concentration_tail(const ExperimentSpec& spec,
                                      std::span<const double> epsilons) {
  if (spec.quantity != Quantity::concentration) {
    throw InvalidArgument("concentration_tail needs quantity = concentration");
  }
  const auto res = run_experiment(spec);
  return summarize_concentration(spec, res.records, epsilons);
}

}  // namespace rmatch
