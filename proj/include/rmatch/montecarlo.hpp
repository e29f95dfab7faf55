#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmatch/graph.hpp"
#include "rmatch/stats.hpp"

namespace rmatch {

enum class Quantity {
  perfect_cost,
  cost_sequence,
  pnr,
  membership,
  concentration,
  max_edge,
  diameter
};

std::string_view to_string(Quantity q);
Quantity parse_quantity(std::string_view name);

struct ExperimentParams {
  /// Prefix size for pnr / membership; for cost_sequence the largest r
  /// (0 means n). For diameter, the matched prefix (unset means
  /// n - floor(n / (log n)^2)).
  std::optional<std::size_t> r;
  double lambda = 1e-2;
  /// Truncation cap mu = mu_constant * log n / (n p) for concentration.
  double mu_constant = 20.0;
  /// Threshold constant c in max_edge <= c log n / (n p).
  double max_edge_constant = 20.0;
  std::size_t pair_samples = 50;
  /// Out-degree truncation; 0 picks 40 (bipartite) or 20 (general).
  std::size_t k = 0;
};

struct ExperimentSpec {
  std::string name = "experiment";
  ModelSpec model;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  Quantity quantity = Quantity::perfect_cost;
  ExperimentParams params;
  /// Worker threads; 0 uses RMATCH_THREADS or the hardware count.
  std::size_t threads = 0;

  /// Throws InvalidArgument on missing or out-of-range parameters.
  void validate() const;
};

enum class Outcome { ok, infeasible };

struct TrialRecord {
  std::uint64_t trial_index = 0;
  std::uint64_t stream_id = 0;
  Outcome outcome = Outcome::ok;
  std::map<std::string, double> scalars;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  /// Over the quantity's primary scalar (see primary_scalar()).
  Summary summary;
};

/// The stream id of trial i: derive_stream_id(base_seed, "trial", i).
std::uint64_t trial_stream_id(std::uint64_t base_seed, std::uint64_t trial_index);

/// Executes one trial; deterministic in (spec, trial_index).
TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t trial_index);

/// Runs every trial (possibly on several threads) and aggregates. Records
/// come back ordered by trial index whatever the scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Scalar summarized by run_experiment for a quantity.
std::string_view primary_scalar(Quantity q);

/// Theory value attached to the primary summary, if any.
std::optional<double> theory_value(const ExperimentSpec& spec);

/// Summary of one scalar over ok records that carry it.
Summary summarize_scalar(std::span<const TrialRecord> records, std::string_view key,
                         std::optional<double> theory = std::nullopt);

// ---------------------------------------------------------------------------

struct PnrEstimate {
  std::size_t n = 0;
  std::size_t r = 0;
  double p = 1.0;
  double lambda = 0.0;
  std::size_t trials = 0;  // ok trials
  std::size_t infeasible = 0;
  std::size_t hits = 0;
  double estimate = 0.0;  // hits / (trials * lambda)
  double standard_error = 0.0;
  double theory = 0.0;               // (1/p)(H_n - H_{n-r})
  double theory_finite_lambda = 0.0;  // same model, lambda not sent to 0
  std::string bias_note;
};

PnrEstimate summarize_pnr(const ExperimentSpec& spec, std::span<const TrialRecord> records);
PnrEstimate estimate_pnr(std::size_t n, std::size_t r, double p, double lambda,
                         std::size_t trials, std::uint64_t base_seed, std::size_t threads = 0);

struct MembershipResult {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t trials = 0;
  std::vector<double> frequencies;  // per right vertex
  std::vector<double> standard_errors;
  /// Pearson statistic scaled by (n - 1) / (n - r), the exact covariance
  /// correction for uniform r-subsets; chi-square with n - 1 degrees.
  double chi_square = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

MembershipResult summarize_membership(const ExperimentSpec& spec,
                                      std::span<const TrialRecord> records);
MembershipResult membership_frequency(std::size_t n, std::size_t r, double p,
                                      std::size_t trials, std::uint64_t base_seed,
                                      std::size_t threads = 0);

struct IncrementRow {
  std::size_t r = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double theory = 0.0;
  double z = 0.0;
  std::size_t trials = 0;
};

struct IncrementProfile {
  std::size_t n = 0;
  double p = 1.0;
  std::vector<IncrementRow> rows;
  /// Mean of C(n, r_max) and the sum of the per-r means (they telescope).
  double total_mean = 0.0;
  double total_standard_error = 0.0;
  double sum_of_increment_means = 0.0;
  double max_telescoping_error = 0.0;  // per trial |sum inc - C(n, r_max)|
};

IncrementProfile summarize_increments(const ExperimentSpec& spec,
                                      std::span<const TrialRecord> records);
IncrementProfile increment_profile(std::size_t n, double p, std::size_t trials,
                                   std::uint64_t base_seed, std::size_t threads = 0);

struct ConcentrationRow {
  double epsilon = 0.0;
  double exceedance = 0.0;
  double exceedance_truncated = 0.0;
};

struct ConcentrationTable {
  std::size_t n = 0;
  double p = 1.0;
  double center = 0.0;  // pi^2/6 or pi^2/12
  double mu = 0.0;
  std::size_t trials = 0;
  std::size_t infeasible = 0;
  std::vector<ConcentrationRow> rows;
  double truncation_changed_fraction = 0.0;
};

ConcentrationTable summarize_concentration(const ExperimentSpec& spec,
                                           std::span<const TrialRecord> records,
                                           std::span<const double> epsilons);
/// spec.quantity must be concentration.
ConcentrationTable concentration_tail(const ExperimentSpec& spec,
                                      std::span<const double> epsilons);

/// Effective thread count for a requested value (0 = auto).
std::size_t resolve_threads(std::size_t requested);

}  // namespace rmatch
