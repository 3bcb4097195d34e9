#ifndef SUBKNAP_HARNESS_HPP_
#define SUBKNAP_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subknap/algorithms.hpp"
#include "subknap/instances.hpp"

namespace subknap {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kErCut, kMovielensRec, kRevenueAdaptive, kCustom };

enum class AlgorithmKind {
  kSampleGreedy,
  kLazySampleGreedy,
  kGreedy,         // largest marginal value
  kDensityGreedy,  // largest marginal density
  kBestSingleton,
  kBruteForce,
  kAdaptiveGreedy,
  kLazyAdaptiveGreedy,
};

// How the acceptance probability is chosen per run.
enum class PMode { kGuarantee, kExperimental, kFixed };

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kSampleGreedy;
  std::string label;  // row label; defaults to the config name
  PMode p_mode = PMode::kGuarantee;
  double p_fixed = kSqrt2Minus1;
  double p0 = 0.0;                      // adaptive only
  std::optional<double> lazy_epsilon;   // defaults to cfg.epsilon_lazy
  bool singleton_fallback = true;

  bool randomized() const;
  bool adaptive() const;
};

struct PriorConfig {
  bool lomax = true;
  double scale = 1.0;
  double shape = 2.0;
  std::vector<double> atoms;  // discrete prior when lomax == false
  std::vector<double> probs;
};

struct InstanceConfig {
  // er-cut / revenue-adaptive
  std::vector<int> ns;
  std::optional<double> edge_prob;  // revenue-adaptive default: 5/sqrt(n)
  WeightDist weight_dist = WeightDist::kUniform;
  CostDist cost_dist = CostDist::kUniform;
  PriorConfig prior;

  // movielens-rec / custom file inputs
  std::string tags_csv;
  std::string ratings_csv;
  std::string categories_csv;  // optional "item,category" pairs
  std::string edges_path;
  std::string costs_csv;   // optional; uniform costs otherwise
  std::string coeffs_csv;  // custom revenue coefficients; all-ones otherwise
  std::string objective;   // custom: cut | revenue | videorec
  VideoRecParams videorec;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kErCut;
  InstanceConfig instance;
  std::vector<AlgorithmConfig> algorithms;
  std::vector<double> budgets;  // fractions of the total cost, in (0, 1]
  int repetitions = 1;
  int best_of = 5;
  double epsilon_lazy = 0.01;
  std::uint64_t seed = 0;
  std::string output = "results.csv";
  int threads = 1;
};

// Parses and validates a config document; throws ConfigError with a message
// naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string resolved_config_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::string experiment;
  std::string algorithm;
  int n = 0;
  double budget_fraction = 0.0;
  int repetition = 0;
  double value = 0.0;
  double singleton_value = 0.0;
  std::uint64_t oracle_calls = 0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

// Runs the full (n x budget x repetition x algorithm) grid. Deterministic
// given the config seed, independent of cfg.threads: every task derives its
// own streams from (seed, task index) and rows land in grid order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Geometric schedule from lo to hi inclusive; lo == hi collapses to one
// point. Both endpoints land exactly.
std::vector<double> budget_schedule(double lo, double hi, int steps);

void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(const std::string& path);

struct AggregateRow {
  std::string experiment;
  std::string algorithm;
  int n = 0;
  double budget_fraction = 0.0;
  int repetitions = 0;
  double mean_value = 0.0;
  double std_value = 0.0;  // sample standard deviation
  double mean_singleton_value = 0.0;
  double mean_oracle_calls = 0.0;
};

// Groups rows by (experiment, algorithm, n, budget_fraction), sorted by key.
std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows);
void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::string& path);

// Least-squares slope of log(y) against log(x); the oracle-call scaling
// checks pin this exponent.
double fit_loglog_slope(const std::vector<double>& xs,
                        const std::vector<double>& ys);

}  // namespace subknap

#endif  // SUBKNAP_HARNESS_HPP_
