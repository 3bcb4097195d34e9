#ifndef SUBKNAP_ALGORITHMS_HPP_
#define SUBKNAP_ALGORITHMS_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "subknap/adaptive.hpp"
#include "subknap/core.hpp"

namespace subknap {

inline constexpr double kSqrt2Minus1 = 0.41421356237309515;  // sqrt(2) - 1

// Acceptance probability for the sampled greedy. The default sqrt(2)-1
// attains the 3+2*sqrt(2) worst-case guarantee; any p in (0, 1] is accepted.
struct SampleGreedyParams {
  double p = kSqrt2Minus1;
  bool singleton_fallback = true;

  // Regime where every singleton is worth at most delta * OPT; sharper
  // guarantee with p = (1 - delta) / 2, delta in (0, 1/2).
  static SampleGreedyParams large_instance(double delta);

  // Benchmark protocol: p drawn once per run from U[0.9, 1].
  static SampleGreedyParams experimental(Rng& rng) {
    return {/*p=*/0.9 + 0.1 * rng.next_unit(), /*singleton_fallback=*/true};
  }
};

// Lazy-evaluation tuning. epsilon' = epsilon / 6 drives both the acceptance
// slack (fresh density >= stale density / (1 + epsilon')) and the per-item
// update cap ceil(log2(n / epsilon') / epsilon'); an item updated more often
// is discarded for good.
struct LazyParams {
  double epsilon = 0.01;

  double epsilon_prime() const { return epsilon / 6.0; }
  std::uint64_t update_cap(int n) const;

  // Hard ceiling on counted evaluations: n * (update_cap + 2).
  std::uint64_t call_ceiling(int n) const;
};

struct AdaptiveParams {
  double p0 = 0.0;  // chance to commit to the best expected singleton
  double p = kSqrt2Minus1;

  // The pair attaining the 9-approximation guarantee: p = 1/3, p0 = p/(3p+1).
  static AdaptiveParams guarantee() { return {1.0 / 6.0, 1.0 / 3.0}; }
  static AdaptiveParams large_instance(double delta);
  static AdaptiveParams experimental(Rng& rng) {
    return {0.0, 0.9 + 0.1 * rng.next_unit()};
  }
};

// Optional audit trail for the lazy solver (test hook): one record per
// considered item, with the state needed to re-check the density slack.
struct LazyAcceptRecord {
  int item = 0;
  double density = 0.0;       // fresh density at acceptance time
  ItemSet solution_before;    // S when the item was considered
  ItemSet candidates;         // alive, cost-feasible items at that moment
};
struct LazyAudit {
  std::vector<LazyAcceptRecord> considered;
};

// Randomized density greedy under a knapsack: repeatedly consider the item
// of best positive marginal density among the still-affordable ones, keep it
// with probability p, and finally return the better of the greedy set and
// the best single item. Consumes exactly one Bernoulli draw per considered
// item, in consideration order; ties in every argmax go to the lowest id.
Solution sample_greedy(const KnapsackInstance& inst, CountingOracle& oracle,
                       const SampleGreedyParams& params, Rng& rng);

// Same algorithm driven by a stale-density priority queue. A popped item is
// re-evaluated once; it counts as considered when its fresh density is
// within 1 + epsilon' of its queue key and is re-queued under the fresh
// density otherwise. Cost-infeasible and non-positive-marginal items are
// dropped on pop; items re-queued more than the update cap are discarded.
Solution lazy_sample_greedy(const KnapsackInstance& inst,
                            CountingOracle& oracle,
                            const SampleGreedyParams& params,
                            const LazyParams& lazy, Rng& rng,
                            LazyAudit* audit = nullptr);

enum class GreedyMode { kValue, kDensity };

// Deterministic baselines: density mode is sample_greedy with p = 1 and no
// singleton fallback; value mode ranks by raw marginal instead.
Solution baseline_greedy(const KnapsackInstance& inst, CountingOracle& oracle,
                         GreedyMode mode);

// Best single item by value; exactly n evaluations.
Solution best_singleton(const KnapsackInstance& inst, CountingOracle& oracle);

// Exhaustive optimum over all feasible subsets (n <= 24, else
// CapacityError). Ties resolve to the lexicographically smallest set.
Solution brute_force_opt(const KnapsackInstance& inst, CountingOracle& oracle);

// Adaptive variant: an initial Bernoulli(p0) commits to the best expected
// singleton; otherwise the greedy loop ranks by expected marginal density
// under everything revealed so far, observing each accepted item's state.
// Draw order: one draw for p0, then one per considered item. Returns the
// realized value of the picked set under omega.
Solution adaptive_greedy(const KnapsackInstance& inst,
                         CountingAdaptiveOracle& oracle,
                         const AdaptiveParams& params, const Realization& omega,
                         Rng& rng);

// Lazy-queue version of adaptive_greedy with the LazyParams rules.
Solution lazy_adaptive_greedy(const KnapsackInstance& inst,
                              CountingAdaptiveOracle& oracle,
                              const AdaptiveParams& params,
                              const LazyParams& lazy, const Realization& omega,
                              Rng& rng);

// A solver run under a derived seed; used for repeated-trial statistics.
using SolverFn =
    std::function<Solution(const KnapsackInstance&, CountingOracle&, Rng&)>;

struct TrialStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double singleton_value = 0.0;
  int trials = 0;

  double stderr_mean() const {
    return trials > 0 ? stddev / std::sqrt(static_cast<double>(trials)) : 0.0;
  }
};

// Runs `solver` `trials` times with seeds derived from root_seed and reports
// the sample mean/stddev of the solution values plus the best singleton
// value of the instance.
TrialStats approx_ratio_estimate(const KnapsackInstance& inst,
                                 const ValueOracle& objective, SolverFn solver,
                                 int trials, std::uint64_t root_seed);

}  // namespace subknap

#endif  // SUBKNAP_ALGORITHMS_HPP_
