#include "subknap/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace subknap {

SampleGreedyParams SampleGreedyParams::large_instance(double delta) {
  if (!(delta > 0.0) || !(delta < 0.5)) {
    throw std::invalid_argument("large_instance: delta must lie in (0, 1/2)");
  }
  return {(1.0 - delta) / 2.0, true};
}

AdaptiveParams AdaptiveParams::large_instance(double delta) {
  if (!(delta > 0.0) || !(delta < 0.5)) {
    throw std::invalid_argument("large_instance: delta must lie in (0, 1/2)");
  }
  return {0.0, (std::sqrt(3.0 - 2.0 * delta) - 1.0) / 2.0};
}

std::uint64_t LazyParams::update_cap(int n) const {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("LazyParams: epsilon must lie in (0, 1)");
  }
  if (n <= 0) return 0;
  const double ep = epsilon_prime();
  return static_cast<std::uint64_t>(
      std::ceil(std::log2(static_cast<double>(n) / ep) / ep));
}

std::uint64_t LazyParams::call_ceiling(int n) const {
  return static_cast<std::uint64_t>(n) * (update_cap(n) + 2);
}

namespace {

void check_p(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("acceptance probability must be in (0, 1]");
  }
}

struct GreedyCoreOut {
  ItemSet set;
  std::vector<int> order;
  double value = 0.0;                   // incrementally tracked v(S)
  std::vector<double> singleton_values;  // v({i}) for every item
};

// The considered-item loop shared by sample_greedy and the deterministic
// baselines. rng == nullptr accepts every considered item. Marginals are
// cached between iterations and refreshed only after the solution grew;
// items whose marginal has gone non-positive are retired for good, which is
// sound for submodular objectives.
GreedyCoreOut greedy_loop(const KnapsackInstance& inst, CountingOracle& oracle,
                          double p, GreedyMode mode, Rng* rng) {
  const int n = inst.size();
  GreedyCoreOut out;
  out.singleton_values.assign(static_cast<size_t>(n), 0.0);
  if (n == 0) return out;

  auto cursor = oracle.cursor();
  std::vector<char> alive(static_cast<size_t>(n), 1);
  std::vector<double> marg(static_cast<size_t>(n), 0.0);
  double remaining = inst.budget();

  // Construction-time dropping guarantees every cost fits the full budget,
  // so the first round covers all items and doubles as the singleton scan.
  for (int i = 0; i < n; ++i) {
    marg[static_cast<size_t>(i)] = cursor.marginal(i);
    out.singleton_values[static_cast<size_t>(i)] = marg[static_cast<size_t>(i)];
  }

  bool stale = false;
  while (true) {
    if (stale) {
      for (int i = 0; i < n; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        if (inst.cost(i) > remaining) {
          alive[static_cast<size_t>(i)] = 0;  // budgets only shrink
          continue;
        }
        if (!(marg[static_cast<size_t>(i)] > kPositiveTol)) {
          alive[static_cast<size_t>(i)] = 0;  // marginals only shrink
          continue;
        }
        marg[static_cast<size_t>(i)] = cursor.marginal(i);
      }
      stale = false;
    }

    int best = -1;
    double best_key = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<size_t>(i)]) continue;
      if (inst.cost(i) > remaining) continue;
      const double m = marg[static_cast<size_t>(i)];
      if (!(m > kPositiveTol)) continue;
      const double key = mode == GreedyMode::kDensity ? m / inst.cost(i) : m;
      if (best < 0 || key > best_key) {
        best = i;
        best_key = key;
      }
    }
    if (best < 0) break;

    const bool accept = rng == nullptr || rng->bernoulli(p);
    alive[static_cast<size_t>(best)] = 0;
    if (accept) {
      cursor.add(best);
      remaining -= inst.cost(best);
      out.order.push_back(best);
      stale = true;
    }
  }
  out.set = make_set(out.order);
  out.value = cursor.value();
  return out;
}

int argmax_lowest_id(const std::vector<double>& values) {
  int best = -1;
  for (size_t i = 0; i < values.size(); ++i) {
    if (best < 0 || values[i] > values[static_cast<size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Winner of greedy set vs best singleton, freshly re-evaluated so that
// Solution.value reproduces oracle.evaluate(set) bit for bit.
Solution finish_with_fallback(const KnapsackInstance& inst,
                              CountingOracle& oracle, GreedyCoreOut&& core,
                              bool singleton_fallback, std::uint64_t calls_start,
                              std::uint64_t seed) {
  Solution sol;
  sol.seed = seed;
  const int istar = argmax_lowest_id(core.singleton_values);
  const bool take_singleton =
      singleton_fallback && istar >= 0 &&
      core.singleton_values[static_cast<size_t>(istar)] > core.value;
  if (take_singleton) {
    sol.set = {istar};
    sol.picked_order = {istar};
  } else {
    sol.set = std::move(core.set);
    sol.picked_order = std::move(core.order);
  }
  sol.value = sol.set.empty() ? 0.0 : oracle.evaluate(sol.set);
  sol.oracle_calls = oracle.calls() - calls_start;
  validate_solution(inst, sol);
  return sol;
}

}  // namespace

Solution sample_greedy(const KnapsackInstance& inst, CountingOracle& oracle,
                       const SampleGreedyParams& params, Rng& rng) {
  check_p(params.p);
  const std::uint64_t start = oracle.calls();
  GreedyCoreOut core =
      greedy_loop(inst, oracle, params.p, GreedyMode::kDensity, &rng);
  return finish_with_fallback(inst, oracle, std::move(core),
                              params.singleton_fallback, start, rng.seed());
}

Solution baseline_greedy(const KnapsackInstance& inst, CountingOracle& oracle,
                         GreedyMode mode) {
  const std::uint64_t start = oracle.calls();
  GreedyCoreOut core = greedy_loop(inst, oracle, 1.0, mode, nullptr);
  return finish_with_fallback(inst, oracle, std::move(core),
                              /*singleton_fallback=*/false, start, /*seed=*/0);
}

Solution best_singleton(const KnapsackInstance& inst, CountingOracle& oracle) {
  const std::uint64_t start = oracle.calls();
  Solution sol;
  int best = -1;
  double best_value = 0.0;
  for (int i = 0; i < inst.size(); ++i) {
    const ItemSet single{i};
    const double v = oracle.evaluate(single);
    if (best < 0 || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  if (best >= 0) {
    sol.set = {best};
    sol.picked_order = {best};
    sol.value = best_value;
  }
  sol.oracle_calls = oracle.calls() - start;
  validate_solution(inst, sol);
  return sol;
}

Solution brute_force_opt(const KnapsackInstance& inst, CountingOracle& oracle) {
  const int n = inst.size();
  if (n > 24) {
    throw CapacityError("brute_force_opt: limited to n <= 24");
  }
  const std::uint64_t start = oracle.calls();
  ItemSet best_set;
  double best_value = 0.0;
  bool have_best = false;
  ItemSet current;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    current.clear();
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) {
        current.push_back(i);
        cost += inst.cost(i);
      }
    }
    if (cost > inst.budget()) continue;
    const double v = oracle.evaluate(current);
    if (!have_best || v > best_value ||
        (v == best_value &&
         std::lexicographical_compare(current.begin(), current.end(),
                                      best_set.begin(), best_set.end()))) {
      have_best = true;
      best_value = v;
      best_set = current;
    }
  }
  Solution sol;
  sol.set = best_set;
  sol.picked_order = best_set;
  sol.value = best_value;
  sol.oracle_calls = oracle.calls() - start;
  validate_solution(inst, sol);
  return sol;
}

namespace {

struct QueueEntry {
  double key = 0.0;
  int id = 0;
  // Solution epoch the key was computed against; while the solution is
  // unchanged the key IS the current density and needs no re-evaluation.
  std::uint64_t epoch = 0;
};
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.key != b.key) return a.key < b.key;  // max-heap on key
    return a.id > b.id;                        // then lowest id first
  }
};
using LazyQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder>;

}  // namespace

Solution lazy_sample_greedy(const KnapsackInstance& inst,
                            CountingOracle& oracle,
                            const SampleGreedyParams& params,
                            const LazyParams& lazy, Rng& rng,
                            LazyAudit* audit) {
  check_p(params.p);
  const int n = inst.size();
  const double eps_prime = lazy.epsilon_prime();
  const std::uint64_t cap = lazy.update_cap(n);
  const std::uint64_t start = oracle.calls();

  GreedyCoreOut core;
  core.singleton_values.assign(static_cast<size_t>(n), 0.0);
  auto cursor = oracle.cursor();
  std::vector<char> alive(static_cast<size_t>(n), 1);
  std::vector<std::uint64_t> updates(static_cast<size_t>(n), 0);
  double remaining = inst.budget();
  std::uint64_t epoch = 0;  // bumps on every acceptance
  LazyQueue queue;

  for (int i = 0; i < n; ++i) {
    const double v = cursor.marginal(i);
    core.singleton_values[static_cast<size_t>(i)] = v;
    if (v > kPositiveTol) {
      queue.push({v / inst.cost(i), i, epoch});
    } else {
      alive[static_cast<size_t>(i)] = 0;
    }
  }

  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    const int i = top.id;
    if (!alive[static_cast<size_t>(i)]) continue;
    if (inst.cost(i) > remaining) {
      alive[static_cast<size_t>(i)] = 0;
      continue;
    }
    // A key computed against the current solution is already the fresh
    // density; re-evaluating it would repeat the same computation.
    const double fresh =
        top.epoch == epoch ? top.key * inst.cost(i) : cursor.marginal(i);
    if (!(fresh > kPositiveTol)) {
      alive[static_cast<size_t>(i)] = 0;
      continue;
    }
    const double density = top.epoch == epoch ? top.key : fresh / inst.cost(i);
    if (density >= top.key / (1.0 + eps_prime)) {
      if (audit != nullptr) {
        LazyAcceptRecord rec;
        rec.item = i;
        rec.density = density;
        rec.solution_before = core.set;
        for (int k = 0; k < n; ++k) {
          if (alive[static_cast<size_t>(k)] && inst.cost(k) <= remaining) {
            rec.candidates.push_back(k);
          }
        }
        audit->considered.push_back(std::move(rec));
      }
      const bool accept = rng.bernoulli(params.p);
      alive[static_cast<size_t>(i)] = 0;
      if (accept) {
        cursor.add(i);
        remaining -= inst.cost(i);
        ++epoch;
        core.order.push_back(i);
        core.set = make_set(core.order);
      }
    } else {
      if (++updates[static_cast<size_t>(i)] > cap) {
        alive[static_cast<size_t>(i)] = 0;  // too many updates, discard
      } else {
        queue.push({density, i, epoch});
      }
    }
  }

  core.set = make_set(core.order);
  core.value = cursor.value();
  return finish_with_fallback(inst, oracle, std::move(core),
                              params.singleton_fallback, start, rng.seed());
}

namespace {

Solution finish_adaptive(const KnapsackInstance& inst,
                         CountingAdaptiveOracle& oracle, std::vector<int> order,
                         const Realization& omega, std::uint64_t calls_start,
                         std::uint64_t seed) {
  Solution sol;
  sol.seed = seed;
  sol.picked_order = std::move(order);
  sol.set = make_set(sol.picked_order);
  sol.value = oracle.realized_value(sol.set, omega);
  sol.oracle_calls = oracle.calls() - calls_start;
  validate_solution(inst, sol);
  return sol;
}

void check_adaptive_args(const KnapsackInstance& inst,
                         const CountingAdaptiveOracle& oracle,
                         const AdaptiveParams& params) {
  check_p(params.p);
  if (!(params.p0 >= 0.0) || params.p0 > 1.0) {
    throw std::invalid_argument("p0 must be in [0, 1]");
  }
  if (oracle.ground_size() != inst.size()) {
    throw std::invalid_argument(
        "adaptive_greedy: instance and oracle ground sets differ");
  }
}

}  // namespace

Solution adaptive_greedy(const KnapsackInstance& inst,
                         CountingAdaptiveOracle& oracle,
                         const AdaptiveParams& params, const Realization& omega,
                         Rng& rng) {
  check_adaptive_args(inst, oracle, params);
  const int n = inst.size();
  const std::uint64_t start = oracle.calls();

  const bool commit_to_singleton = rng.bernoulli(params.p0);
  if (n == 0) return finish_adaptive(inst, oracle, {}, omega, start, rng.seed());

  auto cursor = oracle.cursor();
  std::vector<double> marg(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    marg[static_cast<size_t>(i)] = cursor.expected_marginal(i);
  }

  if (commit_to_singleton) {
    const int istar = argmax_lowest_id(marg);
    cursor.observe(istar, omega);
    return finish_adaptive(inst, oracle, {istar}, omega, start, rng.seed());
  }

  // Greedy loop over expected marginals. Unlike the deterministic case,
  // a currently non-positive expected marginal can turn positive after a
  // high coefficient is revealed, so nothing is retired on sign alone.
  std::vector<char> alive(static_cast<size_t>(n), 1);
  std::vector<int> order;
  double remaining = inst.budget();
  bool stale = false;
  while (true) {
    if (stale) {
      for (int i = 0; i < n; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        if (inst.cost(i) > remaining) {
          alive[static_cast<size_t>(i)] = 0;
          continue;
        }
        marg[static_cast<size_t>(i)] = cursor.expected_marginal(i);
      }
      stale = false;
    }
    int best = -1;
    double best_key = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<size_t>(i)]) continue;
      if (inst.cost(i) > remaining) continue;
      const double m = marg[static_cast<size_t>(i)];
      if (!(m > kPositiveTol)) continue;
      const double key = m / inst.cost(i);
      if (best < 0 || key > best_key) {
        best = i;
        best_key = key;
      }
    }
    if (best < 0) break;
    const bool accept = rng.bernoulli(params.p);
    alive[static_cast<size_t>(best)] = 0;
    if (accept) {
      cursor.observe(best, omega);
      remaining -= inst.cost(best);
      order.push_back(best);
      stale = true;
    }
  }
  return finish_adaptive(inst, oracle, std::move(order), omega, start,
                         rng.seed());
}

Solution lazy_adaptive_greedy(const KnapsackInstance& inst,
                              CountingAdaptiveOracle& oracle,
                              const AdaptiveParams& params,
                              const LazyParams& lazy, const Realization& omega,
                              Rng& rng) {
  check_adaptive_args(inst, oracle, params);
  const int n = inst.size();
  const double eps_prime = lazy.epsilon_prime();
  const std::uint64_t cap = lazy.update_cap(n);
  const std::uint64_t start = oracle.calls();

  const bool commit_to_singleton = rng.bernoulli(params.p0);
  if (n == 0) return finish_adaptive(inst, oracle, {}, omega, start, rng.seed());

  auto cursor = oracle.cursor();
  std::vector<double> init(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) init[static_cast<size_t>(i)] = cursor.expected_marginal(i);

  if (commit_to_singleton) {
    const int istar = argmax_lowest_id(init);
    cursor.observe(istar, omega);
    return finish_adaptive(inst, oracle, {istar}, omega, start, rng.seed());
  }

  std::vector<char> alive(static_cast<size_t>(n), 1);
  std::vector<std::uint64_t> updates(static_cast<size_t>(n), 0);
  double remaining = inst.budget();
  std::uint64_t epoch = 0;  // bumps on every observation
  LazyQueue queue;
  for (int i = 0; i < n; ++i) {
    if (init[static_cast<size_t>(i)] > kPositiveTol) {
      queue.push({init[static_cast<size_t>(i)] / inst.cost(i), i, epoch});
    } else {
      alive[static_cast<size_t>(i)] = 0;
    }
  }

  std::vector<int> order;
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    const int i = top.id;
    if (!alive[static_cast<size_t>(i)]) continue;
    if (inst.cost(i) > remaining) {
      alive[static_cast<size_t>(i)] = 0;
      continue;
    }
    const double fresh = top.epoch == epoch ? top.key * inst.cost(i)
                                            : cursor.expected_marginal(i);
    if (!(fresh > kPositiveTol)) {
      alive[static_cast<size_t>(i)] = 0;
      continue;
    }
    const double density = top.epoch == epoch ? top.key : fresh / inst.cost(i);
    if (density >= top.key / (1.0 + eps_prime)) {
      const bool accept = rng.bernoulli(params.p);
      alive[static_cast<size_t>(i)] = 0;
      if (accept) {
        cursor.observe(i, omega);
        remaining -= inst.cost(i);
        ++epoch;
        order.push_back(i);
      }
    } else {
      if (++updates[static_cast<size_t>(i)] > cap) {
        alive[static_cast<size_t>(i)] = 0;
      } else {
        queue.push({density, i, epoch});
      }
    }
  }
  return finish_adaptive(inst, oracle, std::move(order), omega, start,
                         rng.seed());
}

TrialStats approx_ratio_estimate(const KnapsackInstance& inst,
                                 const ValueOracle& objective, SolverFn solver,
                                 int trials, std::uint64_t root_seed) {
  if (trials < 1) {
    throw std::invalid_argument("approx_ratio_estimate: trials must be >= 1");
  }
  TrialStats stats;
  stats.trials = trials;
  {
    CountingOracle oracle(objective);
    stats.singleton_value = best_singleton(inst, oracle).value;
  }
  std::vector<double> values;
  values.reserve(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    CountingOracle oracle(objective);
    Rng rng(derive_seed(root_seed, static_cast<std::uint64_t>(t)));
    values.push_back(solver(inst, oracle, rng).value);
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(trials - 1));
  }
  return stats;
}

}  // namespace subknap
