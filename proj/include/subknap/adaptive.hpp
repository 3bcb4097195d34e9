#ifndef SUBKNAP_ADAPTIVE_HPP_
#define SUBKNAP_ADAPTIVE_HPP_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "subknap/core.hpp"
#include "subknap/objectives.hpp"

namespace subknap {

// Full state assignment: one state per element. For the revenue model the
// state of element i is its coefficient a_i.
struct Realization {
  std::vector<double> states;
};

// What a run has observed so far: the picked set S plus every element state
// revealed along the way. Revelation can exceed S (for the revenue model,
// picking i reveals the closed neighborhood of i). Extends monotonically.
class PartialRealization {
 public:
  PartialRealization() = default;
  explicit PartialRealization(int n)
      : revealed_(static_cast<size_t>(n), 0),
        values_(static_cast<size_t>(n), 0.0) {}

  const ItemSet& observed() const { return observed_; }
  bool is_revealed(int id) const {
    return revealed_.at(static_cast<size_t>(id)) != 0;
  }
  double state(int id) const;
  int revealed_count() const { return revealed_count_; }

  void mark_observed(int id);              // S <- S + id
  void reveal(int id, double value);       // record a state; idempotent
  bool extends(const PartialRealization& smaller) const;

 private:
  ItemSet observed_;
  std::vector<char> revealed_;
  std::vector<double> values_;
  int revealed_count_ = 0;
};

class AdaptiveEvaluator;

// Adaptive value-oracle contract: expected marginals conditioned on what has
// been revealed, plus the realized value of a set under a full state.
class AdaptiveOracle {
 public:
  virtual ~AdaptiveOracle() = default;
  virtual int ground_size() const = 0;

  // E[v(S + i) - v(S) | revealed states of pr]; i must not be in pr.observed.
  virtual double expected_marginal(int item,
                                   const PartialRealization& pr) const = 0;

  // v(S, omega) for a full realization.
  virtual double realized_value(std::span<const int> set,
                                const Realization& omega) const = 0;

  // pr extended by picking `item` under omega, revealing states per the
  // model's observation rule. Throws if item was already observed.
  virtual PartialRealization observe(const PartialRealization& pr, int item,
                                     const Realization& omega) const = 0;

  virtual std::unique_ptr<AdaptiveEvaluator> make_evaluator() const;
};

// Per-run incremental tracker mirroring IncrementalEvaluator for the
// adaptive setting: holds the partial realization of the run.
class AdaptiveEvaluator {
 public:
  virtual ~AdaptiveEvaluator() = default;
  virtual double expected_marginal(int item) const = 0;
  virtual void observe(int item, const Realization& omega) = 0;
  virtual const PartialRealization& partial() const = 0;
};

// Counting wrapper for the adaptive oracle. Only expected-marginal queries
// are tallied; observing the world and scoring the final set are feedback,
// not oracle work.
class CountingAdaptiveOracle {
 public:
  explicit CountingAdaptiveOracle(const AdaptiveOracle& inner)
      : inner_(&inner) {}

  int ground_size() const { return inner_->ground_size(); }
  const AdaptiveOracle& inner() const { return *inner_; }
  std::uint64_t calls() const { return calls_; }

  double expected_marginal(int item, const PartialRealization& pr) {
    ++calls_;
    return inner_->expected_marginal(item, pr);
  }

  double realized_value(std::span<const int> set, const Realization& omega) {
    return inner_->realized_value(set, omega);
  }

  class Cursor {
   public:
    double expected_marginal(int item) {
      ++owner_->calls_;
      return eval_->expected_marginal(item);
    }
    void observe(int item, const Realization& omega) {
      eval_->observe(item, omega);
    }
    const PartialRealization& partial() const { return eval_->partial(); }

   private:
    friend class CountingAdaptiveOracle;
    Cursor(CountingAdaptiveOracle* owner,
           std::unique_ptr<AdaptiveEvaluator> eval)
        : owner_(owner), eval_(std::move(eval)) {}
    CountingAdaptiveOracle* owner_;
    std::unique_ptr<AdaptiveEvaluator> eval_;
  };

  Cursor cursor() { return Cursor(this, inner_->make_evaluator()); }

 private:
  const AdaptiveOracle* inner_;
  std::uint64_t calls_ = 0;
};

// Per-element coefficient prior: Lomax (Pareto type II) by default, or a
// finite atom list for exact enumeration, or a point mass.
class CoeffPrior {
 public:
  static CoeffPrior lomax(double scale, double shape);
  static CoeffPrior discrete(std::vector<double> atoms,
                             std::vector<double> probs);
  static CoeffPrior point(double value);

  bool is_discrete() const { return !atoms_.empty(); }
  double mean() const { return mean_; }
  double sample(Rng& rng) const;  // one uniform draw consumed
  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> probs() const { return probs_; }

 private:
  CoeffPrior() = default;
  double scale_ = 1.0;
  double shape_ = 2.0;
  double mean_ = 1.0;
  std::vector<double> atoms_;  // empty <=> Lomax(scale_, shape_)
  std::vector<double> probs_;
};

// Inverse CDF of Lomax(scale, shape): u in [0,1) -> scale*((1-u)^(-1/shape)-1).
double lomax_icdf(double u, double scale, double shape);

// Stochastic influence-and-exploit revenue on a known graph: coefficients
// a_i are drawn independently from per-buyer priors (the production prior is
// Lomax with scale 1, shape 2, mean 1). Picking a buyer reveals a_j for the
// whole closed neighborhood {j : w_ij > 0} + {i}; expected marginals use
// revealed coefficients exactly and prior means elsewhere, which is exact by
// linearity of the revenue in each coefficient.
class AdaptiveRevenueModel : public AdaptiveOracle {
 public:
  AdaptiveRevenueModel(WeightedGraph graph, CoeffPrior shared_prior);
  AdaptiveRevenueModel(WeightedGraph graph, std::vector<CoeffPrior> priors);

  int ground_size() const override { return graph_.size(); }
  double expected_marginal(int item,
                           const PartialRealization& pr) const override;
  double realized_value(std::span<const int> set,
                        const Realization& omega) const override;
  PartialRealization observe(const PartialRealization& pr, int item,
                             const Realization& omega) const override;
  std::unique_ptr<AdaptiveEvaluator> make_evaluator() const override;

  const WeightedGraph& graph() const { return graph_; }
  const CoeffPrior& prior(int id) const {
    return priors_.at(static_cast<size_t>(id));
  }
  bool all_discrete() const;

 private:
  WeightedGraph graph_;
  std::vector<CoeffPrior> priors_;
  std::vector<double> means_;
};

// One i.i.d. coefficient vector; draw order is one uniform per buyer in id
// order, so equal seeds give equal realizations.
Realization sample_realization(const AdaptiveRevenueModel& model, Rng& rng);

// Adaptive twin of SubsetOracle: candidate items are the re-densified kept
// ids while realizations and partial realizations stay in the inner model's
// ground set (dropped elements still react to whoever gets picked).
class SubsetAdaptiveOracle : public AdaptiveOracle {
 public:
  SubsetAdaptiveOracle(const AdaptiveOracle& inner, std::vector<int> kept);

  int ground_size() const override { return static_cast<int>(kept_.size()); }
  double expected_marginal(int item,
                           const PartialRealization& pr) const override;
  double realized_value(std::span<const int> set,
                        const Realization& omega) const override;
  PartialRealization observe(const PartialRealization& pr, int item,
                             const Realization& omega) const override;
  std::unique_ptr<AdaptiveEvaluator> make_evaluator() const override;

 private:
  const AdaptiveOracle* inner_;
  std::vector<int> kept_;
};

// Deterministic adaptive policy: next item given what is known and the
// remaining budget, or -1 to stop. Must not repeat items or exceed budget.
using Policy = std::function<int(const PartialRealization&, double remaining)>;

// Exact expected value of a deterministic policy under full enumeration of
// the (discrete) product state space. Throws CapacityError when the state
// space exceeds ~10^4 atoms and std::invalid_argument for continuous priors.
double evaluate_policy_exact(const AdaptiveRevenueModel& model,
                             const KnapsackInstance& inst,
                             const Policy& policy);

// Exact optimum over all adaptive policies (backward induction over
// observation states). Same capacity guards; intended for tiny fixtures.
double optimal_policy_value_exact(const AdaptiveRevenueModel& model,
                                  const KnapsackInstance& inst);

// The optimum together with a decision-tree policy attaining it, so the
// value can be cross-checked through evaluate_policy_exact.
struct ExactPolicy {
  double value = 0.0;
  Policy policy;
};
ExactPolicy optimal_policy_exact(const AdaptiveRevenueModel& model,
                                 const KnapsackInstance& inst);

}  // namespace subknap

#endif  // SUBKNAP_ADAPTIVE_HPP_
