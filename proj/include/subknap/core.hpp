#ifndef SUBKNAP_CORE_HPP_
#define SUBKNAP_CORE_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace subknap {

// Canonical set representation: strictly increasing item ids.
using ItemSet = std::vector<int>;

// Marginals below this threshold count as non-positive. Cut-like objectives
// produce exact-zero marginals that must not flip sign under roundoff.
inline constexpr double kPositiveTol = 1e-12;

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ItemSet make_set(std::initializer_list<int> ids);
ItemSet make_set(std::vector<int> ids);
bool set_contains(const ItemSet& set, int id);
ItemSet set_with(const ItemSet& set, int id);

struct Item {
  int id = 0;
  double cost = 0.0;
};

// Ground set with per-item costs and a budget. Items whose cost exceeds the
// budget are dropped at construction (they fit in no feasible solution) and
// the surviving ids are re-densified to 0..n-1; original_id() maps back.
class KnapsackInstance {
 public:
  KnapsackInstance(std::vector<double> costs, double budget);

  int size() const { return static_cast<int>(costs_.size()); }
  double cost(int id) const { return costs_.at(static_cast<size_t>(id)); }
  Item item(int id) const { return {id, cost(id)}; }
  double budget() const { return budget_; }
  double total_cost() const { return total_cost_; }

  int original_size() const { return original_size_; }
  int dropped_count() const { return original_size_ - size(); }
  bool any_dropped() const { return dropped_count() > 0; }
  int original_id(int id) const { return kept_.at(static_cast<size_t>(id)); }
  const std::vector<int>& kept_ids() const { return kept_; }

 private:
  std::vector<double> costs_;
  std::vector<int> kept_;
  double budget_ = 0.0;
  double total_cost_ = 0.0;
  int original_size_ = 0;
};

class IncrementalEvaluator;

// Value-oracle contract: v(S) over subsets of {0..n-1}, normalized so that
// v(empty) = 0, deterministic for a fixed objective instance.
class ValueOracle {
 public:
  virtual ~ValueOracle() = default;
  virtual int ground_size() const = 0;
  virtual double evaluate(std::span<const int> set) const = 0;

  // Per-run incremental view used by solvers; objectives override this with
  // O(deg) marginal implementations. The default recomputes from scratch.
  virtual std::unique_ptr<IncrementalEvaluator> make_evaluator() const;

 protected:
  // Throws std::invalid_argument unless `set` is strictly increasing with
  // every id in [0, ground_size()).
  void check_set(std::span<const int> set) const;
};

// Mutable per-run tracker of a growing solution set: caches v(S) and serves
// marginals without re-evaluating the base set.
class IncrementalEvaluator {
 public:
  virtual ~IncrementalEvaluator() = default;
  virtual double marginal(int item) const = 0;  // v(item | S), item not in S
  virtual void add(int item) = 0;               // S <- S + item
  virtual double value() const = 0;             // cached v(S)
};

// View of an oracle restricted to a kept subset of its ground set, with the
// kept items re-densified to 0..m-1. Pairs with KnapsackInstance dropping.
class SubsetOracle : public ValueOracle {
 public:
  SubsetOracle(const ValueOracle& inner, std::vector<int> kept);

  int ground_size() const override { return static_cast<int>(kept_.size()); }
  double evaluate(std::span<const int> set) const override;
  std::unique_ptr<IncrementalEvaluator> make_evaluator() const override;

 private:
  const ValueOracle* inner_;
  std::vector<int> kept_;
};

// Counting wrapper: tallies every underlying evaluation. Values are passed
// through exactly. Keep one per run; the counter is not synchronized.
class CountingOracle {
 public:
  explicit CountingOracle(const ValueOracle& inner) : inner_(&inner) {}

  int ground_size() const { return inner_->ground_size(); }
  const ValueOracle& inner() const { return *inner_; }
  std::uint64_t calls() const { return calls_; }

  // v(S); one counted evaluation.
  double evaluate(std::span<const int> set);

  // v(S + i) - v(S). Two counted evaluations, or one when the caller supplies
  // the cached v(S). Throws std::invalid_argument if i is already in S.
  double marginal(int item, std::span<const int> set);
  double marginal(int item, std::span<const int> set, double cached_value);

  // Growing-set cursor over the oracle's incremental evaluator. Each
  // marginal() is one counted evaluation; add() performs none (the cached
  // solution value is updated from the marginal).
  class Cursor {
   public:
    double marginal(int item) {
      ++owner_->calls_;
      return eval_->marginal(item);
    }
    void add(int item) { eval_->add(item); }
    double value() const { return eval_->value(); }

   private:
    friend class CountingOracle;
    Cursor(CountingOracle* owner, std::unique_ptr<IncrementalEvaluator> eval)
        : owner_(owner), eval_(std::move(eval)) {}
    CountingOracle* owner_;
    std::unique_ptr<IncrementalEvaluator> eval_;
  };

  Cursor cursor() { return Cursor(this, inner_->make_evaluator()); }

 private:
  const ValueOracle* inner_;
  std::uint64_t calls_ = 0;
};

// Deterministic random stream: mt19937_64 engine with fixed-width mappings,
// so that equal seeds give equal draws on every platform. Consumption order
// is documented per algorithm; uniform draws use the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return state_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // One draw consumed regardless of p.
  bool bernoulli(double p) { return next_unit() < p; }

 private:
  // mt19937_64 output is fully pinned by the standard; only our own mappings
  // above are applied on top, never std:: distributions.
  std::uint64_t seed_;
  std::mt19937_64 state_;
};

// Stream splitting for repeated trials: splitmix64 over (root, index).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

// Feasible item set with its value and run provenance.
struct Solution {
  ItemSet set;
  double value = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t seed = 0;
  std::vector<int> picked_order;  // insertion order of `set`
};

bool is_feasible(const KnapsackInstance& inst, const ItemSet& set);

// Shared validator: throws std::logic_error if the solution violates the
// budget or carries a malformed set.
void validate_solution(const KnapsackInstance& inst, const Solution& sol);

}  // namespace subknap

#endif  // SUBKNAP_CORE_HPP_
