#include "subknap/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subknap {

ItemSet make_set(std::initializer_list<int> ids) {
  return make_set(std::vector<int>(ids));
}

ItemSet make_set(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool set_contains(const ItemSet& set, int id) {
  return std::binary_search(set.begin(), set.end(), id);
}

ItemSet set_with(const ItemSet& set, int id) {
  ItemSet out;
  out.reserve(set.size() + 1);
  auto pos = std::lower_bound(set.begin(), set.end(), id);
  out.insert(out.end(), set.begin(), pos);
  out.push_back(id);
  out.insert(out.end(), pos, set.end());
  return out;
}

KnapsackInstance::KnapsackInstance(std::vector<double> costs, double budget)
    : budget_(budget), original_size_(static_cast<int>(costs.size())) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("KnapsackInstance: budget must be positive");
  }
  for (size_t i = 0; i < costs.size(); ++i) {
    if (!(costs[i] > 0.0) || !std::isfinite(costs[i])) {
      throw std::invalid_argument("KnapsackInstance: cost of item " +
                                  std::to_string(i) + " must be positive");
    }
    total_cost_ += costs[i];
    if (costs[i] <= budget) {
      kept_.push_back(static_cast<int>(i));
      costs_.push_back(costs[i]);
    }
  }
}

void ValueOracle::check_set(std::span<const int> set) const {
  const int n = ground_size();
  int prev = -1;
  for (int id : set) {
    if (id < 0 || id >= n) {
      throw std::invalid_argument("ValueOracle: unknown item id " +
                                  std::to_string(id));
    }
    if (id <= prev) {
      throw std::invalid_argument(
          "ValueOracle: set must be strictly increasing");
    }
    prev = id;
  }
}

namespace {

// Fallback evaluator: one fresh evaluation per marginal against the cached
// base value.
class RecomputeEvaluator : public IncrementalEvaluator {
 public:
  explicit RecomputeEvaluator(const ValueOracle& oracle) : oracle_(&oracle) {}

  double marginal(int item) const override {
    return oracle_->evaluate(set_with(set_, item)) - value_;
  }

  void add(int item) override {
    if (set_contains(set_, item)) {
      throw std::invalid_argument("IncrementalEvaluator: item already in set");
    }
    value_ += marginal(item);
    set_ = set_with(set_, item);
  }

  double value() const override { return value_; }

 private:
  const ValueOracle* oracle_;
  ItemSet set_;
  double value_ = 0.0;
};

class SubsetEvaluator : public IncrementalEvaluator {
 public:
  SubsetEvaluator(std::unique_ptr<IncrementalEvaluator> inner,
                  const std::vector<int>& kept)
      : inner_(std::move(inner)), kept_(&kept) {}

  double marginal(int item) const override {
    return inner_->marginal(kept_->at(static_cast<size_t>(item)));
  }
  void add(int item) override {
    inner_->add(kept_->at(static_cast<size_t>(item)));
  }
  double value() const override { return inner_->value(); }

 private:
  std::unique_ptr<IncrementalEvaluator> inner_;
  const std::vector<int>* kept_;
};

}  // namespace

std::unique_ptr<IncrementalEvaluator> ValueOracle::make_evaluator() const {
  return std::make_unique<RecomputeEvaluator>(*this);
}

SubsetOracle::SubsetOracle(const ValueOracle& inner, std::vector<int> kept)
    : inner_(&inner), kept_(std::move(kept)) {
  int prev = -1;
  for (int id : kept_) {
    if (id < 0 || id >= inner.ground_size() || id <= prev) {
      throw std::invalid_argument("SubsetOracle: kept ids must be a strictly "
                                  "increasing subset of the inner ground set");
    }
    prev = id;
  }
}

double SubsetOracle::evaluate(std::span<const int> set) const {
  check_set(set);
  ItemSet mapped;
  mapped.reserve(set.size());
  for (int id : set) mapped.push_back(kept_[static_cast<size_t>(id)]);
  return inner_->evaluate(mapped);
}

std::unique_ptr<IncrementalEvaluator> SubsetOracle::make_evaluator() const {
  return std::make_unique<SubsetEvaluator>(inner_->make_evaluator(), kept_);
}

double CountingOracle::evaluate(std::span<const int> set) {
  ++calls_;
  return inner_->evaluate(set);
}

double CountingOracle::marginal(int item, std::span<const int> set) {
  ItemSet base(set.begin(), set.end());
  if (set_contains(base, item)) {
    throw std::invalid_argument("marginal: item already in set");
  }
  const double with = evaluate(set_with(base, item));
  const double without = evaluate(base);
  return with - without;
}

double CountingOracle::marginal(int item, std::span<const int> set,
                                double cached_value) {
  ItemSet base(set.begin(), set.end());
  if (set_contains(base, item)) {
    throw std::invalid_argument("marginal: item already in set");
  }
  return evaluate(set_with(base, item)) - cached_value;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  // splitmix64 of the (root, index) pair.
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool is_feasible(const KnapsackInstance& inst, const ItemSet& set) {
  double total = 0.0;
  int prev = -1;
  for (int id : set) {
    if (id < 0 || id >= inst.size() || id <= prev) return false;
    prev = id;
    total += inst.cost(id);
  }
  // Tiny relative slack: the solvers track the remaining budget by
  // sequential subtraction, which can differ from this sum in the last ulps.
  return total <= inst.budget() * (1.0 + 1e-12) + 1e-12;
}

void validate_solution(const KnapsackInstance& inst, const Solution& sol) {
  if (!is_feasible(inst, sol.set)) {
    throw std::logic_error("Solution violates the knapsack constraint");
  }
  if (sol.picked_order.size() != sol.set.size() ||
      make_set(sol.picked_order) != sol.set) {
    throw std::logic_error("Solution picked_order does not match its set");
  }
}

}  // namespace subknap
