#include "subknap/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace subknap {

double PartialRealization::state(int id) const {
  if (!is_revealed(id)) {
    throw std::invalid_argument("PartialRealization: state of " +
                                std::to_string(id) + " not revealed");
  }
  return values_[static_cast<size_t>(id)];
}

void PartialRealization::mark_observed(int id) {
  if (set_contains(observed_, id)) {
    throw std::invalid_argument("PartialRealization: item already observed");
  }
  observed_ = set_with(observed_, id);
}

void PartialRealization::reveal(int id, double value) {
  if (revealed_.at(static_cast<size_t>(id))) return;  // never un-reveal
  revealed_[static_cast<size_t>(id)] = 1;
  values_[static_cast<size_t>(id)] = value;
  ++revealed_count_;
}

bool PartialRealization::extends(const PartialRealization& smaller) const {
  if (!std::includes(observed_.begin(), observed_.end(),
                     smaller.observed_.begin(), smaller.observed_.end())) {
    return false;
  }
  for (size_t i = 0; i < smaller.revealed_.size(); ++i) {
    if (!smaller.revealed_[i]) continue;
    if (i >= revealed_.size() || !revealed_[i] ||
        values_[i] != smaller.values_[i]) {
      return false;
    }
  }
  return true;
}

namespace {

// Generic fallback: stateless expected_marginal against a tracked pr.
class RecomputeAdaptiveEvaluator : public AdaptiveEvaluator {
 public:
  explicit RecomputeAdaptiveEvaluator(const AdaptiveOracle& oracle)
      : oracle_(&oracle), pr_(oracle.ground_size()) {}

  double expected_marginal(int item) const override {
    return oracle_->expected_marginal(item, pr_);
  }
  void observe(int item, const Realization& omega) override {
    pr_ = oracle_->observe(pr_, item, omega);
  }
  const PartialRealization& partial() const override { return pr_; }

 private:
  const AdaptiveOracle* oracle_;
  PartialRealization pr_;
};

}  // namespace

std::unique_ptr<AdaptiveEvaluator> AdaptiveOracle::make_evaluator() const {
  return std::make_unique<RecomputeAdaptiveEvaluator>(*this);
}

CoeffPrior CoeffPrior::lomax(double scale, double shape) {
  if (!(scale > 0.0) || !(shape > 1.0)) {
    throw std::invalid_argument(
        "CoeffPrior::lomax: need scale > 0 and shape > 1 for a finite mean");
  }
  CoeffPrior p;
  p.scale_ = scale;
  p.shape_ = shape;
  p.mean_ = scale / (shape - 1.0);
  return p;
}

CoeffPrior CoeffPrior::discrete(std::vector<double> atoms,
                                std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw std::invalid_argument("CoeffPrior::discrete: atom/prob mismatch");
  }
  double sum = 0.0;
  double mean = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] >= 0.0) || !(probs[i] >= 0.0)) {
      throw std::invalid_argument(
          "CoeffPrior::discrete: atoms and probs must be >= 0");
    }
    sum += probs[i];
    mean += atoms[i] * probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("CoeffPrior::discrete: probs must sum to 1");
  }
  CoeffPrior p;
  p.atoms_ = std::move(atoms);
  p.probs_ = std::move(probs);
  p.mean_ = mean;
  return p;
}

CoeffPrior CoeffPrior::point(double value) {
  return discrete({value}, {1.0});
}

double lomax_icdf(double u, double scale, double shape) {
  if (!(u >= 0.0) || u >= 1.0) {
    throw std::invalid_argument("lomax_icdf: u must be in [0, 1)");
  }
  return scale * (std::pow(1.0 - u, -1.0 / shape) - 1.0);
}

double CoeffPrior::sample(Rng& rng) const {
  const double u = rng.next_unit();
  if (!is_discrete()) return lomax_icdf(u, scale_, shape_);
  double acc = 0.0;
  for (size_t i = 0; i < atoms_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return atoms_[i];
  }
  return atoms_.back();
}

AdaptiveRevenueModel::AdaptiveRevenueModel(WeightedGraph graph,
                                           CoeffPrior shared_prior)
    : graph_(std::move(graph)) {
  priors_.assign(static_cast<size_t>(graph_.size()), shared_prior);
  means_.assign(priors_.size(), shared_prior.mean());
}

AdaptiveRevenueModel::AdaptiveRevenueModel(WeightedGraph graph,
                                           std::vector<CoeffPrior> priors)
    : graph_(std::move(graph)), priors_(std::move(priors)) {
  if (priors_.size() != static_cast<size_t>(graph_.size())) {
    throw std::invalid_argument("AdaptiveRevenueModel: prior count mismatch");
  }
  means_.reserve(priors_.size());
  for (const CoeffPrior& p : priors_) means_.push_back(p.mean());
}

bool AdaptiveRevenueModel::all_discrete() const {
  return std::all_of(priors_.begin(), priors_.end(),
                     [](const CoeffPrior& p) { return p.is_discrete(); });
}

namespace {

void check_ids(int n, std::span<const int> set) {
  int prev = -1;
  for (int id : set) {
    if (id < 0 || id >= n || id <= prev) {
      throw std::invalid_argument("adaptive: malformed item set");
    }
    prev = id;
  }
}

void check_realization(int n, const Realization& omega) {
  if (omega.states.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("adaptive: realization size mismatch");
  }
}

}  // namespace

double AdaptiveRevenueModel::expected_marginal(
    int item, const PartialRealization& pr) const {
  const int n = graph_.size();
  if (item < 0 || item >= n) {
    throw std::invalid_argument("expected_marginal: unknown item");
  }
  if (set_contains(pr.observed(), item)) {
    throw std::invalid_argument("expected_marginal: item already observed");
  }
  std::vector<char> in(static_cast<size_t>(n), 0);
  std::vector<double> m(static_cast<size_t>(n), 0.0);
  for (int u : pr.observed()) {
    in[static_cast<size_t>(u)] = 1;
    for (const Neighbor& nb : graph_.neighbors(u)) {
      m[static_cast<size_t>(nb.id)] += nb.w;
    }
  }
  return revenue_marginal(graph_, in, m, item, [&](int j) {
    return pr.is_revealed(j) ? pr.state(j) : means_[static_cast<size_t>(j)];
  });
}

double AdaptiveRevenueModel::realized_value(std::span<const int> set,
                                            const Realization& omega) const {
  check_ids(graph_.size(), set);
  check_realization(graph_.size(), omega);
  return revenue_value(graph_, omega.states, set);
}

PartialRealization AdaptiveRevenueModel::observe(const PartialRealization& pr,
                                                 int item,
                                                 const Realization& omega) const {
  check_realization(graph_.size(), omega);
  if (item < 0 || item >= graph_.size()) {
    throw std::invalid_argument("observe: unknown item");
  }
  PartialRealization next = pr;
  next.mark_observed(item);  // throws on re-observation
  next.reveal(item, omega.states[static_cast<size_t>(item)]);
  for (const Neighbor& nb : graph_.neighbors(item)) {
    next.reveal(nb.id, omega.states[static_cast<size_t>(nb.id)]);
  }
  return next;
}

namespace {

// Incremental twin of RevenueObjective's evaluator: same kernel and the same
// m-update pattern, with coefficients read from the revealed states or the
// prior means. Point-mass priors therefore reproduce the deterministic
// trajectory bit for bit.
class RevenueAdaptiveEvaluator : public AdaptiveEvaluator {
 public:
  RevenueAdaptiveEvaluator(const WeightedGraph& g,
                           const std::vector<double>& means)
      : graph_(&g), means_(&means), pr_(g.size()),
        in_set_(static_cast<size_t>(g.size()), 0),
        m_(static_cast<size_t>(g.size()), 0.0) {}

  double expected_marginal(int item) const override {
    if (in_set_[static_cast<size_t>(item)]) {
      throw std::invalid_argument("expected_marginal: item already observed");
    }
    return revenue_marginal(*graph_, in_set_, m_, item, [this](int j) {
      return pr_.is_revealed(j) ? pr_.state(j)
                                : (*means_)[static_cast<size_t>(j)];
    });
  }

  void observe(int item, const Realization& omega) override {
    check_realization(graph_->size(), omega);
    pr_.mark_observed(item);
    pr_.reveal(item, omega.states[static_cast<size_t>(item)]);
    in_set_[static_cast<size_t>(item)] = 1;
    for (const Neighbor& nb : graph_->neighbors(item)) {
      pr_.reveal(nb.id, omega.states[static_cast<size_t>(nb.id)]);
      m_[static_cast<size_t>(nb.id)] += nb.w;
    }
  }

  const PartialRealization& partial() const override { return pr_; }

 private:
  const WeightedGraph* graph_;
  const std::vector<double>* means_;
  PartialRealization pr_;
  std::vector<char> in_set_;
  std::vector<double> m_;
};

}  // namespace

std::unique_ptr<AdaptiveEvaluator> AdaptiveRevenueModel::make_evaluator() const {
  return std::make_unique<RevenueAdaptiveEvaluator>(graph_, means_);
}

Realization sample_realization(const AdaptiveRevenueModel& model, Rng& rng) {
  Realization omega;
  omega.states.reserve(static_cast<size_t>(model.ground_size()));
  for (int i = 0; i < model.ground_size(); ++i) {
    omega.states.push_back(model.prior(i).sample(rng));
  }
  return omega;
}

namespace {

class SubsetAdaptiveEvaluator : public AdaptiveEvaluator {
 public:
  SubsetAdaptiveEvaluator(std::unique_ptr<AdaptiveEvaluator> inner,
                          const std::vector<int>& kept)
      : inner_(std::move(inner)), kept_(&kept) {}

  double expected_marginal(int item) const override {
    return inner_->expected_marginal(kept_->at(static_cast<size_t>(item)));
  }
  void observe(int item, const Realization& omega) override {
    inner_->observe(kept_->at(static_cast<size_t>(item)), omega);
  }
  const PartialRealization& partial() const override {
    return inner_->partial();
  }

 private:
  std::unique_ptr<AdaptiveEvaluator> inner_;
  const std::vector<int>* kept_;
};

}  // namespace

SubsetAdaptiveOracle::SubsetAdaptiveOracle(const AdaptiveOracle& inner,
                                           std::vector<int> kept)
    : inner_(&inner), kept_(std::move(kept)) {
  int prev = -1;
  for (int id : kept_) {
    if (id < 0 || id >= inner.ground_size() || id <= prev) {
      throw std::invalid_argument(
          "SubsetAdaptiveOracle: kept ids must be a strictly increasing "
          "subset of the inner ground set");
    }
    prev = id;
  }
}

double SubsetAdaptiveOracle::expected_marginal(
    int item, const PartialRealization& pr) const {
  return inner_->expected_marginal(kept_.at(static_cast<size_t>(item)), pr);
}

double SubsetAdaptiveOracle::realized_value(std::span<const int> set,
                                            const Realization& omega) const {
  check_ids(ground_size(), set);
  ItemSet mapped;
  mapped.reserve(set.size());
  for (int id : set) mapped.push_back(kept_[static_cast<size_t>(id)]);
  return inner_->realized_value(mapped, omega);
}

PartialRealization SubsetAdaptiveOracle::observe(const PartialRealization& pr,
                                                 int item,
                                                 const Realization& omega) const {
  return inner_->observe(pr, kept_.at(static_cast<size_t>(item)), omega);
}

std::unique_ptr<AdaptiveEvaluator> SubsetAdaptiveOracle::make_evaluator() const {
  return std::make_unique<SubsetAdaptiveEvaluator>(inner_->make_evaluator(),
                                                   kept_);
}

namespace {

constexpr int kMaxStateAtoms = 10000;

long long product_atom_count(const AdaptiveRevenueModel& model) {
  long long total = 1;
  for (int i = 0; i < model.ground_size(); ++i) {
    if (!model.prior(i).is_discrete()) {
      throw std::invalid_argument(
          "exact policy evaluation needs discrete priors; discretize first");
    }
    total *= static_cast<long long>(model.prior(i).atoms().size());
    if (total > kMaxStateAtoms) {
      throw CapacityError("state space exceeds the exact-enumeration cap");
    }
  }
  return total;
}

void check_alignment(const AdaptiveRevenueModel& model,
                     const KnapsackInstance& inst) {
  if (inst.any_dropped() || inst.size() != model.ground_size()) {
    throw std::invalid_argument(
        "exact policy evaluation requires instance ids == model ids");
  }
}

}  // namespace

double evaluate_policy_exact(const AdaptiveRevenueModel& model,
                             const KnapsackInstance& inst,
                             const Policy& policy) {
  check_alignment(model, inst);
  product_atom_count(model);
  const int n = model.ground_size();

  std::vector<size_t> atom_idx(static_cast<size_t>(n), 0);
  double expectation = 0.0;
  while (true) {
    Realization omega;
    omega.states.resize(static_cast<size_t>(n));
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const CoeffPrior& p = model.prior(i);
      omega.states[static_cast<size_t>(i)] = p.atoms()[atom_idx[static_cast<size_t>(i)]];
      prob *= p.probs()[atom_idx[static_cast<size_t>(i)]];
    }
    if (prob > 0.0) {
      PartialRealization pr(n);
      ItemSet set;
      double remaining = inst.budget();
      while (true) {
        const int next = policy(pr, remaining);
        if (next < 0) break;
        if (next >= n || set_contains(set, next)) {
          throw std::invalid_argument("policy returned an invalid item");
        }
        if (inst.cost(next) > remaining * (1.0 + 1e-12) + 1e-12) {
          throw std::invalid_argument("policy exceeded the budget");
        }
        pr = model.observe(pr, next, omega);
        set = set_with(set, next);
        remaining -= inst.cost(next);
      }
      expectation += prob * model.realized_value(set, omega);
    }
    // Mixed-radix increment over the atom grid.
    int carry = 0;
    while (carry < n) {
      size_t& idx = atom_idx[static_cast<size_t>(carry)];
      if (++idx < model.prior(carry).atoms().size()) break;
      idx = 0;
      ++carry;
    }
    if (carry == n) break;
  }
  return expectation;
}

namespace {

// Observation state for the backward induction: which items were picked and
// which atom each revealed buyer landed on (-1 while hidden).
struct DpKey {
  std::uint32_t mask;
  std::vector<int> revealed;
  bool operator<(const DpKey& other) const {
    if (mask != other.mask) return mask < other.mask;
    return revealed < other.revealed;
  }
};

struct DpEntry {
  double value = 0.0;
  int action = -1;  // -1 = stop
};

class ExactPolicySolver {
 public:
  ExactPolicySolver(const AdaptiveRevenueModel& model,
                    const KnapsackInstance& inst)
      : model_(&model), inst_(&inst), n_(model.ground_size()) {
    check_alignment(model, inst);
    product_atom_count(model);
    if (n_ > 12) {
      throw CapacityError("exact policy optimum limited to n <= 12");
    }
  }

  double solve() {
    std::vector<int> revealed(static_cast<size_t>(n_), -1);
    return best_value(0, revealed);
  }

  const std::map<DpKey, DpEntry>& table() const { return memo_; }

 private:
  double best_value(std::uint32_t mask, std::vector<int>& revealed) {
    DpKey key{mask, revealed};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second.value;

    DpEntry entry;
    entry.value = stop_value(mask, revealed);
    entry.action = -1;

    double spent = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (mask & (1u << i)) spent += inst_->cost(i);
    }
    for (int i = 0; i < n_; ++i) {
      if (mask & (1u << i)) continue;
      if (spent + inst_->cost(i) > inst_->budget() * (1.0 + 1e-12) + 1e-12) {
        continue;
      }
      std::vector<int> to_reveal;
      if (revealed[static_cast<size_t>(i)] < 0) to_reveal.push_back(i);
      for (const Neighbor& nb : model_->graph().neighbors(i)) {
        if (revealed[static_cast<size_t>(nb.id)] < 0) to_reveal.push_back(nb.id);
      }
      const double val =
          expect_over(to_reveal, 0, mask | (1u << i), revealed);
      if (val > entry.value + 1e-15) {
        entry.value = val;
        entry.action = i;
      }
    }
    memo_.emplace(std::move(key), entry);
    return entry.value;
  }

  double expect_over(const std::vector<int>& to_reveal, size_t idx,
                     std::uint32_t mask, std::vector<int>& revealed) {
    if (idx == to_reveal.size()) return best_value(mask, revealed);
    const int j = to_reveal[idx];
    const CoeffPrior& prior = model_->prior(j);
    double acc = 0.0;
    for (size_t k = 0; k < prior.atoms().size(); ++k) {
      if (prior.probs()[k] == 0.0) continue;
      revealed[static_cast<size_t>(j)] = static_cast<int>(k);
      acc += prior.probs()[k] * expect_over(to_reveal, idx + 1, mask, revealed);
    }
    revealed[static_cast<size_t>(j)] = -1;
    return acc;
  }

  double stop_value(std::uint32_t mask, const std::vector<int>& revealed) const {
    Realization omega;
    omega.states.resize(static_cast<size_t>(n_));
    ItemSet set;
    for (int j = 0; j < n_; ++j) {
      const int atom = revealed[static_cast<size_t>(j)];
      omega.states[static_cast<size_t>(j)] =
          atom >= 0 ? model_->prior(j).atoms()[static_cast<size_t>(atom)]
                    : model_->prior(j).mean();
      if (mask & (1u << j)) set.push_back(j);
    }
    // Every buyer with seeded incident weight is revealed (closed
    // neighborhoods), so the mean fill above never contributes.
    return model_->realized_value(set, omega);
  }

  const AdaptiveRevenueModel* model_;
  const KnapsackInstance* inst_;
  int n_;
  std::map<DpKey, DpEntry> memo_;
};

}  // namespace

double optimal_policy_value_exact(const AdaptiveRevenueModel& model,
                                  const KnapsackInstance& inst) {
  ExactPolicySolver solver(model, inst);
  return solver.solve();
}

ExactPolicy optimal_policy_exact(const AdaptiveRevenueModel& model,
                                 const KnapsackInstance& inst) {
  auto solver = std::make_shared<ExactPolicySolver>(model, inst);
  const double value = solver->solve();
  const AdaptiveRevenueModel* model_ptr = &model;
  const int n = model.ground_size();
  Policy policy = [solver, model_ptr, n](const PartialRealization& pr,
                                         double /*remaining*/) -> int {
    DpKey key{0, std::vector<int>(static_cast<size_t>(n), -1)};
    for (int id : pr.observed()) key.mask |= 1u << id;
    for (int j = 0; j < n; ++j) {
      if (!pr.is_revealed(j)) continue;
      const auto atoms = model_ptr->prior(j).atoms();
      int idx = -1;
      for (size_t k = 0; k < atoms.size(); ++k) {
        if (atoms[k] == pr.state(j)) {
          idx = static_cast<int>(k);
          break;
        }
      }
      if (idx < 0) {
        throw std::invalid_argument(
            "optimal policy: revealed state is not a prior atom");
      }
      key.revealed[static_cast<size_t>(j)] = idx;
    }
    auto it = solver->table().find(key);
    if (it == solver->table().end()) {
      throw std::logic_error("optimal policy: unexplored observation state");
    }
    return it->second.action;
  };
  return ExactPolicy{value, std::move(policy)};
}

}  // namespace subknap
