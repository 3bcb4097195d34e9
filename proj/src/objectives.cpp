#include "subknap/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace subknap {

WeightedGraph::WeightedGraph(int n, const std::vector<Edge>& edges) : n_(n) {
  if (n < 0) throw std::invalid_argument("WeightedGraph: negative size");

  // Normalize: undirected key (min,max), keep the last weight per key.
  std::map<std::pair<int, int>, double> last;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw std::invalid_argument("WeightedGraph: endpoint out of range");
    }
    if (!(e.w >= 0.0) || e.w > 1.0) {
      throw std::invalid_argument("WeightedGraph: weight must be in [0, 1]");
    }
    if (e.u == e.v) {
      ++self_loops_dropped_;
      continue;
    }
    auto key = std::minmax(e.u, e.v);
    auto [it, inserted] = last.insert_or_assign({key.first, key.second}, e.w);
    if (!inserted) ++duplicates_collapsed_;
  }

  std::vector<int> degree(static_cast<size_t>(n), 0);
  for (const auto& [key, w] : last) {
    if (w == 0.0) continue;
    ++degree[static_cast<size_t>(key.first)];
    ++degree[static_cast<size_t>(key.second)];
  }
  offsets_.assign(static_cast<size_t>(n) + 1, 0);
  for (int u = 0; u < n; ++u) {
    offsets_[static_cast<size_t>(u) + 1] =
        offsets_[static_cast<size_t>(u)] + static_cast<size_t>(degree[u]);
  }
  adj_.resize(offsets_.back());
  std::vector<size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  weighted_degree_.assign(static_cast<size_t>(n), 0.0);
  for (const auto& [key, w] : last) {
    if (w == 0.0) continue;
    adj_[cursor[static_cast<size_t>(key.first)]++] = Neighbor{key.second, w};
    adj_[cursor[static_cast<size_t>(key.second)]++] = Neighbor{key.first, w};
    weighted_degree_[static_cast<size_t>(key.first)] += w;
    weighted_degree_[static_cast<size_t>(key.second)] += w;
    total_weight_ += w;
    ++edge_count_;
  }
  for (int u = 0; u < n; ++u) {
    auto begin = adj_.begin() + static_cast<long>(offsets_[static_cast<size_t>(u)]);
    auto end = adj_.begin() + static_cast<long>(offsets_[static_cast<size_t>(u) + 1]);
    std::sort(begin, end,
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }
}

std::span<const Neighbor> WeightedGraph::neighbors(int u) const {
  const size_t lo = offsets_.at(static_cast<size_t>(u));
  const size_t hi = offsets_.at(static_cast<size_t>(u) + 1);
  return {adj_.data() + lo, hi - lo};
}

double WeightedGraph::weight(int u, int v) const {
  for (const Neighbor& nb : neighbors(u)) {
    if (nb.id == v) return nb.w;
  }
  return 0.0;
}

namespace {

std::vector<char> membership(int n, std::span<const int> set) {
  std::vector<char> in(static_cast<size_t>(n), 0);
  for (int id : set) in[static_cast<size_t>(id)] = 1;
  return in;
}

class CutEvaluator : public IncrementalEvaluator {
 public:
  explicit CutEvaluator(const WeightedGraph& g)
      : graph_(&g), in_set_(static_cast<size_t>(g.size()), 0) {}

  double marginal(int item) const override {
    double delta = 0.0;
    for (const Neighbor& nb : graph_->neighbors(item)) {
      delta += in_set_[static_cast<size_t>(nb.id)] ? -nb.w : nb.w;
    }
    return delta;
  }

  void add(int item) override {
    value_ += marginal(item);
    in_set_[static_cast<size_t>(item)] = 1;
  }

  double value() const override { return value_; }

 private:
  const WeightedGraph* graph_;
  std::vector<char> in_set_;
  double value_ = 0.0;
};

}  // namespace

double CutObjective::evaluate(std::span<const int> set) const {
  check_set(set);
  const std::vector<char> in = membership(graph_.size(), set);
  double total = 0.0;
  for (int u : set) {
    for (const Neighbor& nb : graph_.neighbors(u)) {
      if (!in[static_cast<size_t>(nb.id)]) total += nb.w;
    }
  }
  return total;
}

std::unique_ptr<IncrementalEvaluator> CutObjective::make_evaluator() const {
  return std::make_unique<CutEvaluator>(graph_);
}

VideoRecObjective::VideoRecObjective(WeightedGraph graph,
                                     std::vector<double> ratings,
                                     std::vector<std::vector<int>> categories,
                                     VideoRecParams params)
    : graph_(std::move(graph)), ratings_(std::move(ratings)), params_(params) {
  const size_t n = static_cast<size_t>(graph_.size());
  if (ratings_.size() != n) {
    throw std::invalid_argument("VideoRecObjective: ratings size mismatch");
  }
  for (double r : ratings_) {
    if (!(r >= 0.0)) {
      throw std::invalid_argument("VideoRecObjective: ratings must be >= 0");
    }
  }
  if (params_.lambda < 1.0 || params_.mu < 0.0 || params_.alpha < 0.0 ||
      params_.beta < 0.0) {
    throw std::invalid_argument(
        "VideoRecObjective: need lambda >= 1, mu/alpha/beta >= 0");
  }
  category_blocks_ = (categories.size() + 63) / 64;
  category_bits_.assign(n * category_blocks_, 0);
  for (size_t c = 0; c < categories.size(); ++c) {
    for (int id : categories[c]) {
      if (id < 0 || id >= graph_.size()) {
        throw std::invalid_argument("VideoRecObjective: category id out of range");
      }
      category_bits_[static_cast<size_t>(id) * category_blocks_ + c / 64] |=
          1ULL << (c % 64);
    }
  }
}

bool VideoRecObjective::same_category(int i, int j) const {
  const std::uint64_t* a = category_bits_.data() +
                           static_cast<size_t>(i) * category_blocks_;
  const std::uint64_t* b = category_bits_.data() +
                           static_cast<size_t>(j) * category_blocks_;
  for (size_t k = 0; k < category_blocks_; ++k) {
    if (a[k] & b[k]) return true;
  }
  return false;
}

double VideoRecObjective::pair_penalty(int i, int j, double w) const {
  return (params_.lambda + (same_category(i, j) ? params_.mu : 0.0)) * w;
}

namespace {

class VideoRecEvaluatorImpl : public IncrementalEvaluator {
 public:
  VideoRecEvaluatorImpl(const VideoRecObjective& obj, const WeightedGraph& g,
                        const std::vector<double>& ratings,
                        const VideoRecParams& params)
      : obj_(&obj), graph_(&g), ratings_(&ratings), params_(&params),
        in_set_(static_cast<size_t>(g.size()), 0) {}

  double marginal(int item) const override {
    // alpha*rho_x + beta*(W_x - 2*sum_{j in S} (lambda + chi*mu) w_xj);
    // the factor 2 accounts for both ordered pairs (x,j) and (j,x).
    double internal = 0.0;
    for (const Neighbor& nb : graph_->neighbors(item)) {
      if (!in_set_[static_cast<size_t>(nb.id)]) continue;
      internal += (params_->lambda +
                   (obj_->same_category(item, nb.id) ? params_->mu : 0.0)) *
                  nb.w;
    }
    return params_->alpha * (*ratings_)[static_cast<size_t>(item)] +
           params_->beta *
               (graph_->weighted_degree(item) - 2.0 * internal);
  }

  void add(int item) override {
    value_ += marginal(item);
    in_set_[static_cast<size_t>(item)] = 1;
  }

  double value() const override { return value_; }

 private:
  const VideoRecObjective* obj_;
  const WeightedGraph* graph_;
  const std::vector<double>* ratings_;
  const VideoRecParams* params_;
  std::vector<char> in_set_;
  double value_ = 0.0;
};

}  // namespace

double VideoRecObjective::evaluate(std::span<const int> set) const {
  check_set(set);
  const std::vector<char> in = membership(graph_.size(), set);
  double rating_sum = 0.0;
  double coverage = 0.0;
  double internal = 0.0;  // ordered-pair sum over S x S
  for (int u : set) {
    rating_sum += ratings_[static_cast<size_t>(u)];
    coverage += graph_.weighted_degree(u);
    for (const Neighbor& nb : graph_.neighbors(u)) {
      if (in[static_cast<size_t>(nb.id)]) internal += pair_penalty(u, nb.id, nb.w);
    }
  }
  return params_.alpha * rating_sum + params_.beta * (coverage - internal);
}

std::unique_ptr<IncrementalEvaluator> VideoRecObjective::make_evaluator() const {
  return std::make_unique<VideoRecEvaluatorImpl>(*this, graph_, ratings_,
                                                 params_);
}

RevenueObjective::RevenueObjective(WeightedGraph graph,
                                   std::vector<double> coeffs)
    : graph_(std::move(graph)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<size_t>(graph_.size())) {
    throw std::invalid_argument("RevenueObjective: coeffs size mismatch");
  }
  for (double a : coeffs_) {
    if (!(a >= 0.0)) {
      throw std::invalid_argument("RevenueObjective: coeffs must be >= 0");
    }
  }
}

double revenue_value(const WeightedGraph& graph, std::span<const double> coeffs,
                     std::span<const int> set) {
  const int n = graph.size();
  std::vector<char> in(static_cast<size_t>(n), 0);
  for (int id : set) in[static_cast<size_t>(id)] = 1;
  std::vector<double> m(static_cast<size_t>(n), 0.0);
  for (int u : set) {
    for (const Neighbor& nb : graph.neighbors(u)) {
      m[static_cast<size_t>(nb.id)] += nb.w;
    }
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (in[static_cast<size_t>(j)]) continue;
    const double mass = m[static_cast<size_t>(j)];
    if (mass > 0.0) total += coeffs[static_cast<size_t>(j)] * std::sqrt(mass);
  }
  return total;
}

namespace {

class RevenueEvaluator : public IncrementalEvaluator {
 public:
  RevenueEvaluator(const WeightedGraph& g, std::span<const double> coeffs)
      : graph_(&g), coeffs_(coeffs),
        in_set_(static_cast<size_t>(g.size()), 0),
        m_(static_cast<size_t>(g.size()), 0.0) {}

  double marginal(int item) const override {
    return revenue_marginal(*graph_, in_set_, m_, item,
                            [this](int j) { return coeffs_[static_cast<size_t>(j)]; });
  }

  void add(int item) override {
    value_ += marginal(item);
    in_set_[static_cast<size_t>(item)] = 1;
    for (const Neighbor& nb : graph_->neighbors(item)) {
      m_[static_cast<size_t>(nb.id)] += nb.w;
    }
  }

  double value() const override { return value_; }

 private:
  const WeightedGraph* graph_;
  std::span<const double> coeffs_;
  std::vector<char> in_set_;
  std::vector<double> m_;
  double value_ = 0.0;
};

}  // namespace

double RevenueObjective::evaluate(std::span<const int> set) const {
  check_set(set);
  return revenue_value(graph_, coeffs_, set);
}

std::unique_ptr<IncrementalEvaluator> RevenueObjective::make_evaluator() const {
  return std::make_unique<RevenueEvaluator>(graph_, coeffs_);
}

}  // namespace subknap
