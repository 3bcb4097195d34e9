#ifndef SUBKNAP_OBJECTIVES_HPP_
#define SUBKNAP_OBJECTIVES_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "subknap/core.hpp"

namespace subknap {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

struct Neighbor {
  int id = 0;
  double w = 0.0;
};

// Undirected weighted graph with weights in [0, 1], stored as a CSR adjacency
// sorted by neighbor id. Construction normalizes the edge list: self-loops
// are dropped (w_ii = 0 by convention), zero-weight edges are dropped (an
// edge exists iff w > 0), and duplicate {u,v} entries keep the last weight.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int n, const std::vector<Edge>& edges);

  int size() const { return n_; }
  int edge_count() const { return edge_count_; }
  std::span<const Neighbor> neighbors(int u) const;
  double weighted_degree(int u) const {
    return weighted_degree_.at(static_cast<size_t>(u));
  }
  double total_weight() const { return total_weight_; }
  double weight(int u, int v) const;  // 0 when not adjacent

  int self_loops_dropped() const { return self_loops_dropped_; }
  int duplicates_collapsed() const { return duplicates_collapsed_; }

 private:
  int n_ = 0;
  int edge_count_ = 0;
  std::vector<size_t> offsets_{0};
  std::vector<Neighbor> adj_;
  std::vector<double> weighted_degree_;
  double total_weight_ = 0.0;
  int self_loops_dropped_ = 0;
  int duplicates_collapsed_ = 0;
};

// Weighted cut: v(S) = sum of w_ij over i in S, j outside S.
class CutObjective : public ValueOracle {
 public:
  explicit CutObjective(WeightedGraph graph) : graph_(std::move(graph)) {}

  int ground_size() const override { return graph_.size(); }
  double evaluate(std::span<const int> set) const override;
  std::unique_ptr<IncrementalEvaluator> make_evaluator() const override;

  const WeightedGraph& graph() const { return graph_; }

 private:
  WeightedGraph graph_;
};

struct VideoRecParams {
  double lambda = 3.0;  // internal-similarity penalty, submodular for >= 1
  double mu = 7.0;      // extra penalty for same-category pairs
  double alpha = 1.0;   // rating term weight
  double beta = 1.0;    // coverage term weight
};

// Rating-plus-coverage recommendation objective:
//   v(S) = alpha * sum_{i in S} rating_i + beta * g(S),
//   g(S) = sum_{i in S} W_i - sum_{i,j in S} (lambda + chi_ij * mu) * w_ij,
// where W_i is the total incident weight of i, the inner sum runs over
// ordered pairs, and chi_ij = 1 iff i and j share a category. Values can go
// negative for aggressive (lambda, mu); no clamping is applied.
class VideoRecObjective : public ValueOracle {
 public:
  VideoRecObjective(WeightedGraph graph, std::vector<double> ratings,
                    std::vector<std::vector<int>> categories,
                    VideoRecParams params);

  int ground_size() const override { return graph_.size(); }
  double evaluate(std::span<const int> set) const override;
  std::unique_ptr<IncrementalEvaluator> make_evaluator() const override;

  const WeightedGraph& graph() const { return graph_; }
  const VideoRecParams& params() const { return params_; }
  bool same_category(int i, int j) const;

 private:
  double pair_penalty(int i, int j, double w) const;

  WeightedGraph graph_;
  std::vector<double> ratings_;
  VideoRecParams params_;
  // Per-item category bit masks; chi_ij is one block-wise AND pass.
  std::vector<std::uint64_t> category_bits_;
  size_t category_blocks_ = 0;
};

// Influence-and-exploit revenue: seeded buyers S are given the good, every
// remaining buyer i pays a_i * sqrt(sum of seeded incident weight):
//   v(S) = sum_{i not in S} a_i * sqrt(m_i(S)),  m_i(S) = sum_{j in S} w_ij.
class RevenueObjective : public ValueOracle {
 public:
  RevenueObjective(WeightedGraph graph, std::vector<double> coeffs);

  int ground_size() const override { return graph_.size(); }
  double evaluate(std::span<const int> set) const override;
  std::unique_ptr<IncrementalEvaluator> make_evaluator() const override;

  const WeightedGraph& graph() const { return graph_; }
  std::span<const double> coeffs() const { return coeffs_; }

 private:
  WeightedGraph graph_;
  std::vector<double> coeffs_;
};

// Shared revenue kernels; AdaptiveRevenueModel reuses these so realized
// values match RevenueObjective bit for bit.
double revenue_value(const WeightedGraph& graph, std::span<const double> coeffs,
                     std::span<const int> set);

// v(item | S) given membership flags and m = seeded incident weights; coeff
// maps buyer id to their (known or expected) coefficient.
template <class CoeffFn>
double revenue_marginal(const WeightedGraph& graph,
                        const std::vector<char>& in_set,
                        const std::vector<double>& m, int item,
                        CoeffFn&& coeff) {
  double gain = 0.0;
  for (const Neighbor& nb : graph.neighbors(item)) {
    if (in_set[static_cast<size_t>(nb.id)]) continue;
    const double cur = m[static_cast<size_t>(nb.id)];
    gain += coeff(nb.id) * (std::sqrt(cur + nb.w) - std::sqrt(cur));
  }
  return gain - coeff(item) * std::sqrt(m[static_cast<size_t>(item)]);
}

}  // namespace subknap

#endif  // SUBKNAP_OBJECTIVES_HPP_
