#ifndef SUBKNAP_TESTS_SUPPORT_HPP_
#define SUBKNAP_TESTS_SUPPORT_HPP_

#include <vector>

#include "subknap/core.hpp"
#include "subknap/objectives.hpp"

namespace subknap::testing {

// Modular v(S) = sum of x_i: exercises the generic recompute evaluator.
class ModularOracle : public ValueOracle {
 public:
  explicit ModularOracle(std::vector<double> x) : x_(std::move(x)) {}
  int ground_size() const override { return static_cast<int>(x_.size()); }
  double evaluate(std::span<const int> set) const override {
    check_set(set);
    double total = 0.0;
    for (int id : set) total += x_[static_cast<size_t>(id)];
    return total;
  }

 private:
  std::vector<double> x_;
};

inline WeightedGraph triangle_graph() {
  return WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

inline WeightedGraph path3_graph() {
  return WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
}

// Independent cut oracle: straight loop over an explicit edge list, no
// adjacency structure involved.
inline double cut_from_edges(const std::vector<Edge>& edges,
                             const ItemSet& set) {
  double total = 0.0;
  for (const Edge& e : edges) {
    const bool u_in = set_contains(set, e.u);
    const bool v_in = set_contains(set, e.v);
    if (u_in != v_in) total += e.w;
  }
  return total;
}

// Independent revenue route: membership scan plus pairwise weight lookups.
inline double revenue_by_lookup(const WeightedGraph& g,
                                const std::vector<double>& coeffs,
                                const ItemSet& set) {
  double total = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (set_contains(set, i)) continue;
    double mass = 0.0;
    for (int j : set) mass += g.weight(i, j);
    if (mass > 0.0) total += coeffs[static_cast<size_t>(i)] * std::sqrt(mass);
  }
  return total;
}

inline ItemSet random_subset(int n, double keep_prob, Rng& rng) {
  ItemSet s;
  for (int i = 0; i < n; ++i) {
    if (rng.next_unit() < keep_prob) s.push_back(i);
  }
  return s;
}

struct SubmodularityReport {
  int checked = 0;
  int def1_violations = 0;  // v(i|S) >= v(i|T) for S subset of T
  int def2_violations = 0;  // v(S) + v(T) >= v(S u T) + v(S n T)
};

inline SubmodularityReport check_submodularity(const ValueOracle& oracle,
                                               int triples, Rng& rng,
                                               double tol = 1e-9) {
  const int n = oracle.ground_size();
  SubmodularityReport report;
  for (int t = 0; t < triples; ++t) {
    ItemSet small = random_subset(n, 0.3, rng);
    ItemSet large = small;
    for (int i = 0; i < n; ++i) {
      if (!set_contains(large, i) && rng.next_unit() < 0.3) {
        large = set_with(large, i);
      }
    }
    std::vector<int> outside;
    for (int i = 0; i < n; ++i) {
      if (!set_contains(large, i)) outside.push_back(i);
    }
    ++report.checked;
    if (!outside.empty()) {
      const int i = outside[static_cast<size_t>(
          rng.next_u64() % outside.size())];
      const double m_small = oracle.evaluate(set_with(small, i)) -
                             oracle.evaluate(small);
      const double m_large = oracle.evaluate(set_with(large, i)) -
                             oracle.evaluate(large);
      if (m_small < m_large - tol) ++report.def1_violations;
    }
    // Second route on an unrelated random pair.
    ItemSet a = random_subset(n, 0.4, rng);
    ItemSet b = random_subset(n, 0.4, rng);
    ItemSet uni = a;
    for (int i : b) {
      if (!set_contains(uni, i)) uni = set_with(uni, i);
    }
    ItemSet inter;
    for (int i : a) {
      if (set_contains(b, i)) inter.push_back(i);
    }
    const double lhs = oracle.evaluate(a) + oracle.evaluate(b);
    const double rhs = oracle.evaluate(uni) + oracle.evaluate(inter);
    if (lhs < rhs - tol) ++report.def2_violations;
  }
  return report;
}

// Random objective fixtures used across the algorithm and acceptance tests.
inline WeightedGraph random_graph(int n, double edge_prob, Rng& rng) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next_unit() < edge_prob) edges.push_back({i, j, rng.next_unit()});
    }
  }
  return WeightedGraph(n, edges);
}

inline std::vector<double> random_costs(int n, Rng& rng) {
  std::vector<double> costs;
  for (int i = 0; i < n; ++i) costs.push_back(std::max(rng.next_unit(), 1e-9));
  return costs;
}

}  // namespace subknap::testing

#endif  // SUBKNAP_TESTS_SUPPORT_HPP_
