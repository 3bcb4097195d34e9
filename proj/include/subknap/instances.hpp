#ifndef SUBKNAP_INSTANCES_HPP_
#define SUBKNAP_INSTANCES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "subknap/core.hpp"
#include "subknap/objectives.hpp"

namespace subknap {

enum class WeightDist { kUniform, kConstantOne };
enum class CostDist { kUniform, kDegreeProportional };

// Erdos-Renyi generator spec. Draw order per seed: for each pair (i, j) with
// i < j in lexicographic order, one presence draw, then one weight draw when
// the edge is present and weights are uniform; finally one cost draw per
// item in id order (uniform costs only).
struct GenSpec {
  int n = 0;
  double edge_prob = 0.0;
  WeightDist weight_dist = WeightDist::kUniform;
  CostDist cost_dist = CostDist::kUniform;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  WeightedGraph graph;
  std::vector<double> costs;
};

// G(n, p) with U(0,1) weights or unit weights; uniform costs are clipped
// away from zero, degree-proportional costs track the weighted degree and
// are normalized to mean 1 (isolated vertices get the minimum clip).
GeneratedInstance gen_er_graph(const GenSpec& spec);

// Per-item tag vectors with coordinates in [0, 1].
struct TagMatrix {
  std::vector<std::vector<double>> rows;

  int items() const { return static_cast<int>(rows.size()); }
  int dim() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

// L2 norm of the coordinate-wise minimum of two tag vectors.
double tag_pair_similarity(const std::vector<double>& a,
                           const std::vector<double>& b);

// Pairwise tag similarities, divided by their maximum as a final
// normalization step (skipped when all pairs are zero); w_ii = 0.
WeightedGraph tag_similarity(const TagMatrix& tags);

struct EdgeListResult {
  WeightedGraph graph;
  std::vector<long long> original_ids;  // dense id -> id in the file
  int duplicate_edges = 0;
  int self_loops = 0;
  int missing_weights = 0;
};

// Whitespace-separated "u v [w]" lines; '#' starts a comment line. Ids are
// arbitrary integers and get densified in sorted order. A missing weight is
// drawn from U(0,1) seeded by `seed`, one draw per such edge in file order.
// Duplicate edges keep the last weight (the count is reported so callers can
// warn); self-loops are dropped. Malformed lines raise std::runtime_error
// with the line number.
EdgeListResult load_edge_list(const std::string& path, std::uint64_t seed);

// i.i.d. U(0,1) costs clipped to at least 1e-9, one draw per item in order.
std::vector<double> sample_costs_uniform(int n, std::uint64_t seed);

// CSV with header "item,tag,relevance": sparse tag-relevance triples.
// Item and tag ids are densified in sorted order; relevance must be in [0,1].
struct TagCsvResult {
  TagMatrix tags;
  std::vector<long long> original_item_ids;
};
TagCsvResult load_tag_csv(const std::string& path);

// CSV with header "id,cost" (also used for "id,rating"-shaped per-item
// reals); rows may arrive in any order but must cover exactly 0..n-1.
std::vector<double> load_values_csv(const std::string& path);

// Writers for the `gen` subcommand; formats round-trip through the loaders.
void write_edge_list(const WeightedGraph& graph, const std::string& path);
void write_values_csv(const std::vector<double>& values,
                      const std::string& header, const std::string& path);

}  // namespace subknap

#endif  // SUBKNAP_INSTANCES_HPP_
