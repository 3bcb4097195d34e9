#include "subknap/instances.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace subknap {

namespace {

double clip_cost(double c) { return std::max(c, 1e-9); }

std::string trimmed(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

GeneratedInstance gen_er_graph(const GenSpec& spec) {
  if (spec.n < 0 || !(spec.edge_prob >= 0.0) || spec.edge_prob > 1.0) {
    throw std::invalid_argument("gen_er_graph: need n >= 0, edge_prob in [0,1]");
  }
  Rng rng(spec.seed);
  std::vector<Edge> edges;
  for (int i = 0; i < spec.n; ++i) {
    for (int j = i + 1; j < spec.n; ++j) {
      if (rng.next_unit() >= spec.edge_prob) continue;
      const double w =
          spec.weight_dist == WeightDist::kUniform ? rng.next_unit() : 1.0;
      edges.push_back({i, j, w});
    }
  }
  GeneratedInstance out;
  out.graph = WeightedGraph(spec.n, edges);
  if (spec.cost_dist == CostDist::kUniform) {
    for (int i = 0; i < spec.n; ++i) {
      out.costs.push_back(clip_cost(rng.next_unit()));
    }
  } else {
    double total = 0.0;
    for (int i = 0; i < spec.n; ++i) total += out.graph.weighted_degree(i);
    const double mean = spec.n > 0 ? total / spec.n : 0.0;
    for (int i = 0; i < spec.n; ++i) {
      const double c =
          mean > 0.0 ? out.graph.weighted_degree(i) / mean : 0.0;
      out.costs.push_back(clip_cost(c));
    }
  }
  return out;
}

double tag_pair_similarity(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("tag_pair_similarity: dimension mismatch");
  }
  double sum = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double m = std::min(a[k], b[k]);
    sum += m * m;
  }
  return std::sqrt(sum);
}

WeightedGraph tag_similarity(const TagMatrix& tags) {
  const int n = tags.items();
  for (const auto& row : tags.rows) {
    if (static_cast<int>(row.size()) != tags.dim()) {
      throw std::invalid_argument("tag_similarity: ragged tag matrix");
    }
    for (double t : row) {
      if (!(t >= 0.0) || t > 1.0) {
        throw std::invalid_argument(
            "tag_similarity: coordinates must lie in [0, 1]");
      }
    }
  }
  std::vector<Edge> edges;
  double max_w = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = tag_pair_similarity(tags.rows[static_cast<size_t>(i)],
                                           tags.rows[static_cast<size_t>(j)]);
      if (w > 0.0) {
        edges.push_back({i, j, w});
        max_w = std::max(max_w, w);
      }
    }
  }
  if (max_w > 0.0) {
    for (Edge& e : edges) e.w /= max_w;
    // Guard against the divided maximum landing a hair above 1.
    for (Edge& e : edges) e.w = std::min(e.w, 1.0);
  }
  return WeightedGraph(n, edges);
}

namespace {

struct RawEdge {
  long long u = 0;
  long long v = 0;
  double w = 0.0;
};

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

EdgeListResult load_edge_list(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  Rng rng(seed);
  EdgeListResult result;
  std::vector<RawEdge> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trimmed(line).empty()) continue;
    std::istringstream ss(line);
    long long u = 0;
    long long v = 0;
    if (!(ss >> u) || !(ss >> v)) parse_fail(path, line_no, "expected two ids");
    double w = 0.0;
    if (ss >> w) {
      if (!(w >= 0.0) || w > 1.0 || !std::isfinite(w)) {
        parse_fail(path, line_no, "weight must lie in [0, 1]");
      }
    } else {
      w = rng.next_unit();
      ++result.missing_weights;
    }
    std::string tail;
    if (ss >> tail) parse_fail(path, line_no, "trailing tokens");
    raw.push_back({u, v, w});
  }

  std::map<long long, int> dense;
  for (const RawEdge& e : raw) {
    dense.emplace(e.u, 0);
    dense.emplace(e.v, 0);
  }
  int next = 0;
  for (auto& [orig, id] : dense) {
    id = next++;
    result.original_ids.push_back(orig);
  }
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const RawEdge& e : raw) {
    edges.push_back({dense[e.u], dense[e.v], e.w});
  }
  result.graph = WeightedGraph(next, edges);
  result.duplicate_edges = result.graph.duplicates_collapsed();
  result.self_loops = result.graph.self_loops_dropped();
  return result;
}

std::vector<double> sample_costs_uniform(int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_costs_uniform: n >= 0");
  Rng rng(seed);
  std::vector<double> costs;
  costs.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) costs.push_back(clip_cost(rng.next_unit()));
  return costs;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

TagCsvResult load_tag_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_tag_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != "item,tag,relevance") {
    throw std::runtime_error("load_tag_csv: expected header item,tag,relevance");
  }
  struct Triple {
    long long item;
    long long tag;
    double rel;
  };
  std::vector<Triple> triples;
  std::map<long long, int> items;
  std::map<long long, int> tags;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) parse_fail(path, line_no, "expected 3 fields");
    try {
      Triple t{std::stoll(trimmed(fields[0])), std::stoll(trimmed(fields[1])),
               std::stod(trimmed(fields[2]))};
      if (!(t.rel >= 0.0) || t.rel > 1.0) {
        parse_fail(path, line_no, "relevance must lie in [0, 1]");
      }
      triples.push_back(t);
      items.emplace(t.item, 0);
      tags.emplace(t.tag, 0);
    } catch (const std::invalid_argument&) {
      parse_fail(path, line_no, "malformed number");
    } catch (const std::out_of_range&) {
      parse_fail(path, line_no, "number out of range");
    }
  }
  int next = 0;
  TagCsvResult result;
  for (auto& [orig, id] : items) {
    id = next++;
    result.original_item_ids.push_back(orig);
  }
  next = 0;
  for (auto& [orig, id] : tags) id = next++;
  result.tags.rows.assign(items.size(),
                          std::vector<double>(tags.size(), 0.0));
  for (const Triple& t : triples) {
    result.tags.rows[static_cast<size_t>(items[t.item])]
                    [static_cast<size_t>(tags[t.tag])] = t.rel;
  }
  return result;
}

std::vector<double> load_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_values_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line).rfind("id,", 0) != 0) {
    throw std::runtime_error("load_values_csv: expected an id,<value> header in " +
                             path);
  }
  std::map<long long, double> byid;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) parse_fail(path, line_no, "expected 2 fields");
    try {
      const long long id = std::stoll(trimmed(fields[0]));
      const double value = std::stod(trimmed(fields[1]));
      if (!byid.emplace(id, value).second) {
        parse_fail(path, line_no, "duplicate id");
      }
    } catch (const std::invalid_argument&) {
      parse_fail(path, line_no, "malformed number");
    } catch (const std::out_of_range&) {
      parse_fail(path, line_no, "number out of range");
    }
  }
  std::vector<double> values;
  values.reserve(byid.size());
  long long expect = 0;
  for (const auto& [id, value] : byid) {
    if (id != expect++) {
      throw std::runtime_error("load_values_csv: ids must cover 0..n-1");
    }
    values.push_back(value);
  }
  return values;
}

void write_edge_list(const WeightedGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_edge_list: cannot open " + path);
  char buf[96];
  for (int u = 0; u < graph.size(); ++u) {
    for (const Neighbor& nb : graph.neighbors(u)) {
      if (nb.id < u) continue;  // each undirected edge once
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", u, nb.id, nb.w);
      out << buf;
    }
  }
}

void write_values_csv(const std::vector<double>& values,
                      const std::string& header, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_values_csv: cannot open " + path);
  out << header << "\n";
  char buf[64];
  for (size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, values[i]);
    out << buf;
  }
}

}  // namespace subknap
