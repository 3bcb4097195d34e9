#include "subknap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "subknap/adaptive.hpp"
#include "subknap/algorithms.hpp"

namespace subknap {

using nlohmann::json;

bool AlgorithmConfig::randomized() const {
  switch (kind) {
    case AlgorithmKind::kSampleGreedy:
    case AlgorithmKind::kLazySampleGreedy:
    case AlgorithmKind::kAdaptiveGreedy:
    case AlgorithmKind::kLazyAdaptiveGreedy:
      return true;
    default:
      return false;
  }
}

bool AlgorithmConfig::adaptive() const {
  return kind == AlgorithmKind::kAdaptiveGreedy ||
         kind == AlgorithmKind::kLazyAdaptiveGreedy;
}

namespace {

const std::map<std::string, AlgorithmKind>& algorithm_names() {
  static const std::map<std::string, AlgorithmKind> names = {
      {"sample-greedy", AlgorithmKind::kSampleGreedy},
      {"lazy-sample-greedy", AlgorithmKind::kLazySampleGreedy},
      {"greedy", AlgorithmKind::kGreedy},
      {"density-greedy", AlgorithmKind::kDensityGreedy},
      {"best-singleton", AlgorithmKind::kBestSingleton},
      {"brute-force", AlgorithmKind::kBruteForce},
      {"adaptive-greedy", AlgorithmKind::kAdaptiveGreedy},
      {"lazy-adaptive-greedy", AlgorithmKind::kLazyAdaptiveGreedy},
  };
  return names;
}

std::string algorithm_name(AlgorithmKind kind) {
  for (const auto& [name, k] : algorithm_names()) {
    if (k == kind) return name;
  }
  return "?";
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kErCut: return "er-cut";
    case ExperimentKind::kMovielensRec: return "movielens-rec";
    case ExperimentKind::kRevenueAdaptive: return "revenue-adaptive";
    case ExperimentKind::kCustom: return "custom";
  }
  return "?";
}

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError("config: " + message);
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(key + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail(key + " must be an integer");
  return j.at(key).get<int>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(key + " must be a string");
  return j.at(key).get<std::string>();
}

PriorConfig parse_prior(const json& j) {
  PriorConfig prior;
  if (!j.is_object()) fail("prior must be an object");
  const std::string type = get_string(j, "type", "lomax");
  if (type == "lomax") {
    prior.lomax = true;
    prior.scale = get_number(j, "scale", 1.0);
    prior.shape = get_number(j, "shape", 2.0);
    if (!(prior.scale > 0.0) || !(prior.shape > 1.0)) {
      fail("lomax prior needs scale > 0 and shape > 1");
    }
  } else if (type == "discrete") {
    prior.lomax = false;
    if (!j.contains("atoms") || !j.contains("probs")) {
      fail("discrete prior needs atoms and probs");
    }
    prior.atoms = j.at("atoms").get<std::vector<double>>();
    prior.probs = j.at("probs").get<std::vector<double>>();
  } else if (type == "point") {
    prior.lomax = false;
    prior.atoms = {get_number(j, "value", 1.0)};
    prior.probs = {1.0};
  } else {
    fail("prior type must be lomax, discrete or point");
  }
  return prior;
}

CoeffPrior build_prior(const PriorConfig& prior) {
  if (prior.lomax) return CoeffPrior::lomax(prior.scale, prior.shape);
  try {
    return CoeffPrior::discrete(prior.atoms, prior.probs);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

AlgorithmConfig parse_algorithm(const json& j, ExperimentKind experiment) {
  if (!j.is_object()) fail("algorithms entries must be objects");
  AlgorithmConfig a;
  const std::string name = get_string(j, "name", "");
  auto it = algorithm_names().find(name);
  if (it == algorithm_names().end()) {
    fail("unknown algorithm name '" + name + "'");
  }
  a.kind = it->second;
  a.label = get_string(j, "label", name);
  if (a.label.find(',') != std::string::npos) {
    fail("algorithm label must not contain commas");
  }
  if (a.adaptive() && experiment != ExperimentKind::kRevenueAdaptive) {
    fail(name + " requires the revenue-adaptive experiment");
  }
  if (j.contains("p")) {
    const json& p = j.at("p");
    if (p.is_string()) {
      const std::string mode = p.get<std::string>();
      if (mode == "guarantee") {
        a.p_mode = PMode::kGuarantee;
      } else if (mode == "experimental") {
        a.p_mode = PMode::kExperimental;
      } else {
        fail("p must be 'guarantee', 'experimental' or a number");
      }
    } else if (p.is_number()) {
      a.p_mode = PMode::kFixed;
      a.p_fixed = p.get<double>();
      if (!(a.p_fixed > 0.0) || a.p_fixed > 1.0) fail("p must lie in (0, 1]");
    } else {
      fail("p must be 'guarantee', 'experimental' or a number");
    }
  }
  a.p0 = get_number(j, "p0", 0.0);
  if (!(a.p0 >= 0.0) || a.p0 > 1.0) fail("p0 must lie in [0, 1]");
  if (j.contains("epsilon")) {
    const double eps = get_number(j, "epsilon", 0.01);
    if (!(eps > 0.0) || !(eps < 1.0)) fail("epsilon must lie in (0, 1)");
    a.lazy_epsilon = eps;
  }
  if (j.contains("fallback")) {
    if (!j.at("fallback").is_boolean()) fail("fallback must be a boolean");
    a.singleton_fallback = j.at("fallback").get<bool>();
  }
  return a;
}

std::vector<AlgorithmConfig> default_algorithms(ExperimentKind experiment) {
  auto entry = [](AlgorithmKind kind, PMode mode) {
    AlgorithmConfig a;
    a.kind = kind;
    a.label = algorithm_name(kind);
    a.p_mode = mode;
    return a;
  };
  switch (experiment) {
    case ExperimentKind::kErCut:
      return {entry(AlgorithmKind::kSampleGreedy, PMode::kExperimental),
              entry(AlgorithmKind::kLazySampleGreedy, PMode::kExperimental),
              entry(AlgorithmKind::kDensityGreedy, PMode::kFixed),
              entry(AlgorithmKind::kGreedy, PMode::kFixed)};
    case ExperimentKind::kMovielensRec:
      return {entry(AlgorithmKind::kSampleGreedy, PMode::kExperimental),
              entry(AlgorithmKind::kLazySampleGreedy, PMode::kExperimental)};
    case ExperimentKind::kRevenueAdaptive:
      return {entry(AlgorithmKind::kAdaptiveGreedy, PMode::kExperimental),
              entry(AlgorithmKind::kGreedy, PMode::kFixed),
              entry(AlgorithmKind::kDensityGreedy, PMode::kFixed)};
    case ExperimentKind::kCustom:
      fail("custom experiments must list algorithms");
  }
  return {};
}

std::vector<double> default_budgets(ExperimentKind experiment) {
  switch (experiment) {
    case ExperimentKind::kErCut:
      return {0.15};
    case ExperimentKind::kRevenueAdaptive:
      return {0.10};
    case ExperimentKind::kMovielensRec:
      return budget_schedule(0.01, 0.1, 10);
    case ExperimentKind::kCustom:
      fail("custom experiments must specify budgets");
  }
  return {};
}

InstanceConfig parse_instance(const json& cfg, ExperimentKind experiment) {
  InstanceConfig inst;
  const bool generated = experiment == ExperimentKind::kErCut ||
                         experiment == ExperimentKind::kRevenueAdaptive;
  if (!cfg.contains("instance")) {
    fail("missing instance section");
  }
  const json& j = cfg.at("instance");
  if (!j.is_object()) fail("instance must be an object");

  if (generated) {
    if (!j.contains("n")) fail("instance.n is required");
    if (j.at("n").is_number_integer()) {
      inst.ns = {j.at("n").get<int>()};
    } else if (j.at("n").is_array()) {
      inst.ns = j.at("n").get<std::vector<int>>();
    } else {
      fail("instance.n must be an integer or an array");
    }
    if (inst.ns.empty()) fail("instance.n must not be empty");
    for (int n : inst.ns) {
      if (n < 0) fail("instance.n entries must be >= 0");
    }
    if (j.contains("edge_prob")) {
      const double p = get_number(j, "edge_prob", 0.0);
      if (!(p >= 0.0) || p > 1.0) fail("edge_prob must lie in [0, 1]");
      inst.edge_prob = p;
    }
    const std::string wd = get_string(j, "weight_dist", "uniform");
    if (wd == "uniform") {
      inst.weight_dist = WeightDist::kUniform;
    } else if (wd == "constant") {
      inst.weight_dist = WeightDist::kConstantOne;
    } else {
      fail("weight_dist must be uniform or constant");
    }
    const std::string cd = get_string(
        j, "cost_dist",
        experiment == ExperimentKind::kRevenueAdaptive ? "degree" : "uniform");
    if (cd == "uniform") {
      inst.cost_dist = CostDist::kUniform;
    } else if (cd == "degree") {
      inst.cost_dist = CostDist::kDegreeProportional;
    } else {
      fail("cost_dist must be uniform or degree");
    }
    if (experiment == ExperimentKind::kRevenueAdaptive && j.contains("prior")) {
      inst.prior = parse_prior(j.at("prior"));
      build_prior(inst.prior);  // validates
    }
    return inst;
  }

  if (experiment == ExperimentKind::kMovielensRec) {
    inst.tags_csv = get_string(j, "tags_csv", "");
    inst.ratings_csv = get_string(j, "ratings_csv", "");
    inst.categories_csv = get_string(j, "categories_csv", "");
    if (inst.tags_csv.empty() || inst.ratings_csv.empty()) {
      fail("movielens-rec needs instance.tags_csv and instance.ratings_csv");
    }
    inst.videorec.lambda = get_number(j, "lambda", 3.0);
    inst.videorec.mu = get_number(j, "mu", 7.0);
    inst.videorec.alpha = get_number(j, "alpha", 1.0);
    inst.videorec.beta = get_number(j, "beta", 1.0);
    if (inst.videorec.lambda < 1.0) fail("lambda must be >= 1");
    return inst;
  }

  // custom
  inst.edges_path = get_string(j, "edges", "");
  if (inst.edges_path.empty()) fail("custom experiments need instance.edges");
  inst.costs_csv = get_string(j, "costs_csv", "");
  inst.coeffs_csv = get_string(j, "coeffs_csv", "");
  inst.ratings_csv = get_string(j, "ratings_csv", "");
  inst.categories_csv = get_string(j, "categories_csv", "");
  inst.objective = get_string(j, "objective", "");
  if (inst.objective != "cut" && inst.objective != "revenue" &&
      inst.objective != "videorec") {
    fail("instance.objective must be cut, revenue or videorec");
  }
  if (inst.objective == "videorec" && inst.ratings_csv.empty()) {
    fail("videorec objective needs instance.ratings_csv");
  }
  inst.videorec.lambda = get_number(j, "lambda", 3.0);
  inst.videorec.mu = get_number(j, "mu", 7.0);
  inst.videorec.alpha = get_number(j, "alpha", 1.0);
  inst.videorec.beta = get_number(j, "beta", 1.0);
  if (inst.videorec.lambda < 1.0) fail("lambda must be >= 1");
  return inst;
}

}  // namespace

std::vector<double> budget_schedule(double lo, double hi, int steps) {
  if (!(lo > 0.0) || !(lo <= hi) || !(hi <= 1.0)) {
    throw std::invalid_argument("budget_schedule: need 0 < lo <= hi <= 1");
  }
  if (steps < 1) {
    throw std::invalid_argument("budget_schedule: steps must be >= 1");
  }
  if (steps == 1 || lo == hi) return {lo};
  std::vector<double> out;
  out.reserve(static_cast<size_t>(steps));
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(steps - 1));
  double value = lo;
  for (int k = 0; k < steps; ++k) {
    out.push_back(k == steps - 1 ? hi : value);
    value *= ratio;
  }
  return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");

  ExperimentConfig cfg;
  const std::string exp = get_string(j, "experiment", "");
  if (exp == "er-cut") {
    cfg.experiment = ExperimentKind::kErCut;
  } else if (exp == "movielens-rec") {
    cfg.experiment = ExperimentKind::kMovielensRec;
  } else if (exp == "revenue-adaptive") {
    cfg.experiment = ExperimentKind::kRevenueAdaptive;
  } else if (exp == "custom") {
    cfg.experiment = ExperimentKind::kCustom;
  } else {
    fail("experiment must be er-cut, movielens-rec, revenue-adaptive or custom");
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      fail("seed must be an integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.output = get_string(j, "output", "results.csv");
  cfg.repetitions = get_int(j, "repetitions", 1);
  if (cfg.repetitions < 1) fail("repetitions must be >= 1");
  cfg.best_of = get_int(j, "best_of", 5);
  if (cfg.best_of < 1) fail("best_of must be >= 1");
  cfg.epsilon_lazy = get_number(j, "epsilon_lazy", 0.01);
  if (!(cfg.epsilon_lazy > 0.0) || !(cfg.epsilon_lazy < 1.0)) {
    fail("epsilon_lazy must lie in (0, 1)");
  }
  cfg.threads = get_int(j, "threads", 1);
  if (cfg.threads < 1) fail("threads must be >= 1");

  if (j.contains("budgets") && j.contains("budget_schedule")) {
    fail("give either budgets or budget_schedule, not both");
  }
  if (j.contains("budgets")) {
    if (!j.at("budgets").is_array()) fail("budgets must be an array");
    cfg.budgets = j.at("budgets").get<std::vector<double>>();
  } else if (j.contains("budget_schedule")) {
    const json& s = j.at("budget_schedule");
    if (get_string(s, "kind", "geometric") != "geometric") {
      fail("budget_schedule.kind must be geometric");
    }
    try {
      cfg.budgets = budget_schedule(get_number(s, "lo", 0.0),
                                    get_number(s, "hi", 0.0),
                                    get_int(s, "steps", 0));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  } else {
    cfg.budgets = default_budgets(cfg.experiment);
  }
  if (cfg.budgets.empty()) fail("budgets must not be empty");
  for (double b : cfg.budgets) {
    if (!(b > 0.0) || b > 1.0) fail("budgets must lie in (0, 1]");
  }

  cfg.instance = parse_instance(j, cfg.experiment);

  if (j.contains("algorithms")) {
    if (!j.at("algorithms").is_array()) fail("algorithms must be an array");
    for (const json& a : j.at("algorithms")) {
      cfg.algorithms.push_back(parse_algorithm(a, cfg.experiment));
    }
  } else {
    cfg.algorithms = default_algorithms(cfg.experiment);
  }
  if (cfg.algorithms.empty()) fail("algorithms must not be empty");

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  j["repetitions"] = cfg.repetitions;
  j["best_of"] = cfg.best_of;
  j["epsilon_lazy"] = cfg.epsilon_lazy;
  j["threads"] = cfg.threads;
  j["budgets"] = cfg.budgets;
  json inst;
  if (!cfg.instance.ns.empty()) {
    inst["n"] = cfg.instance.ns;
    if (cfg.instance.edge_prob) inst["edge_prob"] = *cfg.instance.edge_prob;
    inst["weight_dist"] =
        cfg.instance.weight_dist == WeightDist::kUniform ? "uniform" : "constant";
    inst["cost_dist"] = cfg.instance.cost_dist == CostDist::kUniform
                            ? "uniform"
                            : "degree";
    if (cfg.experiment == ExperimentKind::kRevenueAdaptive) {
      json prior;
      if (cfg.instance.prior.lomax) {
        prior["type"] = "lomax";
        prior["scale"] = cfg.instance.prior.scale;
        prior["shape"] = cfg.instance.prior.shape;
      } else {
        prior["type"] = "discrete";
        prior["atoms"] = cfg.instance.prior.atoms;
        prior["probs"] = cfg.instance.prior.probs;
      }
      inst["prior"] = prior;
    }
  }
  if (!cfg.instance.tags_csv.empty()) inst["tags_csv"] = cfg.instance.tags_csv;
  if (!cfg.instance.ratings_csv.empty()) {
    inst["ratings_csv"] = cfg.instance.ratings_csv;
  }
  if (!cfg.instance.categories_csv.empty()) {
    inst["categories_csv"] = cfg.instance.categories_csv;
  }
  if (!cfg.instance.edges_path.empty()) inst["edges"] = cfg.instance.edges_path;
  if (!cfg.instance.costs_csv.empty()) inst["costs_csv"] = cfg.instance.costs_csv;
  if (!cfg.instance.coeffs_csv.empty()) {
    inst["coeffs_csv"] = cfg.instance.coeffs_csv;
  }
  if (!cfg.instance.objective.empty()) {
    inst["objective"] = cfg.instance.objective;
  }
  if (cfg.experiment == ExperimentKind::kMovielensRec ||
      cfg.instance.objective == "videorec") {
    inst["lambda"] = cfg.instance.videorec.lambda;
    inst["mu"] = cfg.instance.videorec.mu;
    inst["alpha"] = cfg.instance.videorec.alpha;
    inst["beta"] = cfg.instance.videorec.beta;
  }
  j["instance"] = inst;
  json algos = json::array();
  for (const AlgorithmConfig& a : cfg.algorithms) {
    json e;
    e["name"] = algorithm_name(a.kind);
    e["label"] = a.label;
    switch (a.p_mode) {
      case PMode::kGuarantee: e["p"] = "guarantee"; break;
      case PMode::kExperimental: e["p"] = "experimental"; break;
      case PMode::kFixed: e["p"] = a.p_fixed; break;
    }
    if (a.adaptive()) e["p0"] = a.p0;
    if (a.lazy_epsilon) e["epsilon"] = *a.lazy_epsilon;
    e["fallback"] = a.singleton_fallback;
    algos.push_back(e);
  }
  j["algorithms"] = algos;
  return j.dump(2);
}

namespace {

// Per-task context assembled before any algorithm runs.
struct TaskContext {
  int n_declared = 0;
  std::vector<double> costs;
  std::unique_ptr<KnapsackInstance> inst;
  std::unique_ptr<ValueOracle> objective_storage;
  std::unique_ptr<SubsetOracle> static_view;    // always instance-indexed
  std::unique_ptr<AdaptiveRevenueModel> model;  // adaptive only
  std::unique_ptr<SubsetAdaptiveOracle> adaptive_view;
  Realization omega;
};

// Shared, read-only across tasks: file-based inputs loaded once.
struct SharedData {
  std::unique_ptr<WeightedGraph> graph;
  std::vector<double> ratings;
  std::vector<std::vector<int>> categories;
  std::vector<double> costs;   // from costs_csv, may be empty
  std::vector<double> coeffs;  // custom revenue, may be empty
};

std::vector<std::vector<int>> load_categories(
    const std::string& path, const std::vector<long long>& original_item_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load categories: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load categories: empty file " + path);
  }
  std::map<long long, int> item_map;
  for (size_t i = 0; i < original_item_ids.size(); ++i) {
    item_map[original_item_ids[i]] = static_cast<int>(i);
  }
  std::map<long long, std::vector<int>> by_category;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string item_s;
    std::string cat_s;
    if (!std::getline(ss, item_s, ',') || !std::getline(ss, cat_s)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected item,category");
    }
    long long item = 0;
    long long category = 0;
    try {
      item = std::stoll(item_s);
      category = std::stoll(cat_s);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed id");
    }
    auto it = item_map.find(item);
    if (it == item_map.end()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unknown item id");
    }
    by_category[category].push_back(it->second);
  }
  std::vector<std::vector<int>> categories;
  for (auto& [cat, members] : by_category) {
    categories.push_back(make_set(std::move(members)));
  }
  return categories;
}

SharedData preload_impl(const ExperimentConfig& cfg);

SharedData preload(const ExperimentConfig& cfg) {
  try {
    return preload_impl(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    // Missing or malformed dataset files are configuration problems.
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SharedData preload_impl(const ExperimentConfig& cfg) {
  SharedData shared;
  const InstanceConfig& inst = cfg.instance;
  if (cfg.experiment == ExperimentKind::kMovielensRec) {
    TagCsvResult tags = load_tag_csv(inst.tags_csv);
    shared.graph = std::make_unique<WeightedGraph>(tag_similarity(tags.tags));
    shared.ratings = load_values_csv(inst.ratings_csv);
    if (shared.ratings.size() != static_cast<size_t>(shared.graph->size())) {
      throw ConfigError("config: ratings_csv size does not match tags_csv");
    }
    if (!inst.categories_csv.empty()) {
      shared.categories =
          load_categories(inst.categories_csv, tags.original_item_ids);
    }
  } else if (cfg.experiment == ExperimentKind::kCustom) {
    EdgeListResult edges = load_edge_list(inst.edges_path, cfg.seed);
    shared.graph = std::make_unique<WeightedGraph>(std::move(edges.graph));
    const size_t n = static_cast<size_t>(shared.graph->size());
    if (!inst.costs_csv.empty()) {
      shared.costs = load_values_csv(inst.costs_csv);
      if (shared.costs.size() != n) {
        throw ConfigError("config: costs_csv size does not match the graph");
      }
    }
    if (inst.objective == "revenue") {
      shared.coeffs = inst.coeffs_csv.empty()
                          ? std::vector<double>(n, 1.0)
                          : load_values_csv(inst.coeffs_csv);
      if (shared.coeffs.size() != n) {
        throw ConfigError("config: coeffs_csv size does not match the graph");
      }
    }
    if (inst.objective == "videorec") {
      shared.ratings = load_values_csv(inst.ratings_csv);
      if (shared.ratings.size() != n) {
        throw ConfigError("config: ratings_csv size does not match the graph");
      }
      if (!inst.categories_csv.empty()) {
        std::vector<long long> ids(n);
        for (size_t i = 0; i < n; ++i) ids[i] = static_cast<long long>(i);
        shared.categories = load_categories(inst.categories_csv, ids);
      }
    }
  }
  return shared;
}

TaskContext build_task(const ExperimentConfig& cfg, const SharedData& shared,
                       int n, double budget_fraction, std::uint64_t task_seed) {
  const InstanceConfig& icfg = cfg.instance;
  const std::uint64_t instance_seed = derive_seed(task_seed, 0);
  TaskContext ctx;

  WeightedGraph graph;
  if (cfg.experiment == ExperimentKind::kErCut ||
      cfg.experiment == ExperimentKind::kRevenueAdaptive) {
    GenSpec spec;
    spec.n = n;
    spec.edge_prob = icfg.edge_prob
                         ? *icfg.edge_prob
                         : (cfg.experiment == ExperimentKind::kErCut
                                ? 0.2
                                : std::min(1.0, 5.0 / std::sqrt(
                                                    std::max(1.0, double(n)))));
    spec.weight_dist = icfg.weight_dist;
    spec.cost_dist = icfg.cost_dist;
    spec.seed = instance_seed;
    GeneratedInstance gen = gen_er_graph(spec);
    graph = std::move(gen.graph);
    ctx.costs = std::move(gen.costs);
    ctx.n_declared = n;
  } else {
    graph = *shared.graph;  // immutable copy per task keeps tasks independent
    ctx.n_declared = graph.size();
    ctx.costs = shared.costs.empty()
                    ? sample_costs_uniform(graph.size(), instance_seed)
                    : shared.costs;
  }

  double total = 0.0;
  for (double c : ctx.costs) total += c;
  if (!(total > 0.0)) throw std::runtime_error("instance has no positive cost");
  ctx.inst = std::make_unique<KnapsackInstance>(ctx.costs,
                                                budget_fraction * total);

  if (cfg.experiment == ExperimentKind::kRevenueAdaptive) {
    ctx.model = std::make_unique<AdaptiveRevenueModel>(
        graph, build_prior(icfg.prior));
    std::vector<double> means;
    means.reserve(static_cast<size_t>(graph.size()));
    for (int i = 0; i < graph.size(); ++i) {
      means.push_back(ctx.model->prior(i).mean());
    }
    ctx.objective_storage =
        std::make_unique<RevenueObjective>(graph, std::move(means));
    Rng omega_rng(derive_seed(task_seed, 1));
    ctx.omega = sample_realization(*ctx.model, omega_rng);
    ctx.adaptive_view = std::make_unique<SubsetAdaptiveOracle>(
        *ctx.model, ctx.inst->kept_ids());
  } else if (cfg.experiment == ExperimentKind::kErCut ||
             (cfg.experiment == ExperimentKind::kCustom &&
              icfg.objective == "cut")) {
    ctx.objective_storage = std::make_unique<CutObjective>(std::move(graph));
  } else if (cfg.experiment == ExperimentKind::kCustom &&
             icfg.objective == "revenue") {
    ctx.objective_storage =
        std::make_unique<RevenueObjective>(std::move(graph), shared.coeffs);
  } else {
    ctx.objective_storage = std::make_unique<VideoRecObjective>(
        std::move(graph), shared.ratings, shared.categories, icfg.videorec);
  }
  ctx.static_view = std::make_unique<SubsetOracle>(*ctx.objective_storage,
                                                   ctx.inst->kept_ids());
  return ctx;
}

Solution run_static_once(const AlgorithmConfig& a, const ExperimentConfig& cfg,
                         const TaskContext& ctx, CountingOracle& oracle,
                         Rng& rng) {
  switch (a.kind) {
    case AlgorithmKind::kSampleGreedy:
    case AlgorithmKind::kLazySampleGreedy: {
      SampleGreedyParams params;
      switch (a.p_mode) {
        case PMode::kGuarantee:
          params = SampleGreedyParams{};
          break;
        case PMode::kExperimental:
          params = SampleGreedyParams::experimental(rng);  // first draw
          break;
        case PMode::kFixed:
          params.p = a.p_fixed;
          break;
      }
      params.singleton_fallback = a.singleton_fallback;
      if (a.kind == AlgorithmKind::kSampleGreedy) {
        return sample_greedy(*ctx.inst, oracle, params, rng);
      }
      LazyParams lazy{a.lazy_epsilon.value_or(cfg.epsilon_lazy)};
      return lazy_sample_greedy(*ctx.inst, oracle, params, lazy, rng);
    }
    case AlgorithmKind::kGreedy:
      return baseline_greedy(*ctx.inst, oracle, GreedyMode::kValue);
    case AlgorithmKind::kDensityGreedy:
      return baseline_greedy(*ctx.inst, oracle, GreedyMode::kDensity);
    case AlgorithmKind::kBestSingleton:
      return best_singleton(*ctx.inst, oracle);
    case AlgorithmKind::kBruteForce:
      return brute_force_opt(*ctx.inst, oracle);
    default:
      throw std::logic_error("run_static_once: adaptive kind");
  }
}

Solution run_adaptive_once(const AlgorithmConfig& a, const ExperimentConfig& cfg,
                           const TaskContext& ctx,
                           CountingAdaptiveOracle& oracle, Rng& rng) {
  AdaptiveParams params;
  switch (a.p_mode) {
    case PMode::kGuarantee:
      params = AdaptiveParams::guarantee();
      break;
    case PMode::kExperimental:
      params = AdaptiveParams::experimental(rng);  // first draw
      params.p0 = a.p0;
      break;
    case PMode::kFixed:
      params.p = a.p_fixed;
      params.p0 = a.p0;
      break;
  }
  if (a.kind == AlgorithmKind::kAdaptiveGreedy) {
    return adaptive_greedy(*ctx.inst, oracle, params, ctx.omega, rng);
  }
  LazyParams lazy{a.lazy_epsilon.value_or(cfg.epsilon_lazy)};
  return lazy_adaptive_greedy(*ctx.inst, oracle, params, lazy, ctx.omega, rng);
}

std::vector<ResultRow> run_task(const ExperimentConfig& cfg,
                                const SharedData& shared, int n,
                                double budget_fraction, int repetition,
                                std::uint64_t task_seed,
                                std::atomic<long long>& dropped_items) {
  TaskContext ctx = build_task(cfg, shared, n, budget_fraction, task_seed);
  if (ctx.inst->any_dropped()) {
    dropped_items.fetch_add(ctx.inst->dropped_count());
  }
  const bool adaptive_experiment =
      cfg.experiment == ExperimentKind::kRevenueAdaptive;

  double singleton_value = 0.0;
  {
    CountingOracle probe(*ctx.static_view);
    const Solution s = best_singleton(*ctx.inst, probe);
    if (adaptive_experiment) {
      singleton_value =
          s.set.empty() ? 0.0 : ctx.adaptive_view->realized_value(s.set, ctx.omega);
    } else {
      singleton_value = s.value;
    }
  }

  std::vector<ResultRow> rows;
  for (size_t a_idx = 0; a_idx < cfg.algorithms.size(); ++a_idx) {
    const AlgorithmConfig& a = cfg.algorithms[a_idx];
    const std::uint64_t algo_seed = derive_seed(task_seed, 2 + a_idx);
    const int runs = a.randomized() ? cfg.best_of : 1;

    const auto t0 = std::chrono::steady_clock::now();
    Solution best;
    bool have_best = false;
    std::uint64_t total_calls = 0;
    for (int r = 0; r < runs; ++r) {
      const std::uint64_t run_seed =
          runs > 1 ? derive_seed(algo_seed, static_cast<std::uint64_t>(r))
                   : algo_seed;
      Rng rng(run_seed);
      Solution sol;
      if (a.adaptive()) {
        CountingAdaptiveOracle oracle(*ctx.adaptive_view);
        sol = run_adaptive_once(a, cfg, ctx, oracle, rng);
      } else {
        CountingOracle oracle(*ctx.static_view);
        sol = run_static_once(a, cfg, ctx, oracle, rng);
      }
      total_calls += sol.oracle_calls;
      if (!have_best || sol.value > best.value) {
        best = std::move(sol);
        have_best = true;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();

    ResultRow row;
    row.experiment = experiment_name(cfg.experiment);
    row.algorithm = a.label;
    row.n = ctx.n_declared;
    row.budget_fraction = budget_fraction;
    row.repetition = repetition;
    // In the adaptive experiment, non-adaptive solvers optimize the expected
    // objective but are scored by what their set actually earns under omega.
    row.value = adaptive_experiment && !a.adaptive()
                    ? (best.set.empty()
                           ? 0.0
                           : ctx.adaptive_view->realized_value(best.set, ctx.omega))
                    : best.value;
    row.singleton_value = singleton_value;
    row.oracle_calls = total_calls;
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.seed = best.seed;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  const SharedData shared = preload(cfg);
  const std::vector<int> ns = cfg.instance.ns.empty()
                                  ? std::vector<int>{-1}  // n from loaded data
                                  : cfg.instance.ns;

  struct Task {
    int n;
    double budget;
    int repetition;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::uint64_t task_id = 0;
  for (int n : ns) {
    for (double budget : cfg.budgets) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        tasks.push_back({n, budget, rep, derive_seed(cfg.seed, task_id)});
        ++task_id;
      }
    }
  }

  std::vector<std::vector<ResultRow>> slots(tasks.size());
  std::atomic<size_t> next{0};
  std::atomic<long long> dropped_items{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      try {
        slots[i] = run_task(cfg, shared, tasks[i].n, tasks[i].budget,
                            tasks[i].repetition, tasks[i].seed, dropped_items);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int thread_count =
      std::min<int>(cfg.threads, static_cast<int>(tasks.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (dropped_items.load() > 0) {
    std::fprintf(stderr,
                 "note: %lld item(s) cost more than the budget and were "
                 "dropped at instance construction\n",
                 static_cast<long long>(dropped_items.load()));
  }

  std::vector<ResultRow> rows;
  for (std::vector<ResultRow>& slot : slots) {
    for (ResultRow& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "experiment,algorithm,n,budget_fraction,repetition,value,"
    "singleton_value,oracle_calls,wall_time_ms,seed";

std::string format_row(const ResultRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%d,%.17g,%d,%.17g,%.17g,%llu,%.17g,%llu",
                r.experiment.c_str(), r.algorithm.c_str(), r.n,
                r.budget_fraction, r.repetition, r.value, r.singleton_value,
                static_cast<unsigned long long>(r.oracle_calls),
                r.wall_time_ms, static_cast<unsigned long long>(r.seed));
  return buf;
}

}  // namespace

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << kCsvHeader << "\n";
  for (const ResultRow& r : rows) out << format_row(r) << "\n";
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("read_csv: unexpected header in " + path);
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 10) {
      throw std::runtime_error("read_csv: bad row at line " +
                               std::to_string(line_no));
    }
    ResultRow r;
    r.experiment = f[0];
    r.algorithm = f[1];
    r.n = std::stoi(f[2]);
    r.budget_fraction = std::stod(f[3]);
    r.repetition = std::stoi(f[4]);
    r.value = std::stod(f[5]);
    r.singleton_value = std::stod(f[6]);
    r.oracle_calls = std::stoull(f[7]);
    r.wall_time_ms = std::stod(f[8]);
    r.seed = std::stoull(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, int, double>;
  struct Acc {
    std::vector<double> values;
    double singleton_sum = 0.0;
    double calls_sum = 0.0;
  };
  std::map<Key, Acc> groups;
  for (const ResultRow& r : rows) {
    Acc& acc = groups[{r.experiment, r.algorithm, r.n, r.budget_fraction}];
    acc.values.push_back(r.value);
    acc.singleton_sum += r.singleton_value;
    acc.calls_sum += static_cast<double>(r.oracle_calls);
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, acc] : groups) {
    AggregateRow a;
    a.experiment = std::get<0>(key);
    a.algorithm = std::get<1>(key);
    a.n = std::get<2>(key);
    a.budget_fraction = std::get<3>(key);
    a.repetitions = static_cast<int>(acc.values.size());
    double sum = 0.0;
    for (double v : acc.values) sum += v;
    a.mean_value = sum / acc.values.size();
    if (acc.values.size() > 1) {
      double ss = 0.0;
      for (double v : acc.values) {
        ss += (v - a.mean_value) * (v - a.mean_value);
      }
      a.std_value = std::sqrt(ss / (acc.values.size() - 1));
    }
    a.mean_singleton_value = acc.singleton_sum / acc.values.size();
    a.mean_oracle_calls = acc.calls_sum / acc.values.size();
    out.push_back(std::move(a));
  }
  return out;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_aggregate_csv: cannot open " + path);
  out << "experiment,algorithm,n,budget_fraction,repetitions,mean_value,"
         "std_value,mean_singleton_value,mean_oracle_calls\n";
  char buf[512];
  for (const AggregateRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g",
                  r.experiment.c_str(), r.algorithm.c_str(), r.n,
                  r.budget_fraction, r.repetitions, r.mean_value, r.std_value,
                  r.mean_singleton_value, r.mean_oracle_calls);
    out << buf << "\n";
  }
}

double fit_loglog_slope(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need >= 2 paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog_slope: values must be positive");
    }
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_loglog_slope: x values are constant");
  }
  return sxy / sxx;
}

}  // namespace subknap
