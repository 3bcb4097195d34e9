#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "subknap/algorithms.hpp"
#include "subknap/harness.hpp"
#include "support.hpp"

using namespace subknap;
namespace tst = subknap::testing;

namespace {

// x = (6, 4, 3), costs (3, 2, 2), B = 4: densities 2, 2, 1.5; the tie at the
// top goes to item 0, after which nothing else fits.
struct ModularFixture {
  tst::ModularOracle oracle{{6.0, 4.0, 3.0}};
  KnapsackInstance inst{{3.0, 2.0, 2.0}, 4.0};
};

struct PathCutFixture {
  CutObjective oracle{tst::path3_graph()};
  KnapsackInstance inst{{1.0, 1.0, 1.0}, 1.0};
};

}  // namespace

TEST_CASE("sample_greedy on the empty instance") {
  CutObjective obj{WeightedGraph(0, {})};
  KnapsackInstance inst({}, 1.0);
  CountingOracle oracle(obj);
  Rng rng(1);
  const Solution sol = sample_greedy(inst, oracle, {}, rng);
  CHECK(sol.set.empty());
  CHECK(sol.value == 0.0);
  CHECK(sol.oracle_calls == 0);
}

TEST_CASE("sample_greedy always scores 2 on the unit path with B = 1") {
  PathCutFixture fx;
  for (double p : {0.2, kSqrt2Minus1, 1.0}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
      CountingOracle oracle(fx.oracle);
      Rng rng(seed);
      SampleGreedyParams params;
      params.p = p;
      const Solution sol = sample_greedy(fx.inst, oracle, params, rng);
      CHECK(sol.value == 2.0);  // the middle vertex dominates every outcome
      CHECK(sol.oracle_calls == oracle.calls());
    }
  }
}

TEST_CASE("sample_greedy at p = 1 walks the modular example by hand") {
  ModularFixture fx;
  CountingOracle oracle(fx.oracle);
  Rng rng(5);
  SampleGreedyParams params;
  params.p = 1.0;
  const Solution sol = sample_greedy(fx.inst, oracle, params, rng);
  CHECK(sol.set == ItemSet{0});
  CHECK(sol.value == 6.0);
}

TEST_CASE("solutions are seed-deterministic and bit-recomputable") {
  Rng gen(17);
  WeightedGraph g = tst::random_graph(12, 0.5, gen);
  CutObjective obj(g);
  KnapsackInstance inst(tst::random_costs(12, gen), 2.0);

  for (std::uint64_t seed : {3ULL, 4ULL}) {
    CountingOracle o1(obj);
    CountingOracle o2(obj);
    Rng r1(seed);
    Rng r2(seed);
    const Solution a = sample_greedy(inst, o1, {}, r1);
    const Solution b = sample_greedy(inst, o2, {}, r2);
    CHECK(a.set == b.set);
    CHECK(a.value == b.value);
    CHECK(a.oracle_calls == b.oracle_calls);
    CHECK(a.picked_order == b.picked_order);
    CHECK(a.seed == seed);

    // Reported value reproduces a fresh evaluation exactly.
    CountingOracle probe(obj);
    CHECK(a.value == (a.set.empty() ? 0.0 : probe.evaluate(a.set)));
  }
}

TEST_CASE("lazy and plain sample_greedy consider the same sequence on "
          "modular objectives") {
  // Modular marginals never move, so no reinsertions happen and the two
  // variants consume coins identically.
  tst::ModularOracle obj({9.0, 5.0, 7.5, 2.0, 4.5, 1.0});
  KnapsackInstance inst({2.0, 1.0, 3.0, 1.0, 2.5, 0.5}, 5.0);
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    for (double eps : {0.01, 0.5}) {
      CountingOracle o1(obj);
      CountingOracle o2(obj);
      Rng r1(seed);
      Rng r2(seed);
      SampleGreedyParams params;  // p = sqrt(2) - 1
      const Solution plain = sample_greedy(inst, o1, params, r1);
      const Solution lazy =
          lazy_sample_greedy(inst, o2, params, LazyParams{eps}, r2);
      CHECK(plain.picked_order == lazy.picked_order);
      CHECK(plain.set == lazy.set);
      CHECK(plain.value == lazy.value);
    }
  }
}

TEST_CASE("lazy call counter stays under n * (update_cap + 2)") {
  Rng gen(23);
  const int n = 50;
  WeightedGraph g = tst::random_graph(n, 0.3, gen);
  CutObjective obj(g);
  KnapsackInstance inst(tst::random_costs(n, gen), 4.0);
  const LazyParams lazy{0.01};
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    CountingOracle oracle(obj);
    Rng rng(seed);
    const Solution sol = lazy_sample_greedy(inst, oracle, {}, lazy, rng);
    CHECK(sol.oracle_calls <= lazy.call_ceiling(n));
    CHECK(sol.oracle_calls == oracle.calls());
  }
}

TEST_CASE("lazy sample_greedy on the empty instance") {
  CutObjective obj{WeightedGraph(0, {})};
  KnapsackInstance inst({}, 1.0);
  CountingOracle oracle(obj);
  Rng rng(1);
  const Solution sol = lazy_sample_greedy(inst, oracle, {}, LazyParams{}, rng);
  CHECK(sol.set.empty());
  CHECK(sol.value == 0.0);
  CHECK(sol.oracle_calls == 0);
}

TEST_CASE("every lazily accepted item is within 1+eps' of the best density") {
  Rng gen(31);
  const int n = 24;
  WeightedGraph g = tst::random_graph(n, 0.4, gen);
  CutObjective obj(g);
  KnapsackInstance inst(tst::random_costs(n, gen), 3.0);
  const LazyParams lazy{0.05};
  const double eps_prime = lazy.epsilon_prime();

  CountingOracle oracle(obj);
  Rng rng(8);
  LazyAudit audit;
  lazy_sample_greedy(inst, oracle, {}, lazy, rng, &audit);
  CHECK(!audit.considered.empty());
  for (const LazyAcceptRecord& rec : audit.considered) {
    // Shadow-compute the true best density over the live candidates.
    auto eval = obj.make_evaluator();
    for (int i : rec.solution_before) eval->add(i);
    double best = 0.0;
    for (int k : rec.candidates) {
      best = std::max(best, eval->marginal(k) / inst.cost(k));
    }
    CHECK(rec.density >= best / (1.0 + eps_prime) - 1e-12);
  }
}

TEST_CASE("baseline greedies walk the modular example") {
  ModularFixture fx;
  CountingOracle o1(fx.oracle);
  const Solution density = baseline_greedy(fx.inst, o1, GreedyMode::kDensity);
  CHECK(density.set == ItemSet{0});
  CHECK(density.value == 6.0);

  CountingOracle o2(fx.oracle);
  const Solution value = baseline_greedy(fx.inst, o2, GreedyMode::kValue);
  CHECK(value.set == ItemSet{0});
  CHECK(value.value == 6.0);
}

TEST_CASE("baseline greedy returns empty when no marginal is positive") {
  CutObjective obj{WeightedGraph(3, {})};  // no edges: all marginals zero
  KnapsackInstance inst({1.0, 1.0, 1.0}, 2.0);
  CountingOracle oracle(obj);
  const Solution sol = baseline_greedy(inst, oracle, GreedyMode::kDensity);
  CHECK(sol.set.empty());
  CHECK(sol.value == 0.0);
}

TEST_CASE("p=1 fallback-free sample_greedy is exactly density greedy") {
  Rng gen(47);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = static_cast<int>(gen.next_u64() % 11);  // n <= 10
    WeightedGraph g = tst::random_graph(n, 0.5, gen);
    CutObjective obj(g);
    KnapsackInstance inst(tst::random_costs(n, gen),
                          std::max(0.3 * n * 0.5, 0.2));
    CountingOracle o1(obj);
    CountingOracle o2(obj);
    Rng rng(trial);
    SampleGreedyParams params;
    params.p = 1.0;
    params.singleton_fallback = false;
    const Solution sampled = sample_greedy(inst, o1, params, rng);
    const Solution density = baseline_greedy(inst, o2, GreedyMode::kDensity);
    CHECK(sampled.set == density.set);
    CHECK(sampled.value == density.value);
  }
}

TEST_CASE("best_singleton: exact call count and tie-breaking") {
  ModularFixture fx;
  CountingOracle oracle(fx.oracle);
  const Solution sol = best_singleton(fx.inst, oracle);
  CHECK(sol.set == ItemSet{0});
  CHECK(sol.value == 6.0);
  CHECK(oracle.calls() == 3);  // exactly n evaluations

  tst::ModularOracle equal({2.0, 2.0, 2.0});
  KnapsackInstance inst2({1.0, 1.0, 1.0}, 1.0);
  CountingOracle o2(equal);
  CHECK(best_singleton(inst2, o2).set == ItemSet{0});  // lowest id wins ties

  CutObjective empty{WeightedGraph(0, {})};
  KnapsackInstance inst3({}, 1.0);
  CountingOracle o3(empty);
  const Solution none = best_singleton(inst3, o3);
  CHECK(none.set.empty());
  CHECK(none.value == 0.0);
}

TEST_CASE("brute force optimum") {
  PathCutFixture path;
  CountingOracle o1(path.oracle);
  const Solution opt = brute_force_opt(path.inst, o1);
  CHECK(opt.set == ItemSet{1});
  CHECK(opt.value == 2.0);

  ModularFixture mod;
  CountingOracle o2(mod.oracle);
  const Solution opt2 = brute_force_opt(mod.inst, o2);
  CHECK(opt2.set == ItemSet{1, 2});
  CHECK(opt2.value == 7.0);

  // Unconstrained monotone modular: the full set wins.
  tst::ModularOracle big({1.0, 2.0, 3.0});
  KnapsackInstance inst({1.0, 1.0, 1.0}, 10.0);
  CountingOracle o3(big);
  CHECK(brute_force_opt(inst, o3).set == ItemSet{0, 1, 2});

  CutObjective wide{WeightedGraph(25, {})};
  KnapsackInstance inst25(std::vector<double>(25, 1.0), 5.0);
  CountingOracle o4(wide);
  CHECK_THROWS_AS(brute_force_opt(inst25, o4), CapacityError);

  // Triangle with B = 2: six sets tie at cut value 2; the lexicographically
  // smallest is {0}.
  CutObjective tri(tst::triangle_graph());
  KnapsackInstance inst_tri({1.0, 1.0, 1.0}, 2.0);
  CountingOracle o5(tri);
  const Solution tie = brute_force_opt(inst_tri, o5);
  CHECK(tie.set == ItemSet{0});
  CHECK(tie.value == 2.0);
}

namespace {

AdaptiveRevenueModel two_point_pair_model() {
  return AdaptiveRevenueModel(WeightedGraph(2, {{0, 1, 1.0}}),
                              CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5}));
}

}  // namespace

TEST_CASE("adaptive_greedy trajectory on the two-node model, all four atoms") {
  const AdaptiveRevenueModel model = two_point_pair_model();
  KnapsackInstance inst({1.0, 1.0}, 2.0);
  AdaptiveParams params;
  params.p0 = 0.0;
  params.p = 1.0;
  for (double a0 : {0.0, 2.0}) {
    for (double a1 : {0.0, 2.0}) {
      const Realization omega{{a0, a1}};
      CountingAdaptiveOracle oracle(model);
      Rng rng(2);
      const Solution sol = adaptive_greedy(inst, oracle, params, omega, rng);
      // Expected densities tie at 1; item 0 wins, is kept (p = 1), and the
      // survivor's marginal is -a_1 <= 0, so the loop stops.
      CHECK(sol.set == ItemSet{0});
      CHECK(sol.value == a1);  // realized revenue of the unseeded buyer
      CHECK(sol.oracle_calls == oracle.calls());
    }
  }
}

TEST_CASE("adaptive_greedy with p0 = 1 returns the realized best singleton") {
  WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  AdaptiveRevenueModel model(g, CoeffPrior::point(1.5));
  KnapsackInstance inst({1.0, 1.0, 1.0}, 2.0);
  AdaptiveParams params;
  params.p0 = 1.0;
  params.p = 0.5;
  const Realization omega{{1.5, 1.5, 1.5}};
  CountingAdaptiveOracle oracle(model);
  Rng rng(3);
  const Solution sol = adaptive_greedy(inst, oracle, params, omega, rng);
  CHECK(sol.set == ItemSet{1});  // middle vertex has the best expected value
  CHECK(sol.value == doctest::Approx(2.0 * 1.5).epsilon(1e-12));
}

TEST_CASE("point-mass adaptive_greedy replays sample_greedy's trajectory") {
  Rng gen(61);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(gen.next_u64() % 5);
    WeightedGraph g = tst::random_graph(n, 0.6, gen);
    std::vector<double> values;
    std::vector<CoeffPrior> priors;
    for (int i = 0; i < n; ++i) {
      values.push_back(0.5 + gen.next_unit());
      priors.push_back(CoeffPrior::point(values.back()));
    }
    AdaptiveRevenueModel model(g, priors);
    RevenueObjective det(g, values);
    std::vector<double> costs = tst::random_costs(n, gen);
    KnapsackInstance inst(costs, 0.5 * n * 0.5);

    if (inst.any_dropped()) continue;  // keep both sides id-aligned

    const std::uint64_t seed = 1000 + trial;
    AdaptiveParams ap;
    ap.p0 = 0.0;
    ap.p = kSqrt2Minus1;
    CountingAdaptiveOracle ao(model);
    Rng ra(seed);
    const Solution adaptive = adaptive_greedy(inst, ao, ap, {values}, ra);

    SampleGreedyParams sp;
    sp.singleton_fallback = false;
    CountingOracle so(det);
    Rng rs(seed);
    rs.bernoulli(ap.p0);  // align with the adaptive p0 draw
    const Solution fixed = sample_greedy(inst, so, sp, rs);

    CHECK(adaptive.picked_order == fixed.picked_order);
    CHECK(adaptive.set == fixed.set);
    CHECK(adaptive.value == doctest::Approx(fixed.value).epsilon(1e-12));
  }
}

TEST_CASE("lazy adaptive greedy stays feasible and deterministic") {
  Rng gen(67);
  WeightedGraph g = tst::random_graph(10, 0.4, gen);
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  KnapsackInstance inst(tst::random_costs(10, gen), 2.0);
  Rng orng(68);
  const Realization omega = sample_realization(model, orng);

  CountingAdaptiveOracle o1(model);
  CountingAdaptiveOracle o2(model);
  Rng r1(5);
  Rng r2(5);
  const Solution a =
      lazy_adaptive_greedy(inst, o1, AdaptiveParams::guarantee(), LazyParams{},
                           omega, r1);
  const Solution b =
      lazy_adaptive_greedy(inst, o2, AdaptiveParams::guarantee(), LazyParams{},
                           omega, r2);
  CHECK(a.set == b.set);
  CHECK(a.value == b.value);
  CHECK(a.value ==
        doctest::Approx(model.realized_value(a.set, omega)).epsilon(1e-12));
}

TEST_CASE("solvers run correctly on instances that dropped items") {
  // Costs 2.0 never fit the budget 1.0, so construction keeps only the even
  // vertices of the path 0-1-2-3-4; the restricted view still sees the cut
  // edges into the dropped vertices.
  WeightedGraph g(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  CutObjective obj(g);
  KnapsackInstance inst({0.4, 2.0, 0.4, 2.0, 0.4}, 1.0);
  REQUIRE(inst.size() == 3);
  REQUIRE(inst.original_id(1) == 2);

  SubsetOracle view(obj, inst.kept_ids());
  CountingOracle oracle(view);
  Rng rng(3);
  SampleGreedyParams sp;
  sp.p = 1.0;
  const Solution sol = sample_greedy(inst, oracle, sp, rng);
  validate_solution(inst, sol);
  // Instance ids {0,1,2} are vertices {0,2,4}. Vertex 2 wins round one at
  // density 5, vertex 0 takes the round-two tie, and the third pick no
  // longer fits: S = {0,2} cuts three unit edges.
  CHECK(sol.set == ItemSet{0, 1});
  CHECK(sol.value == 3.0);

  CountingOracle brute(view);
  const Solution opt = brute_force_opt(inst, brute);
  CHECK(opt.value == 3.0);
  CHECK(opt.set == ItemSet{0, 1});  // ties with {1,2}; lex-lowest wins

  // Adaptive twin on the same dropped instance.
  AdaptiveRevenueModel model(g, CoeffPrior::point(1.0));
  SubsetAdaptiveOracle aview(model, inst.kept_ids());
  CountingAdaptiveOracle aoracle(aview);
  Rng arng(4);
  AdaptiveParams params;
  params.p0 = 0.0;
  params.p = 1.0;
  const Realization omega{{1.0, 1.0, 1.0, 1.0, 1.0}};
  const Solution asol = adaptive_greedy(inst, aoracle, params, omega, arng);
  validate_solution(inst, asol);
  CHECK(asol.value ==
        doctest::Approx(model.realized_value(
                            [&] {
                              ItemSet mapped;
                              for (int id : asol.set)
                                mapped.push_back(inst.original_id(id));
                              return mapped;
                            }(),
                            omega))
            .epsilon(1e-12));
}

TEST_CASE("approx_ratio_estimate basics") {
  PathCutFixture fx;
  auto solver = [](const KnapsackInstance& inst, CountingOracle& oracle,
                   Rng& rng) {
    return sample_greedy(inst, oracle, {}, rng);
  };

  const TrialStats one = approx_ratio_estimate(fx.inst, fx.oracle, solver, 1, 9);
  CountingOracle oracle(fx.oracle);
  Rng rng(derive_seed(9, 0));
  CHECK(one.mean == sample_greedy(fx.inst, oracle, {}, rng).value);

  // Every run of the path fixture outputs exactly 2, so the spread is zero
  // and the guarantee holds with room to spare.
  const TrialStats stats =
      approx_ratio_estimate(fx.inst, fx.oracle, solver, 2000, 10);
  CHECK(stats.mean == 2.0);
  CHECK(stats.stddev == 0.0);
  CHECK(stats.singleton_value == 2.0);
  CHECK(std::max(stats.mean, stats.singleton_value) >=
        2.0 / (3.0 + 2.0 * std::sqrt(2.0)));

  auto deterministic = [](const KnapsackInstance& inst, CountingOracle& oracle,
                          Rng& rng) {
    SampleGreedyParams params;
    params.p = 1.0;
    return sample_greedy(inst, oracle, params, rng);
  };
  const TrialStats det =
      approx_ratio_estimate(fx.inst, fx.oracle, deterministic, 50, 11);
  CHECK(det.stddev == 0.0);

  CHECK_THROWS_AS(approx_ratio_estimate(fx.inst, fx.oracle, solver, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("statistical guarantee on small random fixtures") {
  Rng gen(73);
  const double ratio = 3.0 + 2.0 * std::sqrt(2.0);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 10;
    WeightedGraph g = tst::random_graph(n, 0.5, gen);
    CutObjective obj(g);
    std::vector<double> costs = tst::random_costs(n, gen);
    double total = 0.0;
    for (double c : costs) total += c;
    KnapsackInstance inst(costs, 0.3 * total);

    CountingOracle oracle(obj);
    const double opt = brute_force_opt(inst, oracle).value;

    auto solver = [](const KnapsackInstance& i, CountingOracle& o, Rng& r) {
      return sample_greedy(i, o, {}, r);
    };
    const TrialStats stats =
        approx_ratio_estimate(inst, obj, solver, 500, 100 + trial);
    CHECK(std::max(stats.mean, stats.singleton_value) >=
          opt / ratio - 3.0 * stats.stderr_mean());
  }
}

TEST_CASE("large-instance parameter preset") {
  const SampleGreedyParams p = SampleGreedyParams::large_instance(0.1);
  CHECK(p.p == doctest::Approx(0.45).epsilon(1e-12));
  CHECK_THROWS_AS(SampleGreedyParams::large_instance(0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(SampleGreedyParams::large_instance(0.0),
                  std::invalid_argument);

  const AdaptiveParams a = AdaptiveParams::guarantee();
  CHECK(a.p0 == doctest::Approx(1.0 / 6.0));
  CHECK(a.p == doctest::Approx(1.0 / 3.0));
  const AdaptiveParams al = AdaptiveParams::large_instance(0.1);
  CHECK(al.p0 == 0.0);
  CHECK(al.p == doctest::Approx((std::sqrt(2.8) - 1.0) / 2.0).epsilon(1e-12));
}
