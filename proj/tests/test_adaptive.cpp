#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "subknap/adaptive.hpp"
#include "support.hpp"

using namespace subknap;
namespace tst = subknap::testing;

TEST_CASE("lomax inverse cdf") {
  CHECK(lomax_icdf(0.0, 1.0, 2.0) == 0.0);
  CHECK(lomax_icdf(0.75, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lomax_icdf(1.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(lomax_icdf(-0.1, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("coefficient priors") {
  const CoeffPrior lomax = CoeffPrior::lomax(1.0, 2.0);
  CHECK(lomax.mean() == 1.0);  // scale / (shape - 1)
  CHECK(!lomax.is_discrete());
  CHECK_THROWS_AS(CoeffPrior::lomax(1.0, 1.0), std::invalid_argument);

  const CoeffPrior two_point = CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5});
  CHECK(two_point.mean() == 1.0);
  CHECK_THROWS_AS(CoeffPrior::discrete({1.0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(CoeffPrior::discrete({1.0, 2.0}, {0.5, 0.6}),
                  std::invalid_argument);

  const CoeffPrior point = CoeffPrior::point(3.0);
  CHECK(point.mean() == 3.0);
  Rng rng(1);
  CHECK(point.sample(rng) == 3.0);
}

TEST_CASE("realization sampling is seed-deterministic") {
  AdaptiveRevenueModel model(tst::triangle_graph(), CoeffPrior::lomax(1.0, 2.0));
  Rng a(77);
  Rng b(77);
  const Realization ra = sample_realization(model, a);
  const Realization rb = sample_realization(model, b);
  CHECK(ra.states == rb.states);
}

TEST_CASE("lomax(1,2) draws have empirical mean 1.0 within 0.01") {
  const CoeffPrior prior = CoeffPrior::lomax(1.0, 2.0);
  Rng rng(20240601);
  double sum = 0.0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) sum += prior.sample(rng);
  CHECK(sum / draws == doctest::Approx(1.0).epsilon(0.01));
}

namespace {

AdaptiveRevenueModel two_node_model(double w, CoeffPrior prior) {
  return AdaptiveRevenueModel(WeightedGraph(2, {{0, 1, w}}), std::move(prior));
}

}  // namespace

TEST_CASE("observation reveals the closed neighborhood") {
  AdaptiveRevenueModel model = two_node_model(1.0, CoeffPrior::lomax(1.0, 2.0));
  Realization omega{{0.3, 0.9}};
  PartialRealization pr(2);
  pr = model.observe(pr, 0, omega);
  CHECK(pr.observed() == ItemSet{0});
  CHECK(pr.is_revealed(0));
  CHECK(pr.is_revealed(1));  // neighbor of the picked buyer
  CHECK(pr.state(1) == 0.9);
  CHECK_THROWS_AS(model.observe(pr, 0, omega), std::invalid_argument);
}

TEST_CASE("observing a disconnected buyer reveals only itself") {
  WeightedGraph g(3, {{0, 1, 0.5}});  // vertex 2 isolated
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  Realization omega{{0.1, 0.2, 0.3}};
  PartialRealization pr(3);
  pr = model.observe(pr, 2, omega);
  CHECK(pr.is_revealed(2));
  CHECK(!pr.is_revealed(0));
  CHECK(!pr.is_revealed(1));
}

TEST_CASE("partial realizations extend monotonically along a trajectory") {
  Rng rng(3);
  WeightedGraph g = tst::random_graph(6, 0.5, rng);
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  Rng omega_rng(4);
  const Realization omega = sample_realization(model, omega_rng);
  PartialRealization pr(6);
  for (int i = 0; i < 4; ++i) {
    const PartialRealization next = model.observe(pr, i, omega);
    CHECK(next.extends(pr));
    CHECK(!pr.extends(next) == (next.revealed_count() > pr.revealed_count() ||
                                next.observed().size() > pr.observed().size()));
    pr = next;
  }
}

TEST_CASE("expected marginal with nothing revealed uses the prior mean") {
  AdaptiveRevenueModel model = two_node_model(0.25, CoeffPrior::lomax(1.0, 2.0));
  PartialRealization pr(2);
  // E[a_1] * sqrt(0.25) - E[a_0] * sqrt(0) = 1 * 0.5
  CHECK(model.expected_marginal(0, pr) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(model.expected_marginal(0, model.observe(pr, 0, {{1.0, 1.0}})),
                  std::invalid_argument);
}

TEST_CASE("fully revealed expected marginal equals the deterministic one") {
  Rng rng(15);
  WeightedGraph g = tst::random_graph(7, 0.6, rng);
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  Rng omega_rng(16);
  const Realization omega = sample_realization(model, omega_rng);

  // Observing everything reveals every coefficient on this connected-ish
  // fixture; compare against the deterministic objective on omega.
  RevenueObjective det(g, omega.states);
  PartialRealization pr(7);
  ItemSet picked;
  for (int i = 0; i < 5; ++i) {
    pr = model.observe(pr, i, omega);
    picked = set_with(picked, i);
  }
  for (int i = 5; i < 7; ++i) {
    bool closed_neighborhood_known = pr.is_revealed(i);
    for (const Neighbor& nb : g.neighbors(i)) {
      closed_neighborhood_known &= pr.is_revealed(nb.id);
    }
    if (!closed_neighborhood_known) continue;  // residual uncertainty left
    const double adaptive = model.expected_marginal(i, pr);
    const double deterministic =
        det.evaluate(set_with(picked, i)) - det.evaluate(picked);
    CHECK(adaptive == doctest::Approx(deterministic).epsilon(1e-9));
  }
}

TEST_CASE("point-mass priors collapse to the deterministic marginals") {
  Rng rng(31);
  WeightedGraph g = tst::random_graph(6, 0.5, rng);
  std::vector<CoeffPrior> priors;
  std::vector<double> values;
  for (int i = 0; i < 6; ++i) {
    values.push_back(0.5 + rng.next_unit());
    priors.push_back(CoeffPrior::point(values.back()));
  }
  AdaptiveRevenueModel model(g, priors);
  RevenueObjective det(g, values);
  Realization omega{values};

  PartialRealization pr(6);
  ItemSet picked;
  for (int step = 0; step < 4; ++step) {
    for (int i = 0; i < 6; ++i) {
      if (set_contains(picked, i)) continue;
      const double adaptive = model.expected_marginal(i, pr);
      const double deterministic =
          det.evaluate(set_with(picked, i)) - det.evaluate(picked);
      CHECK(adaptive == doctest::Approx(deterministic).epsilon(1e-9));
    }
    pr = model.observe(pr, step, omega);
    picked = set_with(picked, step);
  }
}

TEST_CASE("realized value matches the deterministic objective bit for bit") {
  Rng rng(41);
  WeightedGraph g = tst::random_graph(8, 0.4, rng);
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  Rng omega_rng(42);
  const Realization omega = sample_realization(model, omega_rng);
  RevenueObjective det(g, omega.states);
  for (int mask = 0; mask < (1 << 8); mask += 5) {
    ItemSet s;
    for (int i = 0; i < 8; ++i) {
      if (mask & (1 << i)) s.push_back(i);
    }
    CHECK(model.realized_value(s, omega) == det.evaluate(s));
  }
}

TEST_CASE("incremental adaptive evaluator agrees with the stateless oracle") {
  Rng rng(55);
  WeightedGraph g = tst::random_graph(7, 0.5, rng);
  AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
  Rng omega_rng(56);
  const Realization omega = sample_realization(model, omega_rng);

  auto eval = model.make_evaluator();
  PartialRealization pr(7);
  for (int step = 0; step < 5; ++step) {
    for (int i = step; i < 7; ++i) {
      CHECK(eval->expected_marginal(i) ==
            doctest::Approx(model.expected_marginal(i, pr)).epsilon(1e-9));
    }
    eval->observe(step, omega);
    pr = model.observe(pr, step, omega);
    CHECK(eval->partial().observed() == pr.observed());
  }
}

TEST_CASE("adaptive submodularity holds under prior-mean conditioning") {
  // With independent coefficients, conditioning on the states of the picked
  // set alone leaves every remaining coefficient at its prior mean; marginals
  // then shrink as the picked set grows. Nested reveal-free partial
  // realizations model exactly that information structure.
  Rng rng(83);
  for (int trial = 0; trial < 40; ++trial) {
    WeightedGraph g = tst::random_graph(8, 0.45, rng);
    AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
    PartialRealization small(8);
    PartialRealization large(8);
    ItemSet in_large;
    for (int k = 0; k < 4; ++k) {
      const int pick = static_cast<int>(rng.next_u64() % 8);
      if (set_contains(in_large, pick)) continue;
      large.mark_observed(pick);
      in_large = set_with(in_large, pick);
      if (k < 2) small.mark_observed(pick);
    }
    for (int i = 0; i < 8; ++i) {
      if (set_contains(in_large, i)) continue;
      CHECK(model.expected_marginal(i, small) >=
            model.expected_marginal(i, large) - 1e-9);
    }
  }
}

TEST_CASE("revealed coefficients can raise a neighbor's expected marginal") {
  // The closed-neighborhood observation rule leaks more than the picked
  // states: once a neighbor's high coefficient is on the table, the marginal
  // of items next to her can grow. Expected marginals conditioned on all
  // revealed values are therefore not adaptively submodular.
  WeightedGraph g(3, {{0, 1, 0.09}, {1, 2, 1.0}});
  AdaptiveRevenueModel model(
      g, CoeffPrior::discrete({0.0, 5.0}, {0.8, 0.2}));  // mean 1
  Realization omega{{0.0, 5.0, 0.0}};
  PartialRealization before(3);
  const double em_before = model.expected_marginal(2, before);
  CHECK(em_before == doctest::Approx(1.0).epsilon(1e-12));  // mean * sqrt(1)

  const PartialRealization after = model.observe(before, 0, omega);
  const double em_after = model.expected_marginal(2, after);
  // 5 * (sqrt(1.09) - sqrt(0.09)) = 3.72...
  CHECK(em_after ==
        doctest::Approx(5.0 * (std::sqrt(1.09) - std::sqrt(0.09)))
            .epsilon(1e-12));
  CHECK(em_after > em_before);
}

TEST_CASE("exact policy evaluation on the single-buyer example") {
  WeightedGraph g(2, {{0, 1, 1.0}});
  AdaptiveRevenueModel model(
      g, {CoeffPrior::point(1.0), CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5})});
  KnapsackInstance inst({1.0, 1.0}, 1.0);
  Policy seed_buyer_zero = [](const PartialRealization& pr, double) {
    return pr.observed().empty() ? 0 : -1;
  };
  CHECK(evaluate_policy_exact(model, inst, seed_buyer_zero) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Policy empty_policy = [](const PartialRealization&, double) { return -1; };
  CHECK(evaluate_policy_exact(model, inst, empty_policy) == 0.0);
}

TEST_CASE("deterministic state space reduces exact evaluation to one run") {
  Rng rng(71);
  WeightedGraph g = tst::random_graph(5, 0.6, rng);
  std::vector<CoeffPrior> priors;
  std::vector<double> values;
  for (int i = 0; i < 5; ++i) {
    values.push_back(0.5 + rng.next_unit());
    priors.push_back(CoeffPrior::point(values.back()));
  }
  AdaptiveRevenueModel model(g, priors);
  KnapsackInstance inst({1.0, 1.0, 1.0, 1.0, 1.0}, 2.0);
  Policy pick_two = [](const PartialRealization& pr, double) {
    return pr.observed().size() < 2 ? static_cast<int>(pr.observed().size())
                                    : -1;
  };
  RevenueObjective det(g, values);
  CHECK(evaluate_policy_exact(model, inst, pick_two) ==
        doctest::Approx(det.evaluate(ItemSet{0, 1})).epsilon(1e-12));
}

TEST_CASE("exact evaluation guards its capacity and prior requirements") {
  {
    WeightedGraph g(14, {});
    AdaptiveRevenueModel model(g, CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5}));
    KnapsackInstance inst(std::vector<double>(14, 1.0), 3.0);
    Policy stop = [](const PartialRealization&, double) { return -1; };
    CHECK_THROWS_AS(evaluate_policy_exact(model, inst, stop), CapacityError);
  }
  {
    WeightedGraph g(2, {{0, 1, 1.0}});
    AdaptiveRevenueModel model(g, CoeffPrior::lomax(1.0, 2.0));
    KnapsackInstance inst({1.0, 1.0}, 1.0);
    Policy stop = [](const PartialRealization&, double) { return -1; };
    CHECK_THROWS_AS(evaluate_policy_exact(model, inst, stop),
                    std::invalid_argument);
  }
}

TEST_CASE("optimal adaptive policy on a hand-checkable pair") {
  WeightedGraph g(2, {{0, 1, 1.0}});
  AdaptiveRevenueModel model(g, CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5}));
  KnapsackInstance inst({1.0, 1.0}, 1.0);
  // Budget for one pick: either buyer earns E[other coefficient] = 1.
  CHECK(optimal_policy_value_exact(model, inst) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimal policy value round-trips through exact evaluation") {
  WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 0.6}});
  AdaptiveRevenueModel model(g, CoeffPrior::discrete({0.0, 2.0}, {0.5, 0.5}));
  KnapsackInstance inst({1.0, 1.0, 1.0}, 2.0);
  const ExactPolicy best = optimal_policy_exact(model, inst);
  CHECK(evaluate_policy_exact(model, inst, best.policy) ==
        doctest::Approx(best.value).epsilon(1e-12));

  // Picking the middle vertex alone earns a_0 + a_2 * sqrt(0.6) in
  // expectation; the optimum can only improve on this non-adaptive play.
  CHECK(best.value >= 1.0 + std::sqrt(0.6) - 1e-12);

  // And no fixed policy beats it.
  Policy greedy_zero_one = [](const PartialRealization& pr, double remaining) {
    if (remaining < 1.0) return -1;
    for (int i : {0, 1}) {
      if (!set_contains(pr.observed(), i)) return i;
    }
    return -1;
  };
  CHECK(evaluate_policy_exact(model, inst, greedy_zero_one) <=
        best.value + 1e-12);
}
