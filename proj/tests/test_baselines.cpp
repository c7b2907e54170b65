#include <doctest.h>

#include <bit>
#include <random>

#include "oracles.hpp"
#include "roscsim/baselines.hpp"
#include "roscsim/errors.hpp"
#include "roscsim/gradient_pgd.hpp"
#include "roscsim/rosc.hpp"

using namespace roscsim;

namespace {

std::vector<Vec> random_rows(std::mt19937_64& rng, std::size_t horizon, std::size_t n, int max_count) {
  std::vector<Vec> rows(horizon, Vec(n));
  for (auto& r : rows)
    for (auto& v : r) v = static_cast<double>(rng() % (max_count + 1));
  return rows;
}

// Exhaustive search over the four trajectories of a two-slot window.
double two_slot_best(double f0, double f1, double beta, bool before) {
  double best = 1e300;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double c = (a ? 0 : f0) + (b ? 0 : f1) + (a && !before ? beta : 0) + (b && !a ? beta : 0);
      best = std::min(best, c);
    }
  return best;
}

}  // namespace

TEST_CASE("single-service window plan") {
  const auto plan = plan_single_service(Vec{0.05 * 300, 0.05 * 10}, 10.0, false);
  CHECK(plan.cached == std::vector<std::uint8_t>{1, 1});
  CHECK(plan.cost == doctest::Approx(10.0));
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 500; ++rep) {
    const double f0 = rng() % 20, f1 = rng() % 20, beta = rng() % 25;
    const bool before = rng() % 2;
    const double best = two_slot_best(f0, f1, beta, before);
    const auto p = plan_single_service(Vec{f0, f1}, beta, before);
    CHECK(p.cost == best);
  }
}

TEST_CASE("services below the break-even volume never enter the cache") {
  const auto plan = plan_single_service(Vec{2, 3, 4}, 9.5, false);
  CHECK(plan.cached == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(plan.cost == 9.0);
}

TEST_CASE("RHC with W=1 and free switching follows the predicted top-M") {
  std::mt19937_64 rng(3);
  const auto rows = random_rows(rng, 20, 7, 9);
  const auto trace = ArrivalTrace::from_rows(rows);
  const ExactPredictions pred(trace);
  const auto r = rhc_policy(pred, CostModel(0.05, Vec(7, 0.0), 3), 1);
  for (std::size_t t = 0; t < 20; ++t) CHECK(r.decisions[t] == oracle::top_m(rows[t], 3));
}

TEST_CASE("RHC without a binding capacity equals the per-service plans") {
  std::mt19937_64 rng(4);
  const auto rows = random_rows(rng, 15, 4, 30);
  const auto trace = ArrivalTrace::from_rows(rows);
  const ExactPredictions pred(trace);
  const CostModel cost(0.1, Vec{3, 5, 7, 9}, 4);
  const auto plan = rhc_window_plan(pred, cost, 3, 4, Vec{1, 0, 0, 1});
  for (std::size_t i = 0; i < 4; ++i) {
    Vec f;
    for (long t = 3; t < 7; ++t) f.push_back(0.1 * rows[t - 1][i]);
    const auto p = plan_single_service(f, cost.beta()[i], i == 0 || i == 3);
    for (std::size_t w = 0; w < 4; ++w) CHECK(plan[w][i] == p.cached[w]);
  }
  // window clipped at the horizon
  CHECK(rhc_window_plan(pred, cost, 14, 4, Vec(4, 0.0)).size() == 2);
  CHECK_THROWS_AS(rhc_window_plan(pred, cost, 1, 0, Vec(4, 0.0)), ArgumentError);
}

TEST_CASE("CHC averages the window plans") {
  std::mt19937_64 rng(5);
  const auto trace = ArrivalTrace::from_rows(random_rows(rng, 25, 6, 20));
  const ExactPredictions pred(trace);
  const CostModel cost(0.2, Vec(6, 2.0), 2);
  CHECK(chc_policy(pred, cost, 1).decisions == rhc_policy(pred, cost, 1).decisions);
  const auto chc = chc_policy(pred, cost, 4);
  for (const auto& x : chc.decisions) {
    CHECK(in_bounded_simplex(x, 2));
    for (double v : x) CHECK(v * 4 == doctest::Approx(std::round(v * 4)));
  }
  // stationary demand: every solve agrees, so CHC is binary and equals RHC
  const auto flat = ArrivalTrace::from_rows(std::vector<Vec>(12, Vec{50, 1, 40, 2}));
  const ExactPredictions flat_pred(flat);
  const CostModel c2(0.2, Vec(4, 2.0), 2);
  CHECK(chc_policy(flat_pred, c2, 3).decisions == rhc_policy(flat_pred, c2, 3).decisions);
}

TEST_CASE("CHC charges fractional increments") {
  // Two solves that cache disjoint singletons average to 0.5 / 0.5.
  const auto trace = ArrivalTrace::from_rows({{0, 0}, {100, 0}, {0, 100}, {0, 0}});
  const CostModel cost(1.0, Vec{1, 1}, 1);
  const auto record = make_record("x", trace, {{0, 0}, {0.5, 0.5}, {0.5, 0.5}, {0, 0}}, cost);
  CHECK(record.switch_cost[1] == doctest::Approx(1.0));
  CHECK(record.forward_cost[1] == doctest::Approx(50.0));
}

TEST_CASE("static optimum") {
  const double alpha = 0.05, ratio = 200;
  auto run = [&](Vec totals) {
    std::vector<Vec> rows{totals};
    return sopt_policy(ArrivalTrace::from_rows(rows), CostModel(alpha, Vec(3, ratio * alpha), 2)).decisions[0];
  };
  CHECK(run({300, 250, 180}) == Vec{1, 1, 0});
  CHECK(run({300, 250, 220}) == Vec{1, 1, 0});
  CHECK(run({150, 199, 250}) == Vec{0, 0, 1});
  const auto trace = ArrivalTrace::from_rows({{10, 20, 30}, {5, 5, 5}});
  const auto none = sopt_policy(trace, CostModel(alpha, Vec(3, 10.0), 2));
  CHECK(none.total_cost == doctest::Approx(alpha * 75));
  const auto some = sopt_policy(ArrivalTrace::from_rows({{300, 1}, {300, 1}}), CostModel(1, Vec{10, 10}, 1));
  CHECK(some.switch_cost[0] == 10.0);
  CHECK(some.switch_cost[1] == 0.0);
}

TEST_CASE("exact optimum") {
  const auto one = ArrivalTrace::from_rows({{100, 50}});
  const auto r = exact_opt_dp(one, CostModel(0.05, Vec{10, 10}, 1));
  CHECK(r.total_cost == doctest::Approx(7.5));
  CHECK(r.decisions[0] == Vec{0, 0});

  std::mt19937_64 rng(9);
  const auto rows = random_rows(rng, 6, 5, 9);
  const auto free = exact_opt_dp(ArrivalTrace::from_rows(rows), CostModel(0.5, Vec(5, 0.0), 2));
  double expected = 0.0;
  for (const auto& row : rows) {
    const Vec top = oracle::top_m(row, 2);
    for (std::size_t i = 0; i < 5; ++i) expected += 0.5 * row[i] * (1 - top[i]);
  }
  CHECK(free.total_cost == doctest::Approx(expected));

  const auto flat = ArrivalTrace::from_rows(std::vector<Vec>(6, Vec{9, 7, 1}));
  const auto stat = exact_opt_dp(flat, CostModel(1.0, Vec{5, 5, 5}, 2));
  for (const auto& x : stat.decisions) CHECK(x == Vec{1, 1, 0});
}

TEST_CASE("exact optimum agrees with brute force and bounds every policy") {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng() % 3, horizon = 1 + rng() % 4;
    const int m = 1 + static_cast<int>(rng() % n);
    const auto rows = random_rows(rng, horizon, n, 20);
    Vec beta(n);
    for (auto& b : beta) b = static_cast<double>(rng() % 12);
    const CostModel cost(0.5, beta, m);
    const auto trace = ArrivalTrace::from_rows(rows);
    const double opt = exact_opt_dp(trace, cost).total_cost;
    CHECK(opt == doctest::Approx(oracle::brute_force_opt(rows, 0.5, beta, m)));
    const ExactPredictions pred(trace);
    CHECK(rhc_policy(pred, cost, 2).total_cost >= opt - 1e-9);
    CHECK(sopt_policy(trace, cost).total_cost >= opt - 1e-9);
    CHECK(run_rosc(trace, RoscConfig{cost, 2, 5, 1, std::nullopt, false}).total_cost >= opt - 1e-9);
  }
}

TEST_CASE("exact optimum refuses oversized instances") {
  const auto big = ArrivalTrace(10, 20);
  try {
    (void)exact_opt_dp(big, CostModel(1, Vec(20, 1.0), 2));
    CHECK(false);
  } catch (const InfeasibleInstance& e) {
    CHECK(std::string(e.what()).find("N=20") != std::string::npos);
  }
  CHECK(count_cache_states(10, 4) == 1 + 10 + 45 + 120 + 210);
}

TEST_CASE("pseudo optimum") {
  std::mt19937_64 rng(11);
  const auto trace = ArrivalTrace::from_rows(random_rows(rng, 8, 4, 20));
  const CostModel cost(0.5, Vec(4, 3.0), 2);
  const auto zero = pseudo_opt(trace, cost, 0);
  CHECK(zero.decisions == shifted_indicators(trace, 2));
  const auto p = pseudo_opt(trace, cost, 50);
  for (const auto& x : p.decisions) CHECK(in_bounded_simplex(x, 2));
  CHECK(p.config.at("approximation") == true);
}

TEST_CASE("RHC window heuristic against exhaustive window search") {
  // Cost of a window plan from a given starting cache, and the best one over
  // every capacity-feasible trajectory.
  auto plan_cost = [](const std::vector<Vec>& fwd, const Vec& beta, const Vec& start,
                      const std::vector<std::vector<std::uint8_t>>& plan) {
    double c = 0.0;
    Vec prev = start;
    for (std::size_t w = 0; w < plan.size(); ++w) {
      for (std::size_t i = 0; i < beta.size(); ++i) {
        c += plan[w][i] ? 0.0 : fwd[w][i];
        if (plan[w][i] && prev[i] < 0.5) c += beta[i];
        prev[i] = plan[w][i];
      }
    }
    return c;
  };
  std::mt19937_64 rng(21);
  double worst_gap = 0.0, total_gap = 0.0;
  int gapped = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const std::size_t n = 2 + rng() % 3;
    const int m = 1 + static_cast<int>(rng() % n);
    const int window = 1 + static_cast<int>(rng() % 3);
    const auto rows = random_rows(rng, 6, n, 30);
    Vec beta(n);
    for (auto& b : beta) b = static_cast<double>(rng() % 15);
    const CostModel cost(0.5, beta, m);
    const auto trace = ArrivalTrace::from_rows(rows);
    const ExactPredictions pred(trace);
    Vec start(n, 0.0);
    int held = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (held < m && rng() % 2) {
        start[i] = 1.0;
        ++held;
      }
    }
    const long t = 2;
    const auto plan = rhc_window_plan(pred, cost, t, window, start);
    std::vector<Vec> fwd;
    for (int w = 0; w < window; ++w) {
      Vec f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * rows[t - 1 + w][i];
      fwd.push_back(f);
    }
    for (const auto& x : plan) {
      int load = 0;
      for (auto v : x) load += v;
      CHECK(load <= m);
    }
    const double heuristic = plan_cost(fwd, beta, start, plan);
    // enumerate all (2^n)^window trajectories
    const std::size_t sets = std::size_t{1} << n;
    std::size_t combos = 1;
    for (int w = 0; w < window; ++w) combos *= sets;
    double best = 1e300;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<std::vector<std::uint8_t>> traj(window, std::vector<std::uint8_t>(n));
      std::size_t c = code;
      bool ok = true;
      for (int w = 0; w < window && ok; ++w) {
        const std::size_t mask = c % sets;
        c /= sets;
        ok = std::popcount(mask) <= m;
        for (std::size_t i = 0; i < n; ++i) traj[w][i] = (mask >> i) & 1u;
      }
      if (ok) best = std::min(best, plan_cost(fwd, beta, start, traj));
    }
    CHECK(heuristic >= best - 1e-9);
    const double gap = best > 0 ? (heuristic - best) / best : 0.0;
    worst_gap = std::max(worst_gap, gap);
    total_gap += gap;
    gapped += gap > 1e-12;
  }
  MESSAGE("RHC window heuristic: " << gapped << "/" << reps << " windows above the exact optimum, mean gap "
                                    << total_gap / reps << ", worst gap " << worst_gap);
}
