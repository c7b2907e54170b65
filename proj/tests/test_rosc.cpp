#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "roscsim/baselines.hpp"
#include "roscsim/errors.hpp"
#include "roscsim/gradient_pgd.hpp"
#include "roscsim/record.hpp"
#include "roscsim/rosc.hpp"
#include "roscsim/workloads.hpp"

using namespace roscsim;

namespace {

ArrivalTrace random_trace(std::mt19937_64& rng, std::size_t horizon, std::size_t n, int max_count = 30) {
  ArrivalTrace trace(horizon, n);
  for (long t = 1; t <= static_cast<long>(horizon); ++t)
    for (std::size_t i = 0; i < n; ++i) trace.set(i, t, static_cast<double>(rng() % (max_count + 1)));
  return trace;
}

std::string csv_of(const RunRecord& r) {
  std::ostringstream out;
  write_run_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("online fractional iterates equal offline PGD with W sweeps") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 20, horizon = 1 + rng() % 50;
    const int w = 1 + static_cast<int>(rng() % 8);
    const int m = 1 + static_cast<int>(rng() % n);
    const auto trace = random_trace(rng, horizon, n);
    Vec beta(n);
    for (auto& b : beta) b = static_cast<double>(rng() % 100) / 10.0;
    const CostModel cost(0.05 + static_cast<double>(rng() % 100) / 50.0, beta, m, 0.05);
    const auto run = run_rosc(trace, RoscConfig{cost, w, 10, rng(), std::nullopt, true});
    const auto offline = offline_pgd(trace, cost, w);
    for (std::size_t t = 0; t < horizon; ++t) CHECK(oracle::max_abs_diff(fractional_trace(run)[t], offline[t]) <= 1e-9);
  }
}

TEST_CASE("without a window the policy rounds yesterday's top-M") {
  std::mt19937_64 rng(1);
  const auto trace = random_trace(rng, 30, 6);
  const CostModel cost(0.05, Vec(6, 10.0), 2);
  const auto run = run_rosc(trace, RoscConfig{cost, 0, 7, 3, std::nullopt, true});
  const auto theta = shifted_indicators(trace, 2);
  for (std::size_t t = 0; t < 30; ++t) {
    CHECK(run.fractional[t] == theta[t]);
    CHECK(run.decisions[t] == theta[t]);
  }
}

TEST_CASE("fractional iterates stay in the bounded simplex") {
  const auto trace = gen_replacement(ReplacementParams{40, 200, 100, 0.8, 0, 20}, 5);
  const CostModel cost(0.05, Vec(40, 10.0), 5);
  const auto run = run_rosc(trace, RoscConfig{cost, 6, 20, 1, std::nullopt, true});
  for (const auto& p : run.fractional) CHECK(in_bounded_simplex(p, 5));
  for (const auto& x : run.decisions) CHECK(is_cache_vector(x, 5));
}

TEST_CASE("runs are reproducible and per-slot costs add up") {
  const auto trace = gen_replacement(ReplacementParams{30, 120, 80, 0.8, 0, 15}, 2);
  const CostModel cost(0.05, Vec(30, 5.0), 4);
  const RoscConfig config{cost, 5, 16, 9, std::nullopt, true};
  const auto a = run_rosc(trace, config);
  const auto b = run_rosc(trace, config);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(a.decisions == b.decisions);
  CHECK(a.total_cost == total_cost(trace, a.decisions, cost));
  CHECK(sum_slot_costs(a) == a.total_cost);
  const auto c = run_rosc(trace, RoscConfig{cost, 5, 16, 10, std::nullopt, true});
  CHECK(c.fractional == a.fractional);
}

TEST_CASE("decision at t ignores arrivals after t+W-1") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 5, horizon = 25;
    const int w = 1 + static_cast<int>(rng() % 4);
    auto trace = random_trace(rng, horizon, n);
    const long t = 2 + static_cast<long>(rng() % (horizon - w - 2));
    const CostModel cost(0.3, Vec(n, 4.0), 2);
    const RoscConfig config{cost, w, 8, 4, std::nullopt, true};
    const auto base = run_rosc(trace, config);
    for (std::size_t i = 0; i < n; ++i) trace.set(i, t + w, trace.at(i, t + w) + 50.0 * (i + 1));
    const auto perturbed = run_rosc(trace, config);
    for (long s = 1; s <= t; ++s) {
      CHECK(perturbed.decisions[s - 1] == base.decisions[s - 1]);
      CHECK(perturbed.fractional[s - 1] == base.fractional[s - 1]);
    }
  }
}

TEST_CASE("costs are charged on the true trace under noisy predictions") {
  const auto trace = gen_replacement(ReplacementParams{20, 60, 50, 0.8, 0, 10}, 4);
  const CostModel cost(0.05, Vec(20, 10.0), 3);
  const NoisyPredictions noisy(trace, 0.05, 11, 4);
  const auto run = run_rosc(noisy, RoscConfig{cost, 4, 10, 2, std::nullopt, true});
  CHECK(run.total_cost == doctest::Approx(total_cost(trace, run.decisions, cost)).epsilon(1e-12));
  const auto exact = run_rosc(trace, RoscConfig{cost, 4, 10, 2, std::nullopt, true});
  CHECK(exact.fractional != run.fractional);
}

TEST_CASE("a long window on a stationary trace approaches the static optimum") {
  ReplacementParams params{50, 300, 200, 0.8, 0, std::numeric_limits<double>::infinity()};
  double rosc = 0.0, sopt = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto trace = gen_replacement(params, seed);
    const CostModel cost(0.05, Vec(50, 10.0), 5);
    rosc += run_rosc(trace, RoscConfig{cost, 300, 100, seed, std::nullopt, false}).total_cost;
    sopt += sopt_policy(trace, cost).total_cost;
  }
  CHECK(rosc <= 1.05 * sopt);
}

TEST_CASE("gamma policy") {
  CHECK(GammaPolicy::theorem(25, 100).resolve() == doctest::Approx(0.5));
  CHECK(GammaPolicy::fixed(0.05).resolve() == 0.05);
  CHECK_THROWS_AS(GammaPolicy::theorem(0, 100).resolve(), ArgumentError);
  CHECK_THROWS_AS(GammaPolicy::theorem(150, 100).resolve(), ArgumentError);
  const CostModel cost(0.05, Vec{10, 10}, 1, 0.05);
  const RoscConfig config{cost, 1, 1, 1, GammaPolicy::theorem(1, 4), true};
  CHECK(config.effective_cost().gamma() == doctest::Approx(0.5));
  CHECK(config.effective_cost().eta() == doctest::Approx(0.5 / 120));
}

TEST_CASE("invalid configurations") {
  const auto trace = ArrivalTrace::from_rows({{1, 2}});
  CHECK_THROWS_AS(run_rosc(trace, RoscConfig{CostModel(1, Vec{1, 1}, 1), -1, 1, 1, std::nullopt, true}), ArgumentError);
  CHECK_THROWS_AS(run_rosc(trace, RoscConfig{CostModel(1, Vec{1, 1}, 1), 1, 0, 1, std::nullopt, true}), ArgumentError);
  CHECK_THROWS_AS(run_rosc(trace, RoscConfig{CostModel(1, Vec{1, 1, 1}, 1), 1, 1, 1, std::nullopt, true}),
                  DimensionError);
}
