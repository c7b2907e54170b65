#pragma once

// Comparison policies: receding and committed horizon control, the static
// offline optimum, the exact dynamic offline optimum on small instances, and
// a pseudo-optimum from long offline gradient descent.

#include <cstdint>
#include <vector>

#include "roscsim/model.hpp"
#include "roscsim/record.hpp"
#include "roscsim/workloads.hpp"

namespace roscsim {

// Result type of every baseline; same layout as an online run.
using PolicyResult = RunRecord;

// Optimal 0/1 trajectory of a single service over a window, given its state
// before the window. `forward` holds alpha * lambda per window slot. Ties
// prefer not caching.
struct ServicePlan {
  std::vector<std::uint8_t> cached;
  double cost = 0.0;
};
ServicePlan plan_single_service(std::span<const double> forward, double beta, bool cached_before);

// Window plan for all services: per-service plans, then at every window slot
// keep the M cached services with the largest saving over never caching
// (ties to the lower index). plan[w][n] for w = 0..window-1.
std::vector<std::vector<std::uint8_t>> rhc_window_plan(const PredictionOracle& predictions,
                                                       const CostModel& cost, long t, int window,
                                                       std::span<const double> x_prev);

PolicyResult rhc_policy(const PredictionOracle& predictions, const CostModel& cost, int window);
// Average of the last W window plans for each slot (fewer during warm-up).
PolicyResult chc_policy(const PredictionOracle& predictions, const CostModel& cost, int window);
PolicyResult sopt_policy(const ArrivalTrace& trace, const CostModel& cost);

struct DpBudget {
  std::size_t max_services = 10;
  int max_capacity = 4;
  std::size_t max_horizon = 50;
};

// Number of cache sets of size <= M over N services.
std::size_t count_cache_states(std::size_t services, int capacity);

// Exact offline optimum by DP over cache sets. Throws InfeasibleInstance with
// the instance size when it exceeds `budget`.
PolicyResult exact_opt_dp(const ArrivalTrace& trace, const CostModel& cost, DpBudget budget = {});

// Offline PGD with `iterations` sweeps, costed fractionally. An approximation
// of the dynamic optimum, never a bound.
PolicyResult pseudo_opt(const ArrivalTrace& trace, const CostModel& cost, int iterations = 300);

}  // namespace roscsim
