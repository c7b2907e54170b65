#pragma once

// Randomized self-check suites behind `roscsim validate`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "roscsim/model.hpp"

namespace roscsim {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  std::string first_failure;
  double seconds = 0.0;

  bool passed() const { return cases > 0 && failures == 0; }
};

nlohmann::json to_json(const CheckResult& result);

// Bounded-simplex projection against the active-set oracle, plus
// non-expansiveness and idempotence. Gaussian inputs, N in [2,12].
CheckResult check_projection(std::size_t cases, std::uint64_t seed);

// Online fractional iterates against offline PGD with W sweeps, N <= 20,
// T <= 50, W in [1,8], tolerance 1e-9.
CheckResult check_window_equivalence(std::size_t instances, std::uint64_t seed);

// Sample-path updates with random feasible targets: exact column counts,
// per-path capacity, and termination of the rebalancing.
CheckResult check_sampler(std::size_t updates, std::uint64_t seed);

// Seed-averaged regret against the exact optimum stays below the regret
// bound on tiny instances (N <= 8, M <= 3, T <= 40).
CheckResult check_regret_ceiling(std::size_t instances, int seeds_per_instance, std::uint64_t seed);

struct TinyInstance {
  ArrivalTrace trace;
  CostModel cost;
  double path_length = 0.0;
};

// Small replacement-model trace with 0 < H_T < T and random prices.
TinyInstance tiny_instance(std::uint64_t seed, std::size_t max_services = 8, int max_capacity = 3,
                           std::size_t max_horizon = 40);

inline const std::vector<std::string>& validation_checks() {
  static const std::vector<std::string> names{"projection", "lemma1", "sampler", "theorem1"};
  return names;
}

}  // namespace roscsim
