#pragma once

// The randomized online service caching policy: windowed projected gradient
// descent on the smoothed cost, followed by sample-path rounding.

#include <cstdint>
#include <optional>
#include <vector>

#include "roscsim/model.hpp"
#include "roscsim/record.hpp"
#include "roscsim/workloads.hpp"

namespace roscsim {

// How the smoothing width gamma is chosen.
struct GammaPolicy {
  enum class Kind { kFixed, kTheorem };

  Kind kind = Kind::kFixed;
  double value = 0.05;
  double path_length = 0.0;  // H_T, theorem rule only
  double horizon = 0.0;      // T, theorem rule only

  static GammaPolicy fixed(double gamma) { return {Kind::kFixed, gamma, 0.0, 0.0}; }
  // gamma = sqrt(H_T / T); requires 0 < H_T < T so that gamma lies in (0,1).
  static GammaPolicy theorem(double path_length, double horizon) {
    return {Kind::kTheorem, 0.0, path_length, horizon};
  }

  double resolve() const;
};

struct RoscConfig {
  CostModel cost;
  int window = 10;  // W; 0 disables the gradient step
  int paths = 100;  // K
  std::uint64_t seed = 1;
  std::optional<GammaPolicy> gamma;  // overrides cost.gamma() when set
  bool record_fractional = true;

  // cost with gamma (and the default eta) resolved from the policy.
  CostModel effective_cost() const;
};

nlohmann::json to_json(const RoscConfig& config);

// Runs the policy from the warm-up step t = -W+1 through T. Decisions use the
// oracle's predictions; costs are charged on the oracle's true trace.
RunRecord run_rosc(const PredictionOracle& predictions, const RoscConfig& config);
RunRecord run_rosc(const ArrivalTrace& trace, const RoscConfig& config);

// P'_1..P'_T, the final fractional iterates of a run.
const std::vector<Vec>& fractional_trace(const RunRecord& record);

}  // namespace roscsim
