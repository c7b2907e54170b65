#pragma once

// Experiment runner: regret, the regret bound of the online policy, and
// multi-seed sweeps that emit cost and runtime tables.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roscsim/baselines.hpp"
#include "roscsim/model.hpp"
#include "roscsim/record.hpp"
#include "roscsim/rosc.hpp"
#include "roscsim/workloads.hpp"

namespace roscsim {

// C(policy) - C(reference). Negative when the reference is only an
// approximation of the optimum.
double regret(double policy_cost, double reference_cost);

struct BoundTerms {
  double tracking = 0.0;  // (6 sqrt(2M) b* (a + 3b*) / (a W) + 3 b* N) sqrt(H_T T)
  double rounding = 0.0;  // (a U + 6 b* N) T / K
  double path = 0.0;      // 2 b* H_T
  double total() const { return tracking + rounding + path; }
};

// Regret ceiling of the online policy with gamma = sqrt(H_T / T) and
// eta = gamma / (12 b*). Throws ArgumentError for W < 1 or K < 1.
BoundTerms regret_bound_terms(const CostModel& cost, std::size_t services, double horizon, double cap,
                              int paths, int window, double path_length);
double regret_bound(const CostModel& cost, std::size_t services, double horizon, double cap, int paths,
                    int window, double path_length);

inline const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names{"rosc", "rhc", "chc", "sopt", "opt-dp", "pseudo-opt"};
  return names;
}
bool is_known_policy(const std::string& name);

struct PolicyParams {
  CostModel cost;
  int window = 10;
  int paths = 100;
  std::uint64_t seed = 1;
  double noise = 0.0;            // R
  bool noisy_baselines = false;  // RHC/CHC see the same noisy predictions
  int pseudo_iterations = 300;
  DpBudget budget;
  std::optional<GammaPolicy> gamma;
};

// Runs one named policy on `trace`. Unknown names throw ArgumentError.
RunRecord run_policy(const std::string& name, const ArrivalTrace& trace, const PolicyParams& params);

struct ExperimentSpec {
  std::string workload = "replacement";  // or "poisson"
  ReplacementParams replacement;
  PoissonParams poisson;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> policies{"rosc", "rhc", "chc"};

  double alpha = 0.05;
  double ratio = 200.0;  // beta* / alpha, beta uniform
  int capacity = 10;
  int window = 10;
  int paths = 100;
  double gamma = 0.05;
  double noise = 0.0;
  bool noisy_baselines = false;
  int pseudo_iterations = 300;
  DpBudget budget;

  std::string axis;  // "", "ratio", "M", "W", "R" or "K"
  std::vector<double> values;

  int jobs = 1;
  bool warmup = true;     // one discarded run before the timed one
  bool write_runs = false;  // per-run CSV/JSON under runs/
};

nlohmann::json to_json(const ExperimentSpec& spec);
// Missing keys keep their defaults.
ExperimentSpec experiment_from_json(const nlohmann::json& j);
void validate(const ExperimentSpec& spec);

// Spec with the sweep axis set to `value`.
ExperimentSpec at_point(const ExperimentSpec& spec, double value);
PolicyParams policy_params(const ExperimentSpec& spec, std::size_t services, std::uint64_t seed);
ArrivalTrace generate_workload(const ExperimentSpec& spec, std::uint64_t seed);

struct RunResult {
  double value = 0.0;  // sweep axis value
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  double total_cost = 0.0;
  double runtime_ms = 0.0;
  std::optional<double> regret;  // against opt-dp, else pseudo-opt, when run
  std::string error;
  RunRecord record;  // kept only when write_runs is set
};

struct PointSummary {
  double value = 0.0;
  std::string policy;
  std::size_t runs = 0;
  double mean_cost_per_slot = 0.0;
  double std_cost_per_slot = 0.0;
  double mean_total_cost = 0.0;
  double mean_runtime_ms = 0.0;
  double std_runtime_ms = 0.0;
  std::optional<double> mean_regret;
};

struct ExperimentReport {
  std::vector<RunResult> runs;
  std::vector<PointSummary> summary;
  std::vector<std::string> failures;

  const PointSummary* find(double value, const std::string& policy) const;
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

// summary.json, costs_<axis>.csv, runtimes.csv and, with write_runs,
// runs/<policy>_<value>_s<seed>.{csv,json}.
void write_report(const std::filesystem::path& dir, const ExperimentSpec& spec,
                  const ExperimentReport& report);

}  // namespace roscsim
