#include "roscsim/rosc.hpp"

#include <chrono>
#include <cmath>

#include "roscsim/errors.hpp"
#include "roscsim/gradient_pgd.hpp"
#include "roscsim/projection.hpp"
#include "roscsim/rng.hpp"
#include "roscsim/sampler.hpp"

namespace roscsim {

double GammaPolicy::resolve() const {
  if (kind == Kind::kFixed) return value;
  if (!(horizon > 0.0)) throw ArgumentError("gamma policy: theorem rule needs T > 0");
  if (!(path_length > 0.0 && path_length < horizon)) {
    throw ArgumentError("gamma policy: theorem rule needs 0 < H_T < T so that gamma lies in (0,1)");
  }
  return std::sqrt(path_length / horizon);
}

CostModel RoscConfig::effective_cost() const {
  if (!gamma) return cost;
  return cost.with_gamma(gamma->resolve());
}

nlohmann::json to_json(const RoscConfig& config) {
  nlohmann::json j{{"cost", to_json(config.effective_cost())},
                   {"W", config.window},
                   {"K", config.paths},
                   {"seed", config.seed}};
  if (config.gamma && config.gamma->kind == GammaPolicy::Kind::kTheorem) {
    j["gamma_policy"] = {{"rule", "theorem"}, {"H_T", config.gamma->path_length}, {"T", config.gamma->horizon}};
  } else {
    j["gamma_policy"] = {{"rule", "fixed"}};
  }
  return j;
}

RunRecord run_rosc(const PredictionOracle& predictions, const RoscConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const ArrivalTrace& truth = predictions.truth();
  const CostModel cost = config.effective_cost();
  const std::size_t n = truth.services();
  if (cost.services() != n) throw DimensionError("run_rosc: cost model and trace disagree on N");
  if (config.window < 0) throw ArgumentError("run_rosc: W must be nonnegative");
  if (config.paths < 1) throw ArgumentError("run_rosc: K must be positive");
  const long horizon = static_cast<long>(truth.horizon());
  const long w = config.window;
  const int m = cost.capacity();

  RunRecord record;
  record.policy = "rosc";
  record.seed = config.seed;
  record.config = to_json(config);
  record.decisions.reserve(truth.horizon());

  RngStream path_rng(config.seed, "rosc/k-star");
  RngStream rounding_rng(config.seed, "rosc/rounding");
  SamplePathEnsemble ensemble(config.paths, n, m, path_rng);
  WindowState state(n, static_cast<std::size_t>(w));
  BoundedSimplexProjector projector(m);

  // Predicted rows for the current outer step, indexed by tau - t.
  std::vector<Vec> window_rows(static_cast<std::size_t>(std::max(w, 1L)), Vec(n, 0.0));
  long rows_step = 0;
  const ArrivalLookup lookup = [&](long tau) -> std::span<const double> {
    return window_rows[static_cast<std::size_t>(tau - rows_step)];
  };
  Vec newest(n, 0.0);

  for (long t = -w + 1; t <= horizon; ++t) {
    const long target = t + w - 1;
    predictions.predict_row(target, t, newest);
    if (t + w <= horizon) state.initialize(t + w, top_m_indicator(newest, m));
    if (w > 0) {
      rows_step = t;
      for (long tau = std::max(1L, t); tau <= std::min(target, horizon); ++tau) {
        auto& row = window_rows[static_cast<std::size_t>(tau - t)];
        if (tau == target) {
          row = newest;
        } else {
          predictions.predict_row(tau, t, row);
        }
      }
      pgd_window_update(state, lookup, cost, t, horizon, projector);
    }
    if (t >= 1) {
      const auto p = state.probs(t);
      const auto counts = quantize_counts(p, config.paths);
      const auto stats = ensemble.update(counts, rounding_rng);
      record.rebalance_moves += stats.rebalance_moves;
      if (config.record_fractional) record.fractional.emplace_back(p.begin(), p.end());
      record_slot(record, truth, t, decision_at(ensemble), cost);
    }
  }
  record.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return record;
}

RunRecord run_rosc(const ArrivalTrace& trace, const RoscConfig& config) {
  return run_rosc(ExactPredictions(trace), config);
}

const std::vector<Vec>& fractional_trace(const RunRecord& record) {
  if (record.fractional.size() != record.decisions.size()) {
    throw ArgumentError("fractional_trace: the run did not record its fractional iterates");
  }
  return record.fractional;
}

}  // namespace roscsim
