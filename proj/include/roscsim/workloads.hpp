#pragma once

// Synthetic request traces and the prediction oracles that feed policies.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

#include "roscsim/model.hpp"

namespace roscsim {

// Popularity-rank model: a fixed Zipf profile over ranks whose occupants are
// replaced at random. Services outside the ranked set receive no requests.
struct ReplacementParams {
  enum class Volume { kDeterministic, kThinned };

  std::size_t services = 1000;
  std::size_t horizon = 10000;
  double cap = 200.0;  // U: requests per slot
  double zipf_exponent = 0.8;
  std::size_t ranked = 0;  // 0 selects services / 2
  // Per-slot expiry probability of a rank is 1 / mean_lifetime; infinity
  // disables replacement.
  double mean_lifetime = 100.0;
  Volume volume = Volume::kDeterministic;
  double keep_probability = 0.9;  // per-request survival in thinned mode

  std::size_t ranked_count() const;
};

struct PoissonGroup {
  double lifetime = 1.0;    // slots a born service stays active
  double birth_rate = 0.0;  // expected births per slot
};

// Services are born by per-group Poisson processes, live for the group
// lifetime, and draw Poisson request volumes while active.
struct PoissonParams {
  std::size_t services = 1000;
  std::size_t horizon = 10000;
  std::vector<PoissonGroup> groups = default_groups();
  double per_service_volume = 5.0;

  static std::vector<PoissonGroup> default_groups();
};

struct PoissonStats {
  std::size_t births = 0;
  std::size_t dropped_births = 0;  // no free service id was available
  std::size_t recycled_ids = 0;
};

// r^-s / sum_j j^-s for r = 1..ranks.
Vec zipf_shares(std::size_t ranks, double exponent);

// Largest-remainder split of `total` units in proportion to `shares`; ties go
// to the lower index.
std::vector<long> apportion(long total, std::span<const double> shares);

ArrivalTrace gen_replacement(const ReplacementParams& params, std::uint64_t seed);
ArrivalTrace gen_poisson(const PoissonParams& params, std::uint64_t seed,
                         PoissonStats* stats = nullptr);

nlohmann::json to_json(const ReplacementParams& params);
nlohmann::json to_json(const PoissonParams& params);
// Missing keys keep their defaults.
ReplacementParams replacement_params_from_json(const nlohmann::json& j);
PoissonParams poisson_params_from_json(const nlohmann::json& j);

// Arrivals as seen by a policy at `current` slot for a `target` slot.
class PredictionOracle {
 public:
  virtual ~PredictionOracle() = default;

  const ArrivalTrace& truth() const { return *truth_; }

  virtual double predict(std::size_t service, long target, long current) const = 0;
  // Fills one full row; targets outside [1, T] read as zero.
  virtual void predict_row(long target, long current, std::span<double> out) const;

 protected:
  explicit PredictionOracle(const ArrivalTrace& truth) : truth_(&truth) {}

 private:
  const ArrivalTrace* truth_;
};

class ExactPredictions final : public PredictionOracle {
 public:
  explicit ExactPredictions(const ArrivalTrace& truth) : PredictionOracle(truth) {}
  double predict(std::size_t service, long target, long current) const override;
  void predict_row(long target, long current, std::span<double> out) const override;
};

// Multiplicative random-walk error: the prediction made at `current` for
// `target` is max(0, lambda (1 + R sum_{s=current}^{target} e_n(s))), with
// standard normal e_n(s) fixed per oracle. Targets at or before `current - 1`
// are already observed and returned exactly.
class NoisyPredictions final : public PredictionOracle {
 public:
  // `lead` is how far before slot 1 queries may start (the window size).
  NoisyPredictions(const ArrivalTrace& truth, double weight, std::uint64_t seed, long lead);

  double weight() const { return weight_; }
  double predict(std::size_t service, long target, long current) const override;
  // sum_{s=from}^{to} e_n(s).
  double noise_sum(std::size_t service, long from, long to) const;

 private:
  double prefix(std::size_t service, long slot) const;

  double weight_;
  long lead_;
  // prefix_[(slot + lead) * N + n] = sum_{s <= slot} e_n(s), slots from -lead.
  std::vector<double> prefix_;
};

}  // namespace roscsim
