#include "roscsim/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>

#include "roscsim/errors.hpp"
#include "roscsim/rng.hpp"

namespace roscsim {

namespace {

double lifetime_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double parsed = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) return parsed;
    throw ArgumentError("mean_lifetime: expected a number or \"inf\"");
  }
  return v.get<double>();
}

nlohmann::json lifetime_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

std::size_t ReplacementParams::ranked_count() const {
  return ranked == 0 ? std::max<std::size_t>(1, services / 2) : ranked;
}

std::vector<PoissonGroup> PoissonParams::default_groups() {
  return {{5.0, 0.6}, {20.0, 0.3}, {60.0, 0.15}, {200.0, 0.05}, {1000.0, 0.01}};
}

Vec zipf_shares(std::size_t ranks, double exponent) {
  if (ranks == 0) throw ArgumentError("zipf_shares: no ranks");
  if (!(exponent > 0.0)) throw ArgumentError("zipf_shares: exponent must be positive");
  Vec shares(ranks);
  for (std::size_t r = 0; r < ranks; ++r) shares[r] = std::pow(static_cast<double>(r + 1), -exponent);
  const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  for (double& s : shares) s /= sum;
  return shares;
}

std::vector<long> apportion(long total, std::span<const double> shares) {
  std::vector<long> counts(shares.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(shares.size());
  long assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = shares[i] * static_cast<double>(total);
    counts[i] = static_cast<long>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) {
    ++counts[remainders[i].second];
  }
  return counts;
}

ArrivalTrace gen_replacement(const ReplacementParams& params, std::uint64_t seed) {
  const std::size_t n = params.services;
  const std::size_t ranked = params.ranked_count();
  if (n == 0 || params.horizon == 0) throw ArgumentError("replacement: N and T must be positive");
  if (ranked > n) throw ArgumentError("replacement: more ranks than services");
  if (!(params.cap >= 0.0)) throw ArgumentError("replacement: U must be nonnegative");
  if (!(params.mean_lifetime >= 1.0)) throw ArgumentError("replacement: mean lifetime must be >= 1 slot");
  if (!(params.keep_probability >= 0.0 && params.keep_probability <= 1.0)) {
    throw ArgumentError("replacement: keep probability must lie in [0,1]");
  }
  const bool deterministic = params.volume == ReplacementParams::Volume::kDeterministic;
  if (deterministic && params.cap != std::floor(params.cap)) {
    throw ArgumentError("replacement: deterministic volumes need an integer U");
  }

  RngStream placement(seed, "replacement/placement");
  RngStream churn(seed, "replacement/churn");
  RngStream volume(seed, "replacement/volume");

  const Vec shares = zipf_shares(ranked, params.zipf_exponent);
  const auto fixed = apportion(static_cast<long>(params.cap), shares);

  // occupant[r] is the service at rank r; pool holds the unranked services.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), placement.engine());
  std::vector<std::size_t> occupant(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(ranked));
  std::vector<std::size_t> pool(perm.begin() + static_cast<std::ptrdiff_t>(ranked), perm.end());

  const double expiry = std::isinf(params.mean_lifetime) ? 0.0 : 1.0 / params.mean_lifetime;
  ArrivalTrace trace(params.horizon, n);
  std::vector<long> counts(ranked);
  for (std::size_t t = 1; t <= params.horizon; ++t) {
    if (t > 1 && expiry > 0.0 && !pool.empty()) {
      for (std::size_t r = 0; r < ranked; ++r) {
        if (churn.uniform01() < expiry) {
          const std::size_t j = churn.uniform_index(pool.size());
          std::swap(occupant[r], pool[j]);
        }
      }
    }
    if (deterministic) {
      counts = fixed;
    } else {
      // Binomial thinning of U requests followed by a multinomial split.
      std::binomial_distribution<long> kept(static_cast<long>(params.cap), params.keep_probability);
      long remaining = kept(volume.engine());
      double mass = 1.0;
      for (std::size_t r = 0; r < ranked; ++r) {
        if (remaining == 0 || r + 1 == ranked) {
          counts[r] = remaining;
          remaining = 0;
          continue;
        }
        const double p = std::clamp(shares[r] / mass, 0.0, 1.0);
        std::binomial_distribution<long> draw(remaining, p);
        counts[r] = draw(volume.engine());
        remaining -= counts[r];
        mass -= shares[r];
      }
    }
    auto row = trace.mutable_slot(static_cast<long>(t));
    for (std::size_t r = 0; r < ranked; ++r) row[occupant[r]] = static_cast<double>(counts[r]);
  }
  trace.set_cap(params.cap);
  return trace;
}

ArrivalTrace gen_poisson(const PoissonParams& params, std::uint64_t seed, PoissonStats* stats) {
  const std::size_t n = params.services;
  if (n == 0 || params.horizon == 0) throw ArgumentError("poisson: N and T must be positive");
  if (!(params.per_service_volume >= 0.0)) throw ArgumentError("poisson: volume must be nonnegative");
  double longest = 1.0;
  for (const auto& g : params.groups) {
    if (!(g.lifetime >= 1.0)) throw ArgumentError("poisson: group lifetime must be >= 1 slot");
    if (!(g.birth_rate >= 0.0)) throw ArgumentError("poisson: birth rate must be nonnegative");
    longest = std::max(longest, g.lifetime);
  }

  RngStream births(seed, "poisson/births");
  RngStream popularity(seed, "poisson/popularity");
  RngStream volume(seed, "poisson/volume");
  PoissonStats local;

  // Free ids ordered by (slot they expired, id); never-used ids expired at -inf.
  constexpr long kNever = std::numeric_limits<long>::min();
  std::set<std::pair<long, std::size_t>> free_ids;
  for (std::size_t i = 0; i < n; ++i) free_ids.emplace(kNever, i);
  using Active = std::pair<long, std::size_t>;  // (last active slot, id)
  std::priority_queue<Active, std::vector<Active>, std::greater<>> active;
  std::vector<long> last_active(n, kNever);
  std::vector<double> factor(n, 0.0);
  std::vector<bool> used(n, false);

  // Start early enough that every group is in steady state at slot 1.
  const long first = 1 - static_cast<long>(std::ceil(longest));
  ArrivalTrace trace(params.horizon, n);
  std::exponential_distribution<double> popularity_draw(1.0);
  for (long t = first; t <= static_cast<long>(params.horizon); ++t) {
    while (!active.empty() && active.top().first < t) {
      const auto [end, id] = active.top();
      active.pop();
      if (last_active[id] == end) free_ids.emplace(end, id);
    }
    for (const auto& g : params.groups) {
      if (g.birth_rate <= 0.0) continue;
      std::poisson_distribution<long> count(g.birth_rate);
      const long born = count(births.engine());
      for (long b = 0; b < born; ++b) {
        ++local.births;
        if (free_ids.empty()) {
          ++local.dropped_births;
          continue;
        }
        const std::size_t id = free_ids.begin()->second;
        free_ids.erase(free_ids.begin());
        if (used[id]) ++local.recycled_ids;
        used[id] = true;
        last_active[id] = t + static_cast<long>(std::ceil(g.lifetime)) - 1;
        active.emplace(last_active[id], id);
        factor[id] = popularity_draw(popularity.engine());
      }
    }
    if (t < 1) continue;
    auto row = trace.mutable_slot(t);
    for (std::size_t id = 0; id < n; ++id) {
      if (last_active[id] < t || last_active[id] == kNever) continue;
      const double mean = params.per_service_volume * factor[id];
      if (mean <= 0.0) continue;
      std::poisson_distribution<long> draw(mean);
      row[id] = static_cast<double>(draw(volume.engine()));
    }
  }
  // Active services that were never freed still hold their ids; nothing to do.
  trace.set_cap(trace.max_slot_total());
  if (stats) *stats = local;
  return trace;
}

nlohmann::json to_json(const ReplacementParams& p) {
  return nlohmann::json{
      {"N", p.services},
      {"T", p.horizon},
      {"U", p.cap},
      {"zipf_exponent", p.zipf_exponent},
      {"ranked", p.ranked_count()},
      {"mean_lifetime", lifetime_to_json(p.mean_lifetime)},
      {"volume", p.volume == ReplacementParams::Volume::kDeterministic ? "deterministic" : "thinned"},
      {"keep_probability", p.keep_probability},
  };
}

nlohmann::json to_json(const PoissonParams& p) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : p.groups) groups.push_back({{"lifetime", g.lifetime}, {"birth_rate", g.birth_rate}});
  return nlohmann::json{{"N", p.services},
                        {"T", p.horizon},
                        {"groups", groups},
                        {"per_service_volume", p.per_service_volume}};
}

ReplacementParams replacement_params_from_json(const nlohmann::json& j) {
  ReplacementParams p;
  p.services = j.value("N", p.services);
  p.horizon = j.value("T", p.horizon);
  p.cap = j.value("U", p.cap);
  p.zipf_exponent = j.value("zipf_exponent", p.zipf_exponent);
  p.ranked = j.value("ranked", p.ranked);
  if (j.contains("mean_lifetime")) p.mean_lifetime = lifetime_from_json(j.at("mean_lifetime"));
  if (j.contains("volume")) {
    const auto v = j.at("volume").get<std::string>();
    if (v == "deterministic") {
      p.volume = ReplacementParams::Volume::kDeterministic;
    } else if (v == "thinned") {
      p.volume = ReplacementParams::Volume::kThinned;
    } else {
      throw ArgumentError("replacement: volume must be \"deterministic\" or \"thinned\"");
    }
  }
  p.keep_probability = j.value("keep_probability", p.keep_probability);
  return p;
}

PoissonParams poisson_params_from_json(const nlohmann::json& j) {
  PoissonParams p;
  p.services = j.value("N", p.services);
  p.horizon = j.value("T", p.horizon);
  p.per_service_volume = j.value("per_service_volume", p.per_service_volume);
  if (j.contains("groups")) {
    p.groups.clear();
    for (const auto& g : j.at("groups")) {
      p.groups.push_back({g.at("lifetime").get<double>(), g.at("birth_rate").get<double>()});
    }
  }
  return p;
}

void PredictionOracle::predict_row(long target, long current, std::span<double> out) const {
  if (out.size() != truth().services()) throw DimensionError("predict_row: length mismatch");
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = predict(n, target, current);
}

double ExactPredictions::predict(std::size_t service, long target, long /*current*/) const {
  return truth().at(service, target);
}

void ExactPredictions::predict_row(long target, long /*current*/, std::span<double> out) const {
  const auto row = truth().slot(target);
  if (out.size() != row.size()) throw DimensionError("predict_row: length mismatch");
  std::copy(row.begin(), row.end(), out.begin());
}

NoisyPredictions::NoisyPredictions(const ArrivalTrace& truth, double weight, std::uint64_t seed,
                                   long lead)
    : PredictionOracle(truth), weight_(weight), lead_(lead) {
  if (!(weight >= 0.0)) throw ArgumentError("NoisyPredictions: R must be nonnegative");
  if (lead < 0) throw ArgumentError("NoisyPredictions: lead must be nonnegative");
  const std::size_t n = truth.services();
  const std::size_t slots = truth.horizon() + static_cast<std::size_t>(lead) + 1;
  prefix_.assign(slots * n, 0.0);
  RngStream rng(seed, "prediction-noise");
  for (std::size_t s = 1; s < slots; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      prefix_[s * n + i] = prefix_[(s - 1) * n + i] + rng.normal();
    }
  }
}

double NoisyPredictions::prefix(std::size_t service, long slot) const {
  const long row = slot + lead_;
  if (row < 0) throw ArgumentError("NoisyPredictions: query starts before the noise lead-in");
  const std::size_t n = truth().services();
  const auto idx = static_cast<std::size_t>(row) * n + service;
  if (idx >= prefix_.size()) throw ArgumentError("NoisyPredictions: slot beyond the horizon");
  return prefix_[idx];
}

double NoisyPredictions::noise_sum(std::size_t service, long from, long to) const {
  if (from > to) return 0.0;
  return prefix(service, to) - prefix(service, from - 1);
}

double NoisyPredictions::predict(std::size_t service, long target, long current) const {
  const double lambda = truth().at(service, target);
  if (lambda == 0.0 || weight_ == 0.0 || target < current) return lambda;
  return std::max(0.0, lambda * (1.0 + weight_ * noise_sum(service, current, target)));
}

}  // namespace roscsim
