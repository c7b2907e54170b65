#include "roscsim/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "roscsim/baselines.hpp"
#include "roscsim/bench.hpp"
#include "roscsim/gradient_pgd.hpp"
#include "roscsim/projection.hpp"
#include "roscsim/rng.hpp"
#include "roscsim/rosc.hpp"
#include "roscsim/sampler.hpp"
#include "roscsim/workloads.hpp"

namespace roscsim {

namespace {

using Clock = std::chrono::steady_clock;

long uniform_int(RngStream& rng, long lo, long hi) {
  return lo + static_cast<long>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));
}

double uniform_real(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm2_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void fail(CheckResult& r, const std::string& what) {
  if (r.failures++ == 0) r.first_failure = what;
}

void finish(CheckResult& r, Clock::time_point start) {
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

nlohmann::json to_json(const CheckResult& result) {
  nlohmann::json j{{"name", result.name},
                   {"cases", result.cases},
                   {"failures", result.failures},
                   {"max_error", result.max_error},
                   {"seconds", result.seconds},
                   {"passed", result.passed()}};
  if (!result.first_failure.empty()) j["first_failure"] = result.first_failure;
  return j;
}

CheckResult check_projection(std::size_t cases, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult r;
  r.name = "projection";
  RngStream rng(seed, "validate/projection");
  for (std::size_t c = 0; c < cases; ++c) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 12));
    const int m = static_cast<int>(uniform_int(rng, 1, static_cast<long>(n)));
    const double scale = uniform_real(rng, 0.1, 3.0);
    const double shift = uniform_real(rng, -1.0, 1.5);
    Vec z(n), y(n);
    for (auto& v : z) v = shift + scale * rng.normal();
    for (auto& v : y) v = shift + scale * rng.normal();
    ++r.cases;
    const Vec p = project_bounded_simplex(z, m);
    const Vec oracle = project_bounded_simplex_oracle(z, m);
    const double err = max_abs_diff(p, oracle);
    r.max_error = std::max(r.max_error, err);
    std::ostringstream where;
    where << "case " << c << " N=" << n << " M=" << m;
    if (err > 1e-9) fail(r, where.str() + ": oracle mismatch " + std::to_string(err));
    if (!in_bounded_simplex(p, m)) fail(r, where.str() + ": result outside the bounded simplex");
    const Vec q = project_bounded_simplex(y, m);
    if (norm2_diff(p, q) > norm2_diff(z, y) + 1e-12) fail(r, where.str() + ": projection expanded a distance");
    const Vec pp = project_bounded_simplex(p, m);
    if (max_abs_diff(pp, p) > 1e-12) fail(r, where.str() + ": projection not idempotent");
  }
  finish(r, start);
  return r;
}

CheckResult check_window_equivalence(std::size_t instances, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult r;
  r.name = "lemma1";
  RngStream rng(seed, "validate/window-equivalence");
  for (std::size_t c = 0; c < instances; ++c) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 20));
    const auto horizon = static_cast<std::size_t>(uniform_int(rng, 1, 50));
    const int w = static_cast<int>(uniform_int(rng, 1, 8));
    const int m = static_cast<int>(uniform_int(rng, 1, static_cast<long>(n)));
    ArrivalTrace trace(horizon, n);
    const double density = uniform_real(rng, 0.2, 1.0);
    for (long t = 1; t <= static_cast<long>(horizon); ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform01() < density) trace.set(i, t, static_cast<double>(uniform_int(rng, 0, 40)));
      }
    }
    Vec beta(n);
    for (auto& b : beta) b = uniform_real(rng, 0.0, 8.0);
    const CostModel cost(uniform_real(rng, 0.05, 2.0), beta, m, uniform_real(rng, 0.01, 0.9));
    RoscConfig config{cost, w, static_cast<int>(uniform_int(rng, 1, 20)), rng.engine()(), std::nullopt, true};
    const auto online = run_rosc(trace, config);
    const auto offline = offline_pgd(trace, cost, w);
    ++r.cases;
    double err = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) err = std::max(err, max_abs_diff(online.fractional[t], offline[t]));
    r.max_error = std::max(r.max_error, err);
    if (err > 1e-9) {
      std::ostringstream where;
      where << "instance " << c << " N=" << n << " T=" << horizon << " W=" << w << ": max diff " << err;
      fail(r, where.str());
    }
  }
  finish(r, start);
  return r;
}

CheckResult check_sampler(std::size_t updates, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult r;
  r.name = "sampler";
  RngStream rng(seed, "validate/sampler");
  std::size_t done = 0;
  while (done < updates) {
    const int k = static_cast<int>(uniform_int(rng, 1, 40));
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 15));
    const int m = static_cast<int>(uniform_int(rng, 1, static_cast<long>(n)));
    RngStream path_rng = rng.child("paths/" + std::to_string(done));
    SamplePathEnsemble ensemble(k, n, m, path_rng);
    const auto steps = std::min<std::size_t>(updates - done, static_cast<std::size_t>(uniform_int(rng, 1, 30)));
    for (std::size_t s = 0; s < steps; ++s, ++done) {
      std::vector<int> counts(n);
      for (auto& cnt : counts) cnt = static_cast<int>(uniform_int(rng, 0, k));
      long excess = std::accumulate(counts.begin(), counts.end(), 0L) - static_cast<long>(k) * m;
      while (excess > 0) {
        const auto i = rng.uniform_index(n);
        if (counts[i] > 0) {
          --counts[i];
          --excess;
        }
      }
      ++r.cases;
      std::ostringstream where;
      where << "update " << done << " K=" << k << " N=" << n << " M=" << m;
      try {
        (void)ensemble.update(counts, path_rng);
      } catch (const std::exception& e) {
        fail(r, where.str() + ": " + e.what());
        continue;
      }
      if (ensemble.column_counts() != counts) fail(r, where.str() + ": column counts differ from the target");
      for (int p = 0; p < k; ++p) {
        if (ensemble.load(p) > m) fail(r, where.str() + ": a path exceeds the capacity");
      }
    }
  }
  finish(r, start);
  return r;
}

TinyInstance tiny_instance(std::uint64_t seed, std::size_t max_services, int max_capacity,
                           std::size_t max_horizon) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    RngStream rng(seed + attempt * 0x9e3779b97f4a7c15ULL, "validate/tiny-instance");
    ReplacementParams params;
    params.services = static_cast<std::size_t>(uniform_int(rng, 3, static_cast<long>(max_services)));
    params.horizon = static_cast<std::size_t>(uniform_int(rng, 10, static_cast<long>(max_horizon)));
    params.cap = static_cast<double>(uniform_int(rng, 5, 30));
    params.zipf_exponent = uniform_real(rng, 0.5, 1.5);
    params.ranked = params.services - 1;
    params.mean_lifetime = uniform_real(rng, 3.0, 20.0);
    const int m = static_cast<int>(
        uniform_int(rng, 1, std::min<long>(max_capacity, static_cast<long>(params.services) - 1)));
    ArrivalTrace trace = gen_replacement(params, rng.engine()());
    Vec beta(params.services);
    for (auto& b : beta) b = uniform_real(rng, 0.5, 6.0);
    const double h = path_length(trace, m);
    if (h > 0.0 && h < static_cast<double>(params.horizon)) {
      return {std::move(trace), CostModel(uniform_real(rng, 0.2, 1.0), beta, m), h};
    }
  }
}

CheckResult check_regret_ceiling(std::size_t instances, int seeds_per_instance, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult r;
  r.name = "theorem1";
  constexpr int kWindow = 3;
  constexpr int kPaths = 10;
  for (std::size_t c = 0; c < instances; ++c) {
    const auto inst = tiny_instance(derive_seed(seed, "instance/" + std::to_string(c)));
    const auto horizon = static_cast<double>(inst.trace.horizon());
    const double opt = exact_opt_dp(inst.trace, inst.cost).total_cost;
    const auto gamma = GammaPolicy::theorem(inst.path_length, horizon);
    double mean = 0.0;
    for (int s = 0; s < seeds_per_instance; ++s) {
      RoscConfig config{inst.cost, kWindow, kPaths, static_cast<std::uint64_t>(s + 1), gamma, false};
      mean += run_rosc(inst.trace, config).total_cost;
    }
    mean /= seeds_per_instance;
    const double reg = regret(mean, opt);
    const double bound = regret_bound(inst.cost, inst.trace.services(), horizon, inst.trace.max_slot_total(),
                                      kPaths, kWindow, inst.path_length);
    ++r.cases;
    r.max_error = std::max(r.max_error, reg / bound);
    if (reg > bound) {
      std::ostringstream where;
      where << "instance " << c << ": regret " << reg << " above bound " << bound;
      fail(r, where.str());
    }
  }
  finish(r, start);
  return r;
}

}  // namespace roscsim
