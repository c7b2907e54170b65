#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "roscsim/errors.hpp"
#include "roscsim/workloads.hpp"

using namespace roscsim;

namespace {

double slot_total(const ArrivalTrace& trace, long t) {
  double s = 0.0;
  for (std::size_t i = 0; i < trace.services(); ++i) s += trace.at(i, t);
  return s;
}

}  // namespace

TEST_CASE("zipf shares and apportioning") {
  const Vec s = zipf_shares(4, 1.0);
  const double h = 1 + 0.5 + 1.0 / 3 + 0.25;
  CHECK(s[0] == doctest::Approx(1 / h));
  CHECK(s[3] == doctest::Approx(0.25 / h));
  CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0));
  CHECK(apportion(10, Vec{0.5, 0.25, 0.25}) == std::vector<long>{5, 3, 2});
  CHECK(apportion(7, Vec{1.0 / 3, 1.0 / 3, 1.0 / 3}) == std::vector<long>{3, 2, 2});
  CHECK(apportion(0, Vec{0.5, 0.5}) == std::vector<long>{0, 0});
}

TEST_CASE("a steep profile puts nearly all requests on rank one") {
  ReplacementParams p;
  p.services = 50;
  p.horizon = 30;
  p.cap = 200;
  p.zipf_exponent = 10;
  const auto trace = gen_replacement(p, 1);
  for (long t = 1; t <= 30; ++t) {
    double top = 0.0;
    for (std::size_t i = 0; i < 50; ++i) top = std::max(top, trace.at(i, t));
    CHECK(top >= 0.99 * slot_total(trace, t));
  }
}

TEST_CASE("deterministic volume fills every slot to U") {
  ReplacementParams p;
  p.services = 100;
  p.horizon = 200;
  p.cap = 150;
  p.mean_lifetime = 20;
  const auto trace = gen_replacement(p, 3);
  for (long t = 1; t <= 200; ++t) CHECK(slot_total(trace, t) == 150.0);
  CHECK(trace.max_slot_total() == 150.0);
}

TEST_CASE("thinned volume stays below U") {
  ReplacementParams p;
  p.services = 40;
  p.horizon = 100;
  p.cap = 100;
  p.volume = ReplacementParams::Volume::kThinned;
  p.keep_probability = 0.5;
  const auto trace = gen_replacement(p, 3);
  double mean = 0.0;
  for (long t = 1; t <= 100; ++t) {
    CHECK(slot_total(trace, t) <= 100.0);
    mean += slot_total(trace, t) / 100;
  }
  CHECK(mean == doctest::Approx(50).epsilon(0.05));
}

TEST_CASE("no replacement means the cached set changes once") {
  ReplacementParams p;
  p.services = 60;
  p.horizon = 80;
  p.mean_lifetime = std::numeric_limits<double>::infinity();
  const auto trace = gen_replacement(p, 8);
  CHECK(path_length(trace, 10) == 10.0);
}

TEST_CASE("default replacement churn is moderate") {
  ReplacementParams p;
  p.services = 1000;
  p.horizon = 500;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double per_slot = path_length(gen_replacement(p, seed), 10) / 500.0;
    CHECK(per_slot >= 0.05);
    CHECK(per_slot <= 0.5);
  }
}

TEST_CASE("generators are deterministic in the seed") {
  ReplacementParams p;
  p.services = 30;
  p.horizon = 50;
  CHECK(gen_replacement(p, 5).values() == gen_replacement(p, 5).values());
  CHECK(gen_replacement(p, 5).values() != gen_replacement(p, 6).values());
  PoissonParams q;
  q.services = 30;
  q.horizon = 50;
  CHECK(gen_poisson(q, 5).values() == gen_poisson(q, 5).values());
}

TEST_CASE("poisson model") {
  PoissonParams q;
  q.services = 20;
  q.horizon = 40;
  q.groups = {{5.0, 0.0}, {10.0, 0.0}};
  const auto silent = gen_poisson(q, 1);
  for (long t = 1; t <= 40; ++t) CHECK(slot_total(silent, t) == 0.0);

  // one-slot lifetimes: every active service was born in the same slot
  q.services = 500;
  q.horizon = 300;
  q.groups = {{1.0, 2.0}};
  q.per_service_volume = 4.0;
  PoissonStats stats;
  const auto trace = gen_poisson(q, 2, &stats);
  CHECK(stats.dropped_births == 0);
  CHECK(static_cast<double>(stats.births) / 300 == doctest::Approx(2.0).epsilon(0.15));
  double total = 0.0;
  for (long t = 1; t <= 300; ++t) total += slot_total(trace, t);
  CHECK(total / 300 == doctest::Approx(8.0).epsilon(0.15));
  CHECK_THROWS_AS(gen_poisson(PoissonParams{10, 10, {{0.0, 1.0}}, 1.0}, 1), ArgumentError);
}

TEST_CASE("params round trip through json") {
  ReplacementParams p;
  p.services = 77;
  p.cap = 12.5;
  p.mean_lifetime = std::numeric_limits<double>::infinity();
  const auto back = replacement_params_from_json(to_json(p));
  CHECK(back.services == 77);
  CHECK(back.cap == 12.5);
  CHECK(std::isinf(back.mean_lifetime));
  PoissonParams q;
  q.groups = {{3.0, 0.5}};
  const auto qb = poisson_params_from_json(to_json(q));
  CHECK(qb.groups.size() == 1);
  CHECK(qb.groups[0].lifetime == 3.0);
  CHECK(qb.groups[0].birth_rate == 0.5);
}

TEST_CASE("prediction noise examples") {
  const auto trace = ArrivalTrace::from_rows({{100, 0}, {100, 0}, {100, 0}});
  const NoisyPredictions zero(trace, 0.0, 1, 2);
  CHECK(zero.predict(0, 3, 1) == 100.0);
  const NoisyPredictions noisy(trace, 0.1, 1, 2);
  CHECK(noisy.predict(1, 3, 1) == 0.0);
  // observed slots come back exactly
  CHECK(noisy.predict(0, 1, 2) == 100.0);
  const double sum = noisy.noise_sum(0, 1, 3);
  CHECK(noisy.predict(0, 3, 1) == doctest::Approx(std::max(0.0, 100 * (1 + 0.1 * sum))));
  CHECK(noisy.noise_sum(0, 1, 3) == doctest::Approx(noisy.noise_sum(0, 1, 1) + noisy.noise_sum(0, 2, 3)));
  CHECK_THROWS_AS(NoisyPredictions(trace, -0.1, 1, 2), ArgumentError);
}

TEST_CASE("prediction error grows like sqrt of the lag") {
  // 1 service, lots of slots: pool the lag-W error over many (seed, slot)
  // pairs and compare its std with sqrt(W) R lambda.
  const long horizon = 2000;
  const double lambda = 100.0, r = 0.01;
  ArrivalTrace trace(horizon, 1);
  for (long t = 1; t <= horizon; ++t) trace.set(0, t, lambda);
  for (long w : {1L, 4L, 9L}) {
    double sum = 0.0, sq = 0.0;
    long n = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const NoisyPredictions noisy(trace, r, seed, w);
      for (long t = 1; t + w - 1 <= horizon; t += w) {
        const double e = noisy.predict(0, t + w - 1, t) - lambda;
        sum += e;
        sq += e * e;
        ++n;
      }
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(sd == doctest::Approx(std::sqrt(static_cast<double>(w)) * r * lambda).epsilon(0.05));
  }
}
