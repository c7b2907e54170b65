#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "roscsim/errors.hpp"
#include "roscsim/projection.hpp"

using namespace roscsim;

namespace {

void check_close(const Vec& a, const Vec& b, double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

double l2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Full-sum variant of the simplex threshold: compares every a_i against
// (sum of all a - c) / N instead of the running prefix.
double full_sum_threshold(const Vec& a, double c) {
  double total = 0.0;
  for (double v : a) total += v;
  return (total - c) / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("simplex projection examples") {
  check_close(project_simplex(Vec{0.9, 0.5}, 1.0), Vec{0.7, 0.3});
  CHECK(simplex_threshold(Vec{0.9, 0.5}, 1.0) == doctest::Approx(0.2));
  check_close(project_simplex(Vec{1, 0, 0}, 1.0), Vec{1, 0, 0});
  check_close(project_simplex(Vec{2, 2, 2}, 2.0), Vec{2.0 / 3, 2.0 / 3, 2.0 / 3});
  CHECK_THROWS_AS(project_simplex(Vec{}, 1.0), DimensionError);
  CHECK_THROWS_AS(project_simplex(Vec{1.0}, 0.0), ArgumentError);
}

TEST_CASE("simplex threshold uses running prefix sums") {
  // With a dominant leading entry the full-sum threshold drives small
  // entries negative; the prefix form stops at the first failing index.
  const Vec a{5.0, 0.1, 0.05};
  const double tau = simplex_threshold(a, 1.0);
  CHECK(tau == doctest::Approx(4.0));
  CHECK(full_sum_threshold(a, 1.0) != doctest::Approx(tau));
  const Vec y = project_simplex(a, 1.0);
  check_close(y, Vec{1.0, 0.0, 0.0});
}

TEST_CASE("bounded simplex examples") {
  check_close(project_bounded_simplex(Vec{1.5, 0.6, 0.1}, 2), Vec{1, 0.6, 0.1});
  check_close(project_bounded_simplex(Vec{1.2, 1.1, 0.9, 0.1}, 2), Vec{0.8, 0.7, 0.5, 0});
  check_close(project_bounded_simplex(Vec{2, 2, 2}, 2), Vec{2.0 / 3, 2.0 / 3, 2.0 / 3});
  check_close(project_bounded_simplex_oracle(Vec{1.2, 1.1, 0.9, 0.1}, 2), Vec{0.8, 0.7, 0.5, 0});
  check_close(project_bounded_simplex_oracle(Vec{-1, -0.2, 0}, 2), Vec{0, 0, 0});
  check_close(project_bounded_simplex(Vec{-1, -0.2, 0}, 2), Vec{0, 0, 0});
  CHECK_THROWS_AS(project_bounded_simplex(Vec{1, 2}, 3), ArgumentError);
  CHECK_THROWS_AS(project_bounded_simplex(Vec{}, 1), DimensionError);
}

TEST_CASE("clamp fast path and saturated head") {
  BoundedSimplexProjector proj(2);
  (void)proj(Vec{0.3, 0.4, 0.2});
  CHECK(proj.last_used_clamp());
  CHECK(proj.last_search_iterations() == 0);
  const Vec y = proj(Vec{3.0, 2.5, 0.4, 0.3});
  CHECK_FALSE(proj.last_used_clamp());
  check_close(y, Vec{1, 1, 0, 0});
  // M = N: the box alone decides.
  check_close(project_bounded_simplex(Vec{1.4, -0.3, 0.5}, 3), Vec{1, 0, 0.5});
}

TEST_CASE("search iterations are bounded by ceil(log2 M) + 1") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.8, 1.0);
  for (int m : {1, 2, 3, 5, 8, 13, 50}) {
    BoundedSimplexProjector proj(m);
    for (int rep = 0; rep < 50; ++rep) {
      Vec z(100);
      for (auto& v : z) v = g(rng);
      (void)proj(z);
      CHECK(proj.last_search_iterations() <= static_cast<int>(std::ceil(std::log2(m))) + 1);
    }
  }
}

TEST_CASE("projection agrees with both oracles on random inputs") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 3000; ++rep) {
    const std::size_t n = 2 + rng() % 11;
    const int m = 1 + static_cast<int>(rng() % n);
    const double scale = 0.1 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    std::normal_distribution<double> g(0.5, scale);
    Vec z(n);
    for (auto& v : z) v = g(rng);
    const Vec p = project_bounded_simplex(z, m);
    CHECK(oracle::max_abs_diff(p, project_bounded_simplex_oracle(z, m)) <= 1e-9);
    CHECK(oracle::max_abs_diff(p, oracle::bisection_projection(z, m)) <= 1e-9);
    CHECK(in_bounded_simplex(p, m));
  }
}

TEST_CASE("projection on ties and grid-valued inputs") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rng() % 10;
    const int m = 1 + static_cast<int>(rng() % n);
    Vec z(n);
    for (auto& v : z) v = static_cast<double>(static_cast<int>(rng() % 9) - 2) / 4.0;
    const Vec p = project_bounded_simplex(z, m);
    CHECK(oracle::max_abs_diff(p, project_bounded_simplex_oracle(z, m)) <= 1e-9);
    CHECK(oracle::max_abs_diff(p, oracle::bisection_projection(z, m)) <= 1e-9);
  }
}

TEST_CASE("non-expansive, idempotent, order preserving") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rng() % 30;
    const int m = 1 + static_cast<int>(rng() % n);
    std::normal_distribution<double> g(0.4, 1.5);
    Vec z1(n), z2(n);
    for (auto& v : z1) v = g(rng);
    for (auto& v : z2) v = g(rng);
    const Vec p1 = project_bounded_simplex(z1, m);
    const Vec p2 = project_bounded_simplex(z2, m);
    CHECK(l2(p1, p2) <= l2(z1, z2) + 1e-12);
    CHECK(oracle::max_abs_diff(project_bounded_simplex(p1, m), p1) <= 1e-12);
    Vec sorted = z1;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const Vec ps = project_bounded_simplex(sorted, m);
    CHECK(std::is_sorted(ps.begin(), ps.end(), std::greater<>()));
  }
}

TEST_CASE("oracle rejects large inputs") {
  CHECK_THROWS_AS(project_bounded_simplex_oracle(Vec(21, 0.5), 3), ArgumentError);
}
