#pragma once

// Reference computations for the tests, written independently of the
// library's algorithms: dual bisection for the projection, brute-force
// trajectory enumeration for the offline optimum, and a naive full-horizon
// gradient descent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// argmin ||p - z|| over {0 <= p <= 1, sum p <= M}: p = clip(z - mu, 0, 1) with
// the smallest mu >= 0 that meets the budget, found by bisection.
inline Vec bisection_projection(const Vec& z, int capacity) {
  auto clipped_sum = [&](double mu) {
    double s = 0.0;
    for (double v : z) s += std::clamp(v - mu, 0.0, 1.0);
    return s;
  };
  double lo = 0.0;
  if (clipped_sum(0.0) > capacity) {
    double hi = *std::max_element(z.begin(), z.end());
    for (int i = 0; i < 300; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (clipped_sum(mid) > capacity) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    lo = hi;
  }
  Vec p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::clamp(z[i] - lo, 0.0, 1.0);
  return p;
}

// Top-M by value, ties to the lower index, zero demand never selected.
inline Vec top_m(const Vec& lambda, int capacity) {
  std::vector<std::size_t> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
  Vec theta(lambda.size(), 0.0);
  for (int k = 0; k < capacity && static_cast<std::size_t>(k) < idx.size(); ++k) {
    if (lambda[idx[k]] > 0.0) theta[idx[k]] = 1.0;
  }
  return theta;
}

// Smoothed switching penalty for an increment d and its derivative.
inline double smooth_switch(double d, double beta, double gamma) {
  if (d <= 0.0) return 0.0;
  if (d <= gamma) return 3.0 * beta * d * d / gamma;
  return 3.0 * beta * d;
}
inline double smooth_switch_slope(double d, double beta, double gamma) {
  if (d < 0.0) return 0.0;
  if (d <= gamma) return 6.0 * beta * d / gamma;
  return 3.0 * beta;
}

// rows[t][n] for t = 0..T-1 (slot t+1).
struct Instance {
  std::vector<Vec> rows;
  double alpha;
  Vec beta;
  int capacity;
  double gamma;
  double eta;
};

inline std::vector<Vec> naive_offline_pgd(const Instance& in, int iterations) {
  const std::size_t horizon = in.rows.size();
  const std::size_t n = in.beta.size();
  std::vector<Vec> p(horizon, Vec(n, 0.0));
  for (std::size_t t = 1; t < horizon; ++t) p[t] = top_m(in.rows[t - 1], in.capacity);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Vec> next(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      Vec z(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double prev = t == 0 ? 0.0 : p[t - 1][i];
        double grad = smooth_switch_slope(p[t][i] - prev, in.beta[i], in.gamma) - in.alpha * in.rows[t][i];
        if (t + 1 < horizon) grad -= smooth_switch_slope(p[t + 1][i] - p[t][i], in.beta[i], in.gamma);
        z[i] = p[t][i] - in.eta * grad;
      }
      next[t] = bisection_projection(z, in.capacity);
    }
    p = std::move(next);
  }
  return p;
}

// True cost of a decision sequence with X_0 = 0.
inline double true_cost(const std::vector<Vec>& rows, const std::vector<Vec>& x, double alpha, const Vec& beta) {
  double total = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < beta.size(); ++i) {
      const double prev = t == 0 ? 0.0 : x[t - 1][i];
      total += alpha * rows[t][i] * (1.0 - x[t][i]) + beta[i] * std::max(x[t][i] - prev, 0.0);
    }
  }
  return total;
}

// Minimum true cost over every binary trajectory; exponential, tiny inputs only.
inline double brute_force_opt(const std::vector<Vec>& rows, double alpha, const Vec& beta, int capacity) {
  const std::size_t n = beta.size();
  std::vector<Vec> sets;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) > capacity) continue;
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
    sets.push_back(x);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec> traj(rows.size());
  std::function<void(std::size_t)> rec = [&](std::size_t t) {
    if (t == rows.size()) {
      best = std::min(best, true_cost(rows, traj, alpha, beta));
      return;
    }
    for (const auto& s : sets) {
      traj[t] = s;
      rec(t + 1);
    }
  };
  rec(0);
  return best;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
