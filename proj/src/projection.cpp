#include "roscsim/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "roscsim/errors.hpp"

namespace roscsim {

namespace {

// Entries at or above this count as saturated during the binary search.
constexpr double kOneThreshold = 1.0 - 1e-12;

int ceil_log2(int m) {
  int bits = 0;
  while ((1 << bits) < m) ++bits;
  return bits;
}

// Threshold on a sorted tail with budget c >= 0. A zero budget projects every
// entry to zero, which is what the search expects for a head of length M.
double tail_threshold(std::span<const double> a, double c) {
  if (c <= 0.0) return std::numeric_limits<double>::infinity();
  return simplex_threshold(a, c);
}

}  // namespace

double simplex_threshold(std::span<const double> sorted_desc, double c) {
  if (sorted_desc.empty()) throw DimensionError("project_simplex: empty vector");
  if (!(c > 0.0)) throw ArgumentError("project_simplex: budget c must be positive");
  // The admissible indices form a prefix, so stop at the first failure.
  double prefix = 0.0;
  double tau = sorted_desc[0] - c;
  for (std::size_t i = 0; i < sorted_desc.size(); ++i) {
    prefix += sorted_desc[i];
    const double candidate = (prefix - c) / static_cast<double>(i + 1);
    if (candidate < sorted_desc[i]) {
      tau = candidate;
    } else {
      break;
    }
  }
  return tau;
}

Vec project_simplex(std::span<const double> sorted_desc, double c) {
  const double tau = simplex_threshold(sorted_desc, c);
  Vec y(sorted_desc.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::max(sorted_desc[i] - tau, 0.0);
  return y;
}

BoundedSimplexProjector::BoundedSimplexProjector(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ArgumentError("projection: capacity M must be positive");
}

bool BoundedSimplexProjector::tail_hits_one(std::size_t head) const {
  if (head >= sorted_.size()) return false;
  std::span<const double> tail(sorted_.data() + head, sorted_.size() - head);
  const double tau = tail_threshold(tail, capacity_ - static_cast<double>(head));
  // The tail projection is sorted, so its first entry is the largest.
  return std::max(tail[0] - tau, 0.0) >= kOneThreshold;
}

void BoundedSimplexProjector::write_solution(std::size_t head, Vec& out) const {
  const std::size_t n = sorted_.size();
  double tau = std::numeric_limits<double>::infinity();
  if (head < n) {
    tau = tail_threshold({sorted_.data() + head, n - head}, capacity_ - static_cast<double>(head));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double v = i < head ? 1.0 : std::max(sorted_[i] - tau, 0.0);
    out[order_[i].second] = v;
  }
}

void BoundedSimplexProjector::project(std::span<const double> z, Vec& out) {
  const std::size_t n = z.size();
  if (n == 0) throw DimensionError("projection: empty vector");
  if (static_cast<std::size_t>(capacity_) > n) {
    throw ArgumentError("projection: capacity M exceeds dimension");
  }
  out.resize(n);
  last_iterations_ = 0;

  double clamp_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::clamp(z[i], 0.0, 1.0);
    clamp_sum += out[i];
  }
  last_clamp_ = clamp_sum <= static_cast<double>(capacity_);
  if (last_clamp_) return;

  // Descending by value, ascending index among equal values.
  order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) order_[i] = {-std::max(z[i], 0.0), i};
  std::sort(order_.begin(), order_.end());
  sorted_.resize(n);
  for (std::size_t i = 0; i < n; ++i) sorted_[i] = -order_[i].first;

  // Search for the number of saturated coordinates i* in [0, M]. The tail at
  // head M has budget 0 and never saturates, so r = M is a valid upper end.
  std::size_t lo = 0;
  std::size_t hi = static_cast<std::size_t>(capacity_);
  const int max_iterations = ceil_log2(capacity_) + 1;
  for (int it = 0; it < max_iterations; ++it) {
    ++last_iterations_;
    const std::size_t mid = (lo + hi) / 2;
    const bool hits = tail_hits_one(mid);
    if (mid == lo) {
      write_solution(hits ? hi : lo, out);
      return;
    }
    if (hits) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw InternalError("projection: binary search did not terminate within " +
                      std::to_string(max_iterations) + " iterations");
}

Vec BoundedSimplexProjector::operator()(std::span<const double> z) {
  Vec out;
  project(z, out);
  return out;
}

Vec project_bounded_simplex(std::span<const double> z, int capacity) {
  BoundedSimplexProjector projector(capacity);
  return projector(z);
}

Vec project_bounded_simplex_oracle(std::span<const double> z, int capacity) {
  const std::size_t n = z.size();
  if (n == 0) throw DimensionError("projection oracle: empty vector");
  if (n > 20) throw ArgumentError("projection oracle: limited to N <= 20");
  if (capacity < 1 || static_cast<std::size_t>(capacity) > n) {
    throw ArgumentError("projection oracle: capacity must satisfy 1 <= M <= N");
  }
  const double m = capacity;
  double scale = 1.0;
  for (double v : z) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;

  // Inactive budget: rho = 0, y is the box clamp.
  Vec clamp(n);
  double clamp_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    clamp[i] = std::clamp(z[i], 0.0, 1.0);
    clamp_sum += clamp[i];
  }
  if (clamp_sum <= m) return clamp;

  // Active budget: sum y = M with rho >= 0. Partitions consistent with the
  // sorted order are (first a saturated, next b interior, rest zero).
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  Vec s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = z[idx[i]];

  std::vector<Vec> solutions;
  for (std::size_t a = 0; a <= n && a <= static_cast<std::size_t>(capacity); ++a) {
    for (std::size_t b = 0; a + b <= n; ++b) {
      double rho = 0.0;
      bool ok = true;
      if (b == 0) {
        if (a != static_cast<std::size_t>(capacity)) continue;
        // rho is free in [max(z_I3, 0), min(z_I1) - 1].
        const double upper = a > 0 ? s[a - 1] - 1.0 : std::numeric_limits<double>::infinity();
        const double lower = a < n ? std::max(s[a], 0.0) : 0.0;
        if (lower > upper + tol) continue;
        rho = lower;
      } else {
        double interior = 0.0;
        for (std::size_t i = a; i < a + b; ++i) interior += s[i];
        rho = (interior - (m - static_cast<double>(a))) / static_cast<double>(b);
        if (rho < -tol) continue;
        for (std::size_t i = 0; i < a && ok; ++i) ok = s[i] >= rho + 1.0 - tol;
        for (std::size_t i = a; i < a + b && ok; ++i) ok = s[i] >= rho - tol && s[i] <= rho + 1.0 + tol;
        for (std::size_t i = a + b; i < n && ok; ++i) ok = s[i] <= rho + tol;
        if (!ok) continue;
      }
      Vec y(n, 0.0);
      for (std::size_t i = 0; i < a; ++i) y[idx[i]] = 1.0;
      for (std::size_t i = a; i < a + b; ++i) y[idx[i]] = s[i] - rho;
      solutions.push_back(std::move(y));
    }
  }
  if (solutions.empty()) throw InternalError("projection oracle: no consistent KKT partition");
  // Degenerate boundaries admit several partitions; they must describe one point.
  for (const auto& y : solutions) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(y[i] - solutions.front()[i]) > 1e-9) {
        throw InternalError("projection oracle: KKT partitions disagree");
      }
    }
  }
  return solutions.front();
}

}  // namespace roscsim
