#include "roscsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "roscsim/errors.hpp"

namespace roscsim {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ArrivalTrace::ArrivalTrace(std::size_t horizon, std::size_t services)
    : ArrivalTrace(horizon, services, std::vector<double>(horizon * services, 0.0)) {}

ArrivalTrace::ArrivalTrace(std::size_t horizon, std::size_t services, std::vector<double> values)
    : horizon_(horizon), services_(services), values_(std::move(values)), zero_row_(services, 0.0) {
  if (horizon == 0 || services == 0) {
    throw ArgumentError("ArrivalTrace: horizon and service count must be positive");
  }
  require_same_length(values_.size(), horizon * services, "ArrivalTrace");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ArgumentError("ArrivalTrace: arrivals must be finite and nonnegative");
    }
  }
}

ArrivalTrace ArrivalTrace::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) throw ArgumentError("ArrivalTrace: no rows");
  const std::size_t n = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * n);
  for (const auto& r : rows) {
    require_same_length(r.size(), n, "ArrivalTrace::from_rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return ArrivalTrace(rows.size(), n, std::move(values));
}

std::span<const double> ArrivalTrace::slot(long t) const {
  if (!in_range(t)) return zero_row_;
  return {values_.data() + (static_cast<std::size_t>(t) - 1) * services_, services_};
}

std::span<double> ArrivalTrace::mutable_slot(long t) {
  if (!in_range(t)) throw ArgumentError("ArrivalTrace: slot out of range");
  return {values_.data() + (static_cast<std::size_t>(t) - 1) * services_, services_};
}

double ArrivalTrace::at(std::size_t n, long t) const {
  if (n >= services_) throw DimensionError("ArrivalTrace: service index out of range");
  return slot(t)[n];
}

void ArrivalTrace::set(std::size_t n, long t, double value) {
  if (n >= services_) throw DimensionError("ArrivalTrace: service index out of range");
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ArgumentError("ArrivalTrace: arrivals must be finite and nonnegative");
  }
  if (cap_ && in_range(t)) {
    const double total = slot_total(t) - slot(t)[n] + value;
    if (total > *cap_) throw ArgumentError("ArrivalTrace: slot total exceeds declared cap U");
  }
  mutable_slot(t)[n] = value;
}

double ArrivalTrace::slot_total(long t) const {
  auto row = slot(t);
  return std::accumulate(row.begin(), row.end(), 0.0);
}

double ArrivalTrace::max_slot_total() const {
  double best = 0.0;
  for (std::size_t t = 1; t <= horizon_; ++t) best = std::max(best, slot_total(static_cast<long>(t)));
  return best;
}

double ArrivalTrace::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

Vec ArrivalTrace::service_totals() const {
  Vec totals(services_, 0.0);
  for (std::size_t t = 1; t <= horizon_; ++t) {
    auto row = slot(static_cast<long>(t));
    for (std::size_t n = 0; n < services_; ++n) totals[n] += row[n];
  }
  return totals;
}

void ArrivalTrace::set_cap(double u) {
  if (!(u >= 0.0)) throw ArgumentError("ArrivalTrace: cap U must be nonnegative");
  if (max_slot_total() > u) throw ArgumentError("ArrivalTrace: a slot total exceeds cap U");
  cap_ = u;
}

CostModel::CostModel(double alpha, Vec beta, int capacity, double gamma, std::optional<double> eta)
    : alpha_(alpha), beta_(std::move(beta)), beta_star_(0.0), capacity_(capacity), gamma_(gamma),
      eta_(eta) {
  if (!(alpha > 0.0)) throw ArgumentError("CostModel: alpha must be positive");
  if (beta_.empty()) throw ArgumentError("CostModel: beta must be non-empty");
  for (double b : beta_) {
    if (!(b >= 0.0)) throw ArgumentError("CostModel: beta entries must be nonnegative");
  }
  beta_star_ = *std::max_element(beta_.begin(), beta_.end());
  if (capacity < 1 || static_cast<std::size_t>(capacity) > beta_.size()) {
    throw ArgumentError("CostModel: capacity M must satisfy 1 <= M <= N");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("CostModel: gamma must lie in (0,1)");
  if (eta_ && !(*eta_ >= 0.0)) throw ArgumentError("CostModel: eta must be nonnegative");
}

CostModel CostModel::uniform(std::size_t services, double alpha, double beta, int capacity,
                             double gamma, std::optional<double> eta) {
  return CostModel(alpha, Vec(services, beta), capacity, gamma, eta);
}

double CostModel::eta() const {
  if (eta_) return *eta_;
  // beta* = 0 means no switching penalty; the smoothness bound is vacuous.
  if (beta_star_ == 0.0) return gamma_;
  return gamma_ / (12.0 * beta_star_);
}

CostModel CostModel::with_gamma(double gamma) const {
  return CostModel(alpha_, beta_, capacity_, gamma, eta_);
}

CostModel CostModel::with_eta(double eta) const {
  return CostModel(alpha_, beta_, capacity_, gamma_, eta);
}

double forwarding_cost(std::span<const double> lambda, std::span<const double> x, double alpha) {
  require_same_length(lambda.size(), x.size(), "forwarding_cost");
  double sum = 0.0;
  for (std::size_t n = 0; n < lambda.size(); ++n) sum += lambda[n] * (1.0 - x[n]);
  return alpha * sum;
}

double switching_cost(std::span<const double> x_prev, std::span<const double> x_cur,
                      std::span<const double> beta) {
  require_same_length(x_prev.size(), x_cur.size(), "switching_cost");
  require_same_length(x_cur.size(), beta.size(), "switching_cost");
  double sum = 0.0;
  for (std::size_t n = 0; n < x_cur.size(); ++n) {
    const double inc = x_cur[n] - x_prev[n];
    if (inc > 0.0) sum += beta[n] * inc;
  }
  return sum;
}

double slot_cost(std::span<const double> lambda, std::span<const double> x_prev,
                 std::span<const double> x_cur, const CostModel& cost) {
  return forwarding_cost(lambda, x_cur, cost.alpha()) + switching_cost(x_prev, x_cur, cost.beta());
}

double total_cost(const ArrivalTrace& trace, const std::vector<Vec>& decisions,
                  const CostModel& cost) {
  require_same_length(decisions.size(), trace.horizon(), "total_cost");
  require_same_length(trace.services(), cost.services(), "total_cost");
  const Vec zero(trace.services(), 0.0);
  double sum = 0.0;
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    const Vec& prev = t == 1 ? zero : decisions[t - 2];
    sum += slot_cost(trace.slot(static_cast<long>(t)), prev, decisions[t - 1], cost);
  }
  return sum;
}

Vec top_m_indicator(std::span<const double> lambda, int capacity) {
  const std::size_t n = lambda.size();
  if (capacity < 0 || static_cast<std::size_t>(capacity) > n) {
    throw ArgumentError("top_m_indicator: capacity must satisfy 0 <= M <= N");
  }
  std::vector<std::size_t> idx;
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (lambda[i] > 0.0) idx.push_back(i);
  }
  const std::size_t keep = std::min<std::size_t>(capacity, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return lambda[a] > lambda[b] || (lambda[a] == lambda[b] && a < b);
                    });
  Vec theta(n, 0.0);
  for (std::size_t i = 0; i < keep; ++i) theta[idx[i]] = 1.0;
  return theta;
}

double path_length(const ArrivalTrace& trace, int capacity) {
  Vec prev(trace.services(), 0.0);
  double h = 0.0;
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    Vec cur = top_m_indicator(trace.slot(static_cast<long>(t)), capacity);
    for (std::size_t n = 0; n < cur.size(); ++n) h += std::abs(cur[n] - prev[n]);
    prev = std::move(cur);
  }
  return h;
}

bool in_bounded_simplex(std::span<const double> p, int capacity, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    sum += v;
  }
  return sum <= capacity + tol;
}

bool is_cache_vector(std::span<const double> x, int capacity) {
  int ones = 0;
  for (double v : x) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      return false;
    }
  }
  return ones <= capacity;
}

}  // namespace roscsim
