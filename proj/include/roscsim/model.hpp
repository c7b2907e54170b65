#pragma once

// Domain types and the true cost of the edge service caching problem.
//
// Slots are 1-based throughout the library: slot t = 1 is the first slot of
// a trace, and every quantity at t <= 0 (arrivals, decisions, probabilities)
// is the zero vector.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace roscsim {

using Vec = std::vector<double>;

// Request counts lambda[n][t] for T slots and N services, stored row-major
// by slot. Reads outside [1, T] return an all-zero row.
class ArrivalTrace {
 public:
  ArrivalTrace() = default;
  ArrivalTrace(std::size_t horizon, std::size_t services);
  // `values` is row-major, slot-by-slot (T rows of N entries each).
  ArrivalTrace(std::size_t horizon, std::size_t services, std::vector<double> values);
  static ArrivalTrace from_rows(const std::vector<Vec>& rows);

  std::size_t horizon() const { return horizon_; }
  std::size_t services() const { return services_; }

  std::span<const double> slot(long t) const;
  std::span<double> mutable_slot(long t);
  double at(std::size_t n, long t) const;
  void set(std::size_t n, long t, double value);

  double slot_total(long t) const;
  double max_slot_total() const;
  double total() const;
  Vec service_totals() const;

  // Declared per-slot request cap U. Setting it checks every slot total.
  std::optional<double> cap() const { return cap_; }
  void set_cap(double u);

  const std::vector<double>& values() const { return values_; }

 private:
  bool in_range(long t) const { return t >= 1 && static_cast<std::size_t>(t) <= horizon_; }

  std::size_t horizon_ = 0;
  std::size_t services_ = 0;
  std::vector<double> values_;
  std::vector<double> zero_row_;
  std::optional<double> cap_;
};

// Prices and step parameters shared by every policy.
class CostModel {
 public:
  CostModel(double alpha, Vec beta, int capacity, double gamma = 0.05,
            std::optional<double> eta = std::nullopt);
  static CostModel uniform(std::size_t services, double alpha, double beta, int capacity,
                           double gamma = 0.05, std::optional<double> eta = std::nullopt);

  double alpha() const { return alpha_; }
  const Vec& beta() const { return beta_; }
  double beta_star() const { return beta_star_; }
  int capacity() const { return capacity_; }
  double gamma() const { return gamma_; }
  // gamma / (12 beta*) unless an explicit step was given.
  double eta() const;
  bool eta_overridden() const { return eta_.has_value(); }
  std::size_t services() const { return beta_.size(); }

  // Copy with a different smoothing width; an explicit eta is kept.
  CostModel with_gamma(double gamma) const;
  CostModel with_eta(double eta) const;

 private:
  double alpha_;
  Vec beta_;
  double beta_star_;
  int capacity_;
  double gamma_;
  std::optional<double> eta_;
};

inline constexpr double kSimplexTolerance = 1e-9;

// alpha * sum_n lambda_n (1 - x_n). x may be fractional.
double forwarding_cost(std::span<const double> lambda, std::span<const double> x, double alpha);

// sum_n beta_n * max(x_cur_n - x_prev_n, 0). Evictions are free.
double switching_cost(std::span<const double> x_prev, std::span<const double> x_cur,
                      std::span<const double> beta);

// F_t(X_t, X_{t-1}) = forwarding + switching for one slot.
double slot_cost(std::span<const double> lambda, std::span<const double> x_prev,
                 std::span<const double> x_cur, const CostModel& cost);

// sum_t F_t over a decision sequence of length T, with X_0 = 0.
double total_cost(const ArrivalTrace& trace, const std::vector<Vec>& decisions,
                  const CostModel& cost);

// Indicator of the M services with the largest arrivals. Ties go to the lower
// service index; services with zero arrivals are never selected, so fewer
// than M ones are returned when fewer than M services have demand.
Vec top_m_indicator(std::span<const double> lambda, int capacity);

// H_T = sum_t ||Theta_t - Theta_{t-1}||_1 with Theta_0 = 0.
double path_length(const ArrivalTrace& trace, int capacity);

// Membership in {p in [0,1]^N : sum p <= M} up to `tol`.
bool in_bounded_simplex(std::span<const double> p, int capacity,
                        double tol = kSimplexTolerance);

// Binary entries with at most M ones.
bool is_cache_vector(std::span<const double> x, int capacity);

}  // namespace roscsim
