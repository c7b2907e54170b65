#pragma once

// Smoothed surrogate cost, its gradient, the windowed projected gradient
// descent run inside the online policy, and the synchronous offline twin.

#include <functional>
#include <span>
#include <vector>

#include "roscsim/model.hpp"
#include "roscsim/projection.hpp"

namespace roscsim {

// Derivative of the smoothed switching term with respect to its second
// argument: 0 below a, (6 beta / gamma)(b - a) on [a, a + gamma], 3 beta above.
// The quadratic branch owns both breakpoints.
double g_fn(double a, double b, double beta, double gamma);

// Surrogate cost of one slot: quadratic switching penalty for increments up
// to gamma, 3x linear beyond, plus fractional forwarding.
double aux_cost(std::span<const double> p_cur, std::span<const double> p_prev,
                std::span<const double> lambda, const CostModel& cost);

// J(P) = sum_t aux_cost(P_t, P_{t-1}, lambda_t) over t = 1..T with P_0 = 0.
double aux_objective(const std::vector<Vec>& probs, const ArrivalTrace& trace,
                     const CostModel& cost);

// Iterates P_tau and their pre-update snapshots Pbar_tau for the live slots
// of the online policy. Holds window + 2 slots in a ring; slots <= 0 read as
// zero.
class WindowState {
 public:
  WindowState(std::size_t services, std::size_t window);

  std::size_t services() const { return services_; }
  std::size_t window() const { return window_; }

  std::span<const double> probs(long slot) const;
  std::span<const double> snapshot(long slot) const;

  // Initializes P_slot (slot >= 1). Slots must be initialized in increasing
  // order; this retires the oldest live slot.
  void initialize(long slot, std::span<const double> values);

  // Replaces P_slot after saving its current value to Pbar_slot.
  void commit_update(long slot, std::span<const double> values);

  bool holds(long slot) const;

 private:
  std::size_t index(long slot) const;

  std::size_t services_;
  std::size_t window_;
  std::size_t ring_;
  long newest_ = 0;
  std::vector<Vec> probs_;
  std::vector<Vec> snapshots_;
  Vec zero_;
};

// Arrival rows (as seen by the policy) keyed by 1-based slot.
using ArrivalLookup = std::function<std::span<const double>(long slot)>;

// Gradient of F_tau(P_tau, Pbar_{tau-1}) + F_{tau+1}(P_{tau+1}, P_tau) with
// respect to P_tau. The forward term is dropped at tau == horizon.
void window_gradient(long tau, const WindowState& state, std::span<const double> lambda_tau,
                     const CostModel& cost, long horizon, Vec& grad);
Vec window_gradient(long tau, const WindowState& state, std::span<const double> lambda_tau,
                    const CostModel& cost, long horizon);

// One online PGD pass at outer step t: tau runs from min(t+W-1, T) down to
// max(1, t). Slots beyond the horizon are never touched.
void pgd_window_update(WindowState& state, const ArrivalLookup& arrivals, const CostModel& cost,
                       long t, long horizon, BoundedSimplexProjector& projector);

// Theta_{t-1} for t = 1..T (Theta_0 = 0): the common starting point of the
// online and offline descent.
std::vector<Vec> shifted_indicators(const ArrivalTrace& trace, int capacity);

// One synchronous full-horizon PGD step on J, projecting each slot onto D.
void offline_pgd_sweep(std::vector<Vec>& probs, const ArrivalTrace& trace, const CostModel& cost,
                       BoundedSimplexProjector& projector);

// `iterations` synchronous sweeps starting from shifted_indicators().
std::vector<Vec> offline_pgd(const ArrivalTrace& trace, const CostModel& cost, int iterations);

}  // namespace roscsim
