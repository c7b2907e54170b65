#include "roscsim/gradient_pgd.hpp"

#include <algorithm>
#include <string>

#include "roscsim/errors.hpp"

namespace roscsim {

double g_fn(double a, double b, double beta, double gamma) {
  const double d = b - a;
  if (d < 0.0) return 0.0;
  if (d <= gamma) return 6.0 * beta / gamma * d;
  return 3.0 * beta;
}

double aux_cost(std::span<const double> p_cur, std::span<const double> p_prev,
                std::span<const double> lambda, const CostModel& cost) {
  const std::size_t n = p_cur.size();
  if (p_prev.size() != n || lambda.size() != n || cost.services() != n) {
    throw DimensionError("aux_cost: length mismatch");
  }
  const double gamma = cost.gamma();
  const auto& beta = cost.beta();
  double switching = 0.0;
  double forwarding = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p_cur[i] - p_prev[i];
    if (d >= 0.0 && d <= gamma) {
      switching += 3.0 * beta[i] / gamma * d * d;
    } else if (d > gamma) {
      switching += 3.0 * beta[i] * d;
    }
    forwarding += lambda[i] * (1.0 - p_cur[i]);
  }
  return switching + cost.alpha() * forwarding;
}

double aux_objective(const std::vector<Vec>& probs, const ArrivalTrace& trace,
                     const CostModel& cost) {
  if (probs.size() != trace.horizon()) throw DimensionError("aux_objective: length mismatch");
  const Vec zero(trace.services(), 0.0);
  double sum = 0.0;
  for (std::size_t t = 1; t <= probs.size(); ++t) {
    const Vec& prev = t == 1 ? zero : probs[t - 2];
    sum += aux_cost(probs[t - 1], prev, trace.slot(static_cast<long>(t)), cost);
  }
  return sum;
}

WindowState::WindowState(std::size_t services, std::size_t window)
    : services_(services), window_(window), ring_(window + 2),
      probs_(ring_, Vec(services, 0.0)), snapshots_(ring_, Vec(services, 0.0)),
      zero_(services, 0.0) {
  if (services == 0) throw ArgumentError("WindowState: no services");
}

std::size_t WindowState::index(long slot) const {
  return static_cast<std::size_t>(slot) % ring_;
}

bool WindowState::holds(long slot) const {
  if (slot <= 0) return true;
  return slot <= newest_ && slot > newest_ - static_cast<long>(ring_);
}

std::span<const double> WindowState::probs(long slot) const {
  if (slot <= 0) return zero_;
  if (!holds(slot)) throw ArgumentError("WindowState: slot " + std::to_string(slot) + " is not live");
  return probs_[index(slot)];
}

std::span<const double> WindowState::snapshot(long slot) const {
  if (slot <= 0) return zero_;
  if (!holds(slot)) throw ArgumentError("WindowState: slot " + std::to_string(slot) + " is not live");
  return snapshots_[index(slot)];
}

void WindowState::initialize(long slot, std::span<const double> values) {
  if (slot <= 0) throw ArgumentError("WindowState: cannot initialize slot <= 0");
  if (slot != newest_ + 1) throw ArgumentError("WindowState: slots must be initialized in order");
  if (values.size() != services_) throw DimensionError("WindowState: length mismatch");
  newest_ = slot;
  auto& p = probs_[index(slot)];
  std::copy(values.begin(), values.end(), p.begin());
  std::fill(snapshots_[index(slot)].begin(), snapshots_[index(slot)].end(), 0.0);
}

void WindowState::commit_update(long slot, std::span<const double> values) {
  if (slot <= 0 || !holds(slot)) throw ArgumentError("WindowState: update of a slot that is not live");
  if (values.size() != services_) throw DimensionError("WindowState: length mismatch");
  auto& p = probs_[index(slot)];
  snapshots_[index(slot)] = p;
  std::copy(values.begin(), values.end(), p.begin());
}

void window_gradient(long tau, const WindowState& state, std::span<const double> lambda_tau,
                     const CostModel& cost, long horizon, Vec& grad) {
  if (tau < 1 || tau > horizon) {
    throw ArgumentError("window_gradient: slot " + std::to_string(tau) + " outside [1, T]");
  }
  const bool has_next = tau < horizon;
  if (!state.holds(tau) || !state.holds(tau - 1) || (has_next && !state.holds(tau + 1))) {
    throw ArgumentError("window_gradient: slot " + std::to_string(tau) + " is outside the live window");
  }
  const std::size_t n = state.services();
  if (lambda_tau.size() != n || cost.services() != n) {
    throw DimensionError("window_gradient: length mismatch");
  }
  const auto prev = state.snapshot(tau - 1);
  const auto cur = state.probs(tau);
  const auto next = has_next ? state.probs(tau + 1) : std::span<const double>{};
  const auto& beta = cost.beta();
  const double gamma = cost.gamma();
  const double alpha = cost.alpha();
  grad.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double g = g_fn(prev[i], cur[i], beta[i], gamma) - alpha * lambda_tau[i];
    if (has_next) g -= g_fn(cur[i], next[i], beta[i], gamma);
    grad[i] = g;
  }
}

Vec window_gradient(long tau, const WindowState& state, std::span<const double> lambda_tau,
                    const CostModel& cost, long horizon) {
  Vec grad;
  window_gradient(tau, state, lambda_tau, cost, horizon, grad);
  return grad;
}

void pgd_window_update(WindowState& state, const ArrivalLookup& arrivals, const CostModel& cost,
                       long t, long horizon, BoundedSimplexProjector& projector) {
  const long w = static_cast<long>(state.window());
  if (w < 1) return;
  const double eta = cost.eta();
  const std::size_t n = state.services();
  Vec grad(n);
  Vec step(n);
  Vec projected(n);
  const long top = std::min(t + w - 1, horizon);
  const long bottom = std::max(1L, t);
  for (long tau = top; tau >= bottom; --tau) {
    window_gradient(tau, state, arrivals(tau), cost, horizon, grad);
    const auto cur = state.probs(tau);
    for (std::size_t i = 0; i < n; ++i) step[i] = cur[i] - eta * grad[i];
    projector.project(step, projected);
    state.commit_update(tau, projected);
  }
}

std::vector<Vec> shifted_indicators(const ArrivalTrace& trace, int capacity) {
  std::vector<Vec> init;
  init.reserve(trace.horizon());
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    init.push_back(top_m_indicator(trace.slot(static_cast<long>(t) - 1), capacity));
  }
  return init;
}

void offline_pgd_sweep(std::vector<Vec>& probs, const ArrivalTrace& trace, const CostModel& cost,
                       BoundedSimplexProjector& projector) {
  const std::size_t horizon = trace.horizon();
  const std::size_t n = trace.services();
  if (probs.size() != horizon) throw DimensionError("offline_pgd: length mismatch");
  const auto& beta = cost.beta();
  const double gamma = cost.gamma();
  const double alpha = cost.alpha();
  const double eta = cost.eta();
  const Vec zero(n, 0.0);
  std::vector<Vec> stepped(horizon, Vec(n));
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Vec& prev = t == 1 ? zero : probs[t - 2];
    const Vec& cur = probs[t - 1];
    const auto lambda = trace.slot(static_cast<long>(t));
    for (std::size_t i = 0; i < n; ++i) {
      double g = g_fn(prev[i], cur[i], beta[i], gamma) - alpha * lambda[i];
      if (t < horizon) g -= g_fn(cur[i], probs[t][i], beta[i], gamma);
      stepped[t - 1][i] = cur[i] - eta * g;
    }
  }
  for (std::size_t t = 0; t < horizon; ++t) projector.project(stepped[t], probs[t]);
}

std::vector<Vec> offline_pgd(const ArrivalTrace& trace, const CostModel& cost, int iterations) {
  if (iterations < 0) throw ArgumentError("offline_pgd: iterations must be nonnegative");
  if (cost.services() != trace.services()) throw DimensionError("offline_pgd: length mismatch");
  auto probs = shifted_indicators(trace, cost.capacity());
  BoundedSimplexProjector projector(cost.capacity());
  for (int w = 0; w < iterations; ++w) offline_pgd_sweep(probs, trace, cost, projector);
  return probs;
}

}  // namespace roscsim
