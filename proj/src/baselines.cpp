#include "roscsim/baselines.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "roscsim/errors.hpp"
#include "roscsim/gradient_pgd.hpp"

namespace roscsim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Vec to_vec(const std::vector<std::uint8_t>& bits) { return Vec(bits.begin(), bits.end()); }

}  // namespace

ServicePlan plan_single_service(std::span<const double> forward, double beta, bool cached_before) {
  const std::size_t len = forward.size();
  // togo[w][s]: cheapest cost of slots w.. given state s at slot w-1.
  std::vector<std::array<double, 2>> togo(len + 1, {0.0, 0.0});
  std::vector<std::array<std::uint8_t, 2>> choice(len, {0, 0});
  for (std::size_t w = len; w-- > 0;) {
    for (int s = 0; s < 2; ++s) {
      const double off = forward[w] + togo[w + 1][0];
      const double on = (s == 0 ? beta : 0.0) + togo[w + 1][1];
      if (on < off) {
        togo[w][s] = on;
        choice[w][s] = 1;
      } else {
        togo[w][s] = off;
        choice[w][s] = 0;
      }
    }
  }
  ServicePlan plan;
  plan.cost = togo[0][cached_before ? 1 : 0];
  plan.cached.resize(len);
  int state = cached_before ? 1 : 0;
  for (std::size_t w = 0; w < len; ++w) {
    state = choice[w][state];
    plan.cached[w] = static_cast<std::uint8_t>(state);
  }
  return plan;
}

std::vector<std::vector<std::uint8_t>> rhc_window_plan(const PredictionOracle& predictions,
                                                       const CostModel& cost, long t, int window,
                                                       std::span<const double> x_prev) {
  if (window < 1) throw ArgumentError("rhc: W must be at least 1");
  const auto& truth = predictions.truth();
  const std::size_t n = truth.services();
  if (x_prev.size() != n) throw DimensionError("rhc: previous decision has the wrong length");
  const long horizon = static_cast<long>(truth.horizon());
  const long last = std::min(t + window - 1, horizon);
  const auto len = static_cast<std::size_t>(last - t + 1);

  // forward[w][n] = alpha * predicted lambda at slot t + w.
  std::vector<Vec> forward(len, Vec(n));
  for (std::size_t w = 0; w < len; ++w) {
    predictions.predict_row(t + static_cast<long>(w), t, forward[w]);
    for (double& v : forward[w]) v *= cost.alpha();
  }

  std::vector<std::vector<std::uint8_t>> plan(len, std::vector<std::uint8_t>(n, 0));
  std::vector<double> saving(n, 0.0);
  std::vector<std::size_t> candidates;
  Vec column(len);
  for (std::size_t i = 0; i < n; ++i) {
    double never = 0.0;
    for (std::size_t w = 0; w < len; ++w) {
      column[w] = forward[w][i];
      never += column[w];
    }
    const auto p = plan_single_service(column, cost.beta()[i], x_prev[i] > 0.5);
    saving[i] = never - p.cost;
    bool any = false;
    for (std::size_t w = 0; w < len; ++w) {
      plan[w][i] = p.cached[w];
      any = any || p.cached[w];
    }
    if (any) candidates.push_back(i);
  }

  const int m = cost.capacity();
  if (candidates.size() > static_cast<std::size_t>(m)) {
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      return saving[a] > saving[b] || (saving[a] == saving[b] && a < b);
    });
    for (std::size_t w = 0; w < len; ++w) {
      int kept = 0;
      for (std::size_t i : candidates) {
        if (!plan[w][i]) continue;
        if (kept < m) {
          ++kept;
        } else {
          plan[w][i] = 0;
        }
      }
    }
  }
  return plan;
}

PolicyResult rhc_policy(const PredictionOracle& predictions, const CostModel& cost, int window) {
  const auto start = Clock::now();
  const auto& truth = predictions.truth();
  std::vector<Vec> decisions;
  decisions.reserve(truth.horizon());
  Vec prev(truth.services(), 0.0);
  for (long t = 1; t <= static_cast<long>(truth.horizon()); ++t) {
    auto plan = rhc_window_plan(predictions, cost, t, window, prev);
    prev = to_vec(plan.front());
    decisions.push_back(prev);
  }
  auto result = make_record("rhc", truth, std::move(decisions), cost);
  result.config = {{"cost", to_json(cost)}, {"W", window}};
  result.runtime_ms = elapsed_ms(start);
  return result;
}

PolicyResult chc_policy(const PredictionOracle& predictions, const CostModel& cost, int window) {
  const auto start = Clock::now();
  const auto& truth = predictions.truth();
  const std::size_t n = truth.services();
  std::vector<Vec> decisions;
  decisions.reserve(truth.horizon());
  // Plans of the most recent W solves; plans.back() was made at slot t.
  std::deque<std::vector<std::vector<std::uint8_t>>> plans;
  Vec committed(n, 0.0);
  for (long t = 1; t <= static_cast<long>(truth.horizon()); ++t) {
    plans.push_back(rhc_window_plan(predictions, cost, t, window, committed));
    if (plans.size() > static_cast<std::size_t>(window)) plans.pop_front();
    committed = to_vec(plans.back().front());

    Vec avg(n, 0.0);
    const std::size_t solves = plans.size();
    for (std::size_t j = 0; j < solves; ++j) {
      // The solve made at slot t - (solves - 1 - j) covers slot t at this offset.
      const std::size_t offset = solves - 1 - j;
      const auto& row = plans[j][offset];
      for (std::size_t i = 0; i < n; ++i) avg[i] += row[i];
    }
    for (double& v : avg) v /= static_cast<double>(solves);
    decisions.push_back(std::move(avg));
  }
  auto result = make_record("chc", truth, std::move(decisions), cost);
  result.config = {{"cost", to_json(cost)}, {"W", window}};
  result.runtime_ms = elapsed_ms(start);
  return result;
}

PolicyResult sopt_policy(const ArrivalTrace& trace, const CostModel& cost) {
  const auto start = Clock::now();
  const Vec totals = trace.service_totals();
  const double threshold = cost.beta_star() / cost.alpha();
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] >= threshold) eligible.push_back(i);
  }
  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    return totals[a] > totals[b] || (totals[a] == totals[b] && a < b);
  });
  if (eligible.size() > static_cast<std::size_t>(cost.capacity())) {
    eligible.resize(static_cast<std::size_t>(cost.capacity()));
  }
  Vec x(trace.services(), 0.0);
  for (std::size_t i : eligible) x[i] = 1.0;
  auto result = make_record("sopt", trace, std::vector<Vec>(trace.horizon(), x), cost);
  result.config = {{"cost", to_json(cost)}};
  result.runtime_ms = elapsed_ms(start);
  return result;
}

std::size_t count_cache_states(std::size_t services, int capacity) {
  // sum_{k <= M} C(N, k), saturating.
  std::size_t total = 0;
  std::size_t binom = 1;
  for (int k = 0; k <= capacity && static_cast<std::size_t>(k) <= services; ++k) {
    if (k > 0) {
      const std::size_t num = services - static_cast<std::size_t>(k) + 1;
      if (binom > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
      binom = binom * num / static_cast<std::size_t>(k);
    }
    total += binom;
  }
  return total;
}

PolicyResult exact_opt_dp(const ArrivalTrace& trace, const CostModel& cost, DpBudget budget) {
  const auto start = Clock::now();
  const std::size_t n = trace.services();
  const int m = cost.capacity();
  const std::size_t horizon = trace.horizon();
  if (n > budget.max_services || m > budget.max_capacity || horizon > budget.max_horizon || n > 24) {
    throw InfeasibleInstance("exact_opt_dp: instance N=" + std::to_string(n) + " M=" + std::to_string(m) +
                             " T=" + std::to_string(horizon) + " (" +
                             std::to_string(count_cache_states(n, m)) + " cache states) exceeds budget N<=" +
                             std::to_string(budget.max_services) + " M<=" +
                             std::to_string(budget.max_capacity) + " T<=" +
                             std::to_string(budget.max_horizon));
  }

  std::vector<std::uint32_t> states;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) <= m) states.push_back(mask);
  }
  const std::size_t s_count = states.size();
  std::vector<double> beta_sum(std::size_t{1} << n, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int low = std::countr_zero(mask);
    beta_sum[mask] = beta_sum[mask & (mask - 1)] + cost.beta()[static_cast<std::size_t>(low)];
  }

  // value[t][s]: cheapest cost of slots 1..t ending in state s.
  std::vector<std::vector<double>> value(horizon, std::vector<double>(s_count));
  std::vector<std::vector<std::uint32_t>> parent(horizon, std::vector<std::uint32_t>(s_count, 0));
  std::vector<double> forward(s_count);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto lambda = trace.slot(static_cast<long>(t + 1));
    for (std::size_t s = 0; s < s_count; ++s) {
      double f = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(states[s] >> i & 1u)) f += lambda[i];
      }
      forward[s] = cost.alpha() * f;
    }
    for (std::size_t s = 0; s < s_count; ++s) {
      double best;
      std::uint32_t arg = 0;
      if (t == 0) {
        best = beta_sum[states[s]];
      } else {
        best = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < s_count; ++q) {
          const double c = value[t - 1][q] + beta_sum[states[s] & ~states[q]];
          if (c < best) {
            best = c;
            arg = static_cast<std::uint32_t>(q);
          }
        }
      }
      value[t][s] = best + forward[s];
      parent[t][s] = arg;
    }
  }

  std::size_t cur = static_cast<std::size_t>(
      std::min_element(value.back().begin(), value.back().end()) - value.back().begin());
  std::vector<Vec> decisions(horizon, Vec(n, 0.0));
  for (std::size_t t = horizon; t-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) decisions[t][i] = (states[cur] >> i & 1u) ? 1.0 : 0.0;
    cur = parent[t][cur];
  }
  auto result = make_record("opt-dp", trace, std::move(decisions), cost);
  result.config = {{"cost", to_json(cost)}, {"states", s_count}};
  result.runtime_ms = elapsed_ms(start);
  return result;
}

PolicyResult pseudo_opt(const ArrivalTrace& trace, const CostModel& cost, int iterations) {
  const auto start = Clock::now();
  auto probs = offline_pgd(trace, cost, iterations);
  auto result = make_record("pseudo-opt", trace, probs, cost);
  result.fractional = std::move(probs);
  result.config = {{"cost", to_json(cost)}, {"iterations", iterations}, {"approximation", true}};
  result.runtime_ms = elapsed_ms(start);
  return result;
}

}  // namespace roscsim
