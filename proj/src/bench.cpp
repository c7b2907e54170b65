#include "roscsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "roscsim/errors.hpp"
#include "roscsim/projection.hpp"
#include "roscsim/rng.hpp"
#include "roscsim/trace_io.hpp"

namespace roscsim {

double regret(double policy_cost, double reference_cost) { return policy_cost - reference_cost; }

BoundTerms regret_bound_terms(const CostModel& cost, std::size_t services, double horizon, double cap,
                              int paths, int window, double path_length) {
  if (window < 1) throw ArgumentError("regret bound: undefined for W < 1");
  if (paths < 1) throw ArgumentError("regret bound: K must be positive");
  if (horizon < 0.0 || path_length < 0.0 || cap < 0.0) {
    throw ArgumentError("regret bound: T, H_T and U must be nonnegative");
  }
  const double a = cost.alpha();
  const double b = cost.beta_star();
  const double m = cost.capacity();
  const double n = static_cast<double>(services);
  BoundTerms terms;
  terms.tracking = (6.0 * std::sqrt(2.0 * m) * b * (a + 3.0 * b) / (a * window) + 3.0 * b * n) *
                   std::sqrt(path_length * horizon);
  terms.rounding = (a * cap + 6.0 * b * n) * horizon / paths;
  terms.path = 2.0 * b * path_length;
  return terms;
}

double regret_bound(const CostModel& cost, std::size_t services, double horizon, double cap, int paths,
                    int window, double path_length) {
  return regret_bound_terms(cost, services, horizon, cap, paths, window, path_length).total();
}

bool is_known_policy(const std::string& name) {
  const auto& names = known_policies();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunRecord run_policy(const std::string& name, const ArrivalTrace& trace, const PolicyParams& params) {
  std::optional<NoisyPredictions> noisy;
  if (params.noise > 0.0) {
    noisy.emplace(trace, params.noise, derive_seed(params.seed, "predictions/noise"),
                  std::max(params.window, 1));
  }
  const ExactPredictions exact(trace);
  const PredictionOracle& rosc_view = noisy ? static_cast<const PredictionOracle&>(*noisy) : exact;
  const PredictionOracle& baseline_view = params.noisy_baselines ? rosc_view : exact;

  RunRecord record;
  if (name == "rosc") {
    RoscConfig config{params.cost, params.window, params.paths, params.seed, params.gamma, false};
    record = run_rosc(rosc_view, config);
  } else if (name == "rhc") {
    record = rhc_policy(baseline_view, params.cost, params.window);
  } else if (name == "chc") {
    record = chc_policy(baseline_view, params.cost, params.window);
  } else if (name == "sopt") {
    record = sopt_policy(trace, params.cost);
  } else if (name == "opt-dp") {
    record = exact_opt_dp(trace, params.cost, params.budget);
  } else if (name == "pseudo-opt") {
    record = pseudo_opt(trace, params.cost, params.pseudo_iterations);
  } else {
    throw ArgumentError("unknown policy '" + name + "'");
  }
  record.seed = params.seed;
  if (name != "rosc") {
    record.config["noise"] = params.noise;
    record.config["noisy_predictions"] = params.noisy_baselines && params.noise > 0.0;
  }
  return record;
}

namespace {

const char* workload_names[] = {"replacement", "poisson"};

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::string axis_label(const ExperimentSpec& spec) { return spec.axis.empty() ? "point" : spec.axis; }

double point_value(const ExperimentSpec& spec) {
  if (spec.axis == "ratio") return spec.ratio;
  if (spec.axis == "M") return spec.capacity;
  if (spec.axis == "W") return spec.window;
  if (spec.axis == "R") return spec.noise;
  if (spec.axis == "K") return spec.paths;
  return 0.0;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string opt_string(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j{{"workload", spec.workload},
                   {"seeds", spec.seeds},
                   {"policies", spec.policies},
                   {"alpha", spec.alpha},
                   {"ratio", spec.ratio},
                   {"M", spec.capacity},
                   {"W", spec.window},
                   {"K", spec.paths},
                   {"gamma", spec.gamma},
                   {"R", spec.noise},
                   {"noisy_baselines", spec.noisy_baselines},
                   {"pseudo_iterations", spec.pseudo_iterations},
                   {"dp_budget",
                    {{"N", spec.budget.max_services}, {"M", spec.budget.max_capacity}, {"T", spec.budget.max_horizon}}},
                   {"axis", spec.axis},
                   {"values", spec.values},
                   {"jobs", spec.jobs},
                   {"warmup", spec.warmup},
                   {"write_runs", spec.write_runs}};
  if (spec.workload == "poisson") {
    j["params"] = to_json(spec.poisson);
  } else {
    j["params"] = to_json(spec.replacement);
  }
  return j;
}

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  read_if(j, "workload", spec.workload);
  if (j.contains("params")) {
    if (spec.workload == "poisson") {
      spec.poisson = poisson_params_from_json(j.at("params"));
    } else {
      spec.replacement = replacement_params_from_json(j.at("params"));
    }
  }
  read_if(j, "seeds", spec.seeds);
  read_if(j, "policies", spec.policies);
  read_if(j, "alpha", spec.alpha);
  read_if(j, "ratio", spec.ratio);
  read_if(j, "M", spec.capacity);
  read_if(j, "W", spec.window);
  read_if(j, "K", spec.paths);
  read_if(j, "gamma", spec.gamma);
  read_if(j, "R", spec.noise);
  read_if(j, "noisy_baselines", spec.noisy_baselines);
  read_if(j, "pseudo_iterations", spec.pseudo_iterations);
  if (j.contains("dp_budget")) {
    const auto& b = j.at("dp_budget");
    read_if(b, "N", spec.budget.max_services);
    read_if(b, "M", spec.budget.max_capacity);
    read_if(b, "T", spec.budget.max_horizon);
  }
  read_if(j, "axis", spec.axis);
  read_if(j, "values", spec.values);
  read_if(j, "jobs", spec.jobs);
  read_if(j, "warmup", spec.warmup);
  read_if(j, "write_runs", spec.write_runs);
  return spec;
}

void validate(const ExperimentSpec& spec) {
  if (std::find(std::begin(workload_names), std::end(workload_names), spec.workload) == std::end(workload_names)) {
    throw ArgumentError("experiment: unknown workload '" + spec.workload + "'");
  }
  if (spec.seeds.empty()) throw ArgumentError("experiment: the seed list is empty");
  if (spec.policies.empty()) throw ArgumentError("experiment: no policies");
  for (const auto& p : spec.policies) {
    if (!is_known_policy(p)) throw ArgumentError("experiment: unknown policy '" + p + "'");
  }
  static const char* axes[] = {"", "ratio", "M", "W", "R", "K"};
  if (std::find(std::begin(axes), std::end(axes), spec.axis) == std::end(axes)) {
    throw ArgumentError("experiment: unknown sweep axis '" + spec.axis + "'");
  }
  if (!spec.axis.empty() && spec.values.empty()) throw ArgumentError("experiment: sweep axis without values");
  if (spec.axis.empty() && !spec.values.empty()) throw ArgumentError("experiment: values given without an axis");
  if (spec.jobs < 1) throw ArgumentError("experiment: jobs must be positive");
  if (!(spec.alpha > 0.0) || spec.ratio < 0.0) throw ArgumentError("experiment: need alpha > 0 and ratio >= 0");
  if (spec.paths < 1 || spec.window < 0 || spec.capacity < 1) {
    throw ArgumentError("experiment: need K >= 1, W >= 0, M >= 1");
  }
}

ExperimentSpec at_point(const ExperimentSpec& spec, double value) {
  ExperimentSpec p = spec;
  if (spec.axis == "ratio") {
    p.ratio = value;
  } else if (spec.axis == "M") {
    p.capacity = static_cast<int>(std::lround(value));
  } else if (spec.axis == "W") {
    p.window = static_cast<int>(std::lround(value));
  } else if (spec.axis == "R") {
    p.noise = value;
  } else if (spec.axis == "K") {
    p.paths = static_cast<int>(std::lround(value));
  }
  return p;
}

PolicyParams policy_params(const ExperimentSpec& spec, std::size_t services, std::uint64_t seed) {
  return PolicyParams{CostModel::uniform(services, spec.alpha, spec.ratio * spec.alpha, spec.capacity, spec.gamma),
                      spec.window,
                      spec.paths,
                      seed,
                      spec.noise,
                      spec.noisy_baselines,
                      spec.pseudo_iterations,
                      spec.budget,
                      std::nullopt};
}

ArrivalTrace generate_workload(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.workload == "poisson") return gen_poisson(spec.poisson, seed);
  return gen_replacement(spec.replacement, seed);
}

const PointSummary* ExperimentReport::find(double value, const std::string& policy) const {
  for (const auto& s : summary) {
    if (s.value == value && s.policy == policy) return &s;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<double> values = spec.values;
  if (spec.axis.empty()) values = {point_value(spec)};

  struct Task {
    std::size_t point;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < values.size(); ++p) {
    for (auto seed : spec.seeds) tasks.push_back({p, seed});
  }
  std::vector<std::vector<RunResult>> results(tasks.size());

  auto run_task = [&](const Task& task) {
    const ExperimentSpec point = at_point(spec, values[task.point]);
    std::vector<RunResult> out;
    ArrivalTrace trace;
    std::string trace_error;
    try {
      trace = generate_workload(point, task.seed);
    } catch (const std::exception& e) {
      trace_error = std::string("trace generation: ") + e.what();
    }
    std::optional<double> reference;
    int reference_rank = 0;
    for (const auto& name : spec.policies) {
      RunResult r;
      r.value = values[task.point];
      r.policy = name;
      r.seed = task.seed;
      if (!trace_error.empty()) {
        r.error = trace_error;
        out.push_back(std::move(r));
        continue;
      }
      try {
        const PolicyParams params = policy_params(point, trace.services(), task.seed);
        if (spec.warmup) (void)run_policy(name, trace, params);
        RunRecord rec = run_policy(name, trace, params);
        r.horizon = rec.horizon();
        r.total_cost = rec.total_cost;
        r.runtime_ms = rec.runtime_ms;
        if (name == "opt-dp" && reference_rank < 2) {
          reference = rec.total_cost;
          reference_rank = 2;
        } else if (name == "pseudo-opt" && reference_rank < 1) {
          reference = rec.total_cost;
          reference_rank = 1;
        }
        if (spec.write_runs) r.record = std::move(rec);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      out.push_back(std::move(r));
    }
    if (reference) {
      for (auto& r : out) {
        if (r.error.empty()) r.regret = regret(r.total_cost, *reference);
      }
    }
    return out;
  };

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string fatal;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        results[i] = run_task(tasks[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        fatal = e.what();
      }
    }
  };
  const int jobs = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!fatal.empty()) throw std::runtime_error("experiment: " + fatal);

  ExperimentReport report;
  for (auto& block : results) {
    for (auto& r : block) report.runs.push_back(std::move(r));
  }
  for (double v : values) {
    for (const auto& name : spec.policies) {
      PointSummary s;
      s.value = v;
      s.policy = name;
      std::vector<double> per_slot, totals, runtimes, regrets;
      for (const auto& r : report.runs) {
        if (r.value != v || r.policy != name) continue;
        if (!r.error.empty()) {
          report.failures.push_back(axis_label(spec) + "=" + format_number(v) + " policy=" + name +
                                    " seed=" + std::to_string(r.seed) + ": " + r.error);
          continue;
        }
        per_slot.push_back(r.horizon ? r.total_cost / static_cast<double>(r.horizon) : 0.0);
        totals.push_back(r.total_cost);
        runtimes.push_back(r.runtime_ms);
        if (r.regret) regrets.push_back(*r.regret);
      }
      s.runs = totals.size();
      s.mean_cost_per_slot = mean_of(per_slot);
      s.std_cost_per_slot = std_of(per_slot);
      s.mean_total_cost = mean_of(totals);
      s.mean_runtime_ms = mean_of(runtimes);
      s.std_runtime_ms = std_of(runtimes);
      if (!regrets.empty() && regrets.size() == totals.size()) s.mean_regret = mean_of(regrets);
      report.summary.push_back(std::move(s));
    }
  }
  return report;
}

void write_report(const std::filesystem::path& dir, const ExperimentSpec& spec,
                  const ExperimentReport& report) {
  std::filesystem::create_directories(dir);
  const std::string axis = axis_label(spec);

  std::string costs = axis + ",policy,runs,mean_cost_per_slot,std_cost_per_slot,mean_total_cost,mean_regret\n";
  std::string runtimes = axis + ",policy,runs,mean_runtime_ms,std_runtime_ms,mean_runtime_per_slot_ms\n";
  nlohmann::json points = nlohmann::json::array();
  for (const auto& s : report.summary) {
    const double horizon = spec.workload == "poisson" ? static_cast<double>(spec.poisson.horizon)
                                                      : static_cast<double>(spec.replacement.horizon);
    costs += format_number(s.value) + "," + s.policy + "," + std::to_string(s.runs) + "," +
             format_number(s.mean_cost_per_slot) + "," + format_number(s.std_cost_per_slot) + "," +
             format_number(s.mean_total_cost) + "," + opt_string(s.mean_regret) + "\n";
    runtimes += format_number(s.value) + "," + s.policy + "," + std::to_string(s.runs) + "," +
                format_number(s.mean_runtime_ms) + "," + format_number(s.std_runtime_ms) + "," +
                format_number(horizon > 0 ? s.mean_runtime_ms / horizon : 0.0) + "\n";
    nlohmann::json p{{"value", s.value},
                     {"policy", s.policy},
                     {"runs", s.runs},
                     {"mean_cost_per_slot", s.mean_cost_per_slot},
                     {"std_cost_per_slot", s.std_cost_per_slot},
                     {"mean_total_cost", s.mean_total_cost},
                     {"mean_runtime_ms", s.mean_runtime_ms},
                     {"std_runtime_ms", s.std_runtime_ms}};
    if (s.mean_regret) p["mean_regret"] = *s.mean_regret;
    points.push_back(std::move(p));
  }

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    nlohmann::json j{{"value", r.value}, {"policy", r.policy}, {"seed", r.seed}};
    if (r.error.empty()) {
      j["total_cost"] = r.total_cost;
      j["runtime_ms"] = r.runtime_ms;
      if (r.regret) j["regret"] = *r.regret;
    } else {
      j["error"] = r.error;
    }
    runs.push_back(std::move(j));
  }

  nlohmann::json summary{{"spec", to_json(spec)},
                         {"axis", axis},
                         {"metadata",
                          {{"projection_sort", std::string(kProjectionSortName)},
                           {"hardware_threads", std::thread::hardware_concurrency()},
                           {"runtime_note", "wall clock per policy run, trace generation excluded"}}},
                         {"points", points},
                         {"runs", runs},
                         {"failures", report.failures}};

  write_text(dir / ("costs_" + axis + ".csv"), costs);
  write_text(dir / "runtimes.csv", runtimes);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  if (spec.write_runs) {
    const auto run_dir = dir / "runs";
    std::filesystem::create_directories(run_dir);
    for (const auto& r : report.runs) {
      if (!r.error.empty()) continue;
      write_run_files(run_dir / (r.policy + "_" + format_number(r.value) + "_s" + std::to_string(r.seed)),
                      r.record);
    }
  }
}

}  // namespace roscsim
