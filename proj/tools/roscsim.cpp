// roscsim: generate traces, run policies, sweep experiments, evaluate the
// regret bound and run the self-check suites.
//
// Every subcommand builds one JSON config: the --config file (if any), then
// each flag that was given on the command line. The merged config is what
// runs and is written to <out>/effective_config.json.

#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roscsim/bench.hpp"
#include "roscsim/errors.hpp"
#include "roscsim/model.hpp"
#include "roscsim/rosc.hpp"
#include "roscsim/trace_io.hpp"
#include "roscsim/validate.hpp"
#include "roscsim/workloads.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roscsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitValidation = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that write into a JSON path when present on the command line.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, std::vector<std::string> path,
                   const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply_.push_back([opt, value, path](json& cfg) {
      if (opt->count() == 0) return;
      json* node = &cfg;
      for (const auto& key : path) node = &(*node)[key];
      *node = *value;
    });
    return opt;
  }

  CLI::Option* add_switch(CLI::App* app, const std::string& flag, std::vector<std::string> path,
                          const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(flag, *value, help);
    apply_.push_back([opt, value, path](json& cfg) {
      if (opt->count() == 0) return;
      json* node = &cfg;
      for (const auto& key : path) node = &(*node)[key];
      *node = *value;
    });
    return opt;
  }

  void apply(json& cfg) const {
    for (const auto& f : apply_) f(cfg);
  }

 private:
  std::vector<std::function<void(json&)>> apply_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object: " + path);
    return j;
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const json& cfg) {
  fs::path dir = cfg.value("out", std::string("."));
  fs::create_directories(dir);
  return dir;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  return out;
}

// ---- generate ----

struct GenerateCmd {
  CLI::App* app;
  std::string config;
  Overrides ov;
};

void setup_generate(CLI::App& root, GenerateCmd& cmd) {
  cmd.app = root.add_subcommand("generate", "Generate a synthetic request trace");
  auto* app = cmd.app;
  app->add_option("--config", cmd.config, "JSON config file");
  cmd.ov.add<std::string>(app, "--model", {"model"}, "replacement | poisson")
      ->check(CLI::IsMember({"replacement", "poisson"}));
  cmd.ov.add<std::uint64_t>(app, "--seed", {"seed"}, "Generator seed");
  cmd.ov.add<std::size_t>(app, "--N", {"params", "N"}, "Number of services");
  cmd.ov.add<std::size_t>(app, "--T", {"params", "T"}, "Number of slots");
  cmd.ov.add<double>(app, "--U", {"params", "U"}, "Requests per slot (replacement)");
  cmd.ov.add<double>(app, "--zipf", {"params", "zipf_exponent"}, "Zipf exponent (replacement)");
  cmd.ov.add<std::size_t>(app, "--ranked", {"params", "ranked"}, "Ranked services, 0 = N/2 (replacement)");
  cmd.ov.add<std::string>(app, "--lifetime", {"params", "mean_lifetime"},
                          "Mean rank lifetime in slots or 'inf' (replacement)");
  cmd.ov.add<std::string>(app, "--volume", {"params", "volume"}, "deterministic | thinned (replacement)")
      ->check(CLI::IsMember({"deterministic", "thinned"}));
  cmd.ov.add<double>(app, "--keep", {"params", "keep_probability"}, "Request survival in thinned mode");
  cmd.ov.add<int>(app, "--groups", {"groups"}, "Number of default groups to keep (poisson)");
  cmd.ov.add<std::string>(app, "--birth-rates", {"birth_rates"}, "Comma list of group birth rates (poisson)");
  cmd.ov.add<std::string>(app, "--lifetimes", {"lifetimes"}, "Comma list of group lifetimes (poisson)");
  cmd.ov.add<double>(app, "--volume-per-service", {"params", "per_service_volume"},
                     "Mean requests per active service per slot (poisson)");
  cmd.ov.add<std::string>(app, "--M", {"M"}, "Comma list of capacities to report path lengths for");
  cmd.ov.add<std::string>(app, "--out", {"out"}, "Output directory");
  cmd.ov.add<std::string>(app, "--name", {"name"}, "Trace file stem");
}

int run_generate(const GenerateCmd& cmd) {
  json cfg = load_config(cmd.config);
  cmd.ov.apply(cfg);
  if (!cfg.contains("model")) cfg["model"] = "replacement";
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!cfg.contains("M")) cfg["M"] = "10";
  if (!cfg.contains("name")) cfg["name"] = "trace";
  if (!cfg.contains("params")) cfg["params"] = json::object();
  const std::string model = cfg.at("model");
  const auto seed = cfg.at("seed").get<std::uint64_t>();

  ArrivalTrace trace;
  json params;
  if (model == "replacement") {
    const auto p = replacement_params_from_json(cfg.at("params"));
    params = to_json(p);
    trace = gen_replacement(p, seed);
  } else if (model == "poisson") {
    auto p = poisson_params_from_json(cfg.at("params"));
    if (cfg.contains("groups")) {
      const int g = cfg.at("groups").get<int>();
      if (g < 1) throw UsageError("--groups must be positive");
      if (static_cast<std::size_t>(g) < p.groups.size()) {
        p.groups.resize(static_cast<std::size_t>(g));
      } else {
        while (p.groups.size() < static_cast<std::size_t>(g)) p.groups.push_back(p.groups.back());
      }
    }
    if (cfg.contains("birth_rates")) {
      const auto rates = parse_list(cfg.at("birth_rates").get<std::string>());
      if (rates.size() == 1) {
        for (auto& g : p.groups) g.birth_rate = rates[0];
      } else if (rates.size() == p.groups.size()) {
        for (std::size_t i = 0; i < rates.size(); ++i) p.groups[i].birth_rate = rates[i];
      } else {
        throw UsageError("--birth-rates needs one value or one per group");
      }
    }
    if (cfg.contains("lifetimes")) {
      const auto lives = parse_list(cfg.at("lifetimes").get<std::string>());
      if (lives.size() == 1) {
        for (auto& g : p.groups) g.lifetime = lives[0];
      } else if (lives.size() == p.groups.size()) {
        for (std::size_t i = 0; i < lives.size(); ++i) p.groups[i].lifetime = lives[i];
      } else {
        throw UsageError("--lifetimes needs one value or one per group");
      }
    }
    params = to_json(p);
    trace = gen_poisson(p, seed);
  } else {
    throw UsageError("unknown model '" + model + "'");
  }

  const fs::path dir = prepare_out(cfg);
  const fs::path csv = dir / (cfg.at("name").get<std::string>() + ".csv");
  TraceMetadata meta{trace.horizon(), trace.services(), trace.cap().value_or(trace.max_slot_total()), seed,
                     model, params};
  write_trace_files(csv, trace, meta);
  json effective = cfg;
  effective["params"] = params;
  write_json(dir / "effective_config.json", effective);

  if (trace.total() == 0.0) std::cerr << "warning: the generated trace has no requests\n";
  std::cout << "wrote " << csv.string() << " (T=" << trace.horizon() << ", N=" << trace.services()
            << ", U=" << format_number(meta.cap) << ")\n";
  const std::string caps = cfg.at("M").is_string() ? cfg.at("M").get<std::string>() : cfg.at("M").dump();
  for (double m : parse_list(caps)) {
    const int cap = static_cast<int>(std::lround(m));
    if (cap < 1) throw UsageError("--M values must be positive");
    const double h = path_length(trace, cap);
    std::cout << "path length M=" << cap << ": H_T=" << format_number(h)
              << " per slot=" << format_number(h / static_cast<double>(trace.horizon())) << "\n";
  }
  return kExitOk;
}

// ---- shared cost/policy flags ----

void add_policy_flags(CLI::App* app, Overrides& ov) {
  ov.add<int>(app, "--W", {"W"}, "Prediction window");
  ov.add<int>(app, "--K", {"K"}, "Number of sample paths");
  ov.add<std::uint64_t>(app, "--seed", {"seed"}, "Policy seed");
  ov.add<double>(app, "--alpha", {"alpha"}, "Forwarding cost per request");
  ov.add<double>(app, "--ratio", {"ratio"}, "beta*/alpha with uniform beta");
  ov.add<int>(app, "--M", {"M"}, "Cache capacity");
  ov.add<double>(app, "--gamma", {"gamma"}, "Smoothing width");
  ov.add<double>(app, "--R", {"R"}, "Prediction error weight");
  ov.add_switch(app, "--noisy-baselines", {"noisy_baselines"}, "RHC/CHC see the noisy predictions too");
  ov.add<int>(app, "--iterations", {"pseudo_iterations"}, "Offline PGD sweeps for pseudo-opt");
  ov.add<std::string>(app, "--out", {"out"}, "Output directory");
}

// ---- run ----

struct RunCmd {
  CLI::App* app;
  std::string config;
  Overrides ov;
};

void setup_run(CLI::App& root, RunCmd& cmd) {
  cmd.app = root.add_subcommand("run", "Run one policy on one trace");
  auto* app = cmd.app;
  app->add_option("--config", cmd.config, "JSON config file");
  cmd.ov.add<std::string>(app, "--policy", {"policy"}, "rosc | rhc | chc | sopt | opt-dp | pseudo-opt");
  cmd.ov.add<std::string>(app, "--trace", {"trace"}, "Trace CSV (JSON sidecar read when present)");
  cmd.ov.add<std::string>(app, "--beta", {"beta"}, "Instantiation cost: one value or a comma list per service");
  cmd.ov.add<std::string>(app, "--gamma-rule", {"gamma_rule"}, "fixed | theorem")
      ->check(CLI::IsMember({"fixed", "theorem"}));
  cmd.ov.add<double>(app, "--eta", {"eta"}, "Explicit step size");
  add_policy_flags(app, cmd.ov);
}

int run_run(const RunCmd& cmd) {
  json cfg = load_config(cmd.config);
  cmd.ov.apply(cfg);
  if (!cfg.contains("policy")) throw UsageError("run: --policy is required");
  if (!cfg.contains("trace")) throw UsageError("run: --trace is required");
  const std::string policy = cfg.at("policy");
  if (!is_known_policy(policy)) throw UsageError("unknown policy '" + policy + "'");

  const fs::path trace_path = cfg.at("trace").get<std::string>();
  if (!fs::exists(trace_path)) throw UsageError("trace file not found: " + trace_path.string());
  const ArrivalTrace trace = read_trace_files(trace_path);
  const std::size_t n = trace.services();

  const double alpha = cfg.value("alpha", 0.05);
  Vec beta;
  if (cfg.contains("beta")) {
    const auto& b = cfg.at("beta");
    beta = b.is_string() ? parse_list(b.get<std::string>()) : (b.is_array() ? b.get<Vec>() : Vec{b.get<double>()});
    if (beta.size() == 1) beta.assign(n, beta[0]);
    if (beta.size() != n) throw UsageError("--beta needs one value or N values");
  } else {
    beta.assign(n, cfg.value("ratio", 200.0) * alpha);
  }
  std::optional<double> eta;
  if (cfg.contains("eta")) eta = cfg.at("eta").get<double>();
  const CostModel cost(alpha, beta, cfg.value("M", 10), cfg.value("gamma", 0.05), eta);

  PolicyParams params{cost,
                      cfg.value("W", 10),
                      cfg.value("K", 100),
                      cfg.value("seed", std::uint64_t{1}),
                      cfg.value("R", 0.0),
                      cfg.value("noisy_baselines", false),
                      cfg.value("pseudo_iterations", 300),
                      DpBudget{},
                      std::nullopt};
  if (cfg.value("gamma_rule", std::string("fixed")) == "theorem") {
    params.gamma = GammaPolicy::theorem(path_length(trace, cost.capacity()), static_cast<double>(trace.horizon()));
  }
  const RunRecord record = run_policy(policy, trace, params);

  const fs::path dir = prepare_out(cfg);
  write_run_files(dir / policy, record);
  json effective = cfg;
  effective["resolved"] = record.config;
  effective["trace_shape"] = {{"T", trace.horizon()}, {"N", n}};
  write_json(dir / "effective_config.json", effective);
  std::cout << policy << ": total cost " << format_number(record.total_cost) << " over " << record.horizon()
            << " slots, " << format_number(record.runtime_ms) << " ms\n";
  return kExitOk;
}

// ---- sweep ----

struct SweepCmd {
  CLI::App* app;
  std::string config;
  bool paper_defaults = false;
  Overrides ov;
};

void setup_sweep(CLI::App& root, SweepCmd& cmd) {
  cmd.app = root.add_subcommand("sweep", "Multi-seed experiment over one axis");
  auto* app = cmd.app;
  app->add_option("--config", cmd.config, "Experiment spec JSON");
  app->add_flag("--paper-defaults", cmd.paper_defaults,
                "beta*/alpha=200, M=10, W=10, K=100, gamma=0.05, R=0 on the N=1000, T=10000 replacement workload");
  cmd.ov.add<std::string>(app, "--axis", {"axis"}, "ratio | M | W | R | K");
  cmd.ov.add<std::string>(app, "--values", {"values"}, "Comma list of axis values");
  cmd.ov.add<int>(app, "--seeds", {"seed_count"}, "Use seeds 1..n");
  cmd.ov.add<std::string>(app, "--seed-list", {"seeds"}, "Comma list of seeds");
  cmd.ov.add<std::string>(app, "--policies", {"policies"}, "Comma list of policies");
  cmd.ov.add<std::string>(app, "--workload", {"workload"}, "replacement | poisson");
  cmd.ov.add<std::size_t>(app, "--N", {"params", "N"}, "Number of services");
  cmd.ov.add<std::size_t>(app, "--T", {"params", "T"}, "Number of slots");
  cmd.ov.add<double>(app, "--U", {"params", "U"}, "Requests per slot (replacement)");
  cmd.ov.add<int>(app, "--jobs", {"jobs"}, "Worker threads");
  cmd.ov.add_switch(app, "--no-warmup", {"no_warmup"}, "Skip the discarded warm-up run");
  cmd.ov.add_switch(app, "--write-runs", {"write_runs"}, "Write per-run CSV/JSON files");
  add_policy_flags(app, cmd.ov);
}

json paper_defaults() {
  return json{{"workload", "replacement"},
              {"params", to_json(ReplacementParams{})},
              {"ratio", 200.0},
              {"alpha", 0.05},
              {"M", 10},
              {"W", 10},
              {"K", 100},
              {"gamma", 0.05},
              {"R", 0.0},
              {"seeds", std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}},
              {"policies", {"rosc", "rhc", "chc"}}};
}

int run_sweep(const SweepCmd& cmd) {
  json cfg = cmd.paper_defaults ? paper_defaults() : json::object();
  cfg.update(load_config(cmd.config));
  cmd.ov.apply(cfg);

  // Flag spellings that need translation into the spec schema.
  if (cfg.contains("values") && cfg.at("values").is_string()) {
    cfg["values"] = parse_list(cfg.at("values").get<std::string>());
  }
  if (cfg.contains("seed_count")) {
    const int count = cfg.at("seed_count").get<int>();
    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= count; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    cfg["seeds"] = seeds;
    cfg.erase("seed_count");
  }
  if (cfg.contains("seeds") && cfg.at("seeds").is_string()) {
    std::vector<std::uint64_t> seeds;
    for (double s : parse_list(cfg.at("seeds").get<std::string>())) {
      if (s < 0 || s != std::floor(s)) throw UsageError("seeds must be nonnegative integers");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
    cfg["seeds"] = seeds;
  }
  if (cfg.contains("policies") && cfg.at("policies").is_string()) {
    std::vector<std::string> names;
    std::stringstream ss(cfg.at("policies").get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
    cfg["policies"] = names;
  }
  if (cfg.contains("no_warmup")) {
    cfg["warmup"] = !cfg.at("no_warmup").get<bool>();
    cfg.erase("no_warmup");
  }
  if (cfg.contains("seeds") && cfg.at("seeds").empty()) throw UsageError("sweep: the seed list is empty");

  ExperimentSpec spec = experiment_from_json(cfg);
  validate(spec);
  const fs::path dir = prepare_out(cfg);
  json effective = to_json(spec);
  effective["out"] = dir.string();
  write_json(dir / "effective_config.json", effective);

  const ExperimentReport report = run_experiment(spec);
  write_report(dir, spec, report);
  for (const auto& s : report.summary) {
    std::cout << (spec.axis.empty() ? "point" : spec.axis) << "=" << format_number(s.value) << " " << s.policy
              << ": cost/slot " << format_number(s.mean_cost_per_slot) << " runtime "
              << format_number(s.mean_runtime_ms) << " ms (" << s.runs << " runs)\n";
  }
  for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
  return report.failures.empty() ? kExitOk : 1;
}

// ---- validate ----

struct ValidateCmd {
  CLI::App* app;
  std::string checks = "projection,lemma1,sampler,theorem1";
  std::size_t cases = 10000;
  std::size_t instances = 50;
  std::size_t updates = 1000;
  std::size_t tiny_instances = 20;
  int tiny_seeds = 100;
  std::uint64_t seed = 1;
  std::string out;
};

void setup_validate(CLI::App& root, ValidateCmd& cmd) {
  cmd.app = root.add_subcommand("validate", "Run the randomized self-check suites");
  auto* app = cmd.app;
  app->add_option("--checks", cmd.checks, "Comma list of projection, lemma1, sampler, theorem1");
  app->add_option("--cases", cmd.cases, "Projection cases");
  app->add_option("--instances", cmd.instances, "Window-equivalence instances");
  app->add_option("--updates", cmd.updates, "Sampler updates");
  app->add_option("--tiny-instances", cmd.tiny_instances, "Regret-ceiling instances");
  app->add_option("--tiny-seeds", cmd.tiny_seeds, "Seeds per regret-ceiling instance");
  app->add_option("--seed", cmd.seed, "Suite seed");
  app->add_option("--out", cmd.out, "Output directory for validation.json");
}

int run_validate(const ValidateCmd& cmd) {
  std::vector<std::string> names;
  std::stringstream ss(cmd.checks);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto& known = validation_checks();
    if (std::find(known.begin(), known.end(), item) == known.end()) throw UsageError("unknown check '" + item + "'");
    names.push_back(item);
  }
  if (names.empty()) throw UsageError("validate: no checks selected");

  json checks = json::array();
  bool all = true;
  for (const auto& name : names) {
    CheckResult r;
    if (name == "projection") {
      r = check_projection(cmd.cases, cmd.seed);
    } else if (name == "lemma1") {
      r = check_window_equivalence(cmd.instances, cmd.seed);
    } else if (name == "sampler") {
      r = check_sampler(cmd.updates, cmd.seed);
    } else {
      r = check_regret_ceiling(cmd.tiny_instances, cmd.tiny_seeds, cmd.seed);
    }
    all = all && r.passed();
    checks.push_back(to_json(r));
  }
  const json report{{"passed", all}, {"checks", checks}};
  std::cout << report.dump(2) << '\n';
  if (!cmd.out.empty()) {
    fs::create_directories(cmd.out);
    write_json(fs::path(cmd.out) / "validation.json", report);
    write_json(fs::path(cmd.out) / "effective_config.json",
               json{{"checks", names},
                    {"cases", cmd.cases},
                    {"instances", cmd.instances},
                    {"updates", cmd.updates},
                    {"tiny_instances", cmd.tiny_instances},
                    {"tiny_seeds", cmd.tiny_seeds},
                    {"seed", cmd.seed}});
  }
  return all ? kExitOk : kExitValidation;
}

// ---- bound ----

struct BoundCmd {
  CLI::App* app;
  std::string config;
  Overrides ov;
};

void setup_bound(CLI::App& root, BoundCmd& cmd) {
  cmd.app = root.add_subcommand("bound", "Evaluate the regret bound of the online policy");
  auto* app = cmd.app;
  app->add_option("--config", cmd.config, "JSON config file");
  cmd.ov.add<std::string>(app, "--trace", {"trace"}, "Measure N, T, U and H_T from this trace");
  cmd.ov.add<double>(app, "--alpha", {"alpha"}, "Forwarding cost per request");
  cmd.ov.add<double>(app, "--beta", {"beta"}, "beta* (uniform)");
  cmd.ov.add<int>(app, "--M", {"M"}, "Cache capacity");
  cmd.ov.add<std::size_t>(app, "--N", {"N"}, "Number of services");
  cmd.ov.add<double>(app, "--T", {"T"}, "Number of slots");
  cmd.ov.add<double>(app, "--U", {"U"}, "Requests per slot");
  cmd.ov.add<int>(app, "--K", {"K"}, "Number of sample paths");
  cmd.ov.add<int>(app, "--W", {"W"}, "Prediction window");
  cmd.ov.add<double>(app, "--H", {"H"}, "Path length H_T");
  cmd.ov.add<std::string>(app, "--out", {"out"}, "Output directory");
}

int run_bound(const BoundCmd& cmd) {
  json cfg = load_config(cmd.config);
  cmd.ov.apply(cfg);
  const double alpha = cfg.value("alpha", 0.05);
  const double beta = cfg.value("beta", 10.0);
  const int m = cfg.value("M", 10);
  std::size_t n = cfg.value("N", std::size_t{1000});
  double horizon = cfg.value("T", 10000.0);
  double cap = cfg.value("U", 200.0);
  double h = cfg.value("H", 0.0);
  if (cfg.contains("trace")) {
    const ArrivalTrace trace = read_trace_files(cfg.at("trace").get<std::string>());
    if (!cfg.contains("N")) n = trace.services();
    if (!cfg.contains("T")) horizon = static_cast<double>(trace.horizon());
    if (!cfg.contains("U")) cap = trace.cap().value_or(trace.max_slot_total());
    if (!cfg.contains("H")) h = path_length(trace, m);
  }
  if (n < static_cast<std::size_t>(std::max(m, 1))) throw UsageError("bound: need N >= M");
  const CostModel cost = CostModel::uniform(n, alpha, beta, m);
  const auto terms = regret_bound_terms(cost, n, horizon, cap, cfg.value("K", 100), cfg.value("W", 10), h);
  json result{{"inputs",
               {{"alpha", alpha},
                {"beta_star", beta},
                {"M", m},
                {"N", n},
                {"T", horizon},
                {"U", cap},
                {"K", cfg.value("K", 100)},
                {"W", cfg.value("W", 10)},
                {"H_T", h}}},
              {"gamma", horizon > 0 ? std::sqrt(h / horizon) : 0.0},
              {"terms", {{"tracking", terms.tracking}, {"rounding", terms.rounding}, {"path", terms.path}}},
              {"bound", terms.total()}};
  std::cout << result.dump(2) << '\n';
  if (cfg.contains("out")) {
    const fs::path dir = prepare_out(cfg);
    write_json(dir / "bound.json", result);
    write_json(dir / "effective_config.json", cfg);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized online service caching simulator"};
  app.require_subcommand(1);
  GenerateCmd generate;
  RunCmd run;
  SweepCmd sweep;
  ValidateCmd validate_cmd;
  BoundCmd bound;
  setup_generate(app, generate);
  setup_run(app, run);
  setup_sweep(app, sweep);
  setup_validate(app, validate_cmd);
  setup_bound(app, bound);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate.app->parsed()) return run_generate(generate);
    if (run.app->parsed()) return run_run(run);
    if (sweep.app->parsed()) return run_sweep(sweep);
    if (validate_cmd.app->parsed()) return run_validate(validate_cmd);
    if (bound.app->parsed()) return run_bound(bound);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "usage error: bad config value: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
