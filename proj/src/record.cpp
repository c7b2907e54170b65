#include "roscsim/record.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roscsim/errors.hpp"
#include "roscsim/trace_io.hpp"

namespace roscsim {

double RunRecord::cost_per_slot() const {
  return decisions.empty() ? 0.0 : total_cost / static_cast<double>(decisions.size());
}

void record_slot(RunRecord& record, const ArrivalTrace& trace, long t, Vec decision,
                 const CostModel& cost) {
  if (static_cast<std::size_t>(t) != record.decisions.size() + 1) {
    throw ArgumentError("record_slot: slots must be recorded in order");
  }
  const Vec zero(trace.services(), 0.0);
  const Vec& prev = record.decisions.empty() ? zero : record.decisions.back();
  const double fwd = forwarding_cost(trace.slot(t), decision, cost.alpha());
  const double sw = switching_cost(prev, decision, cost.beta());
  record.forward_cost.push_back(fwd);
  record.switch_cost.push_back(sw);
  record.total_cost += fwd + sw;
  record.decisions.push_back(std::move(decision));
}

RunRecord make_record(std::string policy, const ArrivalTrace& trace, std::vector<Vec> decisions,
                      const CostModel& cost) {
  if (decisions.size() != trace.horizon()) throw DimensionError("make_record: need one decision per slot");
  RunRecord record;
  record.policy = std::move(policy);
  record.decisions.reserve(decisions.size());
  for (std::size_t t = 0; t < decisions.size(); ++t) {
    record_slot(record, trace, static_cast<long>(t + 1), std::move(decisions[t]), cost);
  }
  return record;
}

double sum_slot_costs(const RunRecord& record) {
  double sum = 0.0;
  for (std::size_t t = 0; t < record.forward_cost.size(); ++t) {
    sum += record.forward_cost[t] + record.switch_cost[t];
  }
  return sum;
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << "t,forward_cost,switch_cost,total_cost\n";
  for (std::size_t t = 0; t < record.forward_cost.size(); ++t) {
    out << (t + 1) << ',' << format_number(record.forward_cost[t]) << ','
        << format_number(record.switch_cost[t]) << ','
        << format_number(record.forward_cost[t] + record.switch_cost[t]) << '\n';
  }
}

nlohmann::json run_summary(const RunRecord& record) {
  return nlohmann::json{{"policy", record.policy},
                        {"config", record.config},
                        {"total_cost", record.total_cost},
                        {"runtime_ms", record.runtime_ms},
                        {"seed", record.seed}};
}

void write_run_files(const std::filesystem::path& stem, const RunRecord& record) {
  auto csv = stem;
  csv += ".csv";
  auto json = stem;
  json += ".json";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    write_run_csv(out, record);
  }
  std::ofstream out(json, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + json.string());
  out << run_summary(record).dump(2) << '\n';
}

std::vector<RunCsvRow> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,forward_cost,switch_cost,total_cost", 0) != 0) {
    throw std::runtime_error("run CSV: unexpected header");
  }
  std::vector<RunCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    RunCsvRow row;
    if (!(ss >> row.t >> row.forward >> row.switching >> row.total)) {
      throw std::runtime_error("run CSV: malformed row");
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const CostModel& cost) {
  nlohmann::json j{{"alpha", cost.alpha()},
                   {"beta_star", cost.beta_star()},
                   {"M", cost.capacity()},
                   {"gamma", cost.gamma()},
                   {"eta", cost.eta()}};
  const auto& beta = cost.beta();
  const bool uniform = std::all_of(beta.begin(), beta.end(), [&](double b) { return b == beta.front(); });
  if (uniform) {
    j["beta"] = beta.front();
  } else {
    j["beta"] = beta;
  }
  return j;
}

}  // namespace roscsim
