#pragma once

// Per-run results shared by the online policy and every baseline, plus their
// on-disk form: CSV `t,forward_cost,switch_cost,total_cost` and a JSON
// summary `{policy, config, total_cost, runtime_ms, seed}`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "roscsim/model.hpp"

namespace roscsim {

struct RunRecord {
  std::string policy;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  Vec forward_cost;              // per slot
  Vec switch_cost;               // per slot
  std::vector<Vec> decisions;    // X_1..X_T (binary or fractional)
  std::vector<Vec> fractional;   // online policy only: P'_1..P'_T before rounding
  double total_cost = 0.0;       // sum_t (forward_t + switch_t) in slot order
  double runtime_ms = 0.0;
  std::size_t rebalance_moves = 0;

  std::size_t horizon() const { return decisions.size(); }
  double cost_per_slot() const;
};

// Appends slot t's decision and its true cost.
void record_slot(RunRecord& record, const ArrivalTrace& trace, long t, Vec decision,
                 const CostModel& cost);

// Costs a complete decision sequence against the true trace.
RunRecord make_record(std::string policy, const ArrivalTrace& trace, std::vector<Vec> decisions,
                      const CostModel& cost);

// Recomputes the total from the per-slot columns.
double sum_slot_costs(const RunRecord& record);

void write_run_csv(std::ostream& out, const RunRecord& record);
nlohmann::json run_summary(const RunRecord& record);
// Writes `<stem>.csv` and `<stem>.json`.
void write_run_files(const std::filesystem::path& stem, const RunRecord& record);

struct RunCsvRow {
  long t = 0;
  double forward = 0.0;
  double switching = 0.0;
  double total = 0.0;
};
std::vector<RunCsvRow> read_run_csv(std::istream& in);

nlohmann::json to_json(const CostModel& cost);

}  // namespace roscsim
