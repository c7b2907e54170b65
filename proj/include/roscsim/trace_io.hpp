#pragma once

// Trace files: a CSV with header `t,s1,...,sN` (one row per slot) and a JSON
// sidecar `{T, N, U, seed, generator, params}`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "roscsim/model.hpp"

namespace roscsim {

struct TraceMetadata {
  std::size_t horizon = 0;
  std::size_t services = 0;
  double cap = 0.0;  // U
  std::uint64_t seed = 0;
  std::string generator;
  nlohmann::json params = nlohmann::json::object();
};

// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

void write_trace_csv(std::ostream& out, const ArrivalTrace& trace);
ArrivalTrace read_trace_csv(std::istream& in);

void write_trace_csv(const std::filesystem::path& path, const ArrivalTrace& trace);
ArrivalTrace read_trace_csv(const std::filesystem::path& path);

nlohmann::json metadata_to_json(const TraceMetadata& meta);
TraceMetadata metadata_from_json(const nlohmann::json& j);

// `<csv path>` with the extension replaced by `.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_trace_files(const std::filesystem::path& csv_path, const ArrivalTrace& trace,
                       const TraceMetadata& meta);
// Reads the CSV and, when present, the sidecar (whose U becomes the trace cap).
ArrivalTrace read_trace_files(const std::filesystem::path& csv_path,
                              TraceMetadata* meta_out = nullptr);

}  // namespace roscsim
