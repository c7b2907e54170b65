#include "roscsim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roscsim/errors.hpp"

namespace roscsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r' || last[-1] == '\t')) --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("trace CSV: cannot parse number '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const ArrivalTrace& trace) {
  out << 't';
  for (std::size_t n = 1; n <= trace.services(); ++n) out << ",s" << n;
  out << '\n';
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    out << t;
    for (double v : trace.slot(static_cast<long>(t))) out << ',' << format_number(v);
    out << '\n';
  }
}

ArrivalTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace CSV: empty input");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "t") {
    throw std::runtime_error("trace CSV: header must be `t,s1,...,sN`");
  }
  const std::size_t services = header.size() - 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != services + 1) {
      throw DimensionError("trace CSV: row " + std::to_string(rows + 1) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(services + 1));
    }
    const double t = parse_number(cells[0]);
    if (t != static_cast<double>(rows + 1)) {
      throw std::runtime_error("trace CSV: slots must be consecutive starting at 1");
    }
    for (std::size_t n = 1; n <= services; ++n) values.push_back(parse_number(cells[n]));
    ++rows;
  }
  return ArrivalTrace(rows, services, std::move(values));
}

void write_trace_csv(const std::filesystem::path& path, const ArrivalTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace_csv(out, trace);
}

ArrivalTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace_csv(in);
}

nlohmann::json metadata_to_json(const TraceMetadata& meta) {
  return nlohmann::json{{"T", meta.horizon},     {"N", meta.services},
                        {"U", meta.cap},         {"seed", meta.seed},
                        {"generator", meta.generator}, {"params", meta.params}};
}

TraceMetadata metadata_from_json(const nlohmann::json& j) {
  TraceMetadata meta;
  meta.horizon = j.at("T").get<std::size_t>();
  meta.services = j.at("N").get<std::size_t>();
  meta.cap = j.at("U").get<double>();
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.generator = j.value("generator", std::string{});
  meta.params = j.value("params", nlohmann::json::object());
  return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_trace_files(const std::filesystem::path& csv_path, const ArrivalTrace& trace,
                       const TraceMetadata& meta) {
  write_trace_csv(csv_path, trace);
  std::ofstream out(sidecar_path(csv_path), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sidecar for " + csv_path.string());
  out << metadata_to_json(meta).dump(2) << '\n';
}

ArrivalTrace read_trace_files(const std::filesystem::path& csv_path, TraceMetadata* meta_out) {
  ArrivalTrace trace = read_trace_csv(csv_path);
  const auto side = sidecar_path(csv_path);
  TraceMetadata meta;
  meta.horizon = trace.horizon();
  meta.services = trace.services();
  meta.cap = trace.max_slot_total();
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    meta = metadata_from_json(nlohmann::json::parse(in));
    if (meta.horizon != trace.horizon() || meta.services != trace.services()) {
      throw DimensionError("trace sidecar T/N disagree with the CSV");
    }
    trace.set_cap(meta.cap);
  }
  if (meta_out) *meta_out = meta;
  return trace;
}

}  // namespace roscsim
