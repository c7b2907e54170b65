#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "roscsim/record.hpp"
#include "roscsim/trace_io.hpp"

using namespace roscsim;

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("trace CSV round trip") {
  const auto trace = ArrivalTrace::from_rows({{1, 0, 2.5}, {0, 0, 0}, {7, 1e-7, 3}});
  std::stringstream ss;
  write_trace_csv(ss, trace);
  CHECK(ss.str().rfind("t,s1,s2,s3\n1,1,0,2.5\n", 0) == 0);
  const auto back = read_trace_csv(ss);
  CHECK(back.values() == trace.values());
  CHECK(back.horizon() == 3);
}

TEST_CASE("trace CSV rejects malformed input") {
  std::stringstream bad_header("x,s1\n1,2\n");
  CHECK_THROWS(read_trace_csv(bad_header));
  std::stringstream ragged("t,s1,s2\n1,2\n");
  CHECK_THROWS(read_trace_csv(ragged));
  std::stringstream gap("t,s1\n1,2\n3,4\n");
  CHECK_THROWS(read_trace_csv(gap));
  std::stringstream negative("t,s1\n1,-2\n");
  CHECK_THROWS(read_trace_csv(negative));
}

TEST_CASE("trace files with sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "roscsim_trace_io_test";
  std::filesystem::create_directories(dir);
  auto trace = ArrivalTrace::from_rows({{1, 2}, {3, 0}});
  TraceMetadata meta{2, 2, 4.0, 9, "replacement", {{"zipf_exponent", 0.8}}};
  write_trace_files(dir / "t.csv", trace, meta);
  CHECK(std::filesystem::exists(dir / "t.json"));
  TraceMetadata read_meta;
  const auto back = read_trace_files(dir / "t.csv", &read_meta);
  CHECK(back.cap().value() == 4.0);
  CHECK(read_meta.seed == 9);
  CHECK(read_meta.generator == "replacement");
  CHECK(metadata_to_json(read_meta) == metadata_to_json(meta));
  std::filesystem::remove_all(dir);
}

TEST_CASE("run CSV totals reproduce the record total exactly") {
  const auto trace = ArrivalTrace::from_rows({{13, 7, 1}, {3, 9, 4}, {0.3, 5, 8}});
  const CostModel cost(0.07, Vec{1.3, 2.9, 0.7}, 2);
  const auto rec = make_record("x", trace, {{0.3, 0.6, 0}, {1, 0, 0.9}, {0.1, 0.2, 0.3}}, cost);
  CHECK(rec.total_cost == total_cost(trace, rec.decisions, cost));
  std::stringstream ss;
  write_run_csv(ss, rec);
  const auto rows = read_run_csv(ss);
  REQUIRE(rows.size() == 3);
  double total = 0.0;
  for (const auto& r : rows) total += r.forward + r.switching;
  CHECK(total == rec.total_cost);
  CHECK(sum_slot_costs(rec) == rec.total_cost);
}
