#pragma once

#include <filesystem>
#include <string>

#include "physr/bench.hpp"
#include "physr/pipeline.hpp"

namespace physr::report {

// Stable output names inside a run directory.
inline constexpr const char* kReportName = "report.json";
inline constexpr const char* kFieldName = "field.ply";
inline constexpr const char* kEvalCsvName = "eval.csv";
inline constexpr const char* kEvalJsonName = "eval.json";
inline constexpr const char* kBenchName = "bench.json";

// Mass value, range, per-material breakdown, b_adap, stats and timings.
std::string report_json(const PropertyReport& report);

// Vertex columns x, y, z, material (dominant index), one column per shared
// property (range midpoint) plus <property>_min and <property>_max when any
// value is a range.
void write_field_ply(const std::filesystem::path& path, const densify::PropertyField& field);

// Writes report.json and field.ply into `dir`, creating it.
void write_run_outputs(const std::filesystem::path& dir, const PropertyReport& report);

std::string bench_json(const bench::BenchReport& report);

}  // namespace physr::report
