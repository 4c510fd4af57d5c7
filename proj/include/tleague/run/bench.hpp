#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tleague/run/config.hpp"

namespace tleague::run {

struct BenchResult {
  std::string scenario;
  std::uint32_t m_g = 0;
  std::uint32_t m_l = 0;
  std::uint32_t m_a = 0;
  double rfps = 0.0;
  double cfps = 0.0;
  double duration_s = 0.0;

  std::string MetricsLine() const;  // ts=... style line
  std::string CsvLine() const;      // scenario,m_g,m_l,m_a,rfps,cfps,duration_s
};

struct BenchOptions {
  double duration_s = 30.0;  // timed window, after warm-up
  double warmup_s = 2.0;
  std::uint32_t learner_step_delay_ms = 0;  // 0 keeps the learner at speed
  std::uint64_t seed = 7;
};

std::vector<std::string> BenchScenarioNames();  // rps-1x1x4, rps-1x2x8, grid-1x2x8

// Runs the full concurrent system for the scenario's topology and measures
// received/consumed frames per second over the timed window. Unknown
// scenario names throw std::invalid_argument.
BenchResult RunBench(const std::string& scenario, const BenchOptions& opts);

// Appends the CSV line (with a header when creating the file).
void AppendBenchCsv(const std::string& path, const BenchResult& result);

}  // namespace tleague::run
