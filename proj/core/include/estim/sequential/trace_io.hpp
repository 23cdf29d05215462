#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "estim/sequential/driver.hpp"

namespace estim::seq {

struct TraceContext {
  std::string config_hash;
  std::size_t replicate = 0;
  std::vector<std::string> param_names;
};

/// One NDJSON line (no trailing newline) for an iteration record. Wall-clock
/// time is left out so identical runs give identical lines.
std::string to_ndjson(const IterationTrace& rec, const TraceContext& ctx);

/// Fields of a persisted trace line.
struct TraceRecord {
  std::string config_hash;
  std::size_t replicate = 0;
  std::size_t iteration = 0;
  ParamBounds bounds;
  std::size_t n_fresh = 0;
  std::size_t n_replay = 0;
  std::vector<double> theta_hat;
  std::vector<double> median;
  std::vector<double> sd;
  std::vector<double> bias;
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t B = 0;
  bool stopped = false;
  ParamBounds next_bounds;  // empty when stopped
};

TraceRecord parse_trace_line(const std::string& line);
std::vector<TraceRecord> read_trace(const std::string& path);

}  // namespace estim::seq
