#pragma once

#include <cstdint>
#include <string>

#include "fse/adapters.hpp"
#include "fse/manifest.hpp"
#include "fse/pool.hpp"
#include "fse/stats.hpp"

namespace fse {

struct ProtocolConfig {
  SamplingMode mode = SamplingMode::Depletion;
  TaskSpec spec;
  Adapter adapter;
  std::string method_id = "method";
  double p_limit = 0.95;
  std::uint64_t master_seed = 0;  // no default in the CLI: must be explicit
  unsigned threads = 1;
};

struct ProtocolResult {
  RunManifest manifest;
  IntervalEstimate interval;  // normal CI for with-replacement, Student for
                              // depletion
};

/// Sample tasks per mode, evaluate the adapter on every task, and compute
/// the mode's confidence interval. Throws InsufficientTasksError when
/// depletion yields fewer than 2 tasks.
ProtocolResult run_protocol(const ProtocolConfig& config,
                            const LabeledPool& pool);

}  // namespace fse
