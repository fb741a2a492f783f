#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fse/task.hpp"

namespace fse {

enum class SamplingMode { WithReplacement, Depletion };

std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string& s);

/// A complete, replayable record of one evaluation run: the seed and spec
/// regenerate the task list; the accuracies make comparisons reproducible
/// without re-running the method.
struct RunManifest {
  std::uint64_t master_seed = 0;
  TaskSpec spec;
  SamplingMode sampling_mode = SamplingMode::WithReplacement;
  std::string method_id;
  std::uint64_t pool_hash = 0;
  std::vector<Task> tasks;
  std::vector<double> accuracies;

  std::uint64_t task_set_hash() const { return task_list_hash(tasks); }

  /// Throws DataError naming the offending field.
  void validate() const;
};

/// Stable field order, accuracies printed with 17 significant digits so the
/// round trip is bit-exact.
std::string serialize_manifest(const RunManifest& m);

RunManifest parse_manifest(const std::string& text);

RunManifest load_manifest(const std::string& path);
void save_manifest(const RunManifest& m, const std::string& path);

}  // namespace fse
