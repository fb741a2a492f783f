#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fse/pool.hpp"

namespace fse {

/// Episode shape: K ways, S shots, Q queries, and (with-replacement mode
/// only) the task count T.
struct TaskSpec {
  int ways = 0;
  int shots = 0;
  int queries = 0;
  std::optional<int> task_count;

  /// Throws ConfigError if any invariant is violated.
  void validate(bool require_task_count = false) const;

  bool operator==(const TaskSpec&) const = default;
};

/// One episode: K distinct class ids, and per selected class S support and
/// Q query sample indices (disjoint within the class).
struct Task {
  std::vector<int> class_subset;            // ascending class ids
  std::vector<std::vector<int>> support;    // support[i] for class_subset[i]
  std::vector<std::vector<int>> query;

  bool operator==(const Task&) const = default;
};

/// Check one task against its pool and spec shape; throws DataError.
void validate_task(const Task& task, const LabeledPool& pool, int ways,
                   int shots, int queries);

/// Order-sensitive content hash of a task list; identical task lists (same
/// pool indices) hash equal regardless of which method evaluates them.
std::uint64_t task_list_hash(const std::vector<Task>& tasks);

}  // namespace fse
