#pragma once

#include <cstdint>
#include <vector>

#include "fse/pool.hpp"
#include "fse/task.hpp"

namespace fse {

/// Sample spec.task_count tasks with replacement across tasks: each task
/// independently picks K classes (uniform, distinct within the task) and
/// S+Q distinct samples per class. Samples may recur across tasks.
/// Parallel generation with threads > 1 yields output identical to
/// sequential (per-task substreams derived from the seed).
std::vector<Task> sample_with_replacement(const LabeledPool& pool,
                                          const TaskSpec& spec,
                                          std::uint64_t seed,
                                          unsigned threads = 1);

/// Sample tasks without replacement until fewer than K classes have at
/// least S+Q samples remaining. May return an empty list.
std::vector<Task> sample_until_depleted(const LabeledPool& pool, int ways,
                                        int shots, int queries,
                                        std::uint64_t seed);

/// Closed-form task count for a balanced dataset:
/// floor(C*N / (K*(Q+S))).
long long estimate_task_count(long long classes, long long per_class,
                              long long ways, long long shots,
                              long long queries);

}  // namespace fse
