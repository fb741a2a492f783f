#include "fse/task.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "fse/errors.hpp"
#include "fse/rng.hpp"

namespace fse {

void TaskSpec::validate(bool require_task_count) const {
  if (ways < 2) throw ConfigError("spec: ways must be >= 2");
  if (shots < 1) throw ConfigError("spec: shots must be >= 1");
  if (queries < 1) throw ConfigError("spec: queries must be >= 1");
  if (task_count && *task_count < 1)
    throw ConfigError("spec: task count must be >= 1 when present");
  if (require_task_count && !task_count)
    throw ConfigError("spec: task count required in with-replacement mode");
}

void validate_task(const Task& task, const LabeledPool& pool, int ways,
                   int shots, int queries) {
  if (static_cast<int>(task.class_subset.size()) != ways)
    throw DataError("task: class subset size != ways");
  if (task.support.size() != task.class_subset.size() ||
      task.query.size() != task.class_subset.size())
    throw DataError("task: support/query lists misaligned with class subset");
  std::set<int> distinct(task.class_subset.begin(), task.class_subset.end());
  if (distinct.size() != task.class_subset.size())
    throw DataError("task: duplicate class in subset");

  for (std::size_t i = 0; i < task.class_subset.size(); ++i) {
    int cid = task.class_subset[i];
    if (cid < 0 || cid >= static_cast<int>(pool.class_count()))
      throw DataError("task: class id " + std::to_string(cid) +
                      " out of range");
    const auto& cls = pool.classes[static_cast<std::size_t>(cid)];
    if (static_cast<int>(task.support[i].size()) != shots)
      throw DataError("task: support size != shots for class " +
                      std::to_string(cid));
    if (static_cast<int>(task.query[i].size()) != queries)
      throw DataError("task: query size != queries for class " +
                      std::to_string(cid));
    std::set<int> used;
    for (const auto* list : {&task.support[i], &task.query[i]}) {
      for (int idx : *list) {
        if (idx < 0 || idx >= static_cast<int>(cls.count()))
          throw DataError("task: sample index out of range in class " +
                          std::to_string(cid));
        if (!used.insert(idx).second)
          throw DataError("task: support/query overlap in class " +
                          std::to_string(cid));
      }
    }
  }
}

std::uint64_t task_list_hash(const std::vector<Task>& tasks) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_u64(tasks.size(), h);
  for (const auto& t : tasks) {
    for (int c : t.class_subset) h = fnv1a_u64(static_cast<std::uint64_t>(c), h);
    for (const auto& s : t.support)
      for (int i : s) h = fnv1a_u64(static_cast<std::uint64_t>(i), h);
    for (const auto& q : t.query)
      for (int i : q) h = fnv1a_u64(static_cast<std::uint64_t>(i), h);
  }
  return h;
}

}  // namespace fse
