#include "fse/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <thread>

#include "fse/errors.hpp"
#include "fse/rng.hpp"

namespace fse {

namespace {

std::vector<int> eligible_classes(const LabeledPool& pool, std::size_t need) {
  std::vector<int> out;
  for (const auto& c : pool.classes)
    if (c.count() >= need) out.push_back(c.class_id);
  return out;
}

// One with-replacement task from its own substream.
Task make_task(const LabeledPool& pool, const std::vector<int>& eligible,
               int ways, int shots, int queries, std::uint64_t task_seed) {
  Rng rng(task_seed);
  std::vector<int> pick = eligible;
  rng.partial_shuffle(pick, static_cast<std::size_t>(ways));
  pick.resize(static_cast<std::size_t>(ways));
  std::sort(pick.begin(), pick.end());

  Task task;
  task.class_subset = pick;
  const std::size_t take = static_cast<std::size_t>(shots + queries);
  for (int cid : pick) {
    const auto& cls = pool.classes[static_cast<std::size_t>(cid)];
    std::vector<int> idx(cls.count());
    std::iota(idx.begin(), idx.end(), 0);
    rng.partial_shuffle(idx, take);
    std::vector<int> sup(idx.begin(), idx.begin() + shots);
    std::vector<int> qry(idx.begin() + shots, idx.begin() + take);
    std::sort(sup.begin(), sup.end());
    std::sort(qry.begin(), qry.end());
    task.support.push_back(std::move(sup));
    task.query.push_back(std::move(qry));
  }
  return task;
}

}  // namespace

std::vector<Task> sample_with_replacement(const LabeledPool& pool,
                                          const TaskSpec& spec,
                                          std::uint64_t seed,
                                          unsigned threads) {
  spec.validate(/*require_task_count=*/true);
  const std::size_t need = static_cast<std::size_t>(spec.shots + spec.queries);
  const auto eligible = eligible_classes(pool, need);
  if (static_cast<int>(eligible.size()) < spec.ways)
    throw ConfigError("sampler: only " + std::to_string(eligible.size()) +
                      " classes have >= " + std::to_string(need) +
                      " samples, need " + std::to_string(spec.ways));

  const std::size_t total = static_cast<std::size_t>(*spec.task_count);
  std::vector<Task> tasks(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t)
      tasks[t] = make_task(pool, eligible, spec.ways, spec.shots, spec.queries,
                           derive_seed(seed, t));
  };
  if (threads <= 1 || total < 2) {
    work(0, total);
  } else {
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(total));
    std::vector<std::thread> pool_threads;
    for (unsigned i = 0; i < n; ++i) {
      std::size_t begin = total * i / n;
      std::size_t end = total * (i + 1) / n;
      pool_threads.emplace_back(work, begin, end);
    }
    for (auto& th : pool_threads) th.join();
  }
  return tasks;
}

std::vector<Task> sample_until_depleted(const LabeledPool& pool, int ways,
                                        int shots, int queries,
                                        std::uint64_t seed) {
  if (ways < 2) throw ConfigError("sampler: ways must be >= 2");
  if (shots < 1 || queries < 1)
    throw ConfigError("sampler: shots and queries must be >= 1");

  Rng rng(derive_seed(seed, 0xd3a1ULL));
  const std::size_t take = static_cast<std::size_t>(shots + queries);

  std::vector<std::vector<int>> remaining(pool.class_count());
  for (std::size_t c = 0; c < pool.class_count(); ++c) {
    remaining[c].resize(pool.classes[c].count());
    std::iota(remaining[c].begin(), remaining[c].end(), 0);
  }

  std::vector<Task> tasks;
  for (;;) {
    // Eligibility re-evaluated each iteration: a class drops out once its
    // remaining pool shrinks below S+Q.
    std::vector<int> eligible;
    for (std::size_t c = 0; c < remaining.size(); ++c)
      if (remaining[c].size() >= take) eligible.push_back(static_cast<int>(c));
    if (static_cast<int>(eligible.size()) < ways) break;

    rng.partial_shuffle(eligible, static_cast<std::size_t>(ways));
    eligible.resize(static_cast<std::size_t>(ways));
    std::sort(eligible.begin(), eligible.end());

    Task task;
    task.class_subset = eligible;
    for (int cid : eligible) {
      auto& rem = remaining[static_cast<std::size_t>(cid)];
      // S support draws, then Q query draws excluding the support,
      // removed permanently afterwards.
      rng.partial_shuffle(rem, take);
      std::vector<int> sup(rem.begin(), rem.begin() + shots);
      std::vector<int> qry(rem.begin() + shots, rem.begin() + take);
      std::sort(sup.begin(), sup.end());
      std::sort(qry.begin(), qry.end());
      rem.erase(rem.begin(), rem.begin() + take);
      task.support.push_back(std::move(sup));
      task.query.push_back(std::move(qry));
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

long long estimate_task_count(long long classes, long long per_class,
                              long long ways, long long shots,
                              long long queries) {
  return (classes * per_class) / (ways * (queries + shots));
}

}  // namespace fse
