#include "fse/protocol.hpp"

#include <string>
#include <thread>
#include <vector>

#include "fse/errors.hpp"
#include "fse/sampler.hpp"

namespace fse {

ProtocolResult run_protocol(const ProtocolConfig& config,
                            const LabeledPool& pool) {
  const bool with_repl = config.mode == SamplingMode::WithReplacement;
  config.spec.validate(with_repl);
  if (!with_repl && config.spec.task_count)
    throw ConfigError("protocol: task count is only valid with replacement");

  ProtocolResult result;
  result.manifest.master_seed = config.master_seed;
  result.manifest.spec = config.spec;
  result.manifest.sampling_mode = config.mode;
  result.manifest.method_id = config.method_id;
  result.manifest.pool_hash = pool.hash();

  if (with_repl) {
    result.manifest.tasks = sample_with_replacement(
        pool, config.spec, config.master_seed, config.threads);
  } else {
    result.manifest.tasks =
        sample_until_depleted(pool, config.spec.ways, config.spec.shots,
                              config.spec.queries, config.master_seed);
  }

  const std::size_t n = result.manifest.tasks.size();
  result.manifest.accuracies.assign(n, 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t)
      result.manifest.accuracies[t] =
          evaluate_task(config.adapter, result.manifest.tasks[t], pool);
  };
  if (config.threads <= 1 || n < 2) {
    work(0, n);
  } else {
    const unsigned nt = std::min<unsigned>(config.threads,
                                           static_cast<unsigned>(n));
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < nt; ++i)
      threads.emplace_back(work, n * i / nt, n * (i + 1) / nt);
    for (auto& th : threads) th.join();
  }

  AccuracySeries series;
  series.values = result.manifest.accuracies;
  series.task_hash = result.manifest.task_set_hash();
  if (!with_repl && n < 2)
    throw InsufficientTasksError(
        "protocol: insufficient tasks for open CI (depletion yielded " +
            std::to_string(n) + ")",
        n);
  result.interval = with_repl ? normal_ci(series, config.p_limit)
                              : student_ci(series, config.p_limit);
  return result;
}

}  // namespace fse
