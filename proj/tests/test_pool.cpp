#include <doctest.h>

#include "fse/errors.hpp"
#include "fse/manifest.hpp"
#include "fse/pool.hpp"
#include "fse/rng.hpp"
#include "fse/sampler.hpp"

using namespace fse;

TEST_CASE("build_pool groups by first appearance") {
  auto pool = build_pool({{"a", {1.0}}, {"b", {2.0}}, {"a", {3.0}}});
  CHECK(pool.class_count() == 2);
  CHECK(pool.labels[0] == "a");
  CHECK(pool.classes[0].count() == 2);
  CHECK(pool.classes[1].count() == 1);
  CHECK(pool.classes[0].samples[1][0] == 3.0);  // record order preserved
}

TEST_CASE("build_pool rejects dimension mismatch and empty input") {
  CHECK_THROWS_AS(build_pool({{"a", {1.0}}, {"a", {1.0, 2.0}}}), DataError);
  CHECK_THROWS_AS(build_pool({}), DataError);
  CHECK_THROWS_AS(build_pool({{"a", {1.0 / 0.0}}}), DataError);
}

TEST_CASE("pool conservation on a DTD-scale balanced fixture") {
  std::vector<std::pair<std::string, FeatureVector>> records;
  for (int c = 0; c < 7; ++c)
    for (int i = 0; i < 120; ++i)
      records.push_back({"c" + std::to_string(c), {double(c), double(i)}});
  auto pool = build_pool(records);
  CHECK(pool.class_count() == 7);
  for (const auto& c : pool.classes) CHECK(c.count() == 120);
  CHECK(pool.total_samples() == records.size());
}

TEST_CASE("pool hash changes with content") {
  auto a = build_pool({{"a", {1.0}}, {"b", {2.0}}});
  auto b = build_pool({{"a", {1.0}}, {"b", {2.5}}});
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == build_pool({{"a", {1.0}}, {"b", {2.0}}}).hash());
}

namespace {

RunManifest sample_manifest(const LabeledPool& pool) {
  RunManifest m;
  m.master_seed = 42;
  m.spec = {2, 5, 15, 4};
  m.sampling_mode = SamplingMode::WithReplacement;
  m.method_id = "ncc";
  m.pool_hash = pool.hash();
  m.tasks = sample_with_replacement(pool, m.spec, m.master_seed);
  m.accuracies.assign(m.tasks.size(), 0.5);
  m.accuracies[0] = 1.0 / 3.0;  // exercise 17-digit round trip
  return m;
}

LabeledPool small_pool() {
  std::vector<std::pair<std::string, FeatureVector>> records;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 20; ++i)
      records.push_back({std::to_string(c), {double(c * 10 + i)}});
  return build_pool(records);
}

}  // namespace

TEST_CASE("manifest round trip is bit exact") {
  auto pool = small_pool();
  auto m = sample_manifest(pool);
  auto text = serialize_manifest(m);
  auto back = parse_manifest(text);
  CHECK(back.master_seed == m.master_seed);
  CHECK(back.spec == m.spec);
  CHECK(back.method_id == m.method_id);
  CHECK(back.tasks == m.tasks);
  CHECK(back.accuracies == m.accuracies);  // bit exact
  CHECK(serialize_manifest(back) == text);
}

TEST_CASE("manifest validation names the offending field") {
  auto pool = small_pool();
  auto m = sample_manifest(pool);
  m.accuracies.pop_back();
  CHECK_THROWS_WITH_AS(serialize_manifest(m),
                       doctest::Contains("accuracies"), DataError);
  CHECK_THROWS_AS(parse_manifest("{\"master_seed\": 1}"), DataError);
  CHECK_THROWS_AS(parse_manifest("not json"), DataError);
}

TEST_CASE("manifest replay with the same seed regenerates the task list") {
  auto pool = small_pool();
  auto m = sample_manifest(pool);
  auto replayed = sample_with_replacement(pool, m.spec, m.master_seed);
  CHECK(replayed == m.tasks);
  CHECK(task_list_hash(replayed) == m.task_set_hash());
}
