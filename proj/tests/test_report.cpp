#include <doctest.h>

#include <cmath>

#include "fse/errors.hpp"
#include "fse/protocol.hpp"
#include "fse/report.hpp"
#include "fse/rng.hpp"
#include "fse/sampler.hpp"
#include "fse/variance_lab.hpp"

using namespace fse;

namespace {

LabeledPool make_pool() {
  SynthConfig cfg;
  cfg.class_specs = {{-1.0, 1.0}, {1.0, 1.0}};
  cfg.n_total = 400;
  cfg.seed = 13;
  return gen_gaussian_pool(cfg);
}

RunManifest manifest_for(const LabeledPool& pool, const std::string& method,
                         double base, SamplingMode mode, std::uint64_t seed) {
  RunManifest m;
  m.master_seed = seed;
  m.spec = {2, 5, 15, {}};
  m.sampling_mode = mode;
  m.method_id = method;
  m.pool_hash = pool.hash();
  if (mode == SamplingMode::WithReplacement) {
    m.spec.task_count = 60;
    m.tasks = sample_with_replacement(pool, m.spec, seed);
  } else {
    m.tasks = sample_until_depleted(pool, 2, 5, 15, seed);
  }
  // synthetic accuracies around `base` with small per-task noise tied to
  // the task list position, so identical task lists pair exactly
  Rng rng(derive_seed(seed, 0xaccu));
  m.accuracies.clear();
  for (std::size_t t = 0; t < m.tasks.size(); ++t)
    m.accuracies.push_back(base + 0.01 * rng.normal());
  return m;
}

}  // namespace

TEST_CASE("compare_runs produces an antisymmetric matrix") {
  auto pool = make_pool();
  std::vector<RunManifest> runs;
  runs.push_back(manifest_for(pool, "good", 0.9, SamplingMode::WithReplacement, 1));
  runs.push_back(manifest_for(pool, "bad", 0.6, SamplingMode::WithReplacement, 1));
  runs.push_back(manifest_for(pool, "good", 0.9, SamplingMode::Depletion, 2));
  runs.push_back(manifest_for(pool, "bad", 0.6, SamplingMode::Depletion, 2));

  auto m = compare_runs(runs);
  REQUIRE(m.methods.size() == 2);
  const auto& gb = m.cells[0][1];
  const auto& bg = m.cells[1][0];
  REQUIRE(gb.closed.has_value());
  REQUIRE(gb.open.has_value());
  REQUIRE(gb.paired.has_value());  // same seed => identical task lists
  CHECK(*gb.closed == Verdict::Plus);
  CHECK(*bg.closed == Verdict::Minus);
  CHECK(*gb.open == Verdict::Plus);
  CHECK(*bg.open == Verdict::Minus);
  CHECK(*gb.paired == Verdict::Plus);
  CHECK(*bg.paired == Verdict::Minus);
}

TEST_CASE("a method against itself is never conclusive") {
  auto pool = make_pool();
  std::vector<RunManifest> runs;
  runs.push_back(manifest_for(pool, "m1", 0.8, SamplingMode::WithReplacement, 5));
  auto twin = runs[0];
  twin.method_id = "m2";
  runs.push_back(twin);
  auto m = compare_runs(runs);
  CHECK(*m.cells[0][1].closed == Verdict::Zero);
  CHECK(*m.cells[0][1].paired == Verdict::Zero);  // all deltas exactly 0
  CHECK(!m.cells[0][1].open.has_value());  // no depletion manifests
}

TEST_CASE("constant positive delta gives a paired Plus with zero width") {
  auto pool = make_pool();
  auto a = manifest_for(pool, "a", 0.8, SamplingMode::Depletion, 9);
  auto b = a;
  b.method_id = "b";
  for (auto& x : b.accuracies) x -= 0.05;
  auto m = compare_runs({a, b});
  CHECK(*m.cells[0][1].paired == Verdict::Plus);
  CHECK(*m.cells[1][0].paired == Verdict::Minus);
  // interval on constant deltas has zero width
  auto ps = paired_series({a.accuracies, a.task_set_hash()},
                          {b.accuracies, b.task_set_hash()});
  auto ci = paired_ci(ps);
  CHECK(ci.mean == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(ci.half_width == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compare_runs preconditions") {
  auto pool = make_pool();
  auto a = manifest_for(pool, "solo", 0.8, SamplingMode::WithReplacement, 1);
  CHECK_THROWS_AS(compare_runs({a}), ConfigError);

  // two methods but nothing comparable: different pool hashes, no shared
  // task lists
  auto b = manifest_for(pool, "other", 0.7, SamplingMode::WithReplacement, 2);
  b.pool_hash = a.pool_hash + 1;
  CHECK_THROWS_AS(compare_runs({a, b}), ConfigError);
}

TEST_CASE("conclusiveness report counts and inversion detection") {
  SignificanceMatrix m;
  m.methods = {"x", "y"};
  m.cells.assign(2, std::vector<MatrixCell>(2));
  m.cells[0][1].closed = Verdict::Plus;
  m.cells[0][1].paired = Verdict::Minus;  // inversion
  m.cells[0][1].open = Verdict::Zero;     // inconclusive, not counted
  m.cells[1][0].closed = Verdict::Minus;
  m.cells[1][0].paired = Verdict::Plus;

  auto r = conclusiveness_report({m});
  CHECK(r.closed == 2);
  CHECK(r.open == 0);
  CHECK(r.paired == 2);
  CHECK(r.inversions == 2);
  CHECK_FALSE(r.paired_below_open);

  SignificanceMatrix open_only;
  open_only.methods = {"x", "y"};
  open_only.cells.assign(2, std::vector<MatrixCell>(2));
  open_only.cells[0][1].open = Verdict::Plus;
  auto r2 = conclusiveness_report({open_only});
  CHECK(r2.open == 1);
  CHECK(r2.paired == 0);
  CHECK(r2.paired_below_open);

  CHECK_THROWS_AS(conclusiveness_report({}), ConfigError);
}

TEST_CASE("matrix JSON round trip") {
  SignificanceMatrix m;
  m.methods = {"ncc", "lr", "oracle"};
  m.cells.assign(3, std::vector<MatrixCell>(3));
  m.cells[0][1].closed = Verdict::Plus;
  m.cells[0][1].paired = Verdict::Zero;
  m.cells[1][0].closed = Verdict::Minus;
  m.cells[2][0].open = Verdict::Minus;

  auto text = matrix_to_json(m);
  auto back = matrix_from_json(text);
  CHECK(back.methods == m.methods);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(back.cells[i][j].closed == m.cells[i][j].closed);
      CHECK(back.cells[i][j].open == m.cells[i][j].open);
      CHECK(back.cells[i][j].paired == m.cells[i][j].paired);
    }
  CHECK(matrix_to_json(back) == text);  // byte stable
  CHECK_THROWS_AS(matrix_from_json("nope"), DataError);
  CHECK_THROWS_AS(matrix_from_json("{\"methods\": [\"a\"]}"), DataError);
}

TEST_CASE("matrix text rendering shows verdict glyphs") {
  SignificanceMatrix m;
  m.methods = {"a", "b"};
  m.cells.assign(2, std::vector<MatrixCell>(2));
  m.cells[0][1].closed = Verdict::Plus;
  m.cells[1][0].closed = Verdict::Minus;
  auto text = matrix_to_text(m);
  CHECK(text.find("+..") != std::string::npos);
  CHECK(text.find("-..") != std::string::npos);
  CHECK(verdict_char(Verdict::Plus) == '+');
  CHECK(verdict_char(Verdict::Zero) == '0');
  CHECK(verdict_char(Verdict::Minus) == '-');
}

TEST_CASE("sweep CSV round trip") {
  std::vector<SweepPoint> pts = {{1, 0.012345678901234567, 20.0, 50},
                                 {15, 3.25e-05, 2.5, 50}};
  auto text = sweep_to_csv(pts);
  CHECK(text.rfind("Q,var_abar,mean_T,repetitions\n", 0) == 0);
  auto back = sweep_from_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].q == 1);
  CHECK(back[0].var_abar == pts[0].var_abar);  // bit exact via %.17g
  CHECK(back[1].mean_tasks == 2.5);
  CHECK(back[1].repetitions == 50);
  CHECK_THROWS_AS(sweep_from_csv("wrong,header\n1,2\n"), DataError);
  CHECK_THROWS_AS(sweep_from_csv("Q,var_abar,mean_T,repetitions\n"), DataError);
}

TEST_CASE("run_protocol end to end on both modes") {
  auto pool = make_pool();
  ProtocolConfig cfg;
  cfg.mode = SamplingMode::WithReplacement;
  cfg.spec = {2, 5, 15, 100};
  cfg.adapter = Adapter::ncc();
  cfg.method_id = "ncc";
  cfg.master_seed = 31;
  auto closed = run_protocol(cfg, pool);
  CHECK(closed.manifest.tasks.size() == 100);
  CHECK(closed.manifest.accuracies.size() == 100);
  CHECK(closed.interval.mode == CiMode::Normal);
  CHECK(closed.interval.mean > 0.7);

  cfg.mode = SamplingMode::Depletion;
  cfg.spec.task_count.reset();
  auto open = run_protocol(cfg, pool);
  CHECK(open.manifest.tasks.size() >= 2);
  CHECK(open.interval.mode == CiMode::Student);
  // parallel evaluation is output-identical
  cfg.threads = 4;
  auto open4 = run_protocol(cfg, pool);
  CHECK(open4.manifest.accuracies == open.manifest.accuracies);
  CHECK(open4.interval.half_width == open.interval.half_width);
}
