#pragma once

#include <string>
#include <vector>

#include "fse/pool.hpp"
#include "fse/task.hpp"

namespace fse {

enum class AdapterKind { Ncc, LogisticRegression, Oracle };

struct LrConfig {
  double l2_penalty = 1e-3;
  double step_size = 0.5;   // halved on loss increase (backtracking)
  int max_iters = 200;
};

/// Synthetic method for paired-statistics tests: per-task accuracy is
/// base + a task-difficulty term shared by every Oracle method on that
/// task + method-private noise, clamped to [0,1] and rounded to the
/// 1/(KQ) accuracy grid. Features are ignored.
struct OracleConfig {
  double base = 0.8;
  double difficulty_sd = 0.1;
  double noise_sd = 0.05;
  std::string salt = "oracle";  // distinguishes methods sharing tasks
};

struct Adapter {
  AdapterKind kind = AdapterKind::Ncc;
  bool l2_normalize = false;  // optional feature normalization before fit/predict
  LrConfig lr;
  OracleConfig oracle;

  static Adapter ncc(bool normalize = false) {
    Adapter a;
    a.kind = AdapterKind::Ncc;
    a.l2_normalize = normalize;
    return a;
  }
  static Adapter logistic(LrConfig cfg = {}, bool normalize = false) {
    Adapter a;
    a.kind = AdapterKind::LogisticRegression;
    a.lr = cfg;
    a.l2_normalize = normalize;
    return a;
  }
  static Adapter make_oracle(OracleConfig cfg) {
    Adapter a;
    a.kind = AdapterKind::Oracle;
    a.oracle = cfg;
    return a;
  }
};

/// One centroid per task class, in task-local class order.
struct NccModel {
  std::vector<FeatureVector> centroids;
};

NccModel ncc_fit(const std::vector<std::vector<FeatureVector>>& support);

/// Nearest centroid by squared Euclidean distance; ties break toward the
/// lowest local class index.
int ncc_predict(const NccModel& model, const FeatureVector& x);

/// Multinomial logistic regression, K x (dim+1) weights (last column is the
/// unpenalized bias), trained by full-batch gradient descent from zero init.
struct LrModel {
  std::vector<std::vector<double>> weights;  // [class][dim+1]
};

LrModel lr_fit(const std::vector<std::vector<FeatureVector>>& support,
               const LrConfig& cfg);

int lr_predict(const LrModel& model, const FeatureVector& x);

/// Training objective at the given weights; exposed for gradient checks.
double lr_loss(const LrModel& model,
               const std::vector<std::vector<FeatureVector>>& support,
               double l2_penalty);

/// Per-task accuracy: fraction of the K*Q queries assigned to their own
/// class by the adapter fitted on the task support set.
double evaluate_task(const Adapter& adapter, const Task& task,
                     const LabeledPool& pool);

}  // namespace fse
