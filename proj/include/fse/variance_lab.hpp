#pragma once

#include <cstdint>
#include <vector>

#include "fse/adapters.hpp"
#include "fse/pool.hpp"

namespace fse {

/// 1-D class distribution N(mu, sigma).
struct GaussianClassSpec {
  double mu = 0.0;
  double sigma = 1.0;
};

struct SynthConfig {
  std::vector<GaussianClassSpec> class_specs;
  std::size_t n_total = 0;  // balanced: n_total / class count per class
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t class_count() const { return class_specs.size(); }
  std::size_t per_class() const { return n_total / class_specs.size(); }
};

/// Balanced 1-D pool with n_total/C deterministic draws per class.
LabeledPool gen_gaussian_pool(const SynthConfig& config);

struct SweepPoint {
  int q = 0;
  double var_abar = 0.0;
  double mean_tasks = 0.0;
  int repetitions = 0;
};

/// For each Q: repeatedly instantiate a fresh pool, deplete it into tasks,
/// evaluate, and record the variance over repetitions of the per-pool mean
/// accuracy. Parallel execution (threads > 1) is output-identical to
/// sequential.
std::vector<SweepPoint> sweep_variance(const SynthConfig& config, int ways,
                                       int shots,
                                       const std::vector<int>& q_grid,
                                       int repetitions, const Adapter& adapter,
                                       unsigned threads = 1);

/// {1,2,3,5,7,10,15,20,30,50,70,90} truncated to Qs that admit at least
/// one task.
std::vector<int> default_q_grid(const SynthConfig& config, int ways,
                                int shots);

struct VarianceModelFit {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double scale = 0.0;  // K / (N * C)
  double residual_rms = 0.0;
  double r_squared = 1.0;
};

/// Linear least squares of var_abar * (N*C/K) against {Q, 1/Q, 1}.
/// Requires >= 3 distinct Q values.
VarianceModelFit fit_variance_model(const std::vector<SweepPoint>& points,
                                    int ways, std::size_t n_total,
                                    std::size_t classes);

struct QStar {
  bool boundary = false;  // alpha <= 0: variance decreasing in Q
  double value = 0.0;     // sqrt(beta/alpha) when not boundary
};

/// Throws ConfigError when beta <= 0 (invalid fit).
QStar q_star(const VarianceModelFit& fit);

/// Per-class conditional accuracy moments over support-set draws, with
/// Monte-Carlo standard errors and the sample covariance of the three
/// per-draw statistics (for delta-method error propagation).
struct MomentEstimates {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  double se1 = 0.0, se2 = 0.0, se3 = 0.0;
  double cov[3][3] = {};  // covariance of the (m1,m2,m3) estimators
  std::size_t mc_samples = 0;
};

/// Monte Carlo over support draws; the conditional per-class accuracy of
/// NCC on 1-D Gaussians is computed exactly from the decision thresholds
/// and the Gaussian CDF. Requires mc_samples >= 100 and config classes >= K.
MomentEstimates estimate_moments(const SynthConfig& config, int ways,
                                 int shots, std::size_t mc_samples,
                                 std::uint64_t seed);

/// Same protocol but the conditional accuracies are estimated by sampling
/// inner_samples queries per class through the given adapter (for adapters
/// without a closed form). m2/m3 use unbiased product corrections.
MomentEstimates estimate_moments_sampled(const SynthConfig& config, int ways,
                                         int shots, const Adapter& adapter,
                                         std::size_t mc_samples,
                                         std::size_t inner_samples,
                                         std::uint64_t seed);

/// Exact moments for a classifier whose conditional accuracy is the
/// constant p for every class (p = 1/K models uniform guessing, p = 1 a
/// perfect classifier).
MomentEstimates constant_accuracy_moments(int ways, double p);

/// Var(A_t) = m1/(KQ) + (Q-1) m2/(KQ) + m3 - m1^2.
double predict_task_variance(const MomentEstimates& m, int ways, int queries);

/// Delta-method standard error of predict_task_variance.
double predict_task_variance_se(const MomentEstimates& m, int ways,
                                int queries);

struct ModelCoefficients {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

/// alpha = m2/K + m3 - m1^2, beta = (S/K)(m1 - m2),
/// gamma = (m1 - m2)/K + (S/K) m2 + S (m3 - m1^2).
ModelCoefficients model_from_moments(const MomentEstimates& m, int ways,
                                     int shots);

}  // namespace fse
