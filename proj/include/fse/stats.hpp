#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace fse {

struct AccuracySeries {
  std::vector<double> values;
  /// Hash of the task list the series was measured on, when known.
  /// Paired statistics refuse series with mismatched hashes.
  std::optional<std::uint64_t> task_hash;

  std::size_t count() const { return values.size(); }
};

enum class CiMode { Normal, Student };

struct IntervalEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  double p_limit = 0.95;
  CiMode mode = CiMode::Normal;
  std::size_t count = 0;

  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

struct PairedSeries {
  std::vector<double> deltas;
  /// mean(a) - mean(b). The paired point estimate is computed this way so
  /// that the identity mean(delta) = mean(a) - mean(b) holds exactly in
  /// floating point, not just in exact arithmetic.
  double mean_delta = 0.0;
  double correlation = 0.0;  // Pearson r of the parents; 0 if degenerate
  std::size_t count() const { return deltas.size(); }
};

enum class Verdict { Plus, Zero, Minus };

enum class CompareMode { Closed, Open, Paired };

struct ComparisonVerdict {
  Verdict symbol = Verdict::Zero;
  CompareMode mode = CompareMode::Closed;
  double p_limit = 0.95;
};

/// Mean and Bessel-corrected sample variance. Variance requires T >= 2.
std::pair<double, double> mean_and_variance(const AccuracySeries& series);

/// Standard-normal quantile (inverse CDF) at probability p (0 < p < 1).
/// Callers wanting a two-sided critical value pass 1 - (1-p)/2.
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided Student critical value: t such that P(|T_dof| <= t) = p_limit.
double student_critical(long long dof, double p_limit);

/// CLT interval: mean +- z(p) * sigma / sqrt(T).
IntervalEstimate normal_ci(const AccuracySeries& series, double p_limit = 0.95);

/// Student interval: mean +- t(T-1, p) * sqrt(var / T). Throws
/// InsufficientTasksError when T < 2 (small datasets can deplete after
/// one task).
IntervalEstimate student_ci(const AccuracySeries& series,
                            double p_limit = 0.95);

/// Elementwise differences of two series measured on the identical task
/// list, with their Pearson correlation.
PairedSeries paired_series(const AccuracySeries& a, const AccuracySeries& b);

/// Student interval on the deltas.
IntervalEstimate paired_ci(const PairedSeries& ps, double p_limit = 0.95);

/// Interval-intersection rule: Minus if x1 lies entirely below x2, Plus if
/// entirely above, Zero when the intervals intersect.
ComparisonVerdict compare_intervals(const IntervalEstimate& x1,
                                    const IntervalEstimate& x2,
                                    CompareMode mode = CompareMode::Closed);

/// Verdict of a paired interval against zero.
ComparisonVerdict verdict_vs_zero(const IntervalEstimate& interval);

/// Lower bound on P(x1 < x2) when the intervals do not intersect:
/// (1 - (1 - p)/2)^2, which exceeds p for all p in (0,1).
double conclusive_probability_bound(double p_limit);

}  // namespace fse
