#include "fse/stats.hpp"

#include <cmath>
#include <string>

#include "fse/errors.hpp"

namespace fse {

std::pair<double, double> mean_and_variance(const AccuracySeries& series) {
  const std::size_t n = series.count();
  if (n == 0) throw DataError("series: empty");
  double sum = 0.0;
  for (double v : series.values) sum += v;
  const double mean = sum / static_cast<double>(n);
  if (n < 2) throw DataError("series: variance undefined for T < 2");
  double ss = 0.0;
  for (double v : series.values) {
    double d = v - mean;
    ss += d * d;
  }
  return {mean, ss / static_cast<double>(n - 1)};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation, refined with one Halley step on the
  // exact CDF (erfc).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 3e-16;
  const double fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                 a * std::log(x) + b * std::log(1.0 - x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_critical(long long dof, double p_limit) {
  if (dof < 1) throw ConfigError("student_critical: dof must be >= 1");
  if (!(p_limit > 0.0 && p_limit < 1.0))
    throw ConfigError("student_critical: p_limit must be in (0,1)");
  // Two-sided tail probability of |T| > t is I_{nu/(nu+t^2)}(nu/2, 1/2).
  // Bisect on x = nu/(nu+t^2) in (0,1).
  const double nu = static_cast<double>(dof);
  const double target = 1.0 - p_limit;  // tail mass
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double tail = incomplete_beta(nu / 2.0, 0.5, mid);
    if (tail > target)
      hi = mid;  // tail decreasing in t means increasing t lowers x
    else
      lo = mid;
    if (hi - lo < 1e-15) break;
  }
  double x = 0.5 * (lo + hi);
  if (x >= 1.0) return 0.0;
  return std::sqrt(nu * (1.0 - x) / x);
}

IntervalEstimate normal_ci(const AccuracySeries& series, double p_limit) {
  auto [mean, var] = mean_and_variance(series);
  const double z = normal_quantile(1.0 - (1.0 - p_limit) / 2.0);
  IntervalEstimate ci;
  ci.mean = mean;
  ci.half_width = z * std::sqrt(var / static_cast<double>(series.count()));
  ci.p_limit = p_limit;
  ci.mode = CiMode::Normal;
  ci.count = series.count();
  return ci;
}

IntervalEstimate student_ci(const AccuracySeries& series, double p_limit) {
  const std::size_t n = series.count();
  if (n < 2)
    throw InsufficientTasksError(
        "student_ci: insufficient tasks for open CI (T = " +
            std::to_string(n) + ")",
        n);
  auto [mean, var] = mean_and_variance(series);
  const double t = student_critical(static_cast<long long>(n) - 1, p_limit);
  IntervalEstimate ci;
  ci.mean = mean;
  ci.half_width = t * std::sqrt(var / static_cast<double>(n));
  ci.p_limit = p_limit;
  ci.mode = CiMode::Student;
  ci.count = n;
  return ci;
}

PairedSeries paired_series(const AccuracySeries& a, const AccuracySeries& b) {
  if (a.count() != b.count())
    throw DataError("paired_series: series length mismatch");
  if (a.count() == 0) throw DataError("paired_series: empty series");
  if (a.task_hash && b.task_hash && *a.task_hash != *b.task_hash)
    throw DataError("paired_series: task-set hash mismatch; series were not "
                    "measured on identical tasks");

  PairedSeries ps;
  ps.deltas.reserve(a.count());
  for (std::size_t i = 0; i < a.count(); ++i)
    ps.deltas.push_back(a.values[i] - b.values[i]);

  const std::size_t n = a.count();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a.values[i];
    mb += b.values[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  ps.mean_delta = ma - mb;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a.values[i] - ma;
    double db = b.values[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  ps.correlation = (saa > 0.0 && sbb > 0.0)
                       ? sab / std::sqrt(saa * sbb)
                       : 0.0;  // degenerate constant series
  return ps;
}

IntervalEstimate paired_ci(const PairedSeries& ps, double p_limit) {
  AccuracySeries s;
  s.values = ps.deltas;
  const std::size_t n = ps.count();
  if (n < 2)
    throw InsufficientTasksError("paired_ci: insufficient tasks (T = " +
                                     std::to_string(n) + ")",
                                 n);
  auto [mean, var] = mean_and_variance(s);
  (void)mean;
  const double t = student_critical(static_cast<long long>(n) - 1, p_limit);
  IntervalEstimate ci;
  ci.mean = ps.mean_delta;  // difference of parent means, exact identity
  ci.half_width = t * std::sqrt(var / static_cast<double>(n));
  ci.p_limit = p_limit;
  ci.mode = CiMode::Student;
  ci.count = n;
  return ci;
}

ComparisonVerdict compare_intervals(const IntervalEstimate& x1,
                                    const IntervalEstimate& x2,
                                    CompareMode mode) {
  if (x1.p_limit != x2.p_limit)
    throw ConfigError("compare_intervals: p_limit mismatch");
  ComparisonVerdict v;
  v.mode = mode;
  v.p_limit = x1.p_limit;
  if (x1.upper() < x2.lower())
    v.symbol = Verdict::Minus;
  else if (x2.upper() < x1.lower())
    v.symbol = Verdict::Plus;
  else
    v.symbol = Verdict::Zero;
  return v;
}

ComparisonVerdict verdict_vs_zero(const IntervalEstimate& interval) {
  ComparisonVerdict v;
  v.mode = CompareMode::Paired;
  v.p_limit = interval.p_limit;
  if (interval.lower() > 0.0)
    v.symbol = Verdict::Plus;
  else if (interval.upper() < 0.0)
    v.symbol = Verdict::Minus;
  else
    v.symbol = Verdict::Zero;
  return v;
}

double conclusive_probability_bound(double p_limit) {
  if (!(p_limit > 0.0 && p_limit < 1.0))
    throw ConfigError("conclusive_probability_bound: p_limit out of range");
  double q = 1.0 - (1.0 - p_limit) / 2.0;
  return q * q;
}

}  // namespace fse
