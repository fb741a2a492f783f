#include "fse/variance_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <thread>

#include "fse/errors.hpp"
#include "fse/rng.hpp"
#include "fse/sampler.hpp"

namespace fse {

void SynthConfig::validate() const {
  if (class_specs.size() < 2)
    throw ConfigError("synth: need at least 2 classes");
  for (const auto& c : class_specs)
    if (!(c.sigma > 0.0)) throw ConfigError("synth: sigma must be > 0");
  if (n_total == 0 || n_total % class_specs.size() != 0)
    throw ConfigError("synth: n_total must be a positive multiple of the "
                      "class count");
}

LabeledPool gen_gaussian_pool(const SynthConfig& config) {
  config.validate();
  LabeledPool pool;
  pool.dim = 1;
  const std::size_t per = config.per_class();
  for (std::size_t c = 0; c < config.class_count(); ++c) {
    Rng rng(derive_seed(config.seed, c));
    ClassPool cp;
    cp.class_id = static_cast<int>(c);
    cp.samples.reserve(per);
    for (std::size_t i = 0; i < per; ++i)
      cp.samples.push_back(
          {config.class_specs[c].mu + config.class_specs[c].sigma * rng.normal()});
    pool.classes.push_back(std::move(cp));
    pool.labels.push_back("g" + std::to_string(c));
  }
  return pool;
}

std::vector<int> default_q_grid(const SynthConfig& config, int ways,
                                int shots) {
  static const int base[] = {1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 90};
  std::vector<int> out;
  for (int q : base)
    if (estimate_task_count(static_cast<long long>(config.class_count()),
                            static_cast<long long>(config.per_class()), ways,
                            shots, q) >= 1)
      out.push_back(q);
  return out;
}

namespace {

struct RepResult {
  double abar = std::numeric_limits<double>::quiet_NaN();
  std::size_t tasks = 0;
};

RepResult run_repetition(const SynthConfig& config, int ways, int shots,
                         int queries, const Adapter& adapter,
                         std::uint64_t rep_seed) {
  SynthConfig local = config;
  local.seed = rep_seed;
  LabeledPool pool = gen_gaussian_pool(local);
  auto tasks = sample_until_depleted(pool, ways, shots, queries,
                                     derive_seed(rep_seed, 0x5aULL));
  RepResult r;
  r.tasks = tasks.size();
  if (tasks.empty()) return r;
  double sum = 0.0;
  for (const auto& t : tasks) sum += evaluate_task(adapter, t, pool);
  r.abar = sum / static_cast<double>(tasks.size());
  return r;
}

}  // namespace

std::vector<SweepPoint> sweep_variance(const SynthConfig& config, int ways,
                                       int shots,
                                       const std::vector<int>& q_grid,
                                       int repetitions, const Adapter& adapter,
                                       unsigned threads) {
  config.validate();
  if (repetitions < 2) throw ConfigError("sweep: repetitions must be >= 2");
  if (q_grid.empty()) throw ConfigError("sweep: empty Q grid");

  const std::size_t nq = q_grid.size();
  const std::size_t nrep = static_cast<std::size_t>(repetitions);
  std::vector<RepResult> slots(nq * nrep);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      const std::size_t qi = w / nrep;
      const std::size_t rep = w % nrep;
      slots[w] = run_repetition(config, ways, shots, q_grid[qi], adapter,
                                derive_seed(config.seed, qi, rep));
    }
  };
  const std::size_t total = slots.size();
  if (threads <= 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool_threads;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(total));
    for (unsigned i = 0; i < n; ++i)
      pool_threads.emplace_back(work, total * i / n, total * (i + 1) / n);
    for (auto& th : pool_threads) th.join();
  }

  std::vector<SweepPoint> points;
  for (std::size_t qi = 0; qi < nq; ++qi) {
    std::vector<double> abars;
    double tsum = 0.0;
    for (std::size_t rep = 0; rep < nrep; ++rep) {
      const RepResult& r = slots[qi * nrep + rep];
      tsum += static_cast<double>(r.tasks);
      if (r.tasks > 0) abars.push_back(r.abar);
    }
    if (abars.empty())
      throw ConfigError("sweep: Q = " + std::to_string(q_grid[qi]) +
                        " yields zero tasks in every repetition");
    if (abars.size() < 2)
      throw ConfigError("sweep: Q = " + std::to_string(q_grid[qi]) +
                        " yields fewer than 2 usable repetitions");
    double mean = std::accumulate(abars.begin(), abars.end(), 0.0) /
                  static_cast<double>(abars.size());
    double ss = 0.0;
    for (double a : abars) ss += (a - mean) * (a - mean);
    SweepPoint p;
    p.q = q_grid[qi];
    p.var_abar = ss / static_cast<double>(abars.size() - 1);
    p.mean_tasks = tsum / static_cast<double>(nrep);
    p.repetitions = static_cast<int>(abars.size());
    points.push_back(p);
  }
  return points;
}

VarianceModelFit fit_variance_model(const std::vector<SweepPoint>& points,
                                    int ways, std::size_t n_total,
                                    std::size_t classes) {
  std::set<int> distinct;
  for (const auto& p : points) distinct.insert(p.q);
  if (distinct.size() < 3)
    throw ConfigError("fit: need at least 3 distinct Q values");

  // n_total is the dataset size across classes, i.e. the model's N*C.
  const double scale = static_cast<double>(ways) / static_cast<double>(n_total);
  (void)classes;

  const std::size_t n = points.size();
  // Normal equations for y = a*Q + b/Q + c in the scaled space.
  double A[3][3] = {};
  double rhs[3] = {};
  auto basis = [](double q, int i) {
    return i == 0 ? q : (i == 1 ? 1.0 / q : 1.0);
  };
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double q = static_cast<double>(points[i].q);
    y[i] = points[i].var_abar / scale;
    for (int r = 0; r < 3; ++r) {
      rhs[r] += basis(q, r) * y[i];
      for (int c = 0; c < 3; ++c) A[r][c] += basis(q, r) * basis(q, c);
    }
  }
  // Gaussian elimination with partial pivoting.
  double M[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) M[r][c] = A[r][c];
    M[r][3] = rhs[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
    if (std::fabs(M[piv][col]) < 1e-300)
      throw ConfigError("fit: rank-deficient design");
    if (piv != col)
      for (int c = 0; c < 4; ++c) std::swap(M[piv][c], M[col][c]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double f = M[r][col] / M[col][col];
      for (int c = col; c < 4; ++c) M[r][c] -= f * M[col][c];
    }
  }
  VarianceModelFit fit;
  fit.alpha = M[0][3] / M[0][0];
  fit.beta = M[1][3] / M[1][1];
  fit.gamma = M[2][3] / M[2][2];
  fit.scale = scale;

  double ybar = std::accumulate(y.begin(), y.end(), 0.0) /
                static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double q = static_cast<double>(points[i].q);
    double pred = fit.alpha * q + fit.beta / q + fit.gamma;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.residual_rms = std::sqrt(ss_res / static_cast<double>(n));
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

QStar q_star(const VarianceModelFit& fit) {
  if (fit.beta <= 0.0)
    throw ConfigError("q_star: fitted beta <= 0, invalid fit");
  QStar q;
  if (fit.alpha <= 0.0) {
    q.boundary = true;  // variance decreasing in Q
    return q;
  }
  q.value = std::sqrt(fit.beta / fit.alpha);
  return q;
}

namespace {

double gauss_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct DrawStats {
  double p = 0.0, q = 0.0, r = 0.0;
};

MomentEstimates accumulate_moments(const std::vector<DrawStats>& draws) {
  const std::size_t n = draws.size();
  MomentEstimates m;
  m.mc_samples = n;
  double s[3] = {};
  for (const auto& d : draws) {
    s[0] += d.p;
    s[1] += d.q;
    s[2] += d.r;
  }
  const double mean[3] = {s[0] / n, s[1] / n, s[2] / n};
  m.m1 = mean[0];
  m.m2 = mean[1];
  m.m3 = mean[2];
  double cov[3][3] = {};
  for (const auto& d : draws) {
    const double dv[3] = {d.p - mean[0], d.q - mean[1], d.r - mean[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += dv[i] * dv[j];
  }
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m.cov[i][j] = cov[i][j] / denom / static_cast<double>(n);
  m.se1 = std::sqrt(m.cov[0][0]);
  m.se2 = std::sqrt(m.cov[1][1]);
  m.se3 = std::sqrt(m.cov[2][2]);
  return m;
}

std::vector<std::size_t> pick_classes(Rng& rng, std::size_t total,
                                      std::size_t k) {
  std::vector<std::size_t> ids(total);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  rng.partial_shuffle(ids, k);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

/// Exact per-class NCC accuracy on 1-D Gaussians: decision regions are the
/// intervals delimited by midpoints of adjacent sorted centroids.
void ncc_mu_1d(const std::vector<double>& centroids,
               const std::vector<GaussianClassSpec>& specs,
               std::vector<double>& mu) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (centroids[a] != centroids[b]) return centroids[a] < centroids[b];
    return a < b;
  });
  mu.assign(k, 0.0);
  for (std::size_t pos = 0; pos < k; ++pos) {
    const std::size_t c = order[pos];
    double lo = pos == 0 ? -std::numeric_limits<double>::infinity()
                         : 0.5 * (centroids[order[pos - 1]] + centroids[c]);
    double hi = pos + 1 == k
                    ? std::numeric_limits<double>::infinity()
                    : 0.5 * (centroids[c] + centroids[order[pos + 1]]);
    const auto& g = specs[c];
    double plo = std::isinf(lo) ? 0.0 : gauss_cdf((lo - g.mu) / g.sigma);
    double phi = std::isinf(hi) ? 1.0 : gauss_cdf((hi - g.mu) / g.sigma);
    mu[c] = phi - plo;
  }
}

DrawStats stats_from_mu(const std::vector<double>& mu, double m2_correction) {
  const double k = static_cast<double>(mu.size());
  DrawStats d;
  double sum = 0.0, sumsq = 0.0, corrected_sq = 0.0;
  for (double m : mu) {
    sum += m;
    sumsq += m * m;
    corrected_sq += m * m - m2_correction * m * (1.0 - m);
  }
  d.p = sum / k;
  d.q = corrected_sq / k;
  // cross products only: (sum^2 - sum of squares) / K^2
  d.r = (sum * sum - sumsq) / (k * k);
  return d;
}

}  // namespace

MomentEstimates estimate_moments(const SynthConfig& config, int ways,
                                 int shots, std::size_t mc_samples,
                                 std::uint64_t seed) {
  config.validate();
  if (mc_samples < 100)
    throw ConfigError("moments: mc_samples must be >= 100");
  if (static_cast<std::size_t>(ways) > config.class_count())
    throw ConfigError("moments: ways exceeds class count");

  std::vector<DrawStats> draws;
  draws.reserve(mc_samples);
  Rng rng(derive_seed(seed, 0x3017ULL));
  std::vector<double> centroids(static_cast<std::size_t>(ways));
  std::vector<GaussianClassSpec> specs(static_cast<std::size_t>(ways));
  std::vector<double> mu;
  for (std::size_t draw = 0; draw < mc_samples; ++draw) {
    auto ids = pick_classes(rng, config.class_count(),
                            static_cast<std::size_t>(ways));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& g = config.class_specs[ids[i]];
      double sum = 0.0;
      for (int s = 0; s < shots; ++s) sum += g.mu + g.sigma * rng.normal();
      centroids[i] = sum / static_cast<double>(shots);
      specs[i] = g;
    }
    ncc_mu_1d(centroids, specs, mu);
    draws.push_back(stats_from_mu(mu, 0.0));
  }
  return accumulate_moments(draws);
}

MomentEstimates estimate_moments_sampled(const SynthConfig& config, int ways,
                                         int shots, const Adapter& adapter,
                                         std::size_t mc_samples,
                                         std::size_t inner_samples,
                                         std::uint64_t seed) {
  config.validate();
  if (mc_samples < 100)
    throw ConfigError("moments: mc_samples must be >= 100");
  if (inner_samples < 2)
    throw ConfigError("moments: inner_samples must be >= 2");
  if (adapter.kind == AdapterKind::Oracle)
    throw ConfigError("moments: oracle adapter has no conditional accuracy");
  if (static_cast<std::size_t>(ways) > config.class_count())
    throw ConfigError("moments: ways exceeds class count");

  std::vector<DrawStats> draws;
  draws.reserve(mc_samples);
  Rng rng(derive_seed(seed, 0x3018ULL));
  std::vector<double> mu(static_cast<std::size_t>(ways));
  const double correction = 1.0 / static_cast<double>(inner_samples - 1);
  for (std::size_t draw = 0; draw < mc_samples; ++draw) {
    auto ids = pick_classes(rng, config.class_count(),
                            static_cast<std::size_t>(ways));
    std::vector<std::vector<FeatureVector>> support(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& g = config.class_specs[ids[i]];
      for (int s = 0; s < shots; ++s)
        support[i].push_back({g.mu + g.sigma * rng.normal()});
    }
    NccModel ncc;
    LrModel lr;
    if (adapter.kind == AdapterKind::Ncc)
      ncc = ncc_fit(support);
    else
      lr = lr_fit(support, adapter.lr);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& g = config.class_specs[ids[i]];
      std::size_t hits = 0;
      for (std::size_t s = 0; s < inner_samples; ++s) {
        FeatureVector x = {g.mu + g.sigma * rng.normal()};
        int pred = adapter.kind == AdapterKind::Ncc ? ncc_predict(ncc, x)
                                                    : lr_predict(lr, x);
        if (pred == static_cast<int>(i)) ++hits;
      }
      mu[i] = static_cast<double>(hits) / static_cast<double>(inner_samples);
    }
    draws.push_back(stats_from_mu(mu, correction));
  }
  return accumulate_moments(draws);
}

MomentEstimates constant_accuracy_moments(int ways, double p) {
  if (ways < 2) throw ConfigError("moments: ways must be >= 2");
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("moments: accuracy must be in [0,1]");
  MomentEstimates m;
  const double k = static_cast<double>(ways);
  m.m1 = p;
  m.m2 = p * p;
  m.m3 = (k - 1.0) / k * p * p;
  m.mc_samples = 0;
  return m;
}

double predict_task_variance(const MomentEstimates& m, int ways, int queries) {
  const double kq = static_cast<double>(ways) * queries;
  return m.m1 / kq + (queries - 1) * m.m2 / kq + m.m3 - m.m1 * m.m1;
}

double predict_task_variance_se(const MomentEstimates& m, int ways,
                                int queries) {
  const double kq = static_cast<double>(ways) * queries;
  const double g[3] = {1.0 / kq - 2.0 * m.m1, (queries - 1) / kq, 1.0};
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v += g[i] * m.cov[i][j] * g[j];
  return std::sqrt(std::max(0.0, v));
}

ModelCoefficients model_from_moments(const MomentEstimates& m, int ways,
                                     int shots) {
  const double k = static_cast<double>(ways);
  const double s = static_cast<double>(shots);
  ModelCoefficients c;
  c.alpha = m.m2 / k + m.m3 - m.m1 * m.m1;
  c.beta = s / k * (m.m1 - m.m2);
  c.gamma = (m.m1 - m.m2) / k + s / k * m.m2 + s * (m.m3 - m.m1 * m.m1);
  return c;
}

}  // namespace fse
