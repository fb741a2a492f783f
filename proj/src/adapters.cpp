#include "fse/adapters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fse/errors.hpp"
#include "fse/rng.hpp"

namespace fse {

namespace {

FeatureVector l2_normalized(const FeatureVector& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 <= 0.0) return v;
  FeatureVector out = v;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : out) x *= inv;
  return out;
}

double sq_dist(const FeatureVector& a, const FeatureVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

}  // namespace

NccModel ncc_fit(const std::vector<std::vector<FeatureVector>>& support) {
  NccModel model;
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c].empty())
      throw DataError("ncc_fit: empty support for class " + std::to_string(c));
    FeatureVector centroid(support[c].front().size(), 0.0);
    for (const auto& v : support[c]) {
      if (v.size() != centroid.size())
        throw DataError("ncc_fit: dimension mismatch in support");
      for (std::size_t i = 0; i < v.size(); ++i) centroid[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(support[c].size());
    for (double& x : centroid) x *= inv;
    model.centroids.push_back(std::move(centroid));
  }
  return model;
}

int ncc_predict(const NccModel& model, const FeatureVector& x) {
  if (model.centroids.empty() || x.size() != model.centroids.front().size())
    throw DataError("ncc_predict: dimension mismatch");
  int best = 0;
  double best_d = sq_dist(model.centroids[0], x);
  for (std::size_t c = 1; c < model.centroids.size(); ++c) {
    double d = sq_dist(model.centroids[c], x);
    if (d < best_d) {  // strict: ties stay with the lowest class index
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace {

struct LrData {
  std::vector<FeatureVector> x;  // flattened samples
  std::vector<int> y;
  std::size_t dim = 0;
  std::size_t k = 0;
};

LrData flatten(const std::vector<std::vector<FeatureVector>>& support) {
  LrData d;
  d.k = support.size();
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c].empty())
      throw DataError("lr_fit: empty support for class " + std::to_string(c));
    for (const auto& v : support[c]) {
      d.x.push_back(v);
      d.y.push_back(static_cast<int>(c));
    }
  }
  d.dim = d.x.front().size();
  for (const auto& v : d.x)
    if (v.size() != d.dim) throw DataError("lr_fit: dimension mismatch");
  return d;
}

double loss_of(const std::vector<std::vector<double>>& w, const LrData& d,
               double l2) {
  const std::size_t n = d.x.size();
  double loss = 0.0;
  std::vector<double> logits(d.k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d.k; ++c) {
      double z = w[c][d.dim];
      for (std::size_t j = 0; j < d.dim; ++j) z += w[c][j] * d.x[i][j];
      logits[c] = z;
    }
    double zmax = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - zmax);
    loss -= logits[static_cast<std::size_t>(d.y[i])] - zmax - std::log(denom);
  }
  loss /= static_cast<double>(n);
  for (const auto& row : w)
    for (std::size_t j = 0; j + 1 < row.size(); ++j)  // bias unpenalized
      loss += l2 * row[j] * row[j];
  return loss;
}

void gradient_of(const std::vector<std::vector<double>>& w, const LrData& d,
                 double l2, std::vector<std::vector<double>>& g) {
  const std::size_t n = d.x.size();
  for (auto& row : g) std::fill(row.begin(), row.end(), 0.0);
  std::vector<double> p(d.k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d.k; ++c) {
      double z = w[c][d.dim];
      for (std::size_t j = 0; j < d.dim; ++j) z += w[c][j] * d.x[i][j];
      p[c] = z;
    }
    double zmax = *std::max_element(p.begin(), p.end());
    double denom = 0.0;
    for (double& z : p) {
      z = std::exp(z - zmax);
      denom += z;
    }
    for (std::size_t c = 0; c < d.k; ++c) {
      double err = p[c] / denom -
                   (static_cast<int>(c) == d.y[i] ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d.dim; ++j) g[c][j] += err * d.x[i][j];
      g[c][d.dim] += err;
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < d.k; ++c) {
    for (std::size_t j = 0; j <= d.dim; ++j) g[c][j] *= inv;
    for (std::size_t j = 0; j < d.dim; ++j) g[c][j] += 2.0 * l2 * w[c][j];
  }
}

}  // namespace

double lr_loss(const LrModel& model,
               const std::vector<std::vector<FeatureVector>>& support,
               double l2_penalty) {
  return loss_of(model.weights, flatten(support), l2_penalty);
}

LrModel lr_fit(const std::vector<std::vector<FeatureVector>>& support,
               const LrConfig& cfg) {
  if (cfg.l2_penalty < 0 || cfg.step_size <= 0 || cfg.max_iters < 0)
    throw ConfigError("lr_fit: invalid hyperparameters");
  LrData data = flatten(support);

  LrModel model;
  model.weights.assign(data.k, std::vector<double>(data.dim + 1, 0.0));

  double step = cfg.step_size;
  double loss = loss_of(model.weights, data, cfg.l2_penalty);
  std::vector<std::vector<double>> grad(data.k,
                                        std::vector<double>(data.dim + 1, 0.0));
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    gradient_of(model.weights, data, cfg.l2_penalty, grad);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      auto candidate = model.weights;
      for (std::size_t c = 0; c < data.k; ++c)
        for (std::size_t j = 0; j <= data.dim; ++j)
          candidate[c][j] -= step * grad[c][j];
      double new_loss = loss_of(candidate, data, cfg.l2_penalty);
      if (!std::isfinite(new_loss))
        throw ConfigError("lr_fit: non-finite loss; reduce step_size");
      if (new_loss <= loss) {
        model.weights = std::move(candidate);
        loss = new_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: converged
  }
  for (const auto& row : model.weights)
    for (double w : row)
      if (!std::isfinite(w)) throw ConfigError("lr_fit: diverged weights");
  return model;
}

int lr_predict(const LrModel& model, const FeatureVector& x) {
  if (model.weights.empty() || x.size() + 1 != model.weights.front().size())
    throw DataError("lr_predict: dimension mismatch");
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    double z = model.weights[c][x.size()];
    for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[c][j] * x[j];
    if (z > best_z) {  // strict: ties toward lowest class index
      best_z = z;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace {

double oracle_accuracy(const OracleConfig& cfg, const Task& task) {
  const std::uint64_t h = task_list_hash({task});
  Rng shared(derive_seed(h, 0x0d1fULL));
  double difficulty = shared.normal();
  Rng priv(derive_seed(h, fnv1a_str(cfg.salt)));
  double noise = priv.normal();
  double a = cfg.base + cfg.difficulty_sd * difficulty + cfg.noise_sd * noise;
  a = std::clamp(a, 0.0, 1.0);
  const double grid = static_cast<double>(task.class_subset.size() *
                                          task.query.front().size());
  return std::round(a * grid) / grid;
}

}  // namespace

double evaluate_task(const Adapter& adapter, const Task& task,
                     const LabeledPool& pool) {
  const int ways = static_cast<int>(task.class_subset.size());
  const int shots = static_cast<int>(task.support.front().size());
  const int queries = static_cast<int>(task.query.front().size());
  validate_task(task, pool, ways, shots, queries);

  if (adapter.kind == AdapterKind::Oracle)
    return oracle_accuracy(adapter.oracle, task);

  std::vector<std::vector<FeatureVector>> support(
      static_cast<std::size_t>(ways));
  for (int c = 0; c < ways; ++c) {
    const auto& cls =
        pool.classes[static_cast<std::size_t>(task.class_subset
                                                  [static_cast<std::size_t>(c)])];
    for (int idx : task.support[static_cast<std::size_t>(c)]) {
      const auto& v = cls.samples[static_cast<std::size_t>(idx)];
      support[static_cast<std::size_t>(c)].push_back(
          adapter.l2_normalize ? l2_normalized(v) : v);
    }
  }

  int correct = 0;
  auto score = [&](auto&& predict) {
    for (int c = 0; c < ways; ++c) {
      const auto& cls = pool.classes[static_cast<std::size_t>(
          task.class_subset[static_cast<std::size_t>(c)])];
      for (int idx : task.query[static_cast<std::size_t>(c)]) {
        const auto& v = cls.samples[static_cast<std::size_t>(idx)];
        FeatureVector x = adapter.l2_normalize ? l2_normalized(v) : v;
        if (predict(x) == c) ++correct;
      }
    }
  };

  if (adapter.kind == AdapterKind::Ncc) {
    NccModel model = ncc_fit(support);
    score([&](const FeatureVector& x) { return ncc_predict(model, x); });
  } else {
    LrModel model = lr_fit(support, adapter.lr);
    score([&](const FeatureVector& x) { return lr_predict(model, x); });
  }
  return static_cast<double>(correct) / static_cast<double>(ways * queries);
}

}  // namespace fse
