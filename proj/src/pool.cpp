#include "fse/pool.hpp"

#include <cmath>
#include <unordered_map>

#include "fse/errors.hpp"
#include "fse/rng.hpp"

namespace fse {

std::size_t LabeledPool::total_samples() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.count();
  return n;
}

std::uint64_t LabeledPool::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_u64(dim, h);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    h = fnv1a_str(labels[i], h);
    h = fnv1a_u64(classes[i].count(), h);
    for (const auto& v : classes[i].samples)
      h = fnv1a(v.data(), v.size() * sizeof(double), h);
  }
  return h;
}

LabeledPool build_pool(
    const std::vector<std::pair<std::string, FeatureVector>>& records) {
  if (records.empty()) throw DataError("build_pool: empty record list");

  LabeledPool pool;
  pool.dim = records.front().second.size();
  if (pool.dim == 0) throw DataError("build_pool: zero-dimensional features");

  std::unordered_map<std::string, int> id_of;
  for (const auto& [label, vec] : records) {
    if (vec.size() != pool.dim)
      throw DataError("build_pool: feature dimension mismatch for label '" +
                      label + "' (got " + std::to_string(vec.size()) +
                      ", expected " + std::to_string(pool.dim) + ")");
    for (double x : vec)
      if (!std::isfinite(x))
        throw DataError("build_pool: non-finite feature value in label '" +
                        label + "'");
    auto it = id_of.find(label);
    if (it == id_of.end()) {
      int id = static_cast<int>(pool.classes.size());
      it = id_of.emplace(label, id).first;
      pool.classes.push_back(ClassPool{id, {}});
      pool.labels.push_back(label);
    }
    pool.classes[static_cast<std::size_t>(it->second)].samples.push_back(vec);
  }
  return pool;
}

}  // namespace fse
