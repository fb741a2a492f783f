#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fse {

using FeatureVector = std::vector<double>;

/// All samples of one class. class_id is a dense index assigned by first
/// appearance; the original label lives in LabeledPool::labels.
struct ClassPool {
  int class_id = 0;
  std::vector<FeatureVector> samples;

  std::size_t count() const { return samples.size(); }
};

/// The evaluation dataset: class-indexed feature vectors of one shared
/// dimension. Immutable after construction.
struct LabeledPool {
  std::vector<ClassPool> classes;
  std::vector<std::string> labels;  // labels[class_id] = original label
  std::size_t dim = 0;

  std::size_t class_count() const { return classes.size(); }
  std::size_t total_samples() const;

  /// Content hash identifying this pool in manifests.
  std::uint64_t hash() const;
};

/// Group records into per-class pools. Class ids are assigned by first
/// appearance; sample order within a class preserves record order.
/// Throws DataError on empty input or mismatched feature dimensions.
LabeledPool build_pool(
    const std::vector<std::pair<std::string, FeatureVector>>& records);

}  // namespace fse
