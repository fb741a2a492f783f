#pragma once

#include <string>

#include "fse/pool.hpp"

namespace fse {

/// Read a feature CSV (header `label,f0,...,f{d-1}`, one sample per row)
/// into a pool. Errors carry the offending line number.
LabeledPool ingest_feature_file(const std::string& path);

LabeledPool parse_feature_csv(const std::string& text,
                              const std::string& origin = "<string>");

}  // namespace fse
