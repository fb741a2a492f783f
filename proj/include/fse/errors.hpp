#pragma once

#include <stdexcept>
#include <string>

namespace fse {

/// Bad parameters or mutually inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (files, manifests, pools).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Depletion sampling produced too few tasks for the requested statistic.
class InsufficientTasksError : public std::runtime_error {
 public:
  InsufficientTasksError(const std::string& msg, std::size_t task_count)
      : std::runtime_error(msg), task_count(task_count) {}
  std::size_t task_count;
};

}  // namespace fse
