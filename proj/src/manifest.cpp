#include "fse/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fse/errors.hpp"

namespace fse {

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::WithReplacement ? "with_replacement"
                                               : "depletion";
}

SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "with_replacement") return SamplingMode::WithReplacement;
  if (s == "depletion") return SamplingMode::Depletion;
  throw DataError("manifest: unknown sampling_mode '" + s + "'");
}

void RunManifest::validate() const {
  spec.validate(sampling_mode == SamplingMode::WithReplacement);
  if (accuracies.size() != tasks.size())
    throw DataError("manifest: accuracies length (" +
                    std::to_string(accuracies.size()) +
                    ") != tasks length (" + std::to_string(tasks.size()) + ")");
  for (double a : accuracies)
    if (!(a >= 0.0 && a <= 1.0))
      throw DataError("manifest: accuracies contains value outside [0,1]");
  if (method_id.empty()) throw DataError("manifest: method_id empty");
}

namespace {

void write_int_list(std::string& out, const std::vector<int>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
}

void write_nested(std::string& out, const std::vector<std::vector<int>>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    write_int_list(out, v[i]);
  }
  out += ']';
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string serialize_manifest(const RunManifest& m) {
  m.validate();
  std::string out;
  out.reserve(256 + m.tasks.size() * 128);
  out += "{\n";
  out += "\"master_seed\": " + std::to_string(m.master_seed) + ",\n";
  out += "\"spec\": {\"ways\": " + std::to_string(m.spec.ways) +
         ", \"shots\": " + std::to_string(m.spec.shots) +
         ", \"queries\": " + std::to_string(m.spec.queries);
  if (m.spec.task_count)
    out += ", \"tasks\": " + std::to_string(*m.spec.task_count);
  out += "},\n";
  out += "\"sampling_mode\": \"" + to_string(m.sampling_mode) + "\",\n";
  out += "\"method_id\": \"" + m.method_id + "\",\n";
  out += "\"pool_hash\": " + std::to_string(m.pool_hash) + ",\n";
  out += "\"tasks\": [\n";
  for (std::size_t t = 0; t < m.tasks.size(); ++t) {
    out += "{\"classes\": ";
    write_int_list(out, m.tasks[t].class_subset);
    out += ", \"support\": ";
    write_nested(out, m.tasks[t].support);
    out += ", \"query\": ";
    write_nested(out, m.tasks[t].query);
    out += '}';
    if (t + 1 < m.tasks.size()) out += ',';
    out += '\n';
  }
  out += "],\n";
  out += "\"accuracies\": [";
  for (std::size_t i = 0; i < m.accuracies.size(); ++i) {
    if (i) out += ',';
    out += g17(m.accuracies[i]);
  }
  out += "]\n}\n";
  return out;
}

RunManifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("manifest: JSON parse failure: ") + e.what());
  }
  RunManifest m;
  auto require = [&](const char* field) -> const nlohmann::json& {
    if (!j.contains(field))
      throw DataError(std::string("manifest: missing field '") + field + "'");
    return j.at(field);
  };
  try {
    m.master_seed = require("master_seed").get<std::uint64_t>();
    const auto& spec = require("spec");
    m.spec.ways = spec.at("ways").get<int>();
    m.spec.shots = spec.at("shots").get<int>();
    m.spec.queries = spec.at("queries").get<int>();
    if (spec.contains("tasks")) m.spec.task_count = spec.at("tasks").get<int>();
    m.sampling_mode =
        sampling_mode_from_string(require("sampling_mode").get<std::string>());
    m.method_id = require("method_id").get<std::string>();
    m.pool_hash = require("pool_hash").get<std::uint64_t>();
    for (const auto& jt : require("tasks")) {
      Task t;
      t.class_subset = jt.at("classes").get<std::vector<int>>();
      t.support = jt.at("support").get<std::vector<std::vector<int>>>();
      t.query = jt.at("query").get<std::vector<std::vector<int>>>();
      m.tasks.push_back(std::move(t));
    }
    m.accuracies = require("accuracies").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest: malformed field: ") + e.what());
  }
  m.validate();
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("manifest: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

void save_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("manifest: cannot write '" + path + "'");
  out << serialize_manifest(m);
}

}  // namespace fse
