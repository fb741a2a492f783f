#include "fse/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "fse/errors.hpp"

namespace fse {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

LabeledPool parse_feature_csv(const std::string& text,
                              const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line))
    throw DataError(origin + ": empty file");
  ++lineno;
  auto header = split_commas(line);
  if (header.size() < 2 || header[0] != "label")
    throw DataError(origin + ": line 1: header must be 'label,f0,f1,...'");
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i] != "f" + std::to_string(i - 1))
      throw DataError(origin + ": line 1: unexpected header column '" +
                      header[i] + "'");
  const std::size_t dim = header.size() - 1;

  std::vector<std::pair<std::string, FeatureVector>> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != dim + 1)
      throw DataError(origin + ": line " + std::to_string(lineno) +
                      ": expected " + std::to_string(dim + 1) +
                      " cells, got " + std::to_string(cells.size()));
    FeatureVector v;
    v.reserve(dim);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      char* end = nullptr;
      double x = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0')
        throw DataError(origin + ": line " + std::to_string(lineno) +
                        ": non-numeric feature cell '" + cells[i] + "'");
      v.push_back(x);
    }
    records.emplace_back(cells[0], std::move(v));
  }
  if (records.empty())
    throw DataError(origin + ": no data rows");
  return build_pool(records);
}

LabeledPool ingest_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("ingest: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_feature_csv(ss.str(), path);
}

}  // namespace fse
