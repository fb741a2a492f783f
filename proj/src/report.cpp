#include "fse/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "fse/errors.hpp"

namespace fse {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool same_pool_and_shape(const RunManifest& a, const RunManifest& b) {
  return a.pool_hash == b.pool_hash && a.spec.ways == b.spec.ways &&
         a.spec.shots == b.spec.shots && a.spec.queries == b.spec.queries;
}

const RunManifest* find_manifest(const std::vector<const RunManifest*>& pool,
                                 SamplingMode mode) {
  for (const auto* m : pool)
    if (m->sampling_mode == mode) return m;
  return nullptr;
}

AccuracySeries series_of(const RunManifest& m) {
  AccuracySeries s;
  s.values = m.accuracies;
  s.task_hash = m.task_set_hash();
  return s;
}

}  // namespace

SignificanceMatrix compare_runs(const std::vector<RunManifest>& manifests,
                                double p_limit) {
  SignificanceMatrix matrix;
  std::vector<std::vector<const RunManifest*>> by_method;
  for (const auto& m : manifests) {
    auto it = std::find(matrix.methods.begin(), matrix.methods.end(),
                        m.method_id);
    if (it == matrix.methods.end()) {
      matrix.methods.push_back(m.method_id);
      by_method.push_back({&m});
    } else {
      by_method[static_cast<std::size_t>(it - matrix.methods.begin())]
          .push_back(&m);
    }
  }
  if (matrix.methods.size() < 2)
    throw ConfigError("compare: need manifests from at least 2 methods");

  const std::size_t n = matrix.methods.size();
  matrix.cells.assign(n, std::vector<MatrixCell>(n));
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      MatrixCell& cell = matrix.cells[i][j];

      const RunManifest* ci =
          find_manifest(by_method[i], SamplingMode::WithReplacement);
      const RunManifest* cj =
          find_manifest(by_method[j], SamplingMode::WithReplacement);
      if (ci && cj && same_pool_and_shape(*ci, *cj)) {
        cell.closed = compare_intervals(normal_ci(series_of(*ci), p_limit),
                                        normal_ci(series_of(*cj), p_limit),
                                        CompareMode::Closed)
                          .symbol;
      }

      const RunManifest* oi = find_manifest(by_method[i], SamplingMode::Depletion);
      const RunManifest* oj = find_manifest(by_method[j], SamplingMode::Depletion);
      if (oi && oj && same_pool_and_shape(*oi, *oj) &&
          oi->tasks.size() >= 2 && oj->tasks.size() >= 2) {
        cell.open = compare_intervals(student_ci(series_of(*oi), p_limit),
                                      student_ci(series_of(*oj), p_limit),
                                      CompareMode::Open)
                        .symbol;
      }

      // Paired: any pair of manifests over the identical task list.
      for (const auto* mi : by_method[i]) {
        if (cell.paired) break;
        for (const auto* mj : by_method[j]) {
          if (mi->tasks.size() != mj->tasks.size() || mi->tasks.size() < 2)
            continue;
          if (mi->task_set_hash() != mj->task_set_hash()) continue;
          auto ps = paired_series(series_of(*mi), series_of(*mj));
          cell.paired = verdict_vs_zero(paired_ci(ps, p_limit)).symbol;
          break;
        }
      }
      any = any || cell.closed || cell.open || cell.paired;
    }
  }
  if (!any) throw ConfigError("compare: no comparable manifest pairs");
  return matrix;
}

ConclusivenessReport conclusiveness_report(
    const std::vector<SignificanceMatrix>& matrices) {
  if (matrices.empty())
    throw ConfigError("report: need at least one matrix");
  ConclusivenessReport r;
  auto conclusive = [](const std::optional<Verdict>& v) {
    return v && *v != Verdict::Zero;
  };
  for (const auto& m : matrices) {
    for (const auto& row : m.cells) {
      for (const auto& cell : row) {
        if (conclusive(cell.closed)) ++r.closed;
        if (conclusive(cell.open)) ++r.open;
        if (conclusive(cell.paired)) ++r.paired;
        if (conclusive(cell.closed) && conclusive(cell.paired) &&
            *cell.closed != *cell.paired)
          ++r.inversions;
      }
    }
  }
  r.paired_below_open = r.paired < r.open;
  return r;
}

char verdict_char(Verdict v) {
  switch (v) {
    case Verdict::Plus: return '+';
    case Verdict::Minus: return '-';
    default: return '0';
  }
}

namespace {

std::string cell_text(const MatrixCell& c) {
  std::string s;
  for (const auto& v : {c.closed, c.open, c.paired})
    s += v ? verdict_char(*v) : '.';
  return s;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Plus: return "plus";
    case Verdict::Minus: return "minus";
    default: return "zero";
  }
}

Verdict verdict_from_name(const std::string& s) {
  if (s == "plus") return Verdict::Plus;
  if (s == "minus") return Verdict::Minus;
  if (s == "zero") return Verdict::Zero;
  throw DataError("matrix: unknown verdict '" + s + "'");
}

}  // namespace

std::string matrix_to_text(const SignificanceMatrix& m) {
  std::size_t w = 8;
  for (const auto& name : m.methods) w = std::max(w, name.size() + 2);
  std::ostringstream out;
  out << "cells: [closed open paired], '.' = unavailable\n";
  out << std::string(w, ' ');
  for (const auto& name : m.methods) {
    out << name;
    out << std::string(w - name.size(), ' ');
  }
  out << '\n';
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    out << m.methods[i] << std::string(w - m.methods[i].size(), ' ');
    for (std::size_t j = 0; j < m.methods.size(); ++j) {
      std::string c = i == j ? "" : cell_text(m.cells[i][j]);
      out << c << std::string(w - c.size(), ' ');
    }
    out << '\n';
  }
  return out.str();
}

std::string matrix_to_json(const SignificanceMatrix& m) {
  // Hand-rolled for byte stability (fixed key order, no float formatting).
  std::string out = "{\n\"methods\": [";
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    if (i) out += ", ";
    out += '"' + m.methods[i] + '"';
  }
  out += "],\n\"cells\": [\n";
  std::vector<std::string> entries;
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    for (std::size_t j = 0; j < m.methods.size(); ++j) {
      if (i == j) continue;
      std::string e = "{\"row\": " + std::to_string(i) +
                      ", \"col\": " + std::to_string(j);
      auto field = [&](const char* name, const std::optional<Verdict>& v) {
        if (v) e += std::string(", \"") + name + "\": \"" +
                    verdict_name(*v) + '"';
      };
      field("closed", m.cells[i][j].closed);
      field("open", m.cells[i][j].open);
      field("paired", m.cells[i][j].paired);
      e += "}";
      entries.push_back(std::move(e));
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out += entries[i];
    if (i + 1 < entries.size()) out += ',';
    out += '\n';
  }
  out += "]\n}\n";
  return out;
}

SignificanceMatrix matrix_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("matrix: JSON parse failure: ") + e.what());
  }
  SignificanceMatrix m;
  try {
    m.methods = j.at("methods").get<std::vector<std::string>>();
    m.cells.assign(m.methods.size(),
                   std::vector<MatrixCell>(m.methods.size()));
    for (const auto& jc : j.at("cells")) {
      std::size_t r = jc.at("row").get<std::size_t>();
      std::size_t c = jc.at("col").get<std::size_t>();
      if (r >= m.methods.size() || c >= m.methods.size() || r == c)
        throw DataError("matrix: cell index out of range");
      MatrixCell& cell = m.cells[r][c];
      if (jc.contains("closed"))
        cell.closed = verdict_from_name(jc.at("closed").get<std::string>());
      if (jc.contains("open"))
        cell.open = verdict_from_name(jc.at("open").get<std::string>());
      if (jc.contains("paired"))
        cell.paired = verdict_from_name(jc.at("paired").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("matrix: malformed field: ") + e.what());
  }
  return m;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "Q,var_abar,mean_T,repetitions\n";
  for (const auto& p : points) {
    out += std::to_string(p.q) + ',' + g17(p.var_abar) + ',' +
           g17(p.mean_tasks) + ',' + std::to_string(p.repetitions) + '\n';
  }
  return out;
}

std::vector<SweepPoint> sweep_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      (line != "Q,var_abar,mean_T,repetitions" &&
       line != "Q,var_abar,mean_T,repetitions\r"))
    throw DataError("sweep csv: bad header");
  std::vector<SweepPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    SweepPoint p;
    char* end = nullptr;
    const char* s = line.c_str();
    p.q = static_cast<int>(std::strtol(s, &end, 10));
    auto expect_comma = [&]() {
      if (*end != ',')
        throw DataError("sweep csv: line " + std::to_string(lineno) +
                        ": malformed row");
      s = end + 1;
    };
    expect_comma();
    p.var_abar = std::strtod(s, &end);
    expect_comma();
    p.mean_tasks = std::strtod(s, &end);
    expect_comma();
    p.repetitions = static_cast<int>(std::strtol(s, &end, 10));
    points.push_back(p);
  }
  if (points.empty()) throw DataError("sweep csv: no data rows");
  return points;
}

std::string report_to_text(const ConclusivenessReport& r) {
  std::ostringstream out;
  out << "conclusive closed:  " << r.closed << '\n'
      << "conclusive open:    " << r.open << '\n'
      << "conclusive paired:  " << r.paired << '\n'
      << "inversions:         " << r.inversions << '\n';
  if (r.paired_below_open)
    out << "note: paired conclusiveness below open (negative correlation "
           "regime)\n";
  return out.str();
}

std::string fit_to_text(const VarianceModelFit& fit, const QStar& q) {
  std::ostringstream out;
  out << "alpha " << g17(fit.alpha) << '\n'
      << "beta " << g17(fit.beta) << '\n'
      << "gamma " << g17(fit.gamma) << '\n'
      << "scale " << g17(fit.scale) << '\n'
      << "residual_rms " << g17(fit.residual_rms) << '\n'
      << "r_squared " << g17(fit.r_squared) << '\n';
  if (q.boundary)
    out << "q_star boundary (variance decreasing in Q)\n";
  else
    out << "q_star " << g17(q.value) << '\n';
  return out.str();
}

}  // namespace fse
