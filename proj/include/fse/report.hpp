#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fse/manifest.hpp"
#include "fse/stats.hpp"
#include "fse/variance_lab.hpp"

namespace fse {

/// One ordered-pair cell: up to three verdicts (closed, open, paired), each
/// absent when its precondition is unmet (no matching manifests).
struct MatrixCell {
  std::optional<Verdict> closed;
  std::optional<Verdict> open;
  std::optional<Verdict> paired;
};

struct SignificanceMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<MatrixCell>> cells;  // [row][col], diagonal empty
};

/// Per ordered pair of method ids: closed verdict from normal CIs of
/// with-replacement manifests on the same (pool, spec); open verdict from
/// Student CIs of depletion manifests; paired verdict from the paired CI
/// vs 0 on manifests with identical task-set hashes.
SignificanceMatrix compare_runs(const std::vector<RunManifest>& manifests,
                                double p_limit = 0.95);

struct ConclusivenessReport {
  std::size_t closed = 0;
  std::size_t open = 0;
  std::size_t paired = 0;
  std::size_t inversions = 0;  // opposite conclusive verdicts across modes
  bool paired_below_open = false;  // flagged, never an error
};

ConclusivenessReport conclusiveness_report(
    const std::vector<SignificanceMatrix>& matrices);

char verdict_char(Verdict v);

std::string matrix_to_text(const SignificanceMatrix& m);
std::string matrix_to_json(const SignificanceMatrix& m);
SignificanceMatrix matrix_from_json(const std::string& text);

std::string sweep_to_csv(const std::vector<SweepPoint>& points);
std::vector<SweepPoint> sweep_from_csv(const std::string& text);

std::string report_to_text(const ConclusivenessReport& r);

std::string fit_to_text(const VarianceModelFit& fit, const QStar& q);

}  // namespace fse
