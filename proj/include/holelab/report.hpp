#pragma once

#include "holelab/scaling_experiments.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace holelab {

enum class Status { pass, fail, inconclusive, extrapolated };
std::string to_string(Status s);

using NamedValues = std::vector<std::pair<std::string, double>>;

struct Verdict {
  std::string claim;  ///< anchor of the claim being checked
  std::string check;  ///< what was measured, e.g. "uniform p=2"
  Status status = Status::inconclusive;
  NamedValues measured;
  NamedValues thresholds;  ///< every threshold that produced the status
  std::vector<std::string> labels;
};

/// pass/fail when the threshold is given, otherwise `fallback`.
Status decide(const std::optional<double>& threshold, bool ok, Status fallback = Status::inconclusive);

/// Columns: epsilon, p, grad_lp, pressure_lp, source_lp, ratio, dofs, seconds.
/// seconds is written as 0 unless `timing` is set.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, bool timing);

/// Header line followed by rows; numbers with 17 significant digits.
void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// {"schema", "experiment", "name", "verdicts": [...], "failures": [...]}.
void write_verdicts_json(std::ostream& os, const std::string& experiment, const std::string& name,
                         const std::vector<Verdict>& verdicts, const std::vector<std::string>& failures);
std::string verdicts_json(const std::string& experiment, const std::string& name, const std::vector<Verdict>& verdicts,
                          const std::vector<std::string>& failures);

struct PlotSeries {
  std::string label;
  std::vector<double> eps;
  std::vector<double> values;
  std::optional<double> slope;  ///< fitted slope drawn through the last point
};

/// Static log-log plot of value against 1/eps.
std::string loglog_svg(const std::string& title, const std::string& y_label, const std::vector<PlotSeries>& series);

/// Exit code for a set of verdicts: 1 if any failed, else 0.
int exit_code(const std::vector<Verdict>& verdicts);

}  // namespace holelab
