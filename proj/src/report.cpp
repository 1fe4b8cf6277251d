#include "holelab/report.hpp"

#include "holelab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace holelab {

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    case Status::extrapolated: return "extrapolated";
  }
  return "inconclusive";
}

Status decide(const std::optional<double>& threshold, bool ok, Status fallback) {
  if (!threshold) return fallback;
  return ok ? Status::pass : Status::fail;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, bool timing) {
  os << "epsilon,p,grad_lp,pressure_lp,source_lp,ratio,dofs,seconds\n";
  for (const auto& r : records) {
    os << num(r.epsilon) << ',' << num(r.p) << ',' << num(r.norms.grad_velocity_lp) << ','
       << num(r.norms.pressure_lp) << ',' << num(r.norms.source_lp) << ',' << num(r.ratio) << ',' << r.dofs << ','
       << num(timing ? r.seconds : 0.0) << '\n';
  }
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
    os << '\n';
  }
}

namespace {

nlohmann::ordered_json values_json(const NamedValues& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, x] : v) {
    if (std::isfinite(x))
      j[k] = x;
    else
      j[k] = std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  }
  return j;
}

}  // namespace

std::string verdicts_json(const std::string& experiment, const std::string& name, const std::vector<Verdict>& verdicts,
                          const std::vector<std::string>& failures) {
  nlohmann::ordered_json j;
  j["schema"] = config_schema_version;
  j["experiment"] = experiment;
  j["name"] = name;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json e;
    e["claim"] = v.claim;
    e["check"] = v.check;
    e["status"] = to_string(v.status);
    e["measured"] = values_json(v.measured);
    e["thresholds"] = values_json(v.thresholds);
    e["labels"] = v.labels;
    j["verdicts"].push_back(std::move(e));
  }
  j["failures"] = failures;
  return j.dump(2) + "\n";
}

void write_verdicts_json(std::ostream& os, const std::string& experiment, const std::string& name,
                         const std::vector<Verdict>& verdicts, const std::vector<std::string>& failures) {
  os << verdicts_json(experiment, name, verdicts, failures);
}

std::string loglog_svg(const std::string& title, const std::string& y_label, const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
      if (!(s.values[i] > 0) || !(s.eps[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(1.0 / s.eps[i]));
      xmax = std::max(xmax, std::log10(1.0 / s.eps[i]));
      ymin = std::min(ymin, std::log10(s.values[i]));
      ymax = std::max(ymax, std::log10(s.values[i]));
    }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-3) ymin -= 0.05, ymax += 0.05;
  const double pad = 0.08 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">log10(1/eps)</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">log10(" << y_label << ")</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = xmin + k * (xmax - xmin) / 4, y = ymin + k * (ymax - ymin) / 4;
    os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << x << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* c = colors[s % 6];
    std::ostringstream pts;
    pts.precision(6);
    double lx = 0, ly = 0;
    bool any = false;
    for (std::size_t i = 0; i < ser.eps.size(); ++i) {
      if (!(ser.values[i] > 0) || !(ser.eps[i] > 0)) continue;
      lx = std::log10(1.0 / ser.eps[i]);
      ly = std::log10(ser.values[i]);
      pts << px(lx) << ',' << py(ly) << ' ';
      os << "<circle cx=\"" << px(lx) << "\" cy=\"" << py(ly) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
      any = true;
    }
    if (!any) continue;
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"" << pts.str() << "\"/>\n";
    std::string legend = ser.label;
    if (ser.slope) {
      const double x0 = xmin;
      const double y0 = ly - *ser.slope * (lx - x0);
      os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(lx) << "\" y2=\"" << py(ly)
         << "\" stroke=\"" << c << "\" stroke-dasharray=\"4 3\"/>\n";
      std::ostringstream sl;
      sl.precision(3);
      sl << " (slope " << *ser.slope << ")";
      legend += sl.str();
    }
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 + 16 * s << "\" fill=\"" << c << "\">" << legend << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int exit_code(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts)
    if (v.status == Status::fail) return 1;
  return 0;
}

}  // namespace holelab
