#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bvc/error.hpp"
#include "bvc/study.hpp"

namespace bvc {

namespace {

std::string format(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return "";
  return format(std::log(e0 / e1) / std::log(h0 / h1));
}

double parse_number(const std::string& field) {
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size())
    throw IoError("csv: malformed number '" + field + "'");
  return value;
}

const char* const kHeader =
    "level,h,nno,dofs_u,dofs_lambda,err_l2,err_h1,err_lambda,rate_l2,rate_h1,rate_lambda,delta_h,normal_dev";

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

double norm_error(const ErrorReport& r, Norm norm) {
  switch (norm) {
    case Norm::l2: return r.err_l2;
    case Norm::h1: return r.err_h1;
    default: return r.err_lambda;
  }
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

}  // namespace

void emit_csv(const std::vector<ErrorReport>& reports, std::ostream& out) {
  out << kHeader << "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    out << r.level << ',' << format(r.h) << ',' << r.nno << ',' << r.dofs_u << ',' << r.dofs_lambda << ','
        << format(r.err_l2) << ',' << format(r.err_h1) << ',' << format(r.err_lambda) << ',';
    if (i > 0) {
      const ErrorReport& p = reports[i - 1];
      out << rate(p.err_l2, r.err_l2, p.h, r.h) << ',' << rate(p.err_h1, r.err_h1, p.h, r.h) << ','
          << rate(p.err_lambda, r.err_lambda, p.h, r.h) << ',';
    } else {
      out << ",,,";
    }
    out << format(r.delta_h) << ',' << format(r.normal_dev) << "\n";
  }
  if (!out) throw IoError("csv: write failed");
}

void emit_csv(const StudyBranch& branch, const std::string& path) {
  auto out = open_output(path);
  emit_csv(branch.solved_reports(), out);
}

std::vector<ErrorReport> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw IoError("csv: missing or unexpected header");
  std::vector<ErrorReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 13) throw IoError("csv: expected 13 columns, got " + std::to_string(fields.size()));
    ErrorReport r;
    r.level = static_cast<int>(parse_number(fields[0]));
    r.h = parse_number(fields[1]);
    r.nno = static_cast<int>(parse_number(fields[2]));
    r.dofs_u = static_cast<int>(parse_number(fields[3]));
    r.dofs_lambda = static_cast<int>(parse_number(fields[4]));
    r.err_l2 = parse_number(fields[5]);
    r.err_h1 = parse_number(fields[6]);
    r.err_lambda = parse_number(fields[7]);
    r.delta_h = parse_number(fields[11]);
    r.normal_dev = parse_number(fields[12]);
    reports.push_back(r);
  }
  return reports;
}

void emit_plot_svg(const StudyResult& result, Norm norm, std::ostream& out) {
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // log10 h, log10 err
  };
  std::vector<Series> series;
  for (const auto& branch : result.branches) {
    Series s{branch.label, {}};
    for (const auto& r : branch.solved_reports()) {
      const double e = norm_error(r, norm);
      if (e > 0.0) s.points.emplace_back(std::log10(r.h), std::log10(e));
    }
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw IoError("plot: no data for norm " + to_string(norm));

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  const double xspan = std::max(x1 - x0, 1e-3), yspan = std::max(y1 - y0, 1e-3);
  const double ax0 = x0 - 0.1 * xspan, ax1 = x1 + 0.1 * xspan;
  const double ay0 = y0 - 0.1 * yspan, ay1 = y1 + 0.1 * yspan;

  const double W = 640, H = 480, L = 80, R = 160, T = 40, B = 60;
  auto px = [&](double x) { return L + (x - ax0) / (ax1 - ax0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ay0) / (ay1 - ay0) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << result.name << ": " << to_string(norm)
      << " error</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int p = static_cast<int>(std::ceil(ax0)); p <= static_cast<int>(std::floor(ax1)); ++p)
    out << "<line x1=\"" << px(p) << "\" y1=\"" << H - B << "\" x2=\"" << px(p) << "\" y2=\"" << H - B + 5
        << "\" stroke=\"black\"/><text x=\"" << px(p) << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"middle\">1e" << p << "</text>\n";
  for (int p = static_cast<int>(std::ceil(ay0)); p <= static_cast<int>(std::floor(ay1)); ++p)
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << py(p) << "\" x2=\"" << L << "\" y2=\"" << py(p)
        << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << py(p) + 4 << "\" text-anchor=\"end\">1e" << p
        << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">h</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points)
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 + 18 * i << "\" fill=\"" << color << "\">"
        << series[i].label << "</text>\n";
  }

  // Reference slope triangle below the data, anchored at the left.
  const double slope = expected_rate(result.branches.front().config, norm);
  const double dx = std::min(0.25 * xspan, 0.5 * yspan / slope);
  const double tx = x0 + 0.05 * xspan, ty = y0 - 0.05 * yspan;
  out << "<polygon fill=\"none\" stroke=\"gray\" points=\"" << px(tx) << ',' << py(ty) << ' ' << px(tx + dx) << ','
      << py(ty) << ' ' << px(tx + dx) << ',' << py(ty + slope * dx) << "\"/>\n";
  out << "<text x=\"" << px(tx + dx) + 4 << "\" y=\"" << py(ty + 0.5 * slope * dx) << "\" fill=\"gray\">" << slope
      << "</text>\n";
  out << "</svg>\n";
  if (!out) throw IoError("plot: write failed");
}

void emit_elevation(const StudyBranch& branch, std::ostream& out) {
  for (std::size_t i = 0; i < branch.vertices.size(); ++i)
    out << format(branch.vertices[i].x()) << ' ' << format(branch.vertices[i].y()) << ' '
        << format(branch.vertex_values[i]) << "\n";
  if (!out) throw IoError("elevation: write failed");
}

std::vector<std::string> emit_plots(const StudyResult& result, const std::string& prefix) {
  if (result.branches.empty()) throw IoError("plot: empty result");
  std::vector<std::string> written;
  for (Norm norm : {Norm::l2, Norm::h1, Norm::lambda}) {
    const bool any = std::any_of(result.branches.begin(), result.branches.end(), [&](const StudyBranch& b) {
      const auto reports = b.solved_reports();
      return std::any_of(reports.begin(), reports.end(), [&](const ErrorReport& r) { return norm_error(r, norm) > 0; });
    });
    if (!any) continue;
    const std::string path = prefix + "_" + to_string(norm) + ".svg";
    auto out = open_output(path);
    emit_plot_svg(result, norm, out);
    written.push_back(path);
  }
  for (const auto& branch : result.branches) {
    if (branch.vertices.empty()) continue;
    const std::string path = prefix + "_" + branch.label + "_elevation.txt";
    auto out = open_output(path);
    emit_elevation(branch, out);
    written.push_back(path);
  }
  return written;
}

}  // namespace bvc
