#include "fracfield/study_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>
#include <vector>

#include "fracfield/format.hpp"

namespace fracfield {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_header(std::ostream& out, const ArtifactHeader& header, const std::string& timestamp) {
  out << "# fracfield " << FRACFIELD_VERSION << ' ' << header.artifact << '\n';
  out << "# calibration: " << header.calibration << '\n';
  out << "# generator: " << header.generator << '\n';
  for (const auto& [key, value] : header.parameters) out << "# param " << key << " = " << value << '\n';
  out << "# timestamp: " << timestamp << '\n';
}

void write_rows_csv(std::ostream& out, const StudyResult& result) {
  out << "beta,d,N_h,h,k,K_minus,K_plus,functional,E_ref,E_disc,abs_error\n";
  for (const StudyRow& r : result.rows) {
    out << format_double(r.beta) << ',' << r.dim << ',' << r.dofs << ',' << format_double(r.h) << ','
        << format_double(r.k) << ',' << r.k_minus << ',' << r.k_plus << ',' << '"' << r.functional << '"' << ','
        << format_double(r.e_ref) << ',' << format_double(r.e_disc) << ',' << format_double(r.abs_error) << '\n';
  }
}

void write_rates_csv(std::ostream& out, const StudyResult& result) {
  out << "beta,d,functional,rate_observed,rate_theory,intercept\n";
  for (const StudyRate& r : result.rates) {
    out << format_double(r.beta) << ',' << r.dim << ',' << '"' << r.functional << '"' << ','
        << format_double(r.rate_observed) << ',' << format_double(r.rate_theory) << ',' << format_double(r.intercept)
        << '\n';
  }
}

namespace {

struct Series {
  double beta;
  std::vector<std::pair<double, double>> points;  // (ln h, ln err)
};

// Nice decade ticks covering [lo, hi] in natural log units.
std::vector<int> decades(double lo, double hi) {
  std::vector<int> out;
  for (int e = static_cast<int>(std::floor(lo / std::log(10.0))); e <= static_cast<int>(std::ceil(hi / std::log(10.0)));
       ++e) {
    out.push_back(e);
  }
  return out;
}

}  // namespace

void write_error_plot_svg(std::ostream& out, const StudyResult& result, const std::string& functional) {
  std::vector<Series> series;
  for (const StudyRow& r : result.rows) {
    if (r.functional != functional || !(r.abs_error > 0.0)) continue;
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.beta == r.beta; });
    if (it == series.end()) {
      series.push_back({r.beta, {}});
      it = series.end() - 1;
    }
    it->points.emplace_back(std::log(r.h), std::log(r.abs_error));
  }

  constexpr double width = 640, height = 480, left = 80, right = 130, top = 40, bottom = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (series.empty()) {
    x0 = -1.0, x1 = 0.0, y0 = -1.0, y1 = 0.0;
  }
  const double padx = std::max(0.05 * (x1 - x0), 0.1), pady = std::max(0.05 * (y1 - y0), 0.1);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * (height - top - bottom); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\">weak error, " << functional << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e : decades(x0, x1)) {
    const double x = e * std::log(10.0);
    if (x < x0 || x > x1) continue;
    out << "<line x1=\"" << px(x) << "\" y1=\"" << top << "\" x2=\"" << px(x) << "\" y2=\"" << height - bottom
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">1e" << e
        << "</text>\n";
  }
  for (int e : decades(y0, y1)) {
    const double y = e * std::log(10.0);
    if (y < y0 || y > y1) continue;
    out << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << width - right << "\" y2=\"" << py(y)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">h</text>\n";
  out << "<text x=\"18\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (top + height - bottom) / 2 << ")\">abs error</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % std::size(colors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[i].points) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points) {
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << width - right + 32 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << width - right + 38 << "\" y=\"" << ly << "\">beta = " << format_double(series[i].beta)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace fracfield
