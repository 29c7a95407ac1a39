#include "lmsm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lmsm/errors.hpp"

namespace lmsm {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTopPad = 20.0;
constexpr double kBottomPad = 30.0;
constexpr double kLineHeight = 14.0;
constexpr int kDecimals = 3;

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fx(double x) { return format_fixed(x, kDecimals); }

std::pair<double, double> padded_range(double lo, double hi) {
  if (lo == hi) {
    const double pad = lo == 0.0 ? 1.0 : 0.5 * std::fabs(lo);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace

std::string render_svg(const CsvTable& table) {
  if (table.header.size() < 2) throw SchemaError("render needs a domain column and at least one data column");
  if (table.rows.empty()) throw SchemaError("render needs at least one data row");
  for (const auto& row : table.rows) {
    for (double x : row) {
      if (!std::isfinite(x)) throw SchemaError("non-finite value in CSV");
    }
  }

  const std::size_t panels = table.header.size() - 1;
  const double caption_height = kLineHeight * static_cast<double>(table.comments.size()) + 10.0;
  const double height = caption_height + kPanelHeight * static_cast<double>(panels);

  double t_lo = table.rows.front()[0], t_hi = t_lo;
  for (const auto& row : table.rows) {
    t_lo = std::min(t_lo, row[0]);
    t_hi = std::max(t_hi, row[0]);
  }
  std::tie(t_lo, t_hi) = padded_range(t_lo, t_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const auto sx = [&](double t) { return kLeft + (t - t_lo) / (t_hi - t_lo) * plot_w; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(kWidth) << "\" height=\"" << fx(height)
    << "\" viewBox=\"0 0 " << fx(kWidth) << ' ' << fx(height) << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fx(kWidth) << "\" height=\"" << fx(height) << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < table.comments.size(); ++i) {
    s << "<text x=\"10\" y=\"" << fx(kLineHeight * static_cast<double>(i + 1))
      << "\" font-family=\"monospace\" font-size=\"10\">" << xml_escape(table.comments[i]) << "</text>\n";
  }

  for (std::size_t c = 1; c <= panels; ++c) {
    const double top = caption_height + kPanelHeight * static_cast<double>(c - 1) + kTopPad;
    const double plot_h = kPanelHeight - kTopPad - kBottomPad;
    double y_lo = table.rows.front()[c], y_hi = y_lo;
    for (const auto& row : table.rows) {
      y_lo = std::min(y_lo, row[c]);
      y_hi = std::max(y_hi, row[c]);
    }
    std::tie(y_lo, y_hi) = padded_range(y_lo, y_hi);
    const auto sy = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

    s << "<g>\n";
    s << "<rect x=\"" << fx(kLeft) << "\" y=\"" << fx(top) << "\" width=\"" << fx(plot_w) << "\" height=\""
      << fx(plot_h) << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    s << "<text x=\"" << fx(kLeft) << "\" y=\"" << fx(top - 5.0) << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << xml_escape(table.header[c]) << " vs " << xml_escape(table.header[0]) << "</text>\n";
    s << "<text x=\"" << fx(kLeft - 5.0) << "\" y=\"" << fx(top + 10.0)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(y_hi) << "</text>\n";
    s << "<text x=\"" << fx(kLeft - 5.0) << "\" y=\"" << fx(top + plot_h)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(y_lo) << "</text>\n";
    s << "<text x=\"" << fx(kLeft) << "\" y=\"" << fx(top + plot_h + 14.0)
      << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(t_lo) << "</text>\n";
    s << "<text x=\"" << fx(kLeft + plot_w) << "\" y=\"" << fx(top + plot_h + 14.0)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(t_hi) << "</text>\n";
    if (table.rows.size() == 1) {
      const auto& row = table.rows.front();
      s << "<circle cx=\"" << fx(sx(row[0])) << "\" cy=\"" << fx(sy(row[c]))
        << "\" r=\"3\" fill=\"#1f4e9c\"/>\n";
    } else {
      s << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"0.8\" points=\"";
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (i) s << ' ';
        s << fx(sx(table.rows[i][0])) << ',' << fx(sy(table.rows[i][c]));
      }
      s << "\"/>\n";
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace lmsm
