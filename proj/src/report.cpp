#include "hillband/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hillband/errors.hpp"

namespace hillband {

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();  // object keys are sorted in nlohmann::json
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt17(v));
  return row(cells);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw Error("CSV row width does not match the header");
  rows_.push_back(cells);
  return *this;
}

std::string CsvWriter::str() const {
  std::string out;
  const auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  f << str();
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  f << j.dump(2) << '\n';
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), xl_(std::move(x_label)), yl_(std::move(y_label)) {}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color) {
  series_.push_back({x, y, color});
}

void SvgPlot::segment(double x0, double y0, double x1, double y1, const std::string& color) {
  segments_.push_back({x0, y0, x1, y1, color});
}

void SvgPlot::hline(double y, const std::string& color) { hlines_.emplace_back(y, color); }

std::string SvgPlot::str() const {
  constexpr double W = 720, H = 440, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  const auto take = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.x.size(); ++i) take(s.x[i], s.y[i]);
  for (const auto& s : segments_) {
    take(s.x0, s.y0);
    take(s.x1, s.y1);
  }
  for (const auto& [y, c] : hlines_) take(x0 == std::numeric_limits<double>::infinity() ? 0.0 : x0, y);
  if (!(x0 < x1)) x1 = x0 + 1.0;
  if (!(y0 < y1)) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  char buf[160];
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title_ << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L,
                T, W - L - R, H - T - B);
  o << buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"11\">%.4g</text>\n",
                  px(xv), H - B + 16, xv);
    o << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">%.4g</text>\n",
                  L - 6, py(yv) + 4, yv);
    o << buf;
  }
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xl_
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
    << ")\" text-anchor=\"middle\" font-size=\"12\">" << yl_ << "</text>\n";
  for (const auto& [y, c] : hlines_) {
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-dasharray=\"4 3\"/>\n",
                  L, py(y), W - R, py(y), c.c_str());
    o << buf;
  }
  for (const auto& s : series_) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      o << buf;
    }
    o << "\"/>\n";
  }
  for (const auto& s : segments_) {
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                  px(s.x0), py(s.y0), px(s.x1), py(s.y1), s.color.c_str());
    o << buf;
  }
  o << "</svg>\n";
  return o.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  f << str();
}

}  // namespace hillband
