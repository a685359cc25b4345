#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hillband {

/// %.17g, so that written numbers round-trip exactly.
std::string fmt17(double x);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<double>& values);
  CsvWriter& row(const std::vector<std::string>& cells);
  void write(const std::filesystem::path& path) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// Line plots with optional vertical segments, drawn on a linear frame.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);
  void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color = "#1f77b4");
  void segment(double x0, double y0, double x1, double y1, const std::string& color = "#d62728");
  void hline(double y, const std::string& color = "#999999");
  void write(const std::filesystem::path& path) const;
  std::string str() const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string color;
  };
  struct Segment {
    double x0, y0, x1, y1;
    std::string color;
  };
  std::string title_, xl_, yl_;
  std::vector<Series> series_;
  std::vector<Segment> segments_;
  std::vector<std::pair<double, std::string>> hlines_;
};

}  // namespace hillband
