#pragma once

// Run artifacts: CSV files with '#'-prefixed metadata lines ahead of an
// RFC 4180 body, and plain SVG line charts.

#include <filesystem>
#include <string>
#include <vector>

namespace hqm::output {

/// Shortest decimal form that round-trips the double (up to 17 digits).
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  /// Adds "# key: value" lines; multi-line values become several lines.
  void meta(const std::string& key, const std::string& value);
  void meta_block(const std::string& title, const std::string& text);
  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);

  std::size_t row_count() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& cell);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
  double width = 720;
  double height = 440;
};

std::string render_svg(const Chart& chart);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hqm::output
