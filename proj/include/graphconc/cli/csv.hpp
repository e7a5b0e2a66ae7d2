#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "graphconc/error.hpp"

namespace graphconc::cli {

/// 12 significant digits, shortest of fixed/exponent form.
inline std::string format_number(double x) {
  require(std::isfinite(x), Errc::NonFinite, "CSV cells must be finite");
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string format_number(std::size_t x) { return std::to_string(x); }
inline std::string format_bool(bool b) { return b ? "1" : "0"; }

/// Header row, one row per trial or threshold, then "#summary" rows of the
/// form "#summary,<metric>,<value>" padded to the header's width.
class CsvReport {
 public:
  explicit CsvReport(std::vector<std::string> columns) : columns_(std::move(columns)) {
    require(columns_.size() >= 3, Errc::InvalidParameter, "CSV report needs at least three columns");
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& summary() const noexcept { return summary_; }

  void add_row(std::vector<std::string> cells) {
    require(cells.size() == columns_.size(), Errc::DimensionMismatch, "CSV row width differs from header");
    rows_.push_back(std::move(cells));
  }

  void add_summary(std::string metric, double value) { summary_.emplace_back(std::move(metric), format_number(value)); }

  void write(std::ostream& out) const {
    write_line(out, columns_);
    for (const auto& r : rows_) write_line(out, r);
    for (const auto& [metric, value] : summary_) {
      std::vector<std::string> cells(columns_.size());
      cells[0] = "#summary";
      cells[1] = metric;
      cells[2] = value;
      write_line(out, cells);
    }
  }

  /// Long format: one (row, variable, value) line per numeric cell.
  void write_long(std::ostream& out, const std::string& experiment) const {
    out << "experiment,row,variable,value\n";
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (std::size_t c = 0; c < columns_.size(); ++c)
        if (rows_[r][c] != "NA") out << experiment << ',' << r << ',' << columns_[c] << ',' << rows_[r][c] << '\n';
  }

 private:
  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

}  // namespace graphconc::cli
