#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qfl::experiments {

// Numeric CSV table with a fixed header. Floats are written in shortest
// round-trip form, so identical inputs give identical bytes.
class ResultTable {
 public:
  ResultTable(std::string name, std::vector<std::string> columns);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// Throws std::invalid_argument if the width differs from the header.
  void add_row(std::vector<double> row);

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

std::string format_number(double v);

}  // namespace qfl::experiments
