#pragma once

#include <stdexcept>
#include <string>

namespace bae {

/// Malformed or unreadable input data. Row/column are 1-based; 0 means n/a.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, long row = 0, long column = 0)
      : std::runtime_error(format(what, row, column)), row_(row), column_(column) {}

  long row() const { return row_; }
  long column() const { return column_; }

 private:
  static std::string format(const std::string& what, long row, long column) {
    if (row == 0) return what;
    std::string s = what + " (row " + std::to_string(row);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ")";
  }
  long row_;
  long column_;
};

/// Invalid experiment or sampler configuration, detected before compute.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values where finite ones are required (diverged parameters).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bae
