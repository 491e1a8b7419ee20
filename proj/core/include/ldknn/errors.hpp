#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldknn {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data. Row and column are 1-based; 0 means
/// "not applicable".
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldknn
