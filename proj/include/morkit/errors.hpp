#ifndef MORKIT_ERRORS_HPP
#define MORKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace morkit {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error in a netlist or config file, with 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// File missing, unreadable, or malformed beyond repair.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Matrix shapes or grids that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular factorization, non-Hurwitz matrix, lost rank.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (unknown key, conflicting or missing settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace morkit

#endif  // MORKIT_ERRORS_HPP
