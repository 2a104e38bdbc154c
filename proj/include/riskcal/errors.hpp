#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace riskcal {

/// Dataset and model schemas disagree, or a feature kind is not supported
/// by the requested model family.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Statistics that cannot be mapped to valid parameters (non-finite values).
class DegenerateStatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A calibration loop failed at a given iteration.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(int iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Malformed input file. `line` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The train/test splitter could not place every class in the training part.
class StratificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An experiment or command configuration failed validation. `fields` names
/// every offending entry.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> fields)
      : std::invalid_argument(join(fields)), fields_(std::move(fields)) {}

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string out = "invalid configuration:";
    for (const auto& f : fields) out += "\n  " + f;
    return out;
  }

  std::vector<std::string> fields_;
};

}  // namespace riskcal
