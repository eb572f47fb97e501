// Trajectory log CSV: one header row, columns in LogSample field order,
// floating point with 17 significant digits (locale independent).
#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lyapguard/errors.hpp"
#include "lyapguard/simulator.hpp"

namespace lyapguard {

/// Malformed CSV input; line() is the 1-based line number in the file.
class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

const std::vector<std::string>& csv_columns();

/// Shortest-free, fixed 17-significant-digit rendering ("%.17g" semantics).
std::string format_g17(double value);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const LogSample& sample);
void write_csv(std::ostream& out, const TrajectoryLog& log);

/// Incremental reader; validates the header on construction.
class TrajectoryCsvReader {
 public:
  explicit TrajectoryCsvReader(std::istream& in);

  /// Next row, or nullopt at end of input (blank trailing lines ignored).
  std::optional<LogSample> next();

  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  bool empty_ = false;
};

}  // namespace lyapguard
