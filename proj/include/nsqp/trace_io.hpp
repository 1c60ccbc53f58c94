#pragma once

// Trace CSV: k, alpha, theta, f, v, merit, step_norm, lambda_inf,
// kkt_stationarity, kkt_comp, x_0 .. x_{n-1}. Header row first; numbers
// printed with 17 significant digits so a read-back is exact.

#include <iosfwd>
#include <string>
#include <vector>

#include "nsqp/driver.hpp"

namespace nsqp {

std::vector<std::string> trace_columns(int n);

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, int n);
/// Throws FormatError when the file cannot be written.
void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace, int n);

struct TraceTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int n = 0;

  /// Index of a named column; throws FormatError when absent.
  int column(const std::string& name) const;
  std::vector<Vector> iterates() const;
};

/// Throws FormatError on a missing or malformed header, ragged rows, or
/// unparsable numbers.
TraceTable read_trace_csv(std::istream& in);
TraceTable read_trace_csv(const std::string& path);

/// 17 significant digits.
std::string format_double(double v);

}  // namespace nsqp
