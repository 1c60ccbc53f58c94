#include "nsqp/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsqp/errors.hpp"

namespace nsqp {

namespace {

const char* const kFixedColumns[] = {"k",          "alpha",      "theta",
                                     "f",          "v",          "merit",
                                     "step_norm",  "lambda_inf", "kkt_stationarity",
                                     "kkt_comp"};
constexpr int kFixedCount = 10;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw FormatError("trace line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_columns(int n) {
  std::vector<std::string> cols(std::begin(kFixedColumns), std::end(kFixedColumns));
  for (int i = 0; i < n; ++i) cols.push_back("x_" + std::to_string(i));
  return cols;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, int n) {
  const auto cols = trace_columns(n);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : trace) {
    out << r.k;
    for (double v : {r.alpha, r.theta, r.f, r.v, r.merit, r.step_norm, r.lambda_inf,
                     r.kkt.stationarity, r.kkt.complementarity}) {
      out << ',' << format_double(v);
    }
    for (int i = 0; i < n; ++i) out << ',' << format_double(r.x(i));
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace, int n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_trace_csv(out, trace, n);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

int TraceTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw FormatError("trace has no column '" + name + "'");
}

std::vector<Vector> TraceTable::iterates() const {
  std::vector<Vector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = row[kFixedCount + i];
    out.push_back(std::move(x));
  }
  return out;
}

TraceTable read_trace_csv(std::istream& in) {
  TraceTable t;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  if (static_cast<int>(t.header.size()) < kFixedCount) throw FormatError("trace header too short");
  for (int i = 0; i < kFixedCount; ++i) {
    if (t.header[i] != kFixedColumns[i]) {
      throw FormatError("trace header column " + std::to_string(i) + " should be '" +
                        kFixedColumns[i] + "'");
    }
  }
  t.n = static_cast<int>(t.header.size()) - kFixedCount;
  for (int i = 0; i < t.n; ++i) {
    if (t.header[kFixedCount + i] != "x_" + std::to_string(i)) {
      throw FormatError("trace header: expected x_" + std::to_string(i));
    }
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw FormatError("trace line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    t.rows.push_back(std::move(row));
  }
  return t;
}

TraceTable read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trace '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace nsqp
