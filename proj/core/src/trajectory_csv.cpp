#include "lyapguard/trajectory_csv.hpp"

#include <charconv>
#include <string_view>

namespace lyapguard {
namespace {

std::vector<std::string> build_columns() {
  std::vector<std::string> cols{"t"};
  auto add3 = [&](const std::string& base, const char* a, const char* b, const char* c) {
    cols.push_back(base + a);
    cols.push_back(base + b);
    cols.push_back(base + c);
  };
  add3("eta_", "phi", "theta", "psi");
  add3("eta_dot_", "phi", "theta", "psi");
  add3("eta_d_", "phi", "theta", "psi");
  add3("e_", "phi", "theta", "psi");
  add3("e_dot_", "phi", "theta", "psi");
  for (int i = 1; i <= 6; ++i) cols.push_back("E_" + std::to_string(i));
  add3("tau_", "phi", "theta", "psi");
  for (int i = 1; i <= 4; ++i) cols.push_back("omega_" + std::to_string(i));
  add3("d_", "phi", "theta", "psi");
  add3("v_", "1", "2", "3");
  add3("gamma_", "1", "2", "3");
  cols.insert(cols.end(), {"V", "V_dot", "branch", "saturated", "assumption_flags"});
  return cols;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    out.push_back(line.substr(begin, comma - begin));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw CsvError(line, "column " + csv_columns()[column] + ": not a number '" +
                             std::string(field) + "'");
  }
  return value;
}

}  // namespace

CsvError::CsvError(std::size_t line, const std::string& what)
    : Error("csv line " + std::to_string(line) + ": " + what), line_(line) {}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = build_columns();
  return cols;
}

std::string format_g17(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out << ',';
    out << cols[i];
  }
  out << '\n';
}

void write_csv_row(std::ostream& out, const LogSample& s) {
  std::string row;
  row.reserve(700);
  auto num = [&](double v) {
    if (!row.empty()) row += ',';
    row += format_g17(v);
  };
  auto vec = [&](const auto& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) num(v(i));
  };
  num(s.t);
  vec(s.eta);
  vec(s.eta_dot);
  vec(s.eta_d);
  vec(s.e);
  vec(s.e_dot);
  vec(s.E);
  vec(s.tau);
  vec(s.omega);
  vec(s.d);
  vec(s.v);
  vec(s.gamma);
  num(s.V);
  num(s.V_dot);
  row += ',';
  row += to_string(s.branch);
  row += s.saturated ? ",1" : ",0";
  row += ',';
  row += std::to_string(s.assumption_flags);
  row += '\n';
  out << row;
}

void write_csv(std::ostream& out, const TrajectoryLog& log) {
  write_csv_header(out);
  for (const auto& s : log.samples) write_csv_row(out, s);
}

TrajectoryCsvReader::TrajectoryCsvReader(std::istream& in) : in_(in) {
  std::string header;
  if (!std::getline(in_, header)) {
    empty_ = true;
    return;
  }
  line_ = 1;
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto fields = split(header);
  const auto& cols = csv_columns();
  if (fields.size() != cols.size()) {
    throw CsvError(1, "header has " + std::to_string(fields.size()) + " columns, expected " +
                          std::to_string(cols.size()));
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (fields[i] != cols[i]) {
      throw CsvError(1, "header column " + std::to_string(i + 1) + " is '" +
                            std::string(fields[i]) + "', expected '" + cols[i] + "'");
    }
  }
}

std::optional<LogSample> TrajectoryCsvReader::next() {
  if (empty_) return std::nullopt;
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;

    const auto fields = split(text);
    const auto& cols = csv_columns();
    if (fields.size() != cols.size()) {
      throw CsvError(line_, "row has " + std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(cols.size()));
    }
    std::size_t col = 0;
    auto num = [&]() { const double v = parse_double(fields[col], line_, col); ++col; return v; };
    auto vec = [&](auto& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = num();
    };
    LogSample s;
    s.t = num();
    vec(s.eta);
    vec(s.eta_dot);
    vec(s.eta_d);
    vec(s.e);
    vec(s.e_dot);
    vec(s.E);
    vec(s.tau);
    vec(s.omega);
    vec(s.d);
    vec(s.v);
    vec(s.gamma);
    s.V = num();
    s.V_dot = num();
    try {
      s.branch = branch_from_string(fields[col]);
    } catch (const InvalidArgument&) {
      throw CsvError(line_, "column branch: unknown value '" + std::string(fields[col]) + "'");
    }
    ++col;
    if (fields[col] == "1") {
      s.saturated = true;
    } else if (fields[col] != "0") {
      throw CsvError(line_, "column saturated must be 0 or 1");
    }
    ++col;
    std::uint32_t flags = 0;
    const auto f = fields[col];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), flags);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
      throw CsvError(line_, "column assumption_flags must be an unsigned integer");
    }
    s.assumption_flags = flags;
    return s;
  }
  return std::nullopt;
}

}  // namespace lyapguard
