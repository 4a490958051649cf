#include "antiroll/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace antiroll {

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return int(i);
  return -1;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    raise(ErrorCode::io_error,
          path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      raise(ErrorCode::dimension_mismatch, "csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) raise(ErrorCode::io_error, "write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (line_no == 1) {
      table.columns = cells;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path, line_no));
    if (row.size() != table.columns.size())
      raise(ErrorCode::io_error,
            path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) raise(ErrorCode::io_error, path.string() + ": empty csv");
  return table;
}

const std::vector<std::string> kTrajectoryColumns = {
    "t",         "X",         "Y",        "Z",         "theta_X",  "theta_Z",
    "X_dot",     "Y_dot",     "Z_dot",    "theta_X_dot", "theta_Z_dot",
    "F_l",       "F_r",       "lambda_left", "lambda_right",
    "f1_left",   "f2_left",   "f1_right", "f2_right",  "R"};

namespace {

std::vector<double> trajectory_row(double t, const VehicleState& s, double F_l, double F_r,
                                   double ll, double lr, const BranchValues& bv, double R) {
  return {t,        s.X,     s.Y,     s.Z,      s.theta_X,     s.theta_Z,  s.X_dot,
          s.Y_dot,  s.Z_dot, s.theta_X_dot,     s.theta_Z_dot, F_l,        F_r,
          ll,       lr,      bv.f1_left,        bv.f2_left,    bv.f1_right,
          bv.f2_right, R};
}

}  // namespace

CsvTable trajectory_table(const TrajectorySolution& sol) {
  CsvTable t;
  t.columns = kTrajectoryColumns;
  for (std::size_t n = 0; n < sol.states.size(); ++n)
    t.rows.push_back(trajectory_row(sol.t[n], sol.states[n], sol.F_l[n], sol.F_r[n],
                                    sol.lambda_left[n], sol.lambda_right[n], sol.branches[n],
                                    sol.R[n]));
  return t;
}

CsvTable trajectory_table(const ClosedLoopResult& sim) {
  CsvTable t;
  t.columns = kTrajectoryColumns;
  for (std::size_t n = 0; n < sim.states.size(); ++n) {
    double R = std::numeric_limits<double>::quiet_NaN();
    if (n < sim.rollover.series.R.size()) R = sim.rollover.series.R[n];
    t.rows.push_back(trajectory_row(sim.t[n], sim.states[n], sim.F_l[n], sim.F_r[n],
                                    sim.lambda_left[n], sim.lambda_right[n], sim.branches[n], R));
  }
  return t;
}

}  // namespace antiroll
