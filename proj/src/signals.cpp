#include "ssgain/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ssgain {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void StepSignal::validate() const {
  if (breakpoints.size() != levels.size() + 1 || levels.empty())
    throw std::invalid_argument("StepSignal: need ns+1 breakpoints for ns levels");
  if (breakpoints.front() < 0.0)
    throw std::invalid_argument("StepSignal: breakpoints must be non-negative");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw std::invalid_argument("StepSignal: breakpoints must strictly increase");
}

double StepSignal::eval(double t) const {
  if (t < breakpoints.front() || t >= breakpoints.back()) return 0.0;
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  return levels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double eval_input(const InputSignal& input, double t) {
  if (t < 0.0) return 0.0;
  return std::visit(
      [t](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, DtInput>)
          return u.eval(static_cast<long>(std::llround(t)));
        else
          return u.eval(t);
      },
      input);
}

void Dataset::validate() const {
  if (sample_times.empty() || sample_times.size() != outputs.size())
    throw std::invalid_argument("Dataset: need n_D >= 1 matching times/outputs");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0)
      throw std::invalid_argument("Dataset: sample times must be non-negative");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("Dataset: sample times must strictly increase");
  }
  if (domain == TimeDomain::DT &&
      !std::holds_alternative<DtInput>(input))
    throw std::invalid_argument("Dataset: DT dataset needs a DtInput");
  if (domain == TimeDomain::CT) {
    if (!std::holds_alternative<StepSignal>(input))
      throw std::invalid_argument("Dataset: CT dataset needs a StepSignal");
    std::get<StepSignal>(input).validate();
  }
}

IndexSet IndexSet::all(std::size_t n) {
  IndexSet s;
  s.indices.resize(n);
  std::iota(s.indices.begin(), s.indices.end(), std::size_t{0});
  return s;
}

void IndexSet::validate(std::size_t n) const {
  if (indices.empty()) throw std::invalid_argument("IndexSet: empty");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n) throw std::invalid_argument("IndexSet: out of bounds");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw std::invalid_argument("IndexSet: must strictly increase");
  }
}

Eigen::MatrixXd toeplitz(const DtInput& input, std::size_t n) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          input.eval(static_cast<long>(i) - static_cast<long>(j));
  return t;
}

double sbar(const StepSignal& step, std::size_t i, double tau) {
  if (i >= step.breakpoints.size())
    throw std::invalid_argument("sbar: breakpoint index out of range");
  return std::max(tau - step.breakpoints[i], 0.0);
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, const std::string& path,
                  std::size_t row, std::size_t col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw CsvError(path + ": row " + std::to_string(row) + ", column " +
                   std::to_string(col) + ": cannot parse '" + cell + "'");
  }
}

std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& header) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw CsvError(path + ": row 1: expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_row(line));
  }
  if (rows.empty()) throw CsvError(path + ": no data rows");
  return rows;
}

}  // namespace

Dataset load_dt_dataset(const std::string& path) {
  const auto rows = read_rows(path, "t,u,y");
  Dataset ds;
  ds.domain = TimeDomain::DT;
  DtInput u;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 3)
      throw CsvError(path + ": row " + std::to_string(r + 2) +
                     ": expected 3 columns");
    ds.sample_times.push_back(parse_cell(rows[r][0], path, r + 2, 1));
    u.samples.push_back(parse_cell(rows[r][1], path, r + 2, 2));
    ds.outputs.push_back(parse_cell(rows[r][2], path, r + 2, 3));
  }
  ds.input = u;
  ds.validate();
  return ds;
}

Dataset load_ct_dataset(const std::string& steps_path,
                        const std::string& samples_path) {
  Dataset ds;
  ds.domain = TimeDomain::CT;
  StepSignal step;
  {
    const auto rows = read_rows(steps_path, "s,xi");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() < 1 || rows[r].size() > 2)
        throw CsvError(steps_path + ": row " + std::to_string(r + 2) +
                       ": expected 's,xi'");
      step.breakpoints.push_back(parse_cell(rows[r][0], steps_path, r + 2, 1));
      const bool has_level = rows[r].size() == 2 && !rows[r][1].empty();
      if (has_level)
        step.levels.push_back(parse_cell(rows[r][1], steps_path, r + 2, 2));
      else if (r + 1 != rows.size())
        throw CsvError(steps_path + ": row " + std::to_string(r + 2) +
                       ": only the final breakpoint may omit xi");
    }
    step.validate();
  }
  {
    const auto rows = read_rows(samples_path, "t,y");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != 2)
        throw CsvError(samples_path + ": row " + std::to_string(r + 2) +
                       ": expected 2 columns");
      ds.sample_times.push_back(parse_cell(rows[r][0], samples_path, r + 2, 1));
      ds.outputs.push_back(parse_cell(rows[r][1], samples_path, r + 2, 2));
    }
  }
  ds.input = step;
  ds.validate();
  return ds;
}

void save_dt_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  const auto& u = std::get<DtInput>(ds.input);
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot write");
  out << "t,u,y\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    out << format_double(ds.sample_times[i]) << ','
        << format_double(i < u.samples.size() ? u.samples[i] : 0.0) << ','
        << format_double(ds.outputs[i]) << '\n';
}

void save_ct_dataset(const Dataset& ds, const std::string& steps_path,
                     const std::string& samples_path) {
  ds.validate();
  const auto& step = std::get<StepSignal>(ds.input);
  {
    std::ofstream out(steps_path);
    if (!out) throw CsvError(steps_path + ": cannot write");
    out << "s,xi\n";
    for (std::size_t i = 0; i < step.levels.size(); ++i)
      out << format_double(step.breakpoints[i]) << ','
          << format_double(step.levels[i]) << '\n';
    out << format_double(step.breakpoints.back()) << ",\n";
  }
  {
    std::ofstream out(samples_path);
    if (!out) throw CsvError(samples_path + ": cannot write");
    out << "t,y\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
      out << format_double(ds.sample_times[i]) << ','
          << format_double(ds.outputs[i]) << '\n';
  }
}

}  // namespace ssgain
