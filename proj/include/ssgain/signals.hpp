#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ssgain/kernels.hpp"

namespace ssgain {

/// Piecewise-constant input u(t) = sum_i xi_{i+1} 1_{[s_i, s_{i+1})}(t),
/// zero outside [s_0, s_{ns}).
struct StepSignal {
  std::vector<double> breakpoints;  // s_0 < s_1 < ... < s_ns, all >= 0
  std::vector<double> levels;       // xi_1, ..., xi_ns

  void validate() const;
  double eval(double t) const;
};

/// Finite DT input sequence u_0, ..., u_{N-1}; u_t = 0 for t < 0 (at rest).
struct DtInput {
  std::vector<double> samples;

  double eval(long t) const {
    if (t < 0 || static_cast<std::size_t>(t) >= samples.size()) return 0.0;
    return samples[static_cast<std::size_t>(t)];
  }
};

using InputSignal = std::variant<DtInput, StepSignal>;

double eval_input(const InputSignal& input, double t);

/// Measured input-output data.
struct Dataset {
  TimeDomain domain = TimeDomain::DT;
  InputSignal input;
  std::vector<double> sample_times;  // t_1 < ... < t_nD, non-negative
  std::vector<double> outputs;       // y at the sample times

  std::size_t size() const { return sample_times.size(); }
  void validate() const;
};

/// Ordered subset of {0, ..., n_D - 1} selecting measurement instants.
struct IndexSet {
  std::vector<std::size_t> indices;

  static IndexSet all(std::size_t n);
  void validate(std::size_t n) const;
  std::size_t size() const { return indices.size(); }
};

/// Lower-triangular Toeplitz matrix [T_u]_(i,j) = u_{i-j}.
Eigen::MatrixXd toeplitz(const DtInput& input, std::size_t n);

/// sbar_i(tau) = max(tau - s_i, 0).
double sbar(const StepSignal& step, std::size_t i, double tau);

// CSV dataset files.  DT: single file with header "t,u,y".  CT: a steps file
// with header "s,xi" (last row carries the final breakpoint with empty xi)
// and a samples file with header "t,y".
Dataset load_dt_dataset(const std::string& path);
Dataset load_ct_dataset(const std::string& steps_path,
                        const std::string& samples_path);
void save_dt_dataset(const Dataset& ds, const std::string& path);
void save_ct_dataset(const Dataset& ds, const std::string& steps_path,
                     const std::string& samples_path);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric text at 17 significant digits; shared by every CSV/JSON writer.
std::string format_double(double v);

}  // namespace ssgain
