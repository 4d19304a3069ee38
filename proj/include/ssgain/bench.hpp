#pragma once

#include <cstdint>
#include <optional>

#include "ssgain/model.hpp"

namespace ssgain {

struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
};

struct RandomSystemSpec {
  std::size_t n = 8;
  double r = 0.9;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double snr_db = 20.0;
  std::uint64_t seed = 0;
};

struct GeneratedSystem {
  StateSpace ss;
  std::vector<double> impulse;  // truncated at tail tolerance 1e-10
  double gain = 0.0;            // sum of the full impulse response
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random stable DT state-space: Gaussian A rescaled to spectral radius r,
/// Gaussian B and C, D = 0, then C scaled so the impulse response has unit
/// energy.
GeneratedSystem gen_system(const RandomSystemSpec& spec);

/// Exact state recursion from rest over n_samples steps; optional additive
/// white Gaussian noise scaled to hit snr_db on the realized sequence.
/// realized_snr_db (if given) receives the achieved ratio.
Dataset simulate(const GeneratedSystem& system, const DtInput& input,
                 std::size_t n_samples, const std::optional<NoiseSpec>& noise,
                 double* realized_snr_db = nullptr);

// Analytic responses of G(s) = (s+2)/(s^2+s+2); unit steady-state gain.
double example1_impulse(double t);
double example1_step(double t);

/// Seeded +/-1 switching pulse with exponential dwell (mean 5 s) on [0,100].
StepSignal example1_input(std::uint64_t seed);

/// 2 Hz sampling of the Example-1 plant's response to the switching pulse
/// on [0,100] (201 samples), noise at snr_db.
Dataset example1_dataset(std::uint64_t seed, double snr_db,
                         double* realized_snr_db = nullptr);

struct BenchConfig {
  std::size_t trials = 50;
  std::vector<std::size_t> orders = {8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<double> radii = {0.8, 0.9, 0.95};
  std::vector<double> snrs_db = {5.0};
  std::size_t n_samples = 200;
  KernelParams kernel{KernelFamily::TC, TimeDomain::DT, 0.9, 1.0};
  std::vector<double> lambda_grid;  // empty -> default log grid
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialRow {
  std::size_t trial = 0;
  std::string method;  // "constrained" | "unconstrained"
  double snr_db = 0.0;
  std::size_t n = 0;
  double r = 0.0;
  double fit_pct = 0.0;
  double gain_err = 0.0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<TrialRow> rows;
};

/// Seeded Monte Carlo: per trial draw a random system, simulate a white
/// Gaussian input at each SNR, pick lambda by hold-out validation, and fit
/// the exact-gain constrained estimator against the unconstrained ridge
/// baseline.
BenchResult monte_carlo(const BenchConfig& config);

/// Result CSV `trial,method,snr_db,n,r,fit_pct,gain_err,seconds`.  The
/// seconds column is written as 0 so reruns are byte-identical; wall-clock
/// timings go to the caller via the rows in memory only.
void save_bench_csv(const BenchResult& result, const std::string& path);

/// Median of a sample (empty input is an error).
double median(std::vector<double> v);

}  // namespace ssgain
