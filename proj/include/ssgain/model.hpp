#pragma once

#include <string>
#include <vector>

#include "ssgain/solver.hpp"

namespace ssgain {

/// The identified impulse response g = x(0) phi0 + sum_k x(k+1) phi_{u,tau_k}
/// together with everything needed to re-evaluate it.
struct IdentifiedModel {
  KernelParams kernel;
  InputSignal input;
  std::vector<double> sample_times;
  IndexSet index_set;
  Eigen::VectorXd x;
  double lambda = 1.0;
  Loss loss;
  GainConstraint constraint;
  double gain = 0.0;  // a0' x at fit time
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IdentifiedModel make_model(const GramSystem& gram, double lambda,
                           const Loss& loss, const GainConstraint& constraint,
                           const Solution& solution);

double impulse_response(const IdentifiedModel& model, double t);
/// Batched evaluation; in DT the input convolution is shared across times.
std::vector<double> impulse_response(const IdentifiedModel& model,
                                     const std::vector<double>& times);

/// Running gain: cumulative sum (DT) / cumulative adaptive quadrature (CT)
/// of the impulse response up to each grid point.  grid must be sorted and
/// non-negative.
std::vector<double> step_response(const IdentifiedModel& model,
                                  const std::vector<double>& grid);

/// Noiseless model outputs at arbitrary times (representer inner products).
std::vector<double> predict(const IdentifiedModel& model,
                            const std::vector<double>& times);

/// Model outputs at the gram's sample times, reusing its stored rows;
/// bit-identical to A x on the index-set rows.
Eigen::VectorXd predict(const GramSystem& gram, const Eigen::VectorXd& x);

/// 100 * (1 - ||est - ref||_2 / ||ref||_2); requires ref not identically 0.
double fit_metric(const std::vector<double>& est,
                  const std::vector<double>& ref);

/// Default comparison grid: DT integers up to the kernel's tail horizon,
/// CT 500 uniform points on the same span.
std::vector<double> default_response_grid(const KernelParams& kernel);

void save_model(const IdentifiedModel& model, const std::string& path);
IdentifiedModel load_model(const std::string& path);

}  // namespace ssgain
