#pragma once

#include <Eigen/Dense>

#include "ssgain/kernels.hpp"
#include "ssgain/signals.hpp"

namespace ssgain {

/// phi_{u,tau}(t): the output-sample representer evaluated at t.
/// DT: sum_{s=0}^{tau} k(t,s) u_{tau-s}.  CT (step input):
/// sum_i xi_{i+1} psi(t, sbar_{i+1}(tau), sbar_i(tau)).
double representer_eval(const KernelParams& kernel, const InputSignal& input,
                        double tau, double t);

/// Gram system of the representers {phi_0, phi_{u,t_i} : i in I}.
///
/// phi_full holds inner products among phi_0 and *all* measurement
/// representers (row/column 0 is phi_0); Phi, A and a0 are the index-set
/// selections the convex program needs.  Rows of phi_full outside I serve
/// prediction at held-out sample times.
struct GramSystem {
  Eigen::MatrixXd phi_full;  // (n_D+1) x (n_D+1)
  Eigen::MatrixXd Phi;       // (n_I+1) x (n_I+1)
  Eigen::MatrixXd A;         // n_I x (n_I+1), rows 1..n_I of Phi
  Eigen::VectorXd a0;        // first column of Phi

  KernelParams kernel;
  InputSignal input;
  std::vector<double> sample_times;
  IndexSet index_set;

  std::size_t dim() const { return index_set.size() + 1; }

  /// Inner products of phi_{u,tau} against the system's representers
  /// (phi_0 first); tau need not be a measurement instant.
  Eigen::VectorXd cross_row(double tau) const;

  /// Row of phi_full for data index i, restricted to the system's columns.
  Eigen::VectorXd data_row(std::size_t i) const;
};

GramSystem build_gram_dt(const KernelParams& kernel, const DtInput& input,
                         const std::vector<double>& sample_times,
                         const IndexSet& index_set);

GramSystem build_gram_ct(const KernelParams& kernel, const StepSignal& input,
                         const std::vector<double>& sample_times,
                         const IndexSet& index_set);

GramSystem build_gram(const KernelParams& kernel, const Dataset& dataset,
                      const IndexSet& index_set);

/// Same kernel/input/phi_full with a different measurement selection;
/// avoids recomputing any inner products.
GramSystem with_index_set(const GramSystem& gram, const IndexSet& index_set);

/// <phi_{u,tau1}, phi_{u,tau2}> and <phi0, phi_{u,tau}> without a
/// prebuilt Gram system (exact finite sums in DT, nu/nu_bar in CT).
double output_inner(const KernelParams& kernel, const InputSignal& input,
                    double tau1, double tau2);
double output_phi0_inner(const KernelParams& kernel, const InputSignal& input,
                         double tau);

/// a0' * x, the steady-state gain of g = sum_i x_i phi_i.
double gain_functional(const GramSystem& gram, const Eigen::VectorXd& x);

/// Debug dump of Phi (row-major CSV, 17 significant digits).
void dump_phi(const GramSystem& gram, const std::string& path);

}  // namespace ssgain
