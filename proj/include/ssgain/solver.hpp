#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>

#include "ssgain/gram.hpp"

namespace ssgain {

enum class LossKind { SquaredError, Huber, PseudoHuber };

struct Loss {
  LossKind kind = LossKind::SquaredError;
  double sigma = 1.0;  // scale, Huber / pseudo-Huber only

  void validate() const;
  double value(double e) const;
  double grad(double e) const;
};

/// Constraint delta_lo <= a0' x <= delta_hi.  Equality when lo == hi;
/// +/-inf endpoints drop the corresponding side.
struct GainConstraint {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static GainConstraint exact(double delta) { return {delta, delta}; }
  static GainConstraint none() { return {}; }
  void validate() const;
  bool is_equality() const { return lo == hi; }
  bool unconstrained() const;
};

struct Solution {
  Eigen::VectorXd x;
  double multiplier = 0.0;  // equality-constraint multiplier (0 if inactive)
  double objective = 0.0;
  std::size_t iterations = 0;
  double kkt_residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadratic loss + equality gain constraint: one indefinite KKT solve.
Solution solve_closed_form(const GramSystem& gram, const Eigen::VectorXd& y,
                           double lambda, double delta);

/// Any loss, any (possibly one-sided / inactive) gain constraint.
/// Quadratic losses go through direct linear algebra; robust losses run an
/// accelerated projected-gradient iteration.
Solution solve_general(const GramSystem& gram, const Eigen::VectorXd& y,
                       double lambda, const Loss& loss,
                       const GainConstraint& constraint);

/// Max-norm residual of the stationarity + feasibility conditions.
double kkt_residual(const GramSystem& gram, const Eigen::VectorXd& y,
                    double lambda, const Loss& loss,
                    const GainConstraint& constraint,
                    const Eigen::VectorXd& x, double multiplier);

/// Objective J(x) = sum_i L(y_i - (A x)_i) + lambda * x' Phi x.
double objective_value(const GramSystem& gram, const Eigen::VectorXd& y,
                       double lambda, const Loss& loss,
                       const Eigen::VectorXd& x);

}  // namespace ssgain
