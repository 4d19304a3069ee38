#include "ssgain/solver.hpp"

#include <algorithm>
#include <cmath>

namespace ssgain {

namespace {

// Gradient of sum_i L(y_i - (A x)_i) + lambda x' Phi x.
Eigen::VectorXd full_gradient(const GramSystem& gram, const Eigen::VectorXd& y,
                              double lambda, const Loss& loss,
                              const Eigen::VectorXd& x) {
  const Eigen::VectorXd e = y - gram.A * x;
  Eigen::VectorXd lg(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) lg(i) = loss.grad(e(i));
  return -gram.A.transpose() * lg + 2.0 * lambda * (gram.Phi * x);
}

Eigen::VectorXd project_gain(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& a0,
                             const GainConstraint& c) {
  const double g = a0.dot(x);
  double target = g;
  if (g > c.hi)
    target = c.hi;
  else if (g < c.lo)
    target = c.lo;
  if (target == g) return x;
  return x + a0 * ((target - g) / a0.squaredNorm());
}

Solution solve_equality_quadratic(const GramSystem& gram,
                                  const Eigen::VectorXd& y, double lambda,
                                  double delta) {
  const Eigen::Index n = gram.Phi.rows();
  const Eigen::MatrixXd q =
      gram.A.transpose() * gram.A + lambda * gram.Phi;

  Eigen::MatrixXd kkt(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = q;
  kkt.topRightCorner(n, 1) = gram.a0;
  kkt.bottomLeftCorner(1, n) = gram.a0.transpose();
  kkt(n, n) = 0.0;

  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = gram.A.transpose() * y;
  rhs(n) = delta;

  // The kernel Gram is often numerically rank deficient at machine
  // precision, but the KKT system stays consistent (the rhs lies in the
  // range), so a rank-revealing solve with a residual check is the right
  // notion of solvability here.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  const Eigen::VectorXd sol = cod.solve(rhs);
  const double scale =
      1.0 + rhs.lpNorm<Eigen::Infinity>() +
      kkt.lpNorm<Eigen::Infinity>() * sol.lpNorm<Eigen::Infinity>();
  if ((kkt * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    throw SolverError(
        "inconsistent KKT system: the gain constraint cannot be met by the "
        "representers of this index set (check lambda and the data)");

  Solution s;
  s.x = sol.head(n);
  // KKT block multiplier corresponds to half the Lagrangian gradient;
  // store the multiplier on the true gradient scale.
  s.multiplier = 2.0 * sol(n);
  return s;
}

double lambda_max_sym(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

void Loss::validate() const {
  if (kind != LossKind::SquaredError && !(sigma > 0.0))
    throw std::invalid_argument("loss scale sigma must be positive");
}

double Loss::value(double e) const {
  switch (kind) {
    case LossKind::SquaredError:
      return e * e;
    case LossKind::Huber: {
      const double a = std::abs(e);
      return a <= sigma ? 0.5 * e * e : sigma * (a - 0.5 * sigma);
    }
    case LossKind::PseudoHuber:
      return std::sqrt(e * e + sigma * sigma) - sigma * sigma;
  }
  return 0.0;
}

double Loss::grad(double e) const {
  switch (kind) {
    case LossKind::SquaredError:
      return 2.0 * e;
    case LossKind::Huber:
      return std::clamp(e, -sigma, sigma);
    case LossKind::PseudoHuber:
      return e / std::sqrt(e * e + sigma * sigma);
  }
  return 0.0;
}

void GainConstraint::validate() const {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw std::invalid_argument("gain constraint requires lo <= hi");
}

bool GainConstraint::unconstrained() const {
  return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0;
}

double objective_value(const GramSystem& gram, const Eigen::VectorXd& y,
                       double lambda, const Loss& loss,
                       const Eigen::VectorXd& x) {
  const Eigen::VectorXd e = y - gram.A * x;
  double data = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) data += loss.value(e(i));
  return data + lambda * x.dot(gram.Phi * x);
}

double kkt_residual(const GramSystem& gram, const Eigen::VectorXd& y,
                    double lambda, const Loss& loss,
                    const GainConstraint& constraint,
                    const Eigen::VectorXd& x, double multiplier) {
  const Eigen::VectorXd grad = full_gradient(gram, y, lambda, loss, x) +
                               multiplier * gram.a0;
  const double g = gram.a0.dot(x);
  double feas = 0.0;
  if (std::isfinite(constraint.lo)) feas = std::max(feas, constraint.lo - g);
  if (std::isfinite(constraint.hi)) feas = std::max(feas, g - constraint.hi);
  return std::max(grad.lpNorm<Eigen::Infinity>(), feas);
}

Solution solve_closed_form(const GramSystem& gram, const Eigen::VectorXd& y,
                           double lambda, double delta) {
  if (y.size() != gram.A.rows())
    throw std::invalid_argument("solve_closed_form: y size mismatch");
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_closed_form: lambda must be positive");
  Solution s = solve_equality_quadratic(gram, y, lambda, delta);
  const Loss quad{LossKind::SquaredError, 1.0};
  s.objective = objective_value(gram, y, lambda, quad, s.x);
  s.kkt_residual = kkt_residual(gram, y, lambda, quad,
                                GainConstraint::exact(delta), s.x,
                                s.multiplier);
  return s;
}

Solution solve_general(const GramSystem& gram, const Eigen::VectorXd& y,
                       double lambda, const Loss& loss,
                       const GainConstraint& constraint) {
  if (y.size() != gram.A.rows())
    throw std::invalid_argument("solve_general: y size mismatch");
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_general: lambda must be positive");
  loss.validate();
  constraint.validate();

  if (loss.kind == LossKind::SquaredError) {
    if (constraint.is_equality())
      return solve_closed_form(gram, y, lambda, constraint.lo);

    const Eigen::MatrixXd q =
        gram.A.transpose() * gram.A + lambda * gram.Phi;
    const Eigen::VectorXd rhs = gram.A.transpose() * y;
    // Q may be singular (Phi is only PSD), but Qx = A'y is always
    // consistent; COD picks the minimum-norm solution.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(q);
    Solution s;
    s.x = cod.solve(rhs);
    const double g = gram.a0.dot(s.x);
    if (g > constraint.hi)
      s = solve_equality_quadratic(gram, y, lambda, constraint.hi);
    else if (g < constraint.lo)
      s = solve_equality_quadratic(gram, y, lambda, constraint.lo);
    s.objective = objective_value(gram, y, lambda, loss, s.x);
    s.kkt_residual =
        kkt_residual(gram, y, lambda, loss, constraint, s.x, s.multiplier);
    return s;
  }

  // Robust losses: accelerated projected gradient with restart.
  const double curvature =
      loss.kind == LossKind::Huber ? 1.0 : 1.0 / loss.sigma;
  const double lip =
      curvature * lambda_max_sym(gram.A.transpose() * gram.A) +
      2.0 * lambda * lambda_max_sym(gram.Phi);
  const double step = 1.0 / std::max(lip, 1e-300);
  const double tol =
      1e-8 * (1.0 + (gram.A.transpose() * y).lpNorm<Eigen::Infinity>());

  const Eigen::Index n = gram.Phi.rows();
  Eigen::VectorXd x = project_gain(Eigen::VectorXd::Zero(n), gram.a0,
                                   constraint);
  Eigen::VectorXd z = x;
  double t = 1.0;
  const std::size_t max_iters = 100000;
  std::size_t iters = 0;
  bool converged = false;

  for (; iters < max_iters; ++iters) {
    const Eigen::VectorXd grad = full_gradient(gram, y, lambda, loss, z);
    const Eigen::VectorXd x_next =
        project_gain(z - step * grad, gram.a0, constraint);
    const Eigen::VectorXd pg = (z - x_next) / step;
    if (pg.lpNorm<Eigen::Infinity>() <= tol) {
      x = x_next;
      converged = true;
      ++iters;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Eigen::VectorXd z_next =
        x_next + ((t - 1.0) / t_next) * (x_next - x);
    if (grad.dot(x_next - x) > 0.0) {  // momentum restart
      z_next = x_next;
      t = 1.0;
    } else {
      t = t_next;
    }
    x = x_next;
    z = z_next;
  }
  if (!converged)
    throw SolverError("projected gradient did not converge within the "
                      "iteration budget; try a larger loss scale or lambda");

  Solution s;
  s.x = x;
  s.iterations = iters;
  const double g = gram.a0.dot(x);
  const double slack_lo = std::isfinite(constraint.lo)
                              ? std::abs(g - constraint.lo)
                              : std::numeric_limits<double>::infinity();
  const double slack_hi = std::isfinite(constraint.hi)
                              ? std::abs(g - constraint.hi)
                              : std::numeric_limits<double>::infinity();
  const double active_tol = 1e-10 * (1.0 + std::abs(g));
  if (std::min(slack_lo, slack_hi) <= active_tol) {
    const Eigen::VectorXd grad = full_gradient(gram, y, lambda, loss, x);
    s.multiplier = -gram.a0.dot(grad) / gram.a0.squaredNorm();
  }
  s.objective = objective_value(gram, y, lambda, loss, x);
  s.kkt_residual =
      kkt_residual(gram, y, lambda, loss, constraint, s.x, s.multiplier);
  return s;
}

}  // namespace ssgain
