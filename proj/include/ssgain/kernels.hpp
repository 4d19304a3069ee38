#pragma once

#include <functional>
#include <stdexcept>

#include "ssgain/quadrature.hpp"

namespace ssgain {

enum class KernelFamily { TC, DC, SS };
enum class TimeDomain { DT, CT };

/// Hyperparameters of a standard stable kernel.
///
/// alpha is the decay rate in (0,1).  gamma is the correlation parameter and
/// only meaningful for the DC family: gamma in (-1/sqrt(alpha), 1/sqrt(alpha))
/// in discrete time, gamma in (0, 1/sqrt(alpha)) in continuous time.
struct KernelParams {
  KernelFamily family = KernelFamily::TC;
  TimeDomain domain = TimeDomain::DT;
  double alpha = 0.5;
  double gamma = 1.0;

  void validate() const;
};

/// k(s,t) for the TC, DC, and SS kernels.  Symmetric in (s,t).
double kernel_eval(const KernelParams& params, double s, double t);

/// psi(t,a,b) = integral of k(t,s) over [a,b].  CT only; requires a <= b.
double psi(const KernelParams& params, double t, double a, double b);

/// nu(x,y) = double integral of k over [0,x] x [0,y].  CT only.
double nu(const KernelParams& params, double x, double y);

/// nu_bar(x) = integral of k over [0,x] x [0,inf) = lim_{y->inf} nu(x,y).
double nu_bar(const KernelParams& params, double x);

/// Steady-state gain representer: phi0(t) = sum_s k(t,s) (DT) or
/// integral k(t,s) ds (CT), via the per-family closed forms.
double phi0_eval(const KernelParams& params, double t);

/// Squared RKHS norm of phi0: the full double sum (DT) or double
/// integral (CT) of the kernel over the quadrant.
double phi0_norm_sq(const KernelParams& params);

/// Geometric decay envelope (C, alpha) with |k(s,t)| <= C * alpha^((s+t)/2).
struct DecayEnvelope {
  double c = 1.0;
  double alpha = 0.5;
};

DecayEnvelope standard_envelope(const KernelParams& params);

/// A kernel given only through pointwise evaluation.  Must declare a decay
/// envelope so the oracle's truncations are sound; only the oracle path is
/// available for these (no closed forms).
struct CustomKernel {
  std::function<double(double, double)> eval;
  DecayEnvelope envelope;
  TimeDomain domain = TimeDomain::CT;
};

CustomKernel as_custom(const KernelParams& params);

/// Numerical oracle: adaptive quadrature (CT) / tail-bounded summation (DT)
/// of the same quantities the closed forms provide.  Independent of the
/// closed-form code paths.
namespace oracle {

double psi(const CustomKernel& k, double t, double a, double b,
           const QuadratureConfig& cfg = {});
double nu(const CustomKernel& k, double x, double y,
          const QuadratureConfig& cfg = {});
double nu_bar(const CustomKernel& k, double x,
              const QuadratureConfig& cfg = {});
double phi0_eval(const CustomKernel& k, double t,
                 const QuadratureConfig& cfg = {});
double phi0_norm_sq(const CustomKernel& k, const QuadratureConfig& cfg = {});

}  // namespace oracle

}  // namespace ssgain
