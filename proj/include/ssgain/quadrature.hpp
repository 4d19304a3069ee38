#pragma once

#include <functional>
#include <stdexcept>

namespace ssgain {

/// Tolerances for the numerical oracle (adaptive quadrature for CT,
/// tail-bounded summation for DT).
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double tail_cutoff_tol = 1e-12;

  void validate() const {
    if (abs_tol <= 0 || rel_tol <= 0 || tail_cutoff_tol <= 0)
      throw std::invalid_argument("QuadratureConfig: tolerances must be > 0");
  }
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod 15(7) integration of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {});

/// Integral of f over [a, inf) where |f(s)| <= envelope_c * envelope_alpha^(s/2).
/// Splits at a cutoff X with envelope tail below cfg.tail_cutoff_tol.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double envelope_c, double envelope_alpha,
                        const QuadratureConfig& cfg = {});

/// Sum of f(s) for integer s >= s0 where |f(s)| <= envelope_c * envelope_alpha^(s/2).
double sum_to_inf(const std::function<double(long)>& f, long s0,
                  double envelope_c, double envelope_alpha,
                  const QuadratureConfig& cfg = {});

/// Truncation horizon T such that the geometric envelope tail beyond T is
/// below tol.  Throws ConvergenceError when envelope_alpha >= 1.
long tail_horizon(double envelope_c, double envelope_alpha, double tol);

}  // namespace ssgain
