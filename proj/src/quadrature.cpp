#include "ssgain/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ssgain {

namespace {

/* Gauss-Kronrod 15(7) nodes/weights (QUADPACK qk15). */
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double gauss = fc * kWg[3];
  double kronrod = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double fsum = f(c - h * kXgk[j]) + f(c + h * kXgk[j]);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {kronrod * h, std::abs(kronrod - gauss) * h};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
  const GkResult r = gk15(f, a, b);
  if (r.error <= tol || depth >= 48) return r.value;
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, 0.5 * tol, depth + 1) +
         adapt(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
  cfg.validate();
  if (a > b) throw std::invalid_argument("integrate: need a <= b");
  if (a == b) return 0.0;
  const GkResult first = gk15(f, a, b);
  const double tol =
      std::max(cfg.abs_tol, cfg.rel_tol * std::abs(first.value));
  // Always refine to four panels before trusting error estimates: a single
  // Kronrod panel can agree with its embedded Gauss rule by accident on
  // wide intervals with localized mass.
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lo = a + (b - a) * i / 4.0;
    const double hi = a + (b - a) * (i + 1) / 4.0;
    acc += adapt(f, lo, hi, 0.25 * tol, 2);
  }
  return acc;
}

long tail_horizon(double envelope_c, double envelope_alpha, double tol) {
  if (!(envelope_alpha > 0.0) || envelope_alpha >= 1.0)
    throw ConvergenceError("tail_horizon: decay envelope alpha must be in (0,1)");
  if (envelope_c <= 0.0) envelope_c = 1.0;
  // C * alpha^(T/2) / (1 - sqrt(alpha)) <= tol
  const double root = std::sqrt(envelope_alpha);
  const double target = tol * (1.0 - root) / envelope_c;
  if (target >= 1.0) return 1;
  const long horizon = static_cast<long>(
      std::ceil(2.0 * std::log(target) / std::log(envelope_alpha))) + 2;
  return std::max<long>(horizon, 1);
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double envelope_c, double envelope_alpha,
                        const QuadratureConfig& cfg) {
  cfg.validate();
  const double cutoff =
      static_cast<double>(tail_horizon(envelope_c, envelope_alpha,
                                       cfg.tail_cutoff_tol));
  if (cutoff <= a) return 0.0;  // tail beyond a is below the cutoff tolerance
  // Integrate in segments spanning roughly e^{-10} of envelope decay each,
  // so no single call sees a wide interval with strongly localized mass.
  const double rate = -std::log(envelope_alpha) / 2.0;
  const double seg = std::max(20.0 / std::max(rate, 1e-12), 1.0);
  const long n_seg =
      std::max<long>(1, static_cast<long>(std::ceil((cutoff - a) / seg)));
  QuadratureConfig seg_cfg = cfg;
  seg_cfg.abs_tol = cfg.abs_tol / static_cast<double>(n_seg);
  double acc = 0.0;
  for (long i = n_seg - 1; i >= 0; --i) {
    const double lo = a + (cutoff - a) * static_cast<double>(i) /
                              static_cast<double>(n_seg);
    const double hi = a + (cutoff - a) * static_cast<double>(i + 1) /
                              static_cast<double>(n_seg);
    acc += integrate(f, lo, hi, seg_cfg);
  }
  return acc;
}

double sum_to_inf(const std::function<double(long)>& f, long s0,
                  double envelope_c, double envelope_alpha,
                  const QuadratureConfig& cfg) {
  cfg.validate();
  const long horizon = tail_horizon(envelope_c, envelope_alpha,
                                    cfg.tail_cutoff_tol);
  double acc = 0.0;
  for (long s = horizon; s >= s0; --s) acc += f(s);  // small terms first
  return acc;
}

}  // namespace ssgain
