#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ssgain/gram.hpp"
#include "ssgain/quadrature.hpp"

using namespace ssgain;

namespace {

// Exact finite double sum for <phi_{u,tau1}, phi_{u,tau2}> in DT.
double dt_inner_brute(const KernelParams& k, const DtInput& u, long tau1,
                      long tau2) {
  double acc = 0.0;
  for (long s = 0; s <= tau1; ++s)
    for (long t = 0; t <= tau2; ++t)
      acc += u.eval(tau1 - s) * u.eval(tau2 - t) * kernel_eval(k, double(s), double(t));
  return acc;
}

double dt_phi0_inner_brute(const KernelParams& k, const DtInput& u, long tau) {
  double acc = 0.0;
  for (long t = 0; t <= tau; ++t)
    acc += u.eval(tau - t) * phi0_eval(k, double(t));
  return acc;
}

// CT representer via direct convolution quadrature (independent of psi).
double ct_representer_brute(const KernelParams& k, const StepSignal& u,
                            double tau, double t) {
  if (tau <= 0.0) return 0.0;
  QuadratureConfig cfg;
  std::vector<double> cuts{0.0, tau, t};
  for (double b : u.breakpoints) {
    const double c = tau - b;
    if (c > 0.0 && c < tau) cuts.push_back(c);
  }
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [tau](double c) { return c < 0.0 || c > tau; }),
             cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate(
        [&](double s) { return u.eval(tau - s) * kernel_eval(k, t, s); },
        cuts[i], cuts[i + 1], cfg);
  return acc;
}

// Nested quadrature for <phi_{u,tau1}, phi_{u,tau2}> in CT.
double ct_inner_brute(const KernelParams& k, const StepSignal& u, double tau1,
                      double tau2) {
  if (tau1 <= 0.0 || tau2 <= 0.0) return 0.0;
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-11;
  cfg.rel_tol = 1e-11;
  std::vector<double> cuts{0.0, tau1};
  for (double b : u.breakpoints) {
    const double c = tau1 - b;
    if (c > 0.0 && c < tau1) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate(
        [&](double s) {
          return u.eval(tau1 - s) * ct_representer_brute(k, u, tau2, s);
        },
        cuts[i], cuts[i + 1], cfg);
  return acc;
}

double ct_phi0_inner_brute(const KernelParams& k, const StepSignal& u,
                           double tau) {
  if (tau <= 0.0) return 0.0;
  QuadratureConfig cfg;
  std::vector<double> cuts{0.0, tau};
  for (double b : u.breakpoints) {
    const double c = tau - b;
    if (c > 0.0 && c < tau) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate(
        [&](double s) { return u.eval(tau - s) * phi0_eval(k, s); }, cuts[i],
        cuts[i + 1], cfg);
  return acc;
}

std::vector<KernelParams> dt_kernels() {
  return {{KernelFamily::TC, TimeDomain::DT, 0.7, 1.0},
          {KernelFamily::DC, TimeDomain::DT, 0.7, 0.9},
          {KernelFamily::DC, TimeDomain::DT, 0.6, -0.5},
          {KernelFamily::SS, TimeDomain::DT, 0.8, 1.0}};
}

std::vector<KernelParams> ct_kernels() {
  return {{KernelFamily::TC, TimeDomain::CT, 0.6, 1.0},
          {KernelFamily::DC, TimeDomain::CT, 0.6, 0.8},
          {KernelFamily::SS, TimeDomain::CT, 0.7, 1.0}};
}

}  // namespace

TEST_CASE("dt representer evaluation matches direct sum") {
  DtInput u;
  u.samples = {1.0, -0.5, 0.25, 0.0, 2.0};
  for (const auto& k : dt_kernels()) {
    for (long tau : {0L, 1L, 3L, 6L}) {
      for (double t : {0.0, 1.0, 2.0, 5.0}) {
        double direct = 0.0;
        for (long s = 0; s <= tau; ++s)
          direct += kernel_eval(k, t, double(s)) * u.eval(tau - s);
        CHECK(representer_eval(k, u, double(tau), t) ==
              doctest::Approx(direct).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("ct representer evaluation matches convolution quadrature") {
  StepSignal u;
  u.breakpoints = {0.0, 0.8, 2.1, 3.5};
  u.levels = {1.0, -1.0, 0.5};
  for (const auto& k : ct_kernels()) {
    for (double tau : {0.5, 1.7, 3.0, 5.0}) {
      for (double t : {0.2, 1.1, 2.6, 4.5}) {
        const double direct = ct_representer_brute(k, u, tau, t);
        CHECK(representer_eval(k, u, tau, t) ==
              doctest::Approx(direct).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("dt gram matches brute-force double sums on canonical times") {
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& k : dt_kernels()) {
    const std::size_t n = 8;
    DtInput u;
    for (std::size_t i = 0; i < n; ++i) u.samples.push_back(gauss(rng));
    std::vector<double> times;
    for (std::size_t i = 0; i < n; ++i) times.push_back(double(i));
    const GramSystem g = build_gram_dt(k, u, times, IndexSet::all(n));
    REQUIRE(g.phi_full.rows() == long(n) + 1);
    CHECK(std::abs(g.phi_full(0, 0) - phi0_norm_sq(k)) <= 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
      const double b0 = dt_phi0_inner_brute(k, u, long(i));
      CHECK(std::abs(g.phi_full(0, long(i) + 1) - b0) <= 1e-10);
      CHECK(g.phi_full(long(i) + 1, 0) == g.phi_full(0, long(i) + 1));
      for (std::size_t j = 0; j <= i; ++j) {
        const double bij = dt_inner_brute(k, u, long(i), long(j));
        CHECK(std::abs(g.phi_full(long(i) + 1, long(j) + 1) - bij) <= 1e-10);
        CHECK(g.phi_full(long(i) + 1, long(j) + 1) ==
              g.phi_full(long(j) + 1, long(i) + 1));
      }
    }
  }
}

TEST_CASE("dt gram generic path agrees on non-canonical times") {
  const KernelParams k{KernelFamily::DC, TimeDomain::DT, 0.75, 0.85};
  DtInput u;
  u.samples = {1.0, 0.3, -0.7, 0.2, 0.9, -0.1};
  const std::vector<double> times{1.0, 2.0, 5.0, 7.0};
  const GramSystem g = build_gram_dt(k, u, times, IndexSet::all(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(g.phi_full(0, long(i) + 1) -
                   dt_phi0_inner_brute(k, u, long(times[i]))) <= 1e-10);
    for (std::size_t j = 0; j < times.size(); ++j)
      CHECK(std::abs(g.phi_full(long(i) + 1, long(j) + 1) -
                     dt_inner_brute(k, u, long(times[i]), long(times[j]))) <=
            1e-10);
  }
}

TEST_CASE("ct gram matches nested quadrature") {
  StepSignal u;
  u.breakpoints = {0.0, 1.2, 2.7, 4.0};
  u.levels = {1.0, -0.6, 0.4};
  const std::vector<double> times{0.9, 2.0, 3.3, 5.5};
  for (const auto& k : ct_kernels()) {
    const GramSystem g = build_gram_ct(k, u, times, IndexSet::all(times.size()));
    CHECK(std::abs(g.phi_full(0, 0) - phi0_norm_sq(k)) <= 1e-12);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double b0 = ct_phi0_inner_brute(k, u, times[i]);
      CHECK(std::abs(g.phi_full(0, long(i) + 1) - b0) <=
            1e-7 * std::max(1.0, std::abs(b0)));
      for (std::size_t j = 0; j <= i; ++j) {
        const double bij = ct_inner_brute(k, u, times[i], times[j]);
        CHECK(std::abs(g.phi_full(long(i) + 1, long(j) + 1) - bij) <=
              1e-7 * std::max(1.0, std::abs(bij)));
      }
    }
  }
}

TEST_CASE("output_inner helpers agree with gram entries") {
  const KernelParams kd{KernelFamily::TC, TimeDomain::DT, 0.8, 1.0};
  DtInput u;
  u.samples = {0.5, 1.0, -1.0, 0.25};
  const std::vector<double> times{0.0, 1.0, 2.0, 3.0, 4.0};
  const GramSystem g = build_gram_dt(kd, u, times, IndexSet::all(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(output_phi0_inner(kd, InputSignal{u}, times[i]) ==
          doctest::Approx(g.phi_full(0, long(i) + 1)).epsilon(1e-12));
    for (std::size_t j = 0; j < times.size(); ++j)
      CHECK(output_inner(kd, InputSignal{u}, times[i], times[j]) ==
            doctest::Approx(g.phi_full(long(i) + 1, long(j) + 1))
                .epsilon(1e-12));
  }

  const KernelParams kc{KernelFamily::DC, TimeDomain::CT, 0.6, 0.9};
  StepSignal s;
  s.breakpoints = {0.0, 1.0, 2.5};
  s.levels = {1.0, -1.0};
  const std::vector<double> ct_times{0.7, 1.9, 3.4};
  const GramSystem gc =
      build_gram_ct(kc, s, ct_times, IndexSet::all(ct_times.size()));
  for (std::size_t i = 0; i < ct_times.size(); ++i) {
    CHECK(output_phi0_inner(kc, InputSignal{s}, ct_times[i]) ==
          doctest::Approx(gc.phi_full(0, long(i) + 1)).epsilon(1e-12));
    for (std::size_t j = 0; j < ct_times.size(); ++j)
      CHECK(output_inner(kc, InputSignal{s}, ct_times[i], ct_times[j]) ==
            doctest::Approx(gc.phi_full(long(i) + 1, long(j) + 1))
                .epsilon(1e-12));
  }
}

TEST_CASE("index-set selection and with_index_set") {
  const KernelParams k{KernelFamily::TC, TimeDomain::DT, 0.85, 1.0};
  DtInput u;
  u.samples = {1.0, 0.4, -0.2, 0.6, 0.1, -0.9};
  std::vector<double> times;
  for (int i = 0; i < 6; ++i) times.push_back(double(i));
  const GramSystem full = build_gram_dt(k, u, times, IndexSet::all(6));

  IndexSet sub;
  sub.indices = {0, 2, 5};
  const GramSystem g = build_gram_dt(k, u, times, sub);
  REQUIRE(g.Phi.rows() == 4);
  REQUIRE(g.A.rows() == 3);
  REQUIRE(g.A.cols() == 4);
  CHECK(g.a0 == g.Phi.col(0));
  // Phi is the selection [0 | I+1] of phi_full
  const std::vector<long> map{0, 1, 3, 6};
  for (std::size_t r = 0; r < map.size(); ++r)
    for (std::size_t c = 0; c < map.size(); ++c)
      CHECK(g.Phi(long(r), long(c)) == full.phi_full(map[r], map[c]));
  CHECK(g.A == g.Phi.bottomRows(3));

  const GramSystem g2 = with_index_set(full, sub);
  CHECK(g2.Phi == g.Phi);
  CHECK(g2.A == g.A);
  CHECK(g2.a0 == g.a0);
  CHECK(g2.phi_full == full.phi_full);

  // data_row: row of phi_full restricted to the selected columns
  for (std::size_t i = 0; i < 6; ++i) {
    const Eigen::VectorXd row = g.data_row(i);
    REQUIRE(row.size() == 4);
    for (std::size_t c = 0; c < map.size(); ++c)
      CHECK(row(long(c)) == full.phi_full(long(i) + 1, map[c]));
  }

  // cross_row at a measurement time reproduces the stored row
  const Eigen::VectorXd cr = g.cross_row(times[2]);
  REQUIRE(cr.size() == 4);
  for (std::size_t c = 0; c < map.size(); ++c)
    CHECK(cr(long(c)) == doctest::Approx(full.phi_full(3, map[c])).epsilon(1e-12));
}

TEST_CASE("gain functional is a0 dot x") {
  const KernelParams k{KernelFamily::SS, TimeDomain::DT, 0.7, 1.0};
  DtInput u;
  u.samples = {1.0, -1.0, 0.5};
  std::vector<double> times{0.0, 1.0, 2.0};
  const GramSystem g = build_gram_dt(k, u, times, IndexSet::all(3));
  Eigen::VectorXd x(4);
  x << 0.3, -1.2, 0.8, 2.0;
  CHECK(gain_functional(g, x) == doctest::Approx(g.a0.dot(x)).epsilon(1e-15));
}

TEST_CASE("build_gram dispatches on dataset domain") {
  Dataset ds;
  ds.domain = TimeDomain::DT;
  DtInput u;
  u.samples = {1.0, 0.0, 0.0};
  ds.input = u;
  ds.sample_times = {0.0, 1.0, 2.0};
  ds.outputs = {0.0, 0.0, 0.0};
  const KernelParams k{KernelFamily::TC, TimeDomain::DT, 0.9, 1.0};
  const GramSystem g = build_gram(k, ds, IndexSet::all(3));
  const GramSystem gd = build_gram_dt(k, u, ds.sample_times, IndexSet::all(3));
  CHECK(g.phi_full == gd.phi_full);
}
