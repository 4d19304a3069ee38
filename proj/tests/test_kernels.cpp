#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ssgain/kernels.hpp"

using namespace ssgain;

namespace {

KernelParams make(KernelFamily f, TimeDomain d, double a, double g = 1.0) {
  return KernelParams{f, d, a, g};
}

constexpr KernelFamily kFamilies[] = {KernelFamily::TC, KernelFamily::DC,
                                      KernelFamily::SS};

// Checks a closed form against the numerical oracle at mixed tolerance.
void check_close(double got, double want, double tol = 1e-8) {
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make(KernelFamily::TC, TimeDomain::DT, 0.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make(KernelFamily::TC, TimeDomain::DT, 1.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make(KernelFamily::TC, TimeDomain::CT, -0.2).validate(),
                  std::invalid_argument);
  // DC gamma domain: DT (-1/sqrt(a), 1/sqrt(a)), CT (0, 1/sqrt(a))
  CHECK_NOTHROW(make(KernelFamily::DC, TimeDomain::DT, 0.81, -1.1).validate());
  CHECK_THROWS_AS(
      make(KernelFamily::DC, TimeDomain::DT, 0.81, 1.2).validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(
      make(KernelFamily::DC, TimeDomain::CT, 0.81, -0.5).validate(),
      std::invalid_argument);
  CHECK_NOTHROW(make(KernelFamily::DC, TimeDomain::CT, 0.81, 1.05).validate());
}

TEST_CASE("kernel evaluation basics") {
  const auto tc = make(KernelFamily::TC, TimeDomain::DT, 0.5);
  CHECK(kernel_eval(tc, 3.0, 1.0) == 0.125);
  CHECK(kernel_eval(tc, 1.0, 3.0) == 0.125);
  const auto dc = make(KernelFamily::DC, TimeDomain::DT, 0.5, 0.8);
  CHECK(kernel_eval(dc, 3.0, 1.0) == doctest::Approx(0.125 * 0.64).epsilon(1e-15));
  const auto ss = make(KernelFamily::SS, TimeDomain::CT, 0.5);
  // s=t=1: a^3 - a^3/3
  CHECK(kernel_eval(ss, 1.0, 1.0) ==
        doctest::Approx(std::pow(0.5, 3.0) * 2.0 / 3.0).epsilon(1e-15));
  // symmetry on random points
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (int i = 0; i < 50; ++i) {
    const double s = u(rng), t = u(rng);
    for (auto fam : kFamilies) {
      const auto p = make(fam, TimeDomain::CT, 0.7, 0.9);
      CHECK(kernel_eval(p, s, t) == kernel_eval(p, t, s));
    }
  }
}

TEST_CASE("DC at gamma = 1 degenerates to TC everywhere") {
  const auto dc = make(KernelFamily::DC, TimeDomain::CT, 0.55, 1.0);
  const auto tc = make(KernelFamily::TC, TimeDomain::CT, 0.55);
  CHECK(psi(dc, 1.2, 0.3, 2.0) == psi(tc, 1.2, 0.3, 2.0));
  CHECK(nu(dc, 1.1, 2.0) == nu(tc, 1.1, 2.0));
  CHECK(nu_bar(dc, 1.4) == nu_bar(tc, 1.4));
  CHECK(phi0_eval(dc, 0.9) == phi0_eval(tc, 0.9));
  CHECK(phi0_norm_sq(dc) == phi0_norm_sq(tc));
  const auto dcd = make(KernelFamily::DC, TimeDomain::DT, 0.55, 1.0);
  const auto tcd = make(KernelFamily::TC, TimeDomain::DT, 0.55);
  CHECK(phi0_eval(dcd, 4.0) == phi0_eval(tcd, 4.0));
  CHECK(phi0_norm_sq(dcd) == phi0_norm_sq(tcd));
}

// Anchor values computed independently with 30-digit arithmetic
// (alpha = 0.6, gamma = 0.8).
TEST_CASE("frozen high-precision anchors") {
  const double a = 0.6, g = 0.8;
  const auto tc = make(KernelFamily::TC, TimeDomain::CT, a);
  const auto dc = make(KernelFamily::DC, TimeDomain::CT, a, g);
  const auto ss = make(KernelFamily::SS, TimeDomain::CT, a);

  check_close(psi(tc, 1.3, 0.4, 2.1), 0.80131283821893558365, 1e-12);
  check_close(psi(dc, 1.3, 0.4, 2.1), 0.73118094284587392875, 1e-12);
  check_close(psi(ss, 1.3, 0.4, 2.1), 0.16850850878596875122, 1e-12);

  check_close(nu(tc, 1.1, 2.0), 1.2919214555233600332, 1e-12);
  check_close(nu(dc, 1.1, 2.0), 1.1440959129800269341, 1e-12);
  check_close(nu(ss, 1.1, 2.0), 0.49044800948940705596, 1e-12);

  check_close(nu_bar(tc, 1.1), 2.0671370703559622372, 1e-12);
  check_close(nu_bar(dc, 1.1), 1.5354659305594390793, 1e-12);
  check_close(nu_bar(ss, 1.1), 0.58603708814818682194, 1e-12);

  check_close(phi0_eval(tc, 0.7), 1.8586515255287024735, 1e-12);
  check_close(phi0_eval(dc, 0.7), 1.4060962503145464965, 1e-12);
  check_close(phi0_eval(ss, 0.7), 0.46845602699210763685, 1e-12);

  check_close(phi0_norm_sq(tc), 7.6645144561816326683, 1e-12);
  check_close(phi0_norm_sq(dc), 5.3343253516261362595, 1e-12);
  check_close(phi0_norm_sq(ss), 0.99354817024576719774, 1e-12);

  const auto tcd = make(KernelFamily::TC, TimeDomain::DT, a);
  const auto dcd = make(KernelFamily::DC, TimeDomain::DT, a, g);
  const auto ssd = make(KernelFamily::SS, TimeDomain::DT, a);
  check_close(phi0_eval(tcd, 3.0), 1.188, 1e-12);
  check_close(phi0_eval(dcd, 3.0), 0.83701661538461538462, 1e-12);
  check_close(phi0_eval(ssd, 3.0), 0.09282972930612244898, 1e-12);
  check_close(phi0_norm_sq(tcd), 10.0, 1e-12);
  check_close(phi0_norm_sq(dcd), 7.1153846153846153846, 1e-12);
  check_close(phi0_norm_sq(ssd), 2.0510117312231014855, 1e-12);
}

TEST_CASE("closed forms track the quadrature/summation oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ua(0.3, 0.95);
  std::uniform_real_distribution<double> ut(0.0, 4.0);
  for (int i = 0; i < 12; ++i) {
    for (auto fam : kFamilies) {
      const double a = ua(rng);
      double g = 1.0;
      if (fam == KernelFamily::DC) {
        std::uniform_real_distribution<double> ug(0.3, 1.0 / std::sqrt(a));
        g = ug(rng);
        if (std::abs(g - 1.0) < 1e-3) g = 0.9;
      }
      const auto ct = make(fam, TimeDomain::CT, a, g);
      const CustomKernel custom = as_custom(ct);
      const double t = ut(rng);
      double lo = ut(rng), hi = ut(rng);
      if (lo > hi) std::swap(lo, hi);
      const double x = ut(rng) + 0.05, y = ut(rng) + 0.05;

      check_close(psi(ct, t, lo, hi), oracle::psi(custom, t, lo, hi));
      check_close(nu(ct, x, y), oracle::nu(custom, x, y), 1e-7);
      check_close(nu_bar(ct, x), oracle::nu_bar(custom, x), 1e-7);
      check_close(phi0_eval(ct, t), oracle::phi0_eval(custom, t));
      check_close(phi0_norm_sq(ct), oracle::phi0_norm_sq(custom), 1e-7);

      const auto dt = make(fam, TimeDomain::DT, a, fam == KernelFamily::DC
                                                       ? g
                                                       : 1.0);
      const CustomKernel custom_dt = as_custom(dt);
      const double td = std::floor(ut(rng));
      check_close(phi0_eval(dt, td), oracle::phi0_eval(custom_dt, td));
      check_close(phi0_norm_sq(dt), oracle::phi0_norm_sq(custom_dt));
    }
  }
}

TEST_CASE("psi edge cases clamp correctly") {
  const auto tc = make(KernelFamily::TC, TimeDomain::CT, 0.5);
  const CustomKernel c = as_custom(tc);
  // t below, inside, and above [a,b]
  for (double t : {0.1, 1.0, 3.5}) {
    check_close(psi(tc, t, 0.5, 2.5), oracle::psi(c, t, 0.5, 2.5), 1e-9);
  }
  CHECK(psi(tc, 1.0, 2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(psi(tc, 1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("CT DC near the gamma = 1 singularity stays finite and continuous") {
  const double a = 0.7;
  const auto at = [&](double g) {
    return nu_bar(make(KernelFamily::DC, TimeDomain::CT, a, g), 1.3);
  };
  const double limit = nu_bar(make(KernelFamily::TC, TimeDomain::CT, a), 1.3);
  // inside the guard band the oracle fallback takes over
  check_close(at(1.0 + 1e-7), limit, 1e-5);
  check_close(at(1.0 - 1e-7), limit, 1e-5);
  // just outside the band the closed form must still be accurate
  const auto dc = make(KernelFamily::DC, TimeDomain::CT, a, 1.0 + 2e-6);
  check_close(nu_bar(dc, 1.3), oracle::nu_bar(as_custom(dc), 1.3), 1e-6);
}

TEST_CASE("DT DC near gamma = 1 uses stable ratios") {
  const double a = 0.7;
  for (double g : {1.0 + 1e-9, 1.0 - 1e-9, 1.0 + 1e-13}) {
    const auto dc = make(KernelFamily::DC, TimeDomain::DT, a, g);
    const auto tc = make(KernelFamily::TC, TimeDomain::DT, a);
    check_close(phi0_eval(dc, 5.0), phi0_eval(tc, 5.0), 1e-6);
    check_close(phi0_norm_sq(dc), phi0_norm_sq(tc), 1e-6);
  }
}

TEST_CASE("standard envelope dominates the kernel") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 20.0);
  for (auto fam : kFamilies) {
    const auto p = make(fam, TimeDomain::CT, 0.8, 0.9);
    const DecayEnvelope env = standard_envelope(p);
    for (int i = 0; i < 200; ++i) {
      const double s = ut(rng), t = ut(rng);
      CHECK(std::abs(kernel_eval(p, s, t)) <=
            env.c * std::pow(env.alpha, (s + t) / 2.0) * (1.0 + 1e-12));
    }
  }
}
