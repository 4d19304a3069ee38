#include "ssgain/gram.hpp"

#include <cmath>
#include <fstream>

namespace ssgain {

namespace {

bool is_canonical_dt_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] != static_cast<double>(i)) return false;
  return true;
}

long as_dt_time(double t) {
  const long r = static_cast<long>(std::llround(t));
  if (static_cast<double>(r) != t || r < 0)
    throw std::invalid_argument("DT sample times must be non-negative integers");
  return r;
}

// Difference coefficients d_p = xi_{p+1} - xi_p (xi_0 = xi_{ns+1} = 0):
// the kappa double sums collapse to sum_{p,q} d_p d_q nu(sbar_p, sbar_q).
std::vector<double> level_differences(const StepSignal& step) {
  const std::size_t ns = step.levels.size();
  std::vector<double> d(ns + 1);
  for (std::size_t p = 0; p <= ns; ++p) {
    const double next = p < ns ? step.levels[p] : 0.0;
    const double prev = p > 0 ? step.levels[p - 1] : 0.0;
    d[p] = next - prev;
  }
  return d;
}

struct CtRepresenter {
  std::vector<double> sbars;   // sbar_p(tau) for the retained p
  std::vector<double> coeffs;  // matching d_p, zeros dropped
};

CtRepresenter ct_representer(const StepSignal& step,
                             const std::vector<double>& diffs, double tau) {
  CtRepresenter rep;
  for (std::size_t p = 0; p < diffs.size(); ++p) {
    const double u = sbar(step, p, tau);
    if (u <= 0.0 || diffs[p] == 0.0) continue;
    rep.sbars.push_back(u);
    rep.coeffs.push_back(diffs[p]);
  }
  return rep;
}

double ct_inner(const KernelParams& kernel, const CtRepresenter& r1,
                const CtRepresenter& r2) {
  double acc = 0.0;
  for (std::size_t p = 0; p < r1.sbars.size(); ++p)
    for (std::size_t q = 0; q < r2.sbars.size(); ++q)
      acc += r1.coeffs[p] * r2.coeffs[q] *
             nu(kernel, r1.sbars[p], r2.sbars[q]);
  return acc;
}

double ct_inner_phi0(const KernelParams& kernel, const CtRepresenter& r) {
  double acc = 0.0;
  for (std::size_t p = 0; p < r.sbars.size(); ++p)
    acc += r.coeffs[p] * nu_bar(kernel, r.sbars[p]);
  return acc;
}

double dt_inner(const KernelParams& kernel, const DtInput& u, long tau1,
                long tau2) {
  double acc = 0.0;
  for (long s = 0; s <= tau1; ++s) {
    const double us = u.eval(tau1 - s);
    if (us == 0.0) continue;
    for (long t = 0; t <= tau2; ++t) {
      const double ut = u.eval(tau2 - t);
      if (ut == 0.0) continue;
      acc += kernel_eval(kernel, static_cast<double>(s),
                         static_cast<double>(t)) *
             us * ut;
    }
  }
  return acc;
}

double dt_inner_phi0(const KernelParams& kernel, const DtInput& u, long tau) {
  double acc = 0.0;
  for (long s = 0; s <= tau; ++s)
    acc += phi0_eval(kernel, static_cast<double>(s)) * u.eval(tau - s);
  return acc;
}

void finalize(GramSystem& g) {
  const std::size_t n_i = g.index_set.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(n_i + 1);
  g.Phi.resize(dim, dim);
  for (std::size_t r = 0; r <= n_i; ++r)
    for (std::size_t c = 0; c <= n_i; ++c) {
      const Eigen::Index fr =
          r == 0 ? 0 : static_cast<Eigen::Index>(g.index_set.indices[r - 1] + 1);
      const Eigen::Index fc =
          c == 0 ? 0 : static_cast<Eigen::Index>(g.index_set.indices[c - 1] + 1);
      g.Phi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          g.phi_full(fr, fc);
    }
  g.A = g.Phi.bottomRows(static_cast<Eigen::Index>(n_i));
  g.a0 = g.Phi.col(0);
}

}  // namespace

double representer_eval(const KernelParams& kernel, const InputSignal& input,
                        double tau, double t) {
  if (std::holds_alternative<DtInput>(input)) {
    if (kernel.domain != TimeDomain::DT)
      throw std::invalid_argument("representer_eval: kernel/input domain mismatch");
    const auto& u = std::get<DtInput>(input);
    const long tau_i = as_dt_time(tau);
    double acc = 0.0;
    for (long s = 0; s <= tau_i; ++s)
      acc += kernel_eval(kernel, t, static_cast<double>(s)) * u.eval(tau_i - s);
    return acc;
  }
  if (kernel.domain != TimeDomain::CT)
    throw std::invalid_argument("representer_eval: kernel/input domain mismatch");
  const auto& step = std::get<StepSignal>(input);
  double acc = 0.0;
  for (std::size_t i = 0; i < step.levels.size(); ++i) {
    const double lo = sbar(step, i + 1, tau);
    const double hi = sbar(step, i, tau);
    if (!(lo <= hi))
      throw std::logic_error("representer_eval: sbar interval misoriented");
    if (lo == hi) continue;
    acc += step.levels[i] * psi(kernel, t, lo, hi);
  }
  return acc;
}

GramSystem build_gram_dt(const KernelParams& kernel, const DtInput& input,
                         const std::vector<double>& sample_times,
                         const IndexSet& index_set) {
  kernel.validate();
  if (kernel.domain != TimeDomain::DT)
    throw std::invalid_argument("build_gram_dt: DT kernel required");
  index_set.validate(sample_times.size());
  const std::size_t n_d = sample_times.size();
  const Eigen::Index n = static_cast<Eigen::Index>(n_d);

  GramSystem g;
  g.kernel = kernel;
  g.input = input;
  g.sample_times = sample_times;
  g.index_set = index_set;
  g.phi_full.resize(n + 1, n + 1);
  g.phi_full(0, 0) = phi0_norm_sq(kernel);

  if (is_canonical_dt_times(sample_times)) {
    Eigen::MatrixXd k_mat(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = kernel_eval(kernel, static_cast<double>(i),
                                     static_cast<double>(j));
        k_mat(i, j) = v;
        k_mat(j, i) = v;
      }
    const Eigen::MatrixXd t_u = toeplitz(input, n_d);
    Eigen::VectorXd phi(n);
    for (Eigen::Index i = 0; i < n; ++i)
      phi(i) = phi0_eval(kernel, static_cast<double>(i));
    g.phi_full.block(1, 0, n, 1) = t_u * phi;
    g.phi_full.block(0, 1, 1, n) = g.phi_full.block(1, 0, n, 1).transpose();
    g.phi_full.block(1, 1, n, n) = t_u * k_mat * t_u.transpose();
    // symmetrize the product block
    g.phi_full.block(1, 1, n, n) =
        0.5 * (g.phi_full.block(1, 1, n, n) +
               g.phi_full.block(1, 1, n, n).transpose())
                  .eval();
  } else {
    std::vector<long> taus(n_d);
    for (std::size_t i = 0; i < n_d; ++i) taus[i] = as_dt_time(sample_times[i]);
    for (std::size_t i = 0; i < n_d; ++i) {
      g.phi_full(static_cast<Eigen::Index>(i + 1), 0) =
          dt_inner_phi0(kernel, input, taus[i]);
      g.phi_full(0, static_cast<Eigen::Index>(i + 1)) =
          g.phi_full(static_cast<Eigen::Index>(i + 1), 0);
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = dt_inner(kernel, input, taus[i], taus[j]);
        g.phi_full(static_cast<Eigen::Index>(i + 1),
                   static_cast<Eigen::Index>(j + 1)) = v;
        g.phi_full(static_cast<Eigen::Index>(j + 1),
                   static_cast<Eigen::Index>(i + 1)) = v;
      }
    }
  }
  finalize(g);
  return g;
}

GramSystem build_gram_ct(const KernelParams& kernel, const StepSignal& input,
                         const std::vector<double>& sample_times,
                         const IndexSet& index_set) {
  kernel.validate();
  if (kernel.domain != TimeDomain::CT)
    throw std::invalid_argument("build_gram_ct: CT kernel required");
  input.validate();
  index_set.validate(sample_times.size());
  const std::size_t n_d = sample_times.size();
  const Eigen::Index n = static_cast<Eigen::Index>(n_d);

  GramSystem g;
  g.kernel = kernel;
  g.input = input;
  g.sample_times = sample_times;
  g.index_set = index_set;
  g.phi_full.resize(n + 1, n + 1);
  g.phi_full(0, 0) = phi0_norm_sq(kernel);

  const std::vector<double> diffs = level_differences(input);
  std::vector<CtRepresenter> reps(n_d);
  for (std::size_t i = 0; i < n_d; ++i)
    reps[i] = ct_representer(input, diffs, sample_times[i]);

  for (std::size_t i = 0; i < n_d; ++i) {
    const double v0 = ct_inner_phi0(kernel, reps[i]);
    g.phi_full(static_cast<Eigen::Index>(i + 1), 0) = v0;
    g.phi_full(0, static_cast<Eigen::Index>(i + 1)) = v0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = ct_inner(kernel, reps[i], reps[j]);
      g.phi_full(static_cast<Eigen::Index>(i + 1),
                 static_cast<Eigen::Index>(j + 1)) = v;
      g.phi_full(static_cast<Eigen::Index>(j + 1),
                 static_cast<Eigen::Index>(i + 1)) = v;
    }
  }
  finalize(g);
  return g;
}

GramSystem build_gram(const KernelParams& kernel, const Dataset& dataset,
                      const IndexSet& index_set) {
  dataset.validate();
  if (dataset.domain == TimeDomain::DT)
    return build_gram_dt(kernel, std::get<DtInput>(dataset.input),
                         dataset.sample_times, index_set);
  return build_gram_ct(kernel, std::get<StepSignal>(dataset.input),
                       dataset.sample_times, index_set);
}

Eigen::VectorXd GramSystem::data_row(std::size_t i) const {
  if (i >= sample_times.size())
    throw std::invalid_argument("GramSystem::data_row: index out of range");
  const std::size_t n_i = index_set.size();
  Eigen::VectorXd row(static_cast<Eigen::Index>(n_i + 1));
  row(0) = phi_full(static_cast<Eigen::Index>(i + 1), 0);
  for (std::size_t k = 0; k < n_i; ++k)
    row(static_cast<Eigen::Index>(k + 1)) =
        phi_full(static_cast<Eigen::Index>(i + 1),
                 static_cast<Eigen::Index>(index_set.indices[k] + 1));
  return row;
}

Eigen::VectorXd GramSystem::cross_row(double tau) const {
  const std::size_t n_i = index_set.size();
  Eigen::VectorXd row(static_cast<Eigen::Index>(n_i + 1));
  if (kernel.domain == TimeDomain::CT) {
    const auto& step = std::get<StepSignal>(input);
    const std::vector<double> diffs = level_differences(step);
    const CtRepresenter rep = ct_representer(step, diffs, tau);
    row(0) = ct_inner_phi0(kernel, rep);
    for (std::size_t k = 0; k < n_i; ++k) {
      const CtRepresenter other = ct_representer(
          step, diffs, sample_times[index_set.indices[k]]);
      row(static_cast<Eigen::Index>(k + 1)) = ct_inner(kernel, rep, other);
    }
  } else {
    const auto& u = std::get<DtInput>(input);
    const long tau_i = as_dt_time(tau);
    row(0) = dt_inner_phi0(kernel, u, tau_i);
    for (std::size_t k = 0; k < n_i; ++k)
      row(static_cast<Eigen::Index>(k + 1)) = dt_inner(
          kernel, u, tau_i, as_dt_time(sample_times[index_set.indices[k]]));
  }
  return row;
}

GramSystem with_index_set(const GramSystem& gram, const IndexSet& index_set) {
  index_set.validate(gram.sample_times.size());
  GramSystem out = gram;
  out.index_set = index_set;
  finalize(out);
  return out;
}

double output_inner(const KernelParams& kernel, const InputSignal& input,
                    double tau1, double tau2) {
  if (std::holds_alternative<DtInput>(input)) {
    const auto& u = std::get<DtInput>(input);
    return dt_inner(kernel, u, as_dt_time(tau1), as_dt_time(tau2));
  }
  const auto& step = std::get<StepSignal>(input);
  const std::vector<double> diffs = level_differences(step);
  return ct_inner(kernel, ct_representer(step, diffs, tau1),
                  ct_representer(step, diffs, tau2));
}

double output_phi0_inner(const KernelParams& kernel, const InputSignal& input,
                         double tau) {
  if (std::holds_alternative<DtInput>(input)) {
    const auto& u = std::get<DtInput>(input);
    return dt_inner_phi0(kernel, u, as_dt_time(tau));
  }
  const auto& step = std::get<StepSignal>(input);
  return ct_inner_phi0(kernel,
                       ct_representer(step, level_differences(step), tau));
}

double gain_functional(const GramSystem& gram, const Eigen::VectorXd& x) {
  if (x.size() != gram.a0.size())
    throw std::invalid_argument("gain_functional: dimension mismatch");
  return gram.a0.dot(x);
}

void dump_phi(const GramSystem& gram, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot write");
  for (Eigen::Index r = 0; r < gram.Phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < gram.Phi.cols(); ++c) {
      if (c) out << ',';
      out << format_double(gram.Phi(r, c));
    }
    out << '\n';
  }
}

}  // namespace ssgain
