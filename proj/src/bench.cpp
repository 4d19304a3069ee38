#include "ssgain/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "ssgain/tuning.hpp"

namespace ssgain {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

double spectral_radius(const Eigen::MatrixXd& a) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(a, false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

constexpr double kExample1Omega = 1.3228756555322954;  // sqrt(7)/2

}  // namespace

GeneratedSystem gen_system(const RandomSystemSpec& spec) {
  if (spec.n < 1 || !(spec.r > 0.0) || !(spec.r < 1.0))
    throw std::invalid_argument("gen_system: need n >= 1 and r in (0,1)");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = static_cast<Eigen::Index>(spec.n);

  GeneratedSystem sys;
  double rho = 0.0;
  do {
    sys.ss.A.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) sys.ss.A(i, j) = normal(rng);
    rho = spectral_radius(sys.ss.A);
  } while (rho < 1e-12);
  sys.ss.A *= spec.r / rho;
  sys.ss.B.resize(n);
  sys.ss.C.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) sys.ss.B(i) = normal(rng);
  for (Eigen::Index i = 0; i < n; ++i) sys.ss.C(i) = normal(rng);
  sys.ss.D = 0.0;

  const long horizon =
      static_cast<long>(std::ceil(std::log(1e-12) / std::log(spec.r))) +
      10 * static_cast<long>(spec.n);
  std::vector<double> g;
  g.push_back(sys.ss.D);
  Eigen::VectorXd v = sys.ss.B;
  for (long t = 1; t <= horizon; ++t) {
    g.push_back(sys.ss.C * v);
    v = sys.ss.A * v;
  }
  double energy = 0.0;
  for (double gt : g) energy += gt * gt;
  const double scale = 1.0 / std::sqrt(energy);
  sys.ss.C *= scale;
  for (double& gt : g) gt *= scale;
  sys.gain = 0.0;
  for (double gt : g) sys.gain += gt;
  while (g.size() > 1 && std::abs(g.back()) < 1e-10) g.pop_back();
  sys.impulse = std::move(g);
  return sys;
}

Dataset simulate(const GeneratedSystem& system, const DtInput& input,
                 std::size_t n_samples, const std::optional<NoiseSpec>& noise,
                 double* realized_snr_db) {
  Dataset ds;
  ds.domain = TimeDomain::DT;
  ds.input = input;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.ss.A.rows());
  ds.sample_times.resize(n_samples);
  ds.outputs.resize(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double u = input.eval(static_cast<long>(k));
    ds.sample_times[k] = static_cast<double>(k);
    ds.outputs[k] = system.ss.C * x + system.ss.D * u;
    x = system.ss.A * x + system.ss.B * u;
  }
  if (noise) {
    std::mt19937_64 rng(noise->seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> e(n_samples);
    double p_sig = 0.0, p_e = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      e[k] = normal(rng);
      p_sig += ds.outputs[k] * ds.outputs[k];
      p_e += e[k] * e[k];
    }
    const double target = std::pow(10.0, noise->snr_db / 10.0);
    const double scale =
        p_sig > 0.0 ? std::sqrt(p_sig / (target * p_e)) : 1.0;
    double p_w = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double w = scale * e[k];
      p_w += w * w;
      ds.outputs[k] += w;
    }
    if (realized_snr_db)
      *realized_snr_db =
          p_w > 0.0 ? 10.0 * std::log10(p_sig / p_w)
                    : std::numeric_limits<double>::infinity();
  } else if (realized_snr_db) {
    *realized_snr_db = std::numeric_limits<double>::infinity();
  }
  return ds;
}

double example1_impulse(double t) {
  const double w = kExample1Omega;
  return std::exp(-0.5 * t) *
         (std::cos(w * t) + 1.5 / w * std::sin(w * t));
}

double example1_step(double t) {
  const double w = kExample1Omega;
  return 1.0 - std::exp(-0.5 * t) *
                   (std::cos(w * t) - std::sin(w * t) / (2.0 * w));
}

StepSignal example1_input(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> dwell(1.0 / 5.0);
  double sign = (rng() & 1u) ? 1.0 : -1.0;
  StepSignal step;
  double t = 0.0;
  while (t < 100.0) {
    step.breakpoints.push_back(t);
    step.levels.push_back(sign);
    sign = -sign;
    t += dwell(rng);
  }
  step.breakpoints.push_back(100.0);
  step.validate();
  return step;
}

Dataset example1_dataset(std::uint64_t seed, double snr_db,
                         double* realized_snr_db) {
  const StepSignal step = example1_input(seed);
  Dataset ds;
  ds.domain = TimeDomain::CT;
  ds.input = step;
  const std::size_t n = 201;  // 2 Hz on [0, 100]
  ds.sample_times.resize(n);
  ds.outputs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.5 * static_cast<double>(i);
    ds.sample_times[i] = t;
    double y = 0.0;
    for (std::size_t j = 0; j < step.levels.size(); ++j)
      y += step.levels[j] * (example1_step(sbar(step, j, t)) -
                             example1_step(sbar(step, j + 1, t)));
    ds.outputs[i] = y;
  }
  std::mt19937_64 rng(mix_seed(seed, 0x6e6f697365ull));  // noise stream
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> e(n);
  double p_sig = 0.0, p_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = normal(rng);
    p_sig += ds.outputs[i] * ds.outputs[i];
    p_e += e[i] * e[i];
  }
  const double target = std::pow(10.0, snr_db / 10.0);
  const double scale = std::sqrt(p_sig / (target * p_e));
  double p_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = scale * e[i];
    p_w += w * w;
    ds.outputs[i] += w;
  }
  if (realized_snr_db) *realized_snr_db = 10.0 * std::log10(p_sig / p_w);
  return ds;
}

void BenchConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  if (orders.empty() || radii.empty() || snrs_db.empty())
    throw std::invalid_argument("bench: orders, radii, snrs must be non-empty");
  for (double r : radii)
    if (!(r > 0.0) || !(r < 1.0))
      throw std::invalid_argument("bench: radii must lie in (0,1)");
  if (n_samples < 10)
    throw std::invalid_argument("bench: n_samples must be >= 10");
  if (kernel.domain != TimeDomain::DT)
    throw std::invalid_argument("bench: DT kernels only");
  kernel.validate();
}

BenchResult monte_carlo(const BenchConfig& config) {
  config.validate();
  std::vector<double> lambdas = config.lambda_grid;
  if (lambdas.empty()) {
    for (int i = 0; i < 9; ++i)
      lambdas.push_back(std::pow(10.0, -6.0 + i));
  }

  BenchResult result;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const auto t_start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(mix_seed(config.seed, trial));
    RandomSystemSpec sys_spec;
    sys_spec.n = config.orders[std::uniform_int_distribution<std::size_t>(
        0, config.orders.size() - 1)(rng)];
    sys_spec.r = config.radii[std::uniform_int_distribution<std::size_t>(
        0, config.radii.size() - 1)(rng)];
    sys_spec.seed = rng();
    const GeneratedSystem sys = gen_system(sys_spec);

    DtInput input;
    std::normal_distribution<double> normal(0.0, 1.0);
    input.samples.resize(config.n_samples);
    for (double& u : input.samples) u = normal(rng);

    for (double snr : config.snrs_db) {
      const NoiseSpec noise{snr, rng()};
      const Dataset ds = simulate(sys, input, config.n_samples, noise);
      const auto [train, validate] = split(ds, config.train_fraction);
      const GramSystem gram_train =
          build_gram_dt(config.kernel, input, ds.sample_times, train);

      // lambda by hold-out on the unconstrained ridge, shared by both methods
      Eigen::VectorXd y_train(static_cast<Eigen::Index>(train.size()));
      for (std::size_t k = 0; k < train.size(); ++k)
        y_train(static_cast<Eigen::Index>(k)) = ds.outputs[train.indices[k]];
      double best_lambda = lambdas.front();
      double best_score = std::numeric_limits<double>::infinity();
      const Loss quad{LossKind::SquaredError, 1.0};
      for (double lambda : lambdas) {
        const Solution sol = solve_general(gram_train, y_train, lambda, quad,
                                           GainConstraint::none());
        double acc = 0.0;
        for (std::size_t idx : validate.indices) {
          const double e = ds.outputs[idx] - gram_train.data_row(idx).dot(sol.x);
          acc += e * e;
        }
        acc /= static_cast<double>(validate.indices.size());
        if (acc < best_score) {
          best_score = acc;
          best_lambda = lambda;
        }
      }

      const GramSystem gram =
          with_index_set(gram_train, IndexSet::all(ds.size()));
      Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
      for (std::size_t k = 0; k < ds.size(); ++k) y(static_cast<Eigen::Index>(k)) = ds.outputs[k];

      std::vector<double> truth_grid(sys.impulse.size());
      for (std::size_t s = 0; s < truth_grid.size(); ++s)
        truth_grid[s] = static_cast<double>(s);

      const auto eval_method = [&](const Solution& sol, const char* name,
                                   const GainConstraint& c) {
        const IdentifiedModel m = make_model(gram, best_lambda, quad, c, sol);
        TrialRow row;
        row.trial = trial;
        row.method = name;
        row.snr_db = snr;
        row.n = sys_spec.n;
        row.r = sys_spec.r;
        row.fit_pct = fit_metric(impulse_response(m, truth_grid), sys.impulse);
        row.gain_err = m.gain - sys.gain;
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
        result.rows.push_back(std::move(row));
      };
      eval_method(solve_closed_form(gram, y, best_lambda, sys.gain),
                  "constrained", GainConstraint::exact(sys.gain));
      eval_method(solve_general(gram, y, best_lambda, quad,
                                GainConstraint::none()),
                  "unconstrained", GainConstraint::none());
    }
  }
  return result;
}

void save_bench_csv(const BenchResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot write");
  out << "trial,method,snr_db,n,r,fit_pct,gain_err,seconds\n";
  for (const TrialRow& row : result.rows) {
    // seconds written as 0 so identical configs give byte-identical files
    out << row.trial << ',' << row.method << ',' << format_double(row.snr_db)
        << ',' << row.n << ',' << format_double(row.r) << ','
        << format_double(row.fit_pct) << ',' << format_double(row.gain_err)
        << ",0\n";
  }
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace ssgain
