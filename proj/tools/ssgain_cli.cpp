// ssgain: steady-state-gain constrained kernel identification CLI.
//
// Subcommands: identify, simulate, benchmark, tune.  All options can come
// from a JSON config (--config) with command-line flags taking precedence.
// Exit codes: 0 ok, 2 input error, 3 solver error, 64 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssgain/bench.hpp"
#include "ssgain/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssgain;

namespace {

struct CliOptions {
  std::string config_path;
  std::string data_path;       // DT dataset csv
  std::string steps_path;      // CT steps csv
  std::string samples_path;    // CT samples csv
  std::string truth_path;      // optional truth impulse csv (t,g)
  std::string out_dir = ".";

  std::string kernel = "tc";
  std::string domain;  // inferred from data unless set
  double alpha = 0.9;
  double gamma = 1.0;
  std::optional<double> lambda;
  bool tune_theta = false;

  std::string loss = "squared";
  double sigma = 1.0;
  std::optional<double> delta;
  std::optional<double> delta_lo;
  std::optional<double> delta_hi;

  std::uint64_t seed = 0;

  // simulate
  std::size_t sim_n = 8;
  double sim_r = 0.9;
  std::size_t sim_samples = 200;
  std::optional<double> sim_snr_db;
  bool sim_impulse_input = false;

  // benchmark
  BenchConfig bench;

  // tune
  SearchSpace space;
  double train_fraction = 0.8;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open config");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

template <typename T>
void from_config(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).template get<T>();
}

void from_config_opt(const json& j, const char* key,
                     std::optional<double>& dst) {
  if (j.contains(key) && !j.at(key).is_null())
    dst = j.at(key).get<double>();
}

void apply_config(CliOptions& opt, const json& j) {
  from_config(j, "data", opt.data_path);
  from_config(j, "steps", opt.steps_path);
  from_config(j, "samples", opt.samples_path);
  from_config(j, "truth", opt.truth_path);
  from_config(j, "out", opt.out_dir);
  from_config(j, "kernel", opt.kernel);
  from_config(j, "alpha", opt.alpha);
  from_config(j, "gamma", opt.gamma);
  from_config_opt(j, "lambda", opt.lambda);
  from_config(j, "tune", opt.tune_theta);
  from_config(j, "loss", opt.loss);
  from_config(j, "sigma", opt.sigma);
  from_config_opt(j, "delta", opt.delta);
  from_config_opt(j, "delta_lo", opt.delta_lo);
  from_config_opt(j, "delta_hi", opt.delta_hi);
  from_config(j, "seed", opt.seed);
  from_config(j, "train_fraction", opt.train_fraction);

  from_config(j, "n", opt.sim_n);
  from_config(j, "r", opt.sim_r);
  from_config(j, "n_samples", opt.sim_samples);
  from_config_opt(j, "snr_db", opt.sim_snr_db);
  from_config(j, "impulse_input", opt.sim_impulse_input);

  if (j.contains("bench")) {
    const json& b = j.at("bench");
    from_config(b, "trials", opt.bench.trials);
    from_config(b, "orders", opt.bench.orders);
    from_config(b, "radii", opt.bench.radii);
    from_config(b, "snrs_db", opt.bench.snrs_db);
    from_config(b, "n_samples", opt.bench.n_samples);
    from_config(b, "lambda_grid", opt.bench.lambda_grid);
    from_config(b, "train_fraction", opt.bench.train_fraction);
  }
  if (j.contains("space")) {
    const json& s = j.at("space");
    from_config(s, "lambda_lo", opt.space.lambda_lo);
    from_config(s, "lambda_hi", opt.space.lambda_hi);
    from_config(s, "lambda_count", opt.space.lambda_count);
    from_config(s, "alpha_lo", opt.space.alpha_lo);
    from_config(s, "alpha_hi", opt.space.alpha_hi);
    from_config(s, "alpha_count", opt.space.alpha_count);
    from_config(s, "gamma_lo", opt.space.gamma_lo);
    from_config(s, "gamma_hi", opt.space.gamma_hi);
    from_config(s, "gamma_count", opt.space.gamma_count);
    from_config(s, "random_count", opt.space.random_count);
    std::string kind = "grid";
    from_config(s, "kind", kind);
    opt.space.kind = kind == "random" ? SearchSpace::Kind::Random
                                      : SearchSpace::Kind::Grid;
    opt.space.seed = opt.seed;
  }
}

KernelFamily parse_family(const std::string& s) {
  if (s == "tc") return KernelFamily::TC;
  if (s == "dc") return KernelFamily::DC;
  if (s == "ss") return KernelFamily::SS;
  throw InputError("unknown kernel family: " + s + " (want tc|dc|ss)");
}

Loss parse_loss(const CliOptions& opt) {
  Loss loss;
  if (opt.loss == "squared")
    loss.kind = LossKind::SquaredError;
  else if (opt.loss == "huber")
    loss.kind = LossKind::Huber;
  else if (opt.loss == "pseudo-huber")
    loss.kind = LossKind::PseudoHuber;
  else
    throw InputError("unknown loss: " + opt.loss +
                     " (want squared|huber|pseudo-huber)");
  loss.sigma = opt.sigma;
  return loss;
}

GainConstraint parse_constraint(const CliOptions& opt) {
  if (opt.delta) {
    if (opt.delta_lo || opt.delta_hi)
      throw InputError("--delta excludes --delta-lo/--delta-hi");
    return GainConstraint::exact(*opt.delta);
  }
  GainConstraint c;
  if (opt.delta_lo) c.lo = *opt.delta_lo;
  if (opt.delta_hi) c.hi = *opt.delta_hi;
  c.validate();
  return c;
}

Dataset load_dataset(const CliOptions& opt) {
  if (!opt.data_path.empty()) {
    if (!opt.steps_path.empty() || !opt.samples_path.empty())
      throw InputError("--data excludes --steps/--samples");
    return load_dt_dataset(opt.data_path);
  }
  if (opt.steps_path.empty() || opt.samples_path.empty())
    throw InputError("need --data (DT) or both --steps and --samples (CT)");
  return load_ct_dataset(opt.steps_path, opt.samples_path);
}

std::vector<std::pair<double, double>> load_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != "t,g")
    throw InputError(path + ":1: expected header \"t,g\"");
  std::vector<std::pair<double, double>> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError(path + ':' + std::to_string(row) + ": expected 2 columns");
    try {
      out.emplace_back(std::stod(line.substr(0, comma)),
                       std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw InputError(path + ':' + std::to_string(row) + ": bad number");
    }
  }
  return out;
}

void write_series_csv(const std::string& path, const char* header,
                      const std::vector<double>& t,
                      const std::vector<double>& v) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot write");
  out << header << '\n';
  for (std::size_t i = 0; i < t.size(); ++i)
    out << format_double(t[i]) << ',' << format_double(v[i]) << '\n';
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot write");
  out << j.dump(2) << '\n';
}

int cmd_identify(const CliOptions& opt) {
  const Dataset ds = load_dataset(opt);
  const Loss loss = parse_loss(opt);
  const GainConstraint constraint = parse_constraint(opt);
  const KernelFamily family = parse_family(opt.kernel);
  fs::create_directories(opt.out_dir);

  double lambda;
  KernelParams kernel{family, ds.domain, opt.alpha, opt.gamma};
  if (opt.tune_theta) {
    SearchSpace space = opt.space;
    space.seed = opt.seed;
    const TuningResult tr =
        tune(ds, family, space, loss, constraint, opt.train_fraction);
    lambda = tr.best.lambda;
    kernel.alpha = tr.best.alpha;
    kernel.gamma = tr.best.gamma;
  } else {
    if (!opt.lambda) throw InputError("need --lambda (or tune=true)");
    lambda = *opt.lambda;
  }
  kernel.validate();

  const GramSystem gram = build_gram(kernel, ds, IndexSet::all(ds.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = ds.outputs[i];
  const Solution sol = solve_general(gram, y, lambda, loss, constraint);
  const IdentifiedModel model = make_model(gram, lambda, loss, constraint, sol);

  const std::vector<double> grid = default_response_grid(kernel);
  const std::vector<double> impulse = impulse_response(model, grid);
  const std::vector<double> step = step_response(model, grid);

  save_model(model, (fs::path(opt.out_dir) / "model.json").string());
  write_series_csv((fs::path(opt.out_dir) / "impulse.csv").string(), "t,g",
                   grid, impulse);
  write_series_csv((fs::path(opt.out_dir) / "step.csv").string(), "t,s",
                   grid, step);

  json report;
  report["achieved_gain"] = model.gain;
  report["lambda"] = lambda;
  report["alpha"] = kernel.alpha;
  report["gamma"] = kernel.gamma;
  report["objective"] = sol.objective;
  report["kkt_residual"] = sol.kkt_residual;
  report["iterations"] = sol.iterations;
  if (!opt.truth_path.empty()) {
    const auto truth = load_truth_csv(opt.truth_path);
    std::vector<double> tt, gt;
    for (const auto& [t, g] : truth) {
      tt.push_back(t);
      gt.push_back(g);
    }
    report["fit_pct"] = fit_metric(impulse_response(model, tt), gt);
  }
  write_json((fs::path(opt.out_dir) / "report.json").string(), report);
  return 0;
}

int cmd_simulate(const CliOptions& opt) {
  fs::create_directories(opt.out_dir);
  RandomSystemSpec spec{opt.sim_n, opt.sim_r, opt.seed};
  const GeneratedSystem sys = gen_system(spec);

  DtInput input;
  input.samples.assign(opt.sim_samples, 0.0);
  if (opt.sim_impulse_input) {
    input.samples[0] = 1.0;
  } else {
    std::mt19937_64 rng(opt.seed + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& u : input.samples) u = normal(rng);
  }
  std::optional<NoiseSpec> noise;
  if (opt.sim_snr_db) noise = NoiseSpec{*opt.sim_snr_db, opt.seed + 2};
  double realized = std::numeric_limits<double>::infinity();
  const Dataset ds = simulate(sys, input, opt.sim_samples, noise, &realized);

  save_dt_dataset(ds, (fs::path(opt.out_dir) / "data.csv").string());
  std::vector<double> tg(sys.impulse.size());
  for (std::size_t s = 0; s < tg.size(); ++s) tg[s] = static_cast<double>(s);
  write_series_csv((fs::path(opt.out_dir) / "truth.csv").string(), "t,g", tg,
                   sys.impulse);

  json side;
  side["n"] = spec.n;
  side["r"] = spec.r;
  side["seed"] = spec.seed;
  side["gain"] = sys.gain;
  side["snr_db"] = opt.sim_snr_db ? json(*opt.sim_snr_db) : json(nullptr);
  side["realized_snr_db"] =
      std::isfinite(realized) ? json(realized) : json(nullptr);
  write_json((fs::path(opt.out_dir) / "sim.json").string(), side);
  return 0;
}

int cmd_benchmark(const CliOptions& opt) {
  fs::create_directories(opt.out_dir);
  BenchConfig cfg = opt.bench;
  cfg.seed = opt.seed;
  const BenchResult result = monte_carlo(cfg);
  save_bench_csv(result, (fs::path(opt.out_dir) / "bench.csv").string());

  json summary;
  for (double snr : cfg.snrs_db) {
    for (const char* method : {"constrained", "unconstrained"}) {
      std::vector<double> fits, gain_errs;
      double seconds = 0.0;
      for (const TrialRow& row : result.rows)
        if (row.method == method && row.snr_db == snr) {
          fits.push_back(row.fit_pct);
          gain_errs.push_back(std::abs(row.gain_err));
          seconds += row.seconds;
        }
      json entry;
      entry["median_fit_pct"] = median(fits);
      entry["median_abs_gain_err"] = median(gain_errs);
      summary[method][format_double(snr)] = entry;
      std::cerr << "bench: " << method << " snr=" << snr << " dB, "
                << fits.size() << " trials, " << seconds << " s\n";
    }
  }
  write_json((fs::path(opt.out_dir) / "summary.json").string(), summary);
  return 0;
}

int cmd_tune(const CliOptions& opt) {
  const Dataset ds = load_dataset(opt);
  const Loss loss = parse_loss(opt);
  const GainConstraint constraint = parse_constraint(opt);
  const KernelFamily family = parse_family(opt.kernel);
  fs::create_directories(opt.out_dir);

  SearchSpace space = opt.space;
  space.seed = opt.seed;
  const TuningResult result =
      tune(ds, family, space, loss, constraint, opt.train_fraction);
  save_score_table(result, (fs::path(opt.out_dir) / "scores.csv").string());

  json best;
  best["lambda"] = result.best.lambda;
  best["alpha"] = result.best.alpha;
  best["gamma"] = result.best.gamma;
  best["score"] = result.best_score;
  write_json((fs::path(opt.out_dir) / "best_theta.json").string(), best);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("SSGAIN_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"Steady-state-gain constrained kernel identification"};
  app.require_subcommand(1);
  CliOptions opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "random seed");
  };
  const auto add_fit_flags = [&](CLI::App* sub) {
    sub->add_option("--data", opt.data_path, "DT dataset CSV (t,u,y)");
    sub->add_option("--steps", opt.steps_path, "CT input steps CSV (s,xi)");
    sub->add_option("--samples", opt.samples_path, "CT samples CSV (t,y)");
    sub->add_option("--kernel", opt.kernel, "kernel family: tc|dc|ss");
    sub->add_option("--alpha", opt.alpha, "kernel decay rate in (0,1)");
    sub->add_option("--gamma", opt.gamma, "DC correlation parameter");
    sub->add_option("--lambda", [&opt](const CLI::results_t& r) {
      opt.lambda = std::stod(r.front());
      return true;
    }, "regularization weight");
    sub->add_option("--loss", opt.loss, "squared|huber|pseudo-huber");
    sub->add_option("--sigma", opt.sigma, "robust loss scale");
    sub->add_option("--delta", [&opt](const CLI::results_t& r) {
      opt.delta = std::stod(r.front());
      return true;
    }, "exact steady-state gain");
    sub->add_option("--delta-lo", [&opt](const CLI::results_t& r) {
      opt.delta_lo = std::stod(r.front());
      return true;
    }, "gain lower bound");
    sub->add_option("--delta-hi", [&opt](const CLI::results_t& r) {
      opt.delta_hi = std::stod(r.front());
      return true;
    }, "gain upper bound");
  };

  CLI::App* identify = app.add_subcommand("identify", "fit a model");
  add_common(identify);
  add_fit_flags(identify);
  identify->add_option("--truth", opt.truth_path, "truth impulse CSV (t,g)");
  identify->add_flag("--tune", opt.tune_theta,
                     "tune hyperparameters before fitting");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "generate a random system and dataset");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--n", opt.sim_n, "system order");
  simulate_cmd->add_option("--r", opt.sim_r, "spectral radius in (0,1)");
  simulate_cmd->add_option("--n-samples", opt.sim_samples, "sample count");
  simulate_cmd->add_option("--snr-db", [&opt](const CLI::results_t& r) {
    opt.sim_snr_db = std::stod(r.front());
    return true;
  }, "noise level (omit for noiseless)");
  simulate_cmd->add_flag("--impulse-input", opt.sim_impulse_input,
                         "use a unit impulse input");

  CLI::App* benchmark = app.add_subcommand("benchmark", "Monte Carlo study");
  add_common(benchmark);
  benchmark->add_option("--trials", opt.bench.trials, "trial count");

  CLI::App* tune_cmd = app.add_subcommand("tune", "hyperparameter search");
  add_common(tune_cmd);
  add_fit_flags(tune_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    if (!opt.config_path.empty()) {
      apply_config(opt, load_config(opt.config_path));
      // re-parse so explicit flags override config values
      try {
        app.clear();
        app.parse(argc, argv);
      } catch (const CLI::ParseError&) {
        return 64;
      }
    }
    if (identify->parsed()) return cmd_identify(opt);
    if (simulate_cmd->parsed()) return cmd_simulate(opt);
    if (benchmark->parsed()) return cmd_benchmark(opt);
    return cmd_tune(opt);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const TuningError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
}
