#include "ssgain/tuning.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace ssgain {

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0
                            : static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    g[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
  }
  return g;
}

std::vector<double> lin_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0
                            : static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    g[i] = lo + f * (hi - lo);
  }
  return g;
}

// gamma grid clipped to the open admissible interval for this alpha.
std::vector<double> gamma_grid(const SearchSpace& space, TimeDomain domain,
                               double alpha) {
  const double bound = 1.0 / std::sqrt(alpha);
  const double lo_dom = domain == TimeDomain::DT ? -bound : 0.0;
  std::vector<double> out;
  for (double g : lin_grid(space.gamma_lo, space.gamma_hi, space.gamma_count))
    if (g > lo_dom && g < bound) out.push_back(g);
  return out;
}

bool theta_less(const Theta& a, const Theta& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return a.gamma < b.gamma;
}

std::vector<Theta> enumerate_candidates(const SearchSpace& space,
                                        KernelFamily family,
                                        TimeDomain domain) {
  std::vector<Theta> out;
  if (space.kind == SearchSpace::Kind::Grid) {
    // kernel parameters outermost so Gram matrices are reused across lambda
    for (double a : lin_grid(space.alpha_lo, space.alpha_hi,
                             space.alpha_count)) {
      const std::vector<double> gs =
          family == KernelFamily::DC ? gamma_grid(space, domain, a)
                                     : std::vector<double>{1.0};
      for (double g : gs)
        for (double l :
             log_grid(space.lambda_lo, space.lambda_hi, space.lambda_count))
          out.push_back({l, a, g});
    }
    return out;
  }
  std::mt19937_64 rng(space.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (out.size() < space.random_count) {
    Theta t;
    t.lambda = std::exp(std::log(space.lambda_lo) +
                        unit(rng) * (std::log(space.lambda_hi) -
                                     std::log(space.lambda_lo)));
    t.alpha = space.alpha_lo + unit(rng) * (space.alpha_hi - space.alpha_lo);
    t.gamma = 1.0;
    if (family == KernelFamily::DC) {
      const double g =
          space.gamma_lo + unit(rng) * (space.gamma_hi - space.gamma_lo);
      const double bound = 1.0 / std::sqrt(t.alpha);
      const double lo_dom = domain == TimeDomain::DT ? -bound : 0.0;
      if (g <= lo_dom || g >= bound) continue;  // resample
      t.gamma = g;
    }
    out.push_back(t);
  }
  return out;
}

double score_with_gram(const GramSystem& gram, const Dataset& dataset,
                       const IndexSet& validate, double lambda,
                       const Loss& loss, const GainConstraint& constraint) {
  Eigen::VectorXd y_train(
      static_cast<Eigen::Index>(gram.index_set.size()));
  for (std::size_t k = 0; k < gram.index_set.size(); ++k)
    y_train(static_cast<Eigen::Index>(k)) =
        dataset.outputs[gram.index_set.indices[k]];
  const Solution sol = solve_general(gram, y_train, lambda, loss, constraint);
  double acc = 0.0;
  for (std::size_t idx : validate.indices) {
    const double e = dataset.outputs[idx] - gram.data_row(idx).dot(sol.x);
    acc += e * e;
  }
  return acc / static_cast<double>(validate.indices.size());
}

}  // namespace

void SearchSpace::validate() const {
  if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo))
    throw std::invalid_argument("lambda range must satisfy 0 < lo <= hi");
  if (!(alpha_lo > 0.0) || !(alpha_hi < 1.0) || alpha_lo > alpha_hi)
    throw std::invalid_argument("alpha range must lie inside (0,1)");
  if (gamma_lo > gamma_hi)
    throw std::invalid_argument("gamma range must satisfy lo <= hi");
  if (kind == Kind::Grid) {
    if (lambda_count < 1 || alpha_count < 1 || gamma_count < 1)
      throw std::invalid_argument("grid counts must be >= 1");
  } else if (random_count < 1) {
    throw std::invalid_argument("random search needs >= 1 candidates");
  }
}

std::pair<IndexSet, IndexSet> split(const Dataset& dataset,
                                    double train_fraction) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0,1)");
  const std::size_t n = dataset.size();
  const std::size_t n_train = static_cast<std::size_t>(
      std::ceil(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw std::invalid_argument("split leaves an empty train or validation set");
  IndexSet train, validate;
  for (std::size_t i = 0; i < n_train; ++i) train.indices.push_back(i);
  for (std::size_t i = n_train; i < n; ++i) validate.indices.push_back(i);
  return {train, validate};
}

double validation_score(const Theta& theta, KernelFamily family,
                        const Dataset& dataset, const IndexSet& train,
                        const IndexSet& validate, const Loss& loss,
                        const GainConstraint& constraint) {
  if (validate.indices.empty())
    throw std::invalid_argument("validation_score: empty validation set");
  KernelParams kernel{family, dataset.domain, theta.alpha, theta.gamma};
  const GramSystem gram = build_gram(kernel, dataset, train);
  return score_with_gram(gram, dataset, validate, theta.lambda, loss,
                         constraint);
}

TuningResult tune(const Dataset& dataset, KernelFamily family,
                  const SearchSpace& space, const Loss& loss,
                  const GainConstraint& constraint, double train_fraction) {
  space.validate();
  const auto [train, validate] = split(dataset, train_fraction);
  const std::vector<Theta> candidates =
      enumerate_candidates(space, family, dataset.domain);
  if (candidates.empty())
    throw TuningError("search space contains no admissible candidates");

  TuningResult result;
  result.table.reserve(candidates.size());
  std::map<std::pair<double, double>, GramSystem> gram_cache;
  bool have_best = false;

  for (const Theta& theta : candidates) {
    ScoreRow row;
    row.theta = theta;
    try {
      const auto key = std::make_pair(theta.alpha, theta.gamma);
      auto it = gram_cache.find(key);
      if (it == gram_cache.end()) {
        KernelParams kernel{family, dataset.domain, theta.alpha, theta.gamma};
        it = gram_cache.emplace(key, build_gram(kernel, dataset, train)).first;
      }
      row.score = score_with_gram(it->second, dataset, validate, theta.lambda,
                                  loss, constraint);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (row.ok &&
        (!have_best || row.score < result.best_score ||
         (row.score == result.best_score && theta_less(theta, result.best)))) {
      result.best = theta;
      result.best_score = row.score;
      have_best = true;
    }
    result.table.push_back(std::move(row));
  }

  if (!have_best) {
    std::string msg = "every candidate failed:";
    for (const ScoreRow& row : result.table)
      msg += "\n  lambda=" + format_double(row.theta.lambda) +
             " alpha=" + format_double(row.theta.alpha) +
             " gamma=" + format_double(row.theta.gamma) + ": " + row.error;
    throw TuningError(msg);
  }
  return result;
}

void save_score_table(const TuningResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot write");
  out << "lambda,alpha,gamma,score\n";
  for (const ScoreRow& row : result.table) {
    out << format_double(row.theta.lambda) << ','
        << format_double(row.theta.alpha) << ','
        << format_double(row.theta.gamma) << ','
        << (row.ok ? format_double(row.score) : std::string("nan")) << '\n';
  }
}

}  // namespace ssgain
