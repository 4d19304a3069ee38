#pragma once

#include <cstdint>
#include <utility>

#include "ssgain/model.hpp"

namespace ssgain {

/// Hyperparameter candidate theta = (lambda, alpha, gamma); gamma is
/// carried but ignored for TC/SS kernels.
struct Theta {
  double lambda = 1.0;
  double alpha = 0.5;
  double gamma = 1.0;
};

struct SearchSpace {
  enum class Kind { Grid, Random };

  double lambda_lo = 1e-6;
  double lambda_hi = 1e2;
  std::size_t lambda_count = 9;  // log-spaced
  double alpha_lo = 0.5;
  double alpha_hi = 0.98;
  std::size_t alpha_count = 10;
  double gamma_lo = 0.8;  // DC only; intersected with the gamma domain
  double gamma_hi = 1.2;
  std::size_t gamma_count = 5;
  Kind kind = Kind::Grid;
  std::size_t random_count = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ScoreRow {
  Theta theta;
  double score = 0.0;
  bool ok = false;
  std::string error;
};

struct TuningResult {
  Theta best;
  double best_score = 0.0;
  std::vector<ScoreRow> table;
};

class TuningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chronological hold-out split: train takes the first
/// ceil(train_fraction * n_D) indices, validation the rest.
std::pair<IndexSet, IndexSet> split(const Dataset& dataset,
                                    double train_fraction);

/// Mean squared prediction error on the validation indices of the model
/// fitted on the train indices with the given hyperparameters.
double validation_score(const Theta& theta, KernelFamily family,
                        const Dataset& dataset, const IndexSet& train,
                        const IndexSet& validate, const Loss& loss,
                        const GainConstraint& constraint);

/// Minimize the validation score over the search space.  Ties break toward
/// smaller lambda, then alpha, then gamma.  Throws TuningError (with
/// per-candidate diagnostics) only if every candidate fails.
TuningResult tune(const Dataset& dataset, KernelFamily family,
                  const SearchSpace& space, const Loss& loss,
                  const GainConstraint& constraint,
                  double train_fraction = 0.8);

/// Score table CSV: header `lambda,alpha,gamma,score`, one row per
/// candidate in enumeration order (failed candidates print nan).
void save_score_table(const TuningResult& result, const std::string& path);

}  // namespace ssgain
