#ifndef RQDA_ENSEMBLE_HPP
#define RQDA_ENSEMBLE_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rqda/copula_qda.hpp"
#include "rqda/error.hpp"
#include "rqda/marginals.hpp"
#include "rqda/projections.hpp"
#include "rqda/random.hpp"
#include "rqda/types.hpp"

namespace rqda {

struct EnsembleConfig {
  Eigen::Index d = 2;
  std::size_t b1 = 100; // blocks (ensemble size)
  std::size_t b2 = 10;  // candidate projections per block
  ProjectionFlavor flavor = ProjectionFlavor::haar;
  std::optional<double> ridge; // nullopt: per-class default_ridge
  std::optional<double> alpha; // nullopt: select_alpha on training votes
  std::uint64_t seed = 0;
  unsigned threads = 0; // 0: hardware concurrency; never affects results

  void validate(Eigen::Index p) const {
    if (b1 < 1 || b2 < 1) {
      throw ContractError("B1 and B2 must be at least 1");
    }
    if (d < 1 || d > p) {
      throw ContractError("projection dimension must satisfy 1 <= d <= p (d=" + std::to_string(d) +
                          ", p=" + std::to_string(p) + ")");
    }
    if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) {
      throw ContractError("alpha must lie in [0, 1]");
    }
    if (ridge && !(*ridge >= 0.0 && std::isfinite(*ridge))) {
      throw ContractError("ridge must be a finite value >= 0");
    }
  }
};

/// Seed of candidate c in block b. Independent of evaluation order.
inline std::uint64_t candidate_seed(std::uint64_t master, std::size_t block, std::size_t candidate) noexcept {
  return derive_seed(master, {block, candidate});
}

struct EnsembleBlock {
  Projection projection;
  RqdaModel model;
  double training_error = 0.0;
  std::size_t candidate = 0; // index of the selected candidate within its block
};

struct EnsembleModel {
  MarginalModel marginals;
  std::vector<EnsembleBlock> blocks;
  double alpha = 0.5;
  EnsembleConfig config;

  std::size_t features() const noexcept { return marginals.features(); }
};

/// Fraction of rows whose rqda_classify disagrees with the label.
inline double training_error(const RqdaModel& model, const Matrix& Z, std::span<const int> labels) {
  if (static_cast<std::size_t>(Z.rows()) != labels.size()) {
    throw ContractError("training_error: row and label counts differ");
  }
  if (labels.empty()) {
    return 0.0;
  }
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    wrong += rqda_classify(Z.row(i).transpose(), model) != labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

struct AlphaChoice {
  double alpha;
  double error;
};

/// Threshold minimizing the empirical error of 1{vote >= alpha}. Candidates are
/// 0 and the midpoints (k + 1/2)/B1 between achievable vote levels, for
/// k = 0..B1-1; ties go to the smallest alpha.
inline AlphaChoice select_alpha(std::span<const double> votes, std::span<const int> labels, std::size_t b1) {
  if (votes.size() != labels.size()) {
    throw ContractError("select_alpha: vote and label counts differ");
  }
  if (votes.empty()) {
    throw TrainingError("select_alpha: no training votes");
  }
  if (b1 < 1) {
    throw ContractError("select_alpha: B1 must be at least 1");
  }
  std::vector<double> grid{0.0};
  for (std::size_t k = 0; k < b1; ++k) {
    grid.push_back((static_cast<double>(k) + 0.5) / static_cast<double>(b1));
  }
  AlphaChoice best{0.0, std::numeric_limits<double>::infinity()};
  for (double a : grid) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      wrong += (votes[i] >= a ? 1 : 0) != labels[i];
    }
    const double err = static_cast<double>(wrong) / static_cast<double>(votes.size());
    if (err < best.error) {
      best = {a, err};
    }
  }
  return best;
}

namespace detail {

inline EnsembleBlock fit_block(const Matrix& scores, std::span<const int> labels, const EnsembleConfig& config,
                               std::size_t block) {
  std::optional<EnsembleBlock> best;
  std::string last_failure;
  for (std::size_t c = 0; c < config.b2; ++c) {
    Projection proj = sample_projection(scores.cols(), config.d, config.flavor,
                                        candidate_seed(config.seed, block, c));
    const Matrix Z = project(proj, scores);
    try {
      RqdaModel model = fit_rqda(Z, labels, config.ridge);
      const double err = training_error(model, Z, labels);
      if (!best || err < best->training_error) {
        best = EnsembleBlock{std::move(proj), std::move(model), err, c};
      }
    } catch (const SingularMatrixError& e) {
      last_failure = e.what();
    }
  }
  if (!best) {
    throw TrainingError("block " + std::to_string(block) + ": every candidate projection failed (" +
                        last_failure + ")");
  }
  return std::move(*best);
}

inline unsigned worker_count(unsigned requested, std::size_t tasks) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, tasks));
}

inline std::size_t votes_for_point(const EnsembleModel& model, const Vector& s) {
  std::size_t ones = 0;
  for (const auto& b : model.blocks) {
    ones += static_cast<std::size_t>(rqda_classify(project_point(b.projection, s), b.model));
  }
  return ones;
}

} // namespace detail

/// Fits the marginals once, then for each of the B1 blocks draws B2 candidate
/// projections, fits robust QDA on each and keeps the one with the lowest
/// training error (ties to the lowest candidate index). Blocks run in
/// parallel; the result depends only on (X, labels, config minus threads).
inline EnsembleModel train_ensemble(const Matrix& X, std::span<const int> labels, const EnsembleConfig& config) {
  if (static_cast<std::size_t>(X.rows()) != labels.size()) {
    throw ContractError("train_ensemble: " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(labels.size()) + " labels");
  }
  if (X.rows() < 2) {
    throw TrainingError("need at least two training samples");
  }
  config.validate(X.cols());
  estimate_priors(labels); // validates labels before any work

  MarginalFit fit = fit_transform(X);
  EnsembleModel model;
  model.config = config;
  model.blocks.resize(config.b1);

  std::vector<std::exception_ptr> failures(config.b1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < config.b1; b = next++) {
      try {
        model.blocks[b] = detail::fit_block(fit.scores, labels, config, b);
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned workers = detail::worker_count(config.threads, config.b1);
    for (unsigned t = 1; t < workers; ++t) {
      pool.emplace_back(worker);
    }
    worker();
  }
  for (const auto& f : failures) {
    if (f) {
      std::rethrow_exception(f);
    }
  }

  model.marginals = std::move(fit.model);
  if (config.alpha) {
    model.alpha = *config.alpha;
  } else {
    std::vector<std::size_t> counts(labels.size(), 0);
    for (const auto& b : model.blocks) {
      const Matrix Z = project(b.projection, fit.scores);
      for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        counts[static_cast<std::size_t>(i)] += static_cast<std::size_t>(rqda_classify(Z.row(i).transpose(), b.model));
      }
    }
    std::vector<double> votes(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      votes[i] = static_cast<double>(counts[i]) / static_cast<double>(config.b1);
    }
    model.alpha = select_alpha(votes, labels, config.b1).alpha;
  }
  return model;
}

/// Share of the B1 base classifiers voting for class 1 at raw point x.
template <typename Derived>
double vote_fraction(const EnsembleModel& model, const Eigen::MatrixBase<Derived>& x) {
  const Vector s = transform_new(model.marginals, x);
  return static_cast<double>(detail::votes_for_point(model, s)) / static_cast<double>(model.blocks.size());
}

/// 1 iff vote_fraction >= alpha.
template <typename Derived>
int classify(const EnsembleModel& model, const Eigen::MatrixBase<Derived>& x) {
  return vote_fraction(model, x) >= model.alpha ? 1 : 0;
}

struct Prediction {
  int label;
  double vote;
};

/// Batch prediction over the rows of X.
inline std::vector<Prediction> predict(const EnsembleModel& model, const Matrix& X) {
  if (static_cast<std::size_t>(X.cols()) != model.features()) {
    throw ContractError("feature dimension mismatch: model expects p=" + std::to_string(model.features()) +
                        ", data has " + std::to_string(X.cols()));
  }
  const Matrix S = transform_new_rows(model.marginals, X);
  std::vector<Prediction> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector s = S.row(i).transpose();
    const double vote =
        static_cast<double>(detail::votes_for_point(model, s)) / static_cast<double>(model.blocks.size());
    out[static_cast<std::size_t>(i)] = {vote >= model.alpha ? 1 : 0, vote};
  }
  return out;
}

} // namespace rqda

#endif // RQDA_ENSEMBLE_HPP
