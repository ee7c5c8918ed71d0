#ifndef RQDA_SYNTHDATA_HPP
#define RQDA_SYNTHDATA_HPP

#include <Eigen/Cholesky>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rqda/copula_qda.hpp"
#include "rqda/error.hpp"
#include "rqda/random.hpp"
#include "rqda/types.hpp"

namespace rqda {

/// Strictly increasing map applied to one latent coordinate to produce the
/// observed feature.
struct MarginalMap {
  enum class Kind { identity, exponential, cube, breakpoints };

  Kind kind = Kind::identity;
  // Breakpoint map: piecewise linear through (knots_x[k], knots_y[k]), both
  // strictly increasing, extended linearly beyond the end knots.
  std::vector<double> knots_x;
  std::vector<double> knots_y;

  static MarginalMap identity() { return {}; }
  static MarginalMap exponential() { return {Kind::exponential, {}, {}}; }
  static MarginalMap cube() { return {Kind::cube, {}, {}}; }
  static MarginalMap piecewise(std::vector<double> xs, std::vector<double> ys) {
    MarginalMap m{Kind::breakpoints, std::move(xs), std::move(ys)};
    m.validate();
    return m;
  }

  void validate() const {
    if (kind != Kind::breakpoints) {
      return;
    }
    if (knots_x.size() < 2 || knots_x.size() != knots_y.size()) {
      throw ContractError("breakpoint map needs at least two (x, y) knots of equal count");
    }
    for (std::size_t k = 1; k < knots_x.size(); ++k) {
      if (!(knots_x[k] > knots_x[k - 1]) || !(knots_y[k] > knots_y[k - 1])) {
        throw ContractError("breakpoint knots must be strictly increasing in x and y");
      }
    }
  }

  double operator()(double s) const {
    switch (kind) {
    case Kind::identity:
      return s;
    case Kind::exponential:
      return std::exp(s);
    case Kind::cube:
      return s * s * s;
    case Kind::breakpoints: {
      std::size_t k = 1;
      while (k + 1 < knots_x.size() && s > knots_x[k]) {
        ++k;
      }
      const double slope = (knots_y[k] - knots_y[k - 1]) / (knots_x[k] - knots_x[k - 1]);
      return knots_y[k - 1] + slope * (s - knots_x[k - 1]);
    }
    }
    return s;
  }
};

inline std::optional<MarginalMap::Kind> parse_marginal_kind(std::string_view s) noexcept {
  if (s == "identity") return MarginalMap::Kind::identity;
  if (s == "exp") return MarginalMap::Kind::exponential;
  if (s == "cube") return MarginalMap::Kind::cube;
  if (s == "breakpoints") return MarginalMap::Kind::breakpoints;
  return std::nullopt;
}

/// Two-class meta-Gaussian scenario: S | Y=r ~ N_p(0, sigma[r]) and
/// X_j = marginals[j](S_j), with the same marginal maps for both classes.
struct ScenarioSpec {
  Eigen::Index p = 0;
  double pi1 = 0.5;
  std::array<SpdMatrix, 2> sigma;
  std::vector<MarginalMap> marginals; // size p, or empty for identity
  std::uint64_t seed = 0;

  /// Full validation: interior prior, unit-diagonal positive definite sigmas.
  void validate() const {
    if (!(pi1 > 0.0 && pi1 < 1.0)) {
      throw ContractError("class prior pi1 must lie strictly between 0 and 1");
    }
    validate_structure();
  }

  void validate_structure() const {
    if (p < 1) {
      throw ContractError("scenario dimension p must be at least 1");
    }
    if (!(pi1 >= 0.0 && pi1 <= 1.0)) {
      throw ContractError("class prior pi1 must lie in [0, 1]");
    }
    for (int r = 0; r < 2; ++r) {
      const auto& s = sigma[static_cast<std::size_t>(r)];
      if (s.dim() != p) {
        throw ContractError("sigma" + std::to_string(r) + " must be p x p");
      }
      for (Eigen::Index j = 0; j < p; ++j) {
        if (s(j, j) != 1.0) {
          throw ContractError("sigma" + std::to_string(r) + " must have unit diagonal");
        }
      }
      Eigen::LLT<Matrix> llt(s.matrix());
      if (llt.info() != Eigen::Success) {
        throw ContractError("sigma" + std::to_string(r) + " must be positive definite");
      }
    }
    if (!marginals.empty() && marginals.size() != static_cast<std::size_t>(p)) {
      throw ContractError("need one marginal map per feature");
    }
    for (const auto& m : marginals) {
      m.validate();
    }
  }

  double apply_marginal(Eigen::Index j, double s) const {
    return marginals.empty() ? s : marginals[static_cast<std::size_t>(j)](s);
  }
};

/// Random p x p correlation matrix: the Gram matrix of p random unit vectors
/// in R^{p+2}. Unit diagonal exactly; re-drawn if Cholesky fails.
inline SpdMatrix random_correlation_matrix(Eigen::Index p, RandomStream& rng) {
  if (p < 1) {
    throw ContractError("random_correlation_matrix: p must be at least 1");
  }
  for (;;) {
    Matrix w(p, p + 2);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p + 2; ++j) {
        w(i, j) = rng.normal();
      }
      w.row(i) /= w.row(i).norm();
    }
    Matrix g = w * w.transpose();
    g.diagonal().setOnes();
    SpdMatrix c(g);
    if (Eigen::LLT<Matrix>(c.matrix()).info() == Eigen::Success) {
      return c;
    }
  }
}

struct Dataset {
  Matrix X;      // n x p observed features
  Labels y;      // n labels
  Matrix latent; // n x p latent Gaussian scores S
};

namespace detail {

inline std::array<Matrix, 2> cholesky_factors(const ScenarioSpec& spec) {
  return {Matrix(Eigen::LLT<Matrix>(spec.sigma[0].matrix()).matrixL()),
          Matrix(Eigen::LLT<Matrix>(spec.sigma[1].matrix()).matrixL())};
}

inline void draw_latent(const Matrix& chol, RandomStream& rng, Vector& z, Vector& s) {
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    z(j) = rng.normal();
  }
  s.noalias() = chol.triangularView<Eigen::Lower>() * z;
}

} // namespace detail

/// Samples n rows. Labels are Bernoulli(pi1) unless `fixed_class_counts`, in
/// which case exactly round(n * pi1) rows are class 1, in random order.
/// Per row the stream yields the label draw first, then p normals.
inline Dataset sample_meta_gaussian(std::size_t n, const ScenarioSpec& spec, RandomStream& rng,
                                    bool fixed_class_counts = false) {
  spec.validate_structure();
  if (n < 1) {
    throw ContractError("sample_meta_gaussian: n must be at least 1");
  }
  const Eigen::Index p = spec.p;
  const auto chol = detail::cholesky_factors(spec);
  Dataset data{Matrix(static_cast<Eigen::Index>(n), p), Labels(n), Matrix(static_cast<Eigen::Index>(n), p)};

  if (fixed_class_counts) {
    const auto ones = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.pi1));
    for (std::size_t i = 0; i < n; ++i) {
      data.y[i] = i < ones ? 1 : 0;
    }
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(data.y[i], data.y[static_cast<std::size_t>(rng.below(i + 1))]);
    }
  }

  Vector z(p), s(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fixed_class_counts) {
      data.y[i] = rng.uniform() < spec.pi1 ? 1 : 0;
    }
    detail::draw_latent(chol[static_cast<std::size_t>(data.y[i])], rng, z, s);
    const auto row = static_cast<Eigen::Index>(i);
    data.latent.row(row) = s.transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
      data.X(row, j) = spec.apply_marginal(j, s(j));
    }
  }
  return data;
}

/// Bayes-optimal rule of a scenario: the quadratic discriminant evaluated with
/// the true priors and correlation matrices on the latent scores.
class BayesOracle {
public:
  explicit BayesOracle(const ScenarioSpec& spec) {
    spec.validate();
    model_ = make_rqda_model({1.0 - spec.pi1, spec.pi1}, spec.sigma[0], spec.sigma[1]);
  }

  template <typename Derived>
  int operator()(const Eigen::MatrixBase<Derived>& s) const {
    return rqda_classify(s, model_);
  }

  const RqdaModel& model() const noexcept { return model_; }

private:
  RqdaModel model_;
};

template <typename Derived>
int bayes_oracle_classify(const Eigen::MatrixBase<Derived>& s, const ScenarioSpec& spec) {
  return BayesOracle(spec)(s);
}

struct RiskEstimate {
  double risk;
  double std_error; // sqrt(r (1 - r) / N)
};

/// Misclassification rate of the Bayes oracle over N fresh latent samples,
/// drawn in the same order as sample_meta_gaussian.
inline RiskEstimate monte_carlo_bayes_risk(const ScenarioSpec& spec, std::size_t samples, RandomStream& rng) {
  if (samples < 1) {
    throw ContractError("monte_carlo_bayes_risk: need at least one sample");
  }
  const BayesOracle oracle(spec);
  const auto chol = detail::cholesky_factors(spec);
  Vector z(spec.p), s(spec.p);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const int y = rng.uniform() < spec.pi1 ? 1 : 0;
    detail::draw_latent(chol[static_cast<std::size_t>(y)], rng, z, s);
    wrong += oracle(s) != y;
  }
  const double r = static_cast<double>(wrong) / static_cast<double>(samples);
  return {r, std::sqrt(r * (1.0 - r) / static_cast<double>(samples))};
}

/// Correlation pair used by the "contrast" scenario: class 0 is close to the
/// identity (0.1 on the first off-diagonal), class 1 couples consecutive
/// feature pairs with strong correlations alternating over
/// {0.9, -0.85, 0.8}. Both are positive definite for every p.
inline std::array<SpdMatrix, 2> contrast_sigmas(Eigen::Index p) {
  Matrix s0 = Matrix::Identity(p, p);
  for (Eigen::Index j = 0; j + 1 < p; ++j) {
    s0(j, j + 1) = s0(j + 1, j) = 0.1;
  }
  Matrix s1 = Matrix::Identity(p, p);
  const double rho[] = {0.9, -0.85, 0.8};
  for (Eigen::Index j = 0; j + 1 < p; j += 2) {
    s1(j, j + 1) = s1(j + 1, j) = rho[(j / 2) % 3];
  }
  return {SpdMatrix(s0), SpdMatrix(s1)};
}

/// Breakpoint map used when none is given: a strictly increasing, kinked
/// piecewise-linear curve.
inline MarginalMap default_breakpoint_map() {
  return MarginalMap::piecewise({-2.0, -0.5, 0.0, 1.0, 2.5}, {-10.0, -9.0, 0.0, 0.5, 40.0});
}

/// Cycles exp, cube, breakpoints, identity over the p features.
inline std::vector<MarginalMap> mixed_marginals(Eigen::Index p) {
  std::vector<MarginalMap> maps;
  for (Eigen::Index j = 0; j < p; ++j) {
    switch (j % 4) {
    case 0: maps.push_back(MarginalMap::exponential()); break;
    case 1: maps.push_back(MarginalMap::cube()); break;
    case 2: maps.push_back(default_breakpoint_map()); break;
    default: maps.push_back(MarginalMap::identity()); break;
    }
  }
  return maps;
}

} // namespace rqda

#endif // RQDA_SYNTHDATA_HPP
