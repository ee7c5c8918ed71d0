#ifndef RQDA_COPULA_QDA_HPP
#define RQDA_COPULA_QDA_HPP

#include <Eigen/Cholesky>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "rqda/error.hpp"
#include "rqda/types.hpp"

namespace rqda {

/// Square matrix stored as its symmetric part, so M == M^T holds exactly.
/// Positive definiteness is checked where it is needed (log_det_spd,
/// inverse_spd), not at construction.
class SpdMatrix {
public:
  SpdMatrix() = default;

  explicit SpdMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw ContractError("SpdMatrix: matrix must be square");
    }
    m_ = 0.5 * (m + m.transpose());
  }

  static SpdMatrix identity(Eigen::Index d) { return SpdMatrix(Matrix::Identity(d, d)); }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  SpdMatrix with_ridge(double eps) const {
    SpdMatrix out = *this;
    out.m_.diagonal().array() += eps;
    return out;
  }

private:
  Matrix m_;
};

namespace detail {

inline Eigen::LLT<Matrix> checked_cholesky(const SpdMatrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m.matrix());
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    // Pivots this uneven mean the factorization only succeeded through rounding
    // (condition number beyond ~1e14).
    ok = (diag.array() > 0.0).all() && diag.allFinite() &&
         diag.minCoeff() * diag.minCoeff() >= 1e-14 * diag.maxCoeff() * diag.maxCoeff();
  }
  if (!ok) {
    throw SingularMatrixError(std::string(what) + ": matrix is not positive definite; increase the ridge");
  }
  return llt;
}

// s^T M s, summed in a fixed order regardless of how s is stored.
template <typename Derived>
double quadratic_form(const Matrix& m, const Eigen::MatrixBase<Derived>& s) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row += m(i, j) * s(j);
    }
    total += s(i) * row;
  }
  return total;
}

} // namespace detail

/// log det M = 2 * sum_i log L_ii for the Cholesky factor L.
inline double log_det_spd(const SpdMatrix& m) {
  const auto llt = detail::checked_cholesky(m, "log_det_spd");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline SpdMatrix inverse_spd(const SpdMatrix& m) {
  const auto llt = detail::checked_cholesky(m, "inverse_spd");
  return SpdMatrix(llt.solve(Matrix::Identity(m.dim(), m.dim())));
}

struct ClassPriors {
  double pi0;
  double pi1;
};

/// Empirical class proportions.
inline ClassPriors estimate_priors(std::span<const int> labels) {
  std::size_t ones = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw DataError("labels must be 0/1");
    }
    ones += static_cast<std::size_t>(y);
  }
  if (ones == 0 || ones == labels.size()) {
    throw TrainingError("degenerate class distribution: both classes must be present");
  }
  const auto n = static_cast<double>(labels.size());
  return {static_cast<double>(labels.size() - ones) / n, static_cast<double>(ones) / n};
}

/// Un-ridged class-conditional second moment (1/n_r) sum_{Y_i = r} z_i z_i^T of
/// projected probit scores. The scores are standard normal marginally, so this
/// is the pseudo-likelihood estimate of the projected latent covariance.
inline SpdMatrix class_second_moment(const Matrix& Z, std::span<const int> labels, int r) {
  if (static_cast<std::size_t>(Z.rows()) != labels.size()) {
    throw ContractError("class_second_moment: " + std::to_string(Z.rows()) + " rows but " +
                        std::to_string(labels.size()) + " labels");
  }
  Matrix acc = Matrix::Zero(Z.cols(), Z.cols());
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == r) {
      acc.noalias() += Z.row(i).transpose() * Z.row(i);
      ++count;
    }
  }
  if (count == 0) {
    throw TrainingError("no samples of class " + std::to_string(r));
  }
  return SpdMatrix(acc / static_cast<double>(count));
}

/// Ridge used when the caller does not force one: 1e-6 * trace / d.
inline double default_ridge(const SpdMatrix& m) {
  return 1e-6 * m.trace() / static_cast<double>(m.dim());
}

/// Class-r covariance estimate plus eps * I.
inline SpdMatrix estimate_projected_covariance(const Matrix& Z, std::span<const int> labels, int r, double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ContractError("ridge must be a finite value >= 0");
  }
  return class_second_moment(Z, labels, r).with_ridge(ridge);
}

/// Fitted single-projection robust QDA: priors, ridged class covariances and
/// their cached precision matrices and log-determinants.
struct RqdaModel {
  double pi0 = 0.5;
  double pi1 = 0.5;
  std::array<SpdMatrix, 2> sigma;
  std::array<SpdMatrix, 2> precision;
  std::array<double, 2> log_det{};
  std::array<double, 2> ridge{};
  std::array<std::size_t, 2> class_count{};

  Eigen::Index dim() const noexcept { return sigma[0].dim(); }
};

/// Builds a model from known parameters and fills the caches. Every path that
/// produces an RqdaModel (fitting, loading, the Bayes oracle) goes through here,
/// so the caches are a deterministic function of (pi, sigma).
inline RqdaModel make_rqda_model(ClassPriors priors, SpdMatrix sigma0, SpdMatrix sigma1,
                                 std::array<double, 2> ridge = {0.0, 0.0},
                                 std::array<std::size_t, 2> class_count = {0, 0}) {
  if (!(priors.pi0 > 0.0 && priors.pi0 < 1.0 && priors.pi1 > 0.0 && priors.pi1 < 1.0)) {
    throw ContractError("class priors must lie in (0, 1)");
  }
  if (sigma0.dim() != sigma1.dim() || sigma0.dim() == 0) {
    throw ContractError("class covariances must be non-empty and of equal dimension");
  }
  RqdaModel m;
  m.pi0 = priors.pi0;
  m.pi1 = priors.pi1;
  m.sigma = {std::move(sigma0), std::move(sigma1)};
  for (int r = 0; r < 2; ++r) {
    try {
      m.log_det[r] = log_det_spd(m.sigma[r]);
      m.precision[r] = inverse_spd(m.sigma[r]);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("covariance of class " + std::to_string(r) + " is singular: " + e.what());
    }
  }
  m.ridge = ridge;
  m.class_count = class_count;
  return m;
}

/// Fits priors and both ridged class covariances on projected scores Z (n x d).
/// Without an explicit ridge each class uses default_ridge of its own estimate.
inline RqdaModel fit_rqda(const Matrix& Z, std::span<const int> labels, std::optional<double> ridge = std::nullopt) {
  const ClassPriors priors = estimate_priors(labels);
  std::array<SpdMatrix, 2> raw;
  std::array<double, 2> eps{};
  std::array<std::size_t, 2> counts{};
  for (int r = 0; r < 2; ++r) {
    raw[r] = class_second_moment(Z, labels, r);
    eps[r] = ridge ? *ridge : default_ridge(raw[r]);
    if (!(eps[r] >= 0.0) || !std::isfinite(eps[r])) {
      throw ContractError("ridge must be a finite value >= 0");
    }
  }
  for (int y : labels) {
    ++counts[static_cast<std::size_t>(y)];
  }
  return make_rqda_model(priors, raw[0].with_ridge(eps[0]), raw[1].with_ridge(eps[1]), eps, counts);
}

/// Quadratic discriminant
///   log(pi1/pi0) - 1/2 log(det S1 / det S0) - 1/2 s^T (S1^{-1} - S0^{-1}) s.
template <typename Derived>
double discriminant(const Eigen::MatrixBase<Derived>& s, const RqdaModel& model) {
  if (s.size() != model.dim()) {
    throw ContractError("discriminant: expected dimension " + std::to_string(model.dim()) + ", got " +
                        std::to_string(s.size()));
  }
  const double q1 = detail::quadratic_form(model.precision[1].matrix(), s);
  const double q0 = detail::quadratic_form(model.precision[0].matrix(), s);
  return std::log(model.pi1 / model.pi0) - 0.5 * (model.log_det[1] - model.log_det[0]) - 0.5 * (q1 - q0);
}

/// 1 iff discriminant >= 0.
template <typename Derived>
int rqda_classify(const Eigen::MatrixBase<Derived>& s, const RqdaModel& model) {
  return discriminant(s, model) >= 0.0 ? 1 : 0;
}

} // namespace rqda

#endif // RQDA_COPULA_QDA_HPP
