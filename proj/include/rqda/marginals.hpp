#ifndef RQDA_MARGINALS_HPP
#define RQDA_MARGINALS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rqda/error.hpp"
#include "rqda/normal.hpp"
#include "rqda/types.hpp"

namespace rqda {

/// Empirical marginal cdfs of the training features, one sorted column per
/// feature. Maps raw feature values to probit scores
///
///     s_j = inv_norm_cdf( #{training x_j <= value} / (n + 1) ).
///
/// Ties share the maximal count. Immutable once built.
class MarginalModel {
public:
  MarginalModel() = default;

  /// Takes ownership of per-feature columns; each is sorted here.
  explicit MarginalModel(std::vector<std::vector<double>> columns) : columns_(std::move(columns)) {
    if (columns_.empty() || columns_.front().empty()) {
      throw ContractError("MarginalModel: need at least one feature and one sample");
    }
    const std::size_t n = columns_.front().size();
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      auto& col = columns_[j];
      if (col.size() != n) {
        throw ContractError("MarginalModel: feature columns have different lengths");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(col[i])) {
          throw DataError("non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
        }
      }
      std::sort(col.begin(), col.end());
    }
  }

  std::size_t features() const noexcept { return columns_.size(); }
  std::size_t samples() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  const std::vector<double>& sorted_column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<double>>& sorted_columns() const noexcept { return columns_; }

  /// Number of training values of feature j that are <= value.
  std::size_t count_at_most(std::size_t j, double value) const {
    const auto& col = columns_[j];
    return static_cast<std::size_t>(std::upper_bound(col.begin(), col.end(), value) - col.begin());
  }

  /// Probit score for a count in [1, n].
  double score_for_count(std::size_t count) const {
    return inv_norm_cdf(static_cast<double>(count) / static_cast<double>(samples() + 1));
  }

private:
  std::vector<std::vector<double>> columns_;
};

struct MarginalFit {
  MarginalModel model;
  Matrix scores; // n x p probit scores of the training rows
};

/// Fits the marginals on X (n x p) and returns the training probit scores.
inline MarginalFit fit_transform(const Matrix& X) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (n == 0 || p == 0) {
    throw ContractError("fit_transform: X must have at least one row and one column");
  }
  std::vector<std::vector<double>> columns(p, std::vector<double>(n));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!std::isfinite(v)) {
        throw DataError("non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
      columns[j][i] = v;
    }
  }
  MarginalFit fit{MarginalModel(std::move(columns)), Matrix(X.rows(), X.cols())};

  // Each count is in [1, n] on training points, so no quantile ever hits 0 or 1.
  // Quantiles are memoized per count since many rows share a column's count range.
  std::vector<double> by_count(n + 1, 0.0);
  for (std::size_t c = 1; c <= n; ++c) {
    by_count[c] = fit.model.score_for_count(c);
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      fit.scores(r, c) = by_count[fit.model.count_at_most(j, X(r, c))];
    }
  }
  return fit;
}

/// Out-of-sample probit scores for one point. Counts of zero are lifted to one,
/// so the result always lies in [inv_norm_cdf(1/(n+1)), inv_norm_cdf(n/(n+1))].
template <typename Derived>
Vector transform_new(const MarginalModel& model, const Eigen::MatrixBase<Derived>& x) {
  const std::size_t p = model.features();
  if (static_cast<std::size_t>(x.size()) != p) {
    throw ContractError("transform_new: expected " + std::to_string(p) + " features, got " +
                        std::to_string(x.size()));
  }
  Vector s(x.size());
  for (std::size_t j = 0; j < p; ++j) {
    const double v = x(static_cast<Eigen::Index>(j));
    if (!std::isfinite(v)) {
      throw DataError("non-finite value in feature " + std::to_string(j));
    }
    s(static_cast<Eigen::Index>(j)) = model.score_for_count(std::max<std::size_t>(1, model.count_at_most(j, v)));
  }
  return s;
}

/// Row-wise transform_new.
inline Matrix transform_new_rows(const MarginalModel& model, const Matrix& X) {
  Matrix S(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    try {
      S.row(i) = transform_new(model, X.row(i).transpose()).transpose();
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (row " + std::to_string(i) + ")");
    }
  }
  return S;
}

} // namespace rqda

#endif // RQDA_MARGINALS_HPP
