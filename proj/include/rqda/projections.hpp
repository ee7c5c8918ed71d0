#ifndef RQDA_PROJECTIONS_HPP
#define RQDA_PROJECTIONS_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rqda/error.hpp"
#include "rqda/random.hpp"
#include "rqda/types.hpp"

namespace rqda {

enum class ProjectionFlavor { gaussian, haar, axis };

inline std::string_view to_string(ProjectionFlavor f) noexcept {
  switch (f) {
  case ProjectionFlavor::gaussian:
    return "gaussian";
  case ProjectionFlavor::haar:
    return "haar";
  case ProjectionFlavor::axis:
    return "axis";
  }
  return "unknown";
}

inline std::optional<ProjectionFlavor> parse_flavor(std::string_view s) noexcept {
  if (s == "gaussian") return ProjectionFlavor::gaussian;
  if (s == "haar") return ProjectionFlavor::haar;
  if (s == "axis") return ProjectionFlavor::axis;
  return std::nullopt;
}

/// A d x p linear map from probit-score space R^p to R^d.
struct Projection {
  Matrix matrix;
  ProjectionFlavor flavor = ProjectionFlavor::gaussian;
  std::uint64_t seed = 0; // stream the matrix was drawn from

  Eigen::Index rows() const noexcept { return matrix.rows(); }
  Eigen::Index cols() const noexcept { return matrix.cols(); }
};

namespace detail {

// Rows of A orthonormalized in place by two passes of modified Gram-Schmidt.
// Returns false if some row collapsed (numerically rank deficient).
inline bool orthonormalize_rows(Matrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double original = a.row(i).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < i; ++k) {
        a.row(i) -= a.row(i).dot(a.row(k)) * a.row(k);
      }
    }
    const double norm = a.row(i).norm();
    if (!(norm > 1e-10 * original)) {
      return false;
    }
    a.row(i) /= norm;
  }
  return true;
}

} // namespace detail

/// Draws a d x p projection from the stream identified by `stream_seed`.
///   gaussian: iid N(0, 1/d) entries
///   haar:     Gaussian rows, orthonormalized (A A^T = I_d)
///   axis:     d distinct coordinates chosen uniformly without replacement
inline Projection sample_projection(Eigen::Index p, Eigen::Index d, ProjectionFlavor flavor, std::uint64_t stream_seed) {
  if (d < 1 || d > p) {
    throw ContractError("projection dimension must satisfy 1 <= d <= p (d=" + std::to_string(d) +
                        ", p=" + std::to_string(p) + ")");
  }
  RandomStream rng(stream_seed);
  Projection proj{Matrix::Zero(d, p), flavor, stream_seed};
  auto fill_gaussian = [&](Matrix& a, double scale) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        a(i, j) = scale * rng.normal();
      }
    }
  };
  switch (flavor) {
  case ProjectionFlavor::gaussian:
    fill_gaussian(proj.matrix, 1.0 / std::sqrt(static_cast<double>(d)));
    break;
  case ProjectionFlavor::haar:
    do {
      fill_gaussian(proj.matrix, 1.0);
    } while (!detail::orthonormalize_rows(proj.matrix));
    break;
  case ProjectionFlavor::axis: {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto k = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]);
      proj.matrix(i, idx[static_cast<std::size_t>(i)]) = 1.0;
    }
    break;
  }
  }
  return proj;
}

/// A * s for a single score vector. Summation runs in a fixed order so the
/// training path (project) and the prediction path agree bit-for-bit.
template <typename Derived>
Vector project_point(const Projection& a, const Eigen::MatrixBase<Derived>& s) {
  if (s.size() != a.cols()) {
    throw ContractError("project: scores have " + std::to_string(s.size()) + " columns, projection expects " +
                        std::to_string(a.cols()));
  }
  Vector z(a.rows());
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      acc += a.matrix(k, j) * s(j);
    }
    z(k) = acc;
  }
  return z;
}

/// Projects each row of S (n x p): row i of the result is A * S_i.
inline Matrix project(const Projection& a, const Matrix& S) {
  if (S.cols() != a.cols()) {
    throw ContractError("project: scores have " + std::to_string(S.cols()) + " columns, projection expects " +
                        std::to_string(a.cols()));
  }
  Matrix Z(S.rows(), a.rows());
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    Z.row(i) = project_point(a, S.row(i).transpose()).transpose();
  }
  return Z;
}

} // namespace rqda

#endif // RQDA_PROJECTIONS_HPP
