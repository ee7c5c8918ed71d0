#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rqda/copula_qda.hpp"
#include "rqda/projections.hpp"

#include <Eigen/Eigenvalues>

namespace rqda {
namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix random_matrix(Eigen::Index n, Eigen::Index p, RandomStream& rng) {
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

TEST(SampleProjection, HaarRowsOrthonormal) {
  for (Eigen::Index p = 1; p <= 12; ++p) {
    for (Eigen::Index d = 1; d <= p; ++d) {
      const auto a = sample_projection(p, d, ProjectionFlavor::haar, static_cast<std::uint64_t>(p * 100 + d));
      EXPECT_LE(max_abs(a.matrix * a.matrix.transpose() - Matrix::Identity(d, d)), 1e-10);
    }
  }
}

TEST(SampleProjection, AxisPicksDistinctCoordinates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = sample_projection(4, 2, ProjectionFlavor::axis, seed);
    EXPECT_EQ((a.matrix.array() == 1.0).count(), 2);
    EXPECT_EQ((a.matrix.array() == 0.0).count(), 6);
    std::set<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < 2; ++i) {
      Eigen::Index c;
      a.matrix.row(i).maxCoeff(&c);
      cols.insert(c);
    }
    EXPECT_EQ(cols.size(), 2u);
  }
}

TEST(SampleProjection, AxisIsUniformOverCoordinates) {
  Vector hits = Vector::Zero(5);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    hits += sample_projection(5, 1, ProjectionFlavor::axis, static_cast<std::uint64_t>(t)).matrix.row(0).transpose();
  }
  for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(hits(j) / trials, 0.2, 0.02);
}

TEST(SampleProjection, GaussianScale) {
  const auto a = sample_projection(200, 4, ProjectionFlavor::gaussian, 9);
  const double var = a.matrix.array().square().mean();
  EXPECT_NEAR(var, 0.25, 0.03);
}

TEST(SampleProjection, DeterministicPerSeed) {
  for (auto f : {ProjectionFlavor::gaussian, ProjectionFlavor::haar, ProjectionFlavor::axis}) {
    const auto a = sample_projection(7, 3, f, 42);
    const auto b = sample_projection(7, 3, f, 42);
    const auto c = sample_projection(7, 3, f, 43);
    EXPECT_EQ(a.matrix, b.matrix);
    EXPECT_NE(a.matrix, c.matrix);
    EXPECT_EQ(a.seed, 42u);
  }
}

TEST(SampleProjection, DimensionContract) {
  EXPECT_THROW(sample_projection(3, 4, ProjectionFlavor::haar, 1), ContractError);
  EXPECT_THROW(sample_projection(3, 0, ProjectionFlavor::gaussian, 1), ContractError);
}

TEST(Project, AxisSelectsColumns) {
  RandomStream rng(1);
  const Matrix S = random_matrix(10, 5, rng);
  Projection a{Matrix::Zero(2, 5), ProjectionFlavor::axis, 0};
  a.matrix(0, 0) = a.matrix(1, 1) = 1.0;
  EXPECT_EQ(project(a, S), S.leftCols(2));
  EXPECT_EQ(project(a, Matrix::Zero(3, 5)), Matrix::Zero(3, 2));
}

TEST(Project, MatchesNaiveMatmul) {
  RandomStream rng(2);
  const Matrix S = random_matrix(2, 3, rng);
  const auto a = sample_projection(3, 2, ProjectionFlavor::gaussian, 5);
  EXPECT_LE(max_abs(project(a, S) - oracle::naive_matmul(S, a.matrix.transpose())), 1e-12);
  EXPECT_THROW(project(a, Matrix::Zero(2, 4)), ContractError);
}

TEST(Project, PointAndBatchAgreeExactly) {
  RandomStream rng(3);
  const Matrix S = random_matrix(25, 6, rng);
  const auto a = sample_projection(6, 3, ProjectionFlavor::haar, 8);
  const Matrix Z = project(a, S);
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    EXPECT_EQ(Z.row(i).transpose(), project_point(a, S.row(i).transpose()));
  }
}

TEST(Project, CovarianceTransport) {
  RandomStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix sigma = oracle::random_spd(6, rng);
    const auto a = sample_projection(6, 3, ProjectionFlavor::gaussian, static_cast<std::uint64_t>(trial));
    const Matrix t = a.matrix * sigma * a.matrix.transpose();
    EXPECT_LE(max_abs(t - t.transpose()), 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.transpose()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Project, EmpiricalTransport) {
  RandomStream rng(5);
  const Matrix S = random_matrix(300, 5, rng);
  const Labels y(300, 1);
  const auto a = sample_projection(5, 2, ProjectionFlavor::haar, 3);
  const Matrix lhs = class_second_moment(project(a, S), y, 1).matrix();
  const Matrix rhs = a.matrix * class_second_moment(S, y, 1).matrix() * a.matrix.transpose();
  EXPECT_LE(max_abs(lhs - rhs), 1e-10);
}

TEST(SampleProjection, HaarImageOfFixedVector) {
  // For fixed unit v and Haar A (d x p): E[A v] = 0 and E|A v|^2 = d / p.
  const Eigen::Index p = 6, d = 2;
  Vector v = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  Vector mean = Vector::Zero(d);
  double norm2 = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const Vector z = sample_projection(p, d, ProjectionFlavor::haar, static_cast<std::uint64_t>(t) + 1000).matrix * v;
    mean += z / trials;
    norm2 += z.squaredNorm() / trials;
  }
  EXPECT_LE(mean.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(norm2, static_cast<double>(d) / p, 0.03);
}

} // namespace
} // namespace rqda
