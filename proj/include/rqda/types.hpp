#ifndef RQDA_TYPES_HPP
#define RQDA_TYPES_HPP

#include <Eigen/Core>
#include <vector>

namespace rqda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Binary class labels, one per sample, each 0 or 1.
using Labels = std::vector<int>;

} // namespace rqda

#endif // RQDA_TYPES_HPP
