#pragma once

#include <Eigen/Dense>

namespace move {

// Row-major throughout so checkpoint and feature files serialize without
// per-element shuffling.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mat = MatrixX<double>;
using MatF = MatrixX<float>;
using Vec = Eigen::VectorXd;
using VecF = Eigen::VectorXf;

}  // namespace move
