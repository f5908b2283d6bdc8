#pragma once

#include <Eigen/Core>

namespace crossdiff {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

using Real = double;
using Vec2 = Vec2T<Real>;
using Mat2 = Mat2T<Real>;

/// Per-cell field of 2-vectors (densities or entropy variables), one column per cell.
using Field2 = Eigen::Matrix<Real, 2, Eigen::Dynamic>;

} // namespace crossdiff
