#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace calbem {

using cplx = std::complex<double>;

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Sparse real matrix, row-major so that row slices stream cheaply.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpMatC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx I{0.0, 1.0};

} // namespace calbem
