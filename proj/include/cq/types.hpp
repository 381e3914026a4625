#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Time series of vectors: row n holds the sample at step n, columns are
/// components. Column-major storage keeps every component contiguous so
/// that per-component transforms work in place.
using Series = Eigen::MatrixXcd;

/// Sequence of matrix coefficients indexed by step.
using MatrixSequence = std::vector<CMatrix>;

}  // namespace cq
