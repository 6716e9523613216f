#pragma once

#include <complex>

#include <Eigen/Dense>

namespace subspace_glr {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class Hypothesis { h0, h1 };

inline const char* to_string(Hypothesis h) { return h == Hypothesis::h0 ? "H0" : "H1"; }

}  // namespace subspace_glr
