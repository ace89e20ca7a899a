#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hwsim {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

}  // namespace hwsim
