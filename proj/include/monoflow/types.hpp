#pragma once

#include <Eigen/Dense>
#include <complex>

namespace monoflow {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline double inf_norm(const CVec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double inf_dist(const CVec& a, const CVec& b) {
  return inf_norm(a - b);
}

}  // namespace monoflow
