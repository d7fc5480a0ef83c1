#include "monoflow/numeric.hpp"

namespace monoflow {

CVec linear_solve(const CMat& A, const CVec& rhs) {
  if (A.rows() != A.cols()) throw DimensionError("linear_solve needs a square matrix");
  if (A.rows() != rhs.size()) throw DimensionError("linear_solve: rhs size mismatch");
  Eigen::PartialPivLU<CMat> lu(A);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > kPivotFloor))
    throw SingularMatrixError("pivot magnitude " + std::to_string(min_pivot) + " below 1e-300");
  return lu.solve(rhs);
}

NewtonOutcome newton_correct(const PowerFlowSystem& sys, const CVec& b, CVec z0, double tol,
                             int max_iters) {
  return newton_iterate([&](const CVec& z) { return sys.evaluate(b, z); },
                        [&](const CVec& z) { return sys.jacobian(b, z); }, std::move(z0), tol,
                        max_iters);
}

}  // namespace monoflow
