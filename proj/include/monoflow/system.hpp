#pragma once

#include <vector>

#include "monoflow/network.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

/// One point of the solution set, stored in the stacked variable order
/// z = (x_1..x_{n-1}, y_1..y_{n-1}).
struct Solution {
  CVec z;
  double residual = 0.0;
  bool is_trivial = false;
  bool is_real = false;

  Eigen::Index half() const { return z.size() / 2; }
  CVec x() const { return z.head(half()); }
  CVec y() const { return z.tail(half()); }
};

/// The lossless zero-injection power flow system on a network: for each
/// non-reference node k the unit-magnitude equation x_k^2 + y_k^2 - 1 and the
/// balance equation sum_m b_km (x_k y_m - x_m y_k) - P_k with P_k = 0. The
/// reference node enters the balance sums as the constants x_0 = 1, y_0 = 0.
///
/// Residual layout: rows 0..n-2 are the unit equations for nodes 1..n-1,
/// rows n-1..2n-3 the balance equations in the same node order. The
/// susceptance vector b is passed per call (in edge order) so the same system
/// template serves every point of parameter space; entries may be complex.
///
/// Immutable after construction and safe to share across threads.
class PowerFlowSystem {
 public:
  explicit PowerFlowSystem(PowerNetwork net);

  const PowerNetwork& network() const { return net_; }
  int dim() const { return 2 * (net_.node_count() - 1); }
  int equation_count() const { return dim(); }
  const RVec& injections() const { return injections_; }

  /// Network susceptances promoted to a complex parameter vector.
  CVec target_susceptances() const;

  /// Residual F_b(z); throws DimensionError on size mismatch.
  CVec evaluate(const CVec& b, const CVec& z) const;

  /// Only the b-linear balance rows (unit rows zero). This is the partial
  /// derivative of F_{b(s)}(z) along a parameter direction db.
  CVec balance_part(const CVec& db, const CVec& z) const;

  /// Analytic Jacobian dF_b/dz.
  CMat jacobian(const CVec& b, const CVec& z) const;

 private:
  void check_dims(const CVec& b, const CVec& z) const;

  PowerNetwork net_;
  RVec injections_;  // identically zero
};

/// Exact count 2^(n-1) of trivial solutions (x_k, y_k) = (+-1, 0).
unsigned long long trivial_solution_count(const PowerNetwork& net);

/// Materializes all 2^(n-1) trivial solutions in binary counting order on the
/// sign pattern (node 1 least significant, bit 0 -> +1). Refuses when
/// n-1 > cap_exponent to bound memory.
std::vector<Solution> enumerate_trivial_solutions(const PowerFlowSystem& sys, int cap_exponent = 30);

/// True when every (x_k, y_k) is within tol of (+-1, 0).
bool near_trivial(const CVec& z, double tol);

/// Residual + trivial/real classification at a point (no refinement).
Solution classify_solution(const PowerFlowSystem& sys, const CVec& b, CVec z,
                           double trivial_tol = 1e-6, double real_tol = 1e-8);

}  // namespace monoflow
