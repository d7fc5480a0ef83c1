#pragma once

#include <random>
#include <vector>

#include "monoflow/monodromy.hpp"
#include "monoflow/symmetry.hpp"
#include "monoflow/system.hpp"
#include "monoflow/tracker.hpp"

namespace monoflow {

struct TotalDegreeOptions {
  double dedup_tol = 1e-6;
  double trivial_tol = 1e-6;
  double real_tol = 1e-8;
  long long path_cap = 16384;  // refuse larger runs unless force is set
  bool force = false;
  int workers = 1;
  TrackOptions track;
};

/// Outcome of one total-degree homotopy run. Every one of the 4^(n-1) start
/// roots is accounted for: finite + diverged + failed == path_count.
struct TotalDegreeRun {
  long long path_count = 0;
  std::vector<Solution> endpoints;  // finite endpoints, deduplicated
  long long finite_paths = 0;
  long long diverged_paths = 0;
  long long failed_paths = 0;
  Complex gamma;
};

/// Solves F_b = 0 by deforming the start system g_i(z) = z_i^2 - r_i (random
/// distinct r_i, all 4^(n-1) square-root sign combinations as start roots)
/// along H(z,s) = (1-s) gamma g(z) + s F_b(z) with a random unit-modulus
/// gamma. Failed paths are retried once with a halved initial step. Throws
/// ValidationError when the path count exceeds the cap and force is off.
TotalDegreeRun solve_total_degree(const PowerFlowSystem& sys, const RVec& b,
                                  const TotalDegreeOptions& opts, std::mt19937_64& rng);

/// Bijective tolerance matching between the total-degree endpoints and the
/// union of the trivial solutions with the expanded registry orbits.
struct ComparisonReport {
  long long matched = 0;
  std::vector<CVec> unmatched_total_degree;
  std::vector<CVec> unmatched_monodromy;

  bool consistent() const {
    return unmatched_total_degree.empty() && unmatched_monodromy.empty();
  }
};

ComparisonReport compare_with_monodromy(const TotalDegreeRun& td, const SolutionRegistry& reg,
                                        const std::vector<Solution>& trivials,
                                        const SymmetryGroup& group, double tol = 1e-6);

}  // namespace monoflow
