#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "monoflow/pointindex.hpp"
#include "monoflow/symmetry.hpp"
#include "monoflow/system.hpp"
#include "monoflow/tracker.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

/// A nontrivial start solution constructed from the tangent-half-angle
/// parametrization x = 2t/(1+t^2), y = (1-t^2)/(1+t^2): the unit-magnitude
/// equations hold identically and the balance equations become linear in the
/// susceptances, so any nonzero kernel vector of the weighted incidence
/// matrix gives parameters b_seed solved exactly by z_seed.
struct SeedPair {
  CVec b_seed;  // length |E|, infinity norm 1
  CVec z_seed;  // refined nontrivial solution at b_seed
  CVec t_used;  // the n-1 rational parameters behind it
};

/// The (n-1) x |E| weighted incidence matrix with the reference row removed:
/// entry (k-1, e) is x_k y_m - x_m y_k for an edge e = {k, m} seen from k,
/// with node 0 contributing the constants x_0 = 1, y_0 = 0.
CMat seed_incidence_matrix(const PowerNetwork& net, const CVec& t);

struct KernelResult {
  CVec vector;  // a kernel vector, infinity norm 1 (zero when rank == cols)
  int rank;
};

struct KernelBasis {
  CMat basis;  // one column per free column of the elimination (empty when full rank)
  int rank;
};

/// Gaussian elimination with complete pivoting: one kernel basis vector per
/// free column (unit at that free column, zero at the others, pivot entries
/// back-substituted). Deterministic for fixed input.
KernelBasis kernel_basis_complete_pivot(const CMat& A);

/// The basis vector of the last free column, normalized to unit infinity
/// norm. Note: single basis vectors have structural zeros at the other free
/// columns, which makes them degenerate seed parameters whenever the kernel
/// dimension exceeds 1 (zeroed susceptances can decouple a node); seeding
/// therefore draws a random combination of the whole basis instead.
KernelResult kernel_vector_complete_pivot(const CMat& A);

/// Draws t_k with modulus in [0.5, 2] and uniform phase, keeping every t_k at
/// least 0.1 away from {0, +-1, +-i} and from every other t_m.
CVec sample_seed_parameters(int count, std::mt19937_64& rng);

/// Builds a SeedPair for the network behind sys. Throws TopologyError on
/// trees (their nontrivial solution set is empty) and SeedingError when five
/// resampling rounds fail to produce a full-rank incidence matrix with a
/// refinable solution.
SeedPair seed_nontrivial(const PowerFlowSystem& sys, std::mt19937_64& rng);

struct MonodromyOptions {
  int stall_loops = 0;           // 0 = auto: 20 for n <= 8, else 20 + 2^(n-6)
  long long expected_count = 0;  // stop once this many representatives exist (0 = off)
  double dedup_tol = 1e-6;
  double trivial_tol = 1e-6;  // endpoints this close to a trivial solution are discarded
  double real_tol = 1e-8;
  double residual_tol = 1e-10;      // stored solutions must refine below this
  double singular_ratio = 1e-8;     // reject when sigma_min <= ratio * sigma_max
  int transport_retries = 10;       // fresh seeds for the initial transport
  int seed_resamples = 5;           // t resamples inside seeding
  int workers = 1;
  double perturb_lo = 0.5, perturb_hi = 2.0;  // relative loop-vertex noise
  TrackOptions track;
};

struct MonodromyStats {
  long long loops_run = 0;
  long long paths_tracked = 0;
  long long path_failures = 0;
  long long discarded_near_trivial = 0;  // path-jump symptom
  long long rejected_candidates = 0;     // residual or singularity rejections
  long long transport_attempts = 0;
  long long lost_in_transport = 0;
  int stale_at_stop = 0;
};

/// Deduplicated set of canonical nontrivial solutions with orbit bookkeeping.
/// Insertion is a single check-and-insert critical section. Reads of already
/// stored entries are stable (deque storage, append only).
class SolutionRegistry {
 public:
  struct Entry {
    Solution rep;
    int orbit_size;
  };

  explicit SolutionRegistry(int dim, double dedup_tol = 1e-6);

  /// True when the representative was new and got stored.
  bool insert(Solution rep, int orbit_size);

  /// True when a stored representative lies within dedup tolerance of z.
  bool contains(const CVec& z) const;

  std::size_t size() const;
  long long total_nontrivial() const;  // sum of orbit sizes
  std::map<int, long long> orbit_histogram() const;
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  const std::deque<Entry>& entries() const { return entries_; }
  double dedup_tol() const { return index_.tol(); }
  int dim() const { return dim_; }

  MonodromyStats stats;

 private:
  int dim_;
  std::deque<Entry> entries_;
  PointIndex index_;
  long long total_nontrivial_ = 0;
  std::unique_ptr<std::mutex> mu_;
};

/// Runs `loops` monodromy triangle loops (two random complex vertices around
/// b_target), tracking every stored representative, canonicalizing endpoints
/// and inserting the new ones. Returns the number of new representatives.
int monodromy_loops(SolutionRegistry& reg, const PowerFlowSystem& sys, const SymmetryGroup& group,
                    const CVec& b_target, int loops, const MonodromyOptions& opts,
                    std::mt19937_64& rng);

/// Full monodromy solve at real target susceptances: constructive seeding,
/// transport to b_target, then triangle loops until `stall_loops` consecutive
/// loops find nothing new (or expected_count is reached).
SolutionRegistry run_monodromy(const PowerFlowSystem& sys, const RVec& b_target,
                               const MonodromyOptions& opts, std::mt19937_64& rng);

struct TransportOutcome {
  SolutionRegistry registry;
  long long lost = 0;  // paths that failed all retries (or collided)
};

/// Parameter homotopy of a whole registry from b_from to b_to through one
/// random complex detour midpoint (fresh midpoint per retry round, up to 3
/// retries for failed paths).
TransportOutcome transport_fiber(const SolutionRegistry& reg, const PowerFlowSystem& sys,
                                 const CVec& b_from, const CVec& b_to,
                                 const MonodromyOptions& opts, std::mt19937_64& rng);

/// Stall default: 20 loops for n <= 8, scaled up for larger networks.
int default_stall_loops(int node_count);

}  // namespace monoflow
