#include "monoflow/monodromy.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <numbers>

#include "monoflow/errors.hpp"
#include "monoflow/util.hpp"

namespace monoflow {

namespace {

constexpr double kSeedMargin = 0.1;

std::array<Complex, 5> forbidden_points() {
  return {Complex(0, 0), Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
}

// Tangent-half-angle point on the complex unit circle.
void half_angle_point(const Complex& t, Complex& x, Complex& y) {
  const Complex denom = 1.0 + t * t;
  x = 2.0 * t / denom;
  y = (1.0 - t * t) / denom;
}

}  // namespace

CVec sample_seed_parameters(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> modulus(0.5, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVec t(count);
  for (int k = 0; k < count; ++k) {
    for (;;) {
      const Complex cand = std::polar(modulus(rng), phase(rng));
      bool ok = true;
      for (const Complex& f : forbidden_points())
        if (std::abs(cand - f) < kSeedMargin) ok = false;
      for (int j = 0; j < k && ok; ++j)
        if (std::abs(cand - t[j]) < kSeedMargin) ok = false;
      if (ok) {
        t[k] = cand;
        break;
      }
    }
  }
  return t;
}

CMat seed_incidence_matrix(const PowerNetwork& net, const CVec& t) {
  const int half = net.node_count() - 1;
  if (t.size() != half) throw DimensionError("t must have one entry per non-reference node");
  CVec x(half), y(half);
  for (int k = 0; k < half; ++k) half_angle_point(t[k], x[k], y[k]);
  const auto xn = [&](int node) { return node == 0 ? Complex(1, 0) : x[node - 1]; };
  const auto yn = [&](int node) { return node == 0 ? Complex(0, 0) : y[node - 1]; };

  CMat A = CMat::Zero(half, net.edge_count());
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto& ed = net.edges()[e];
    const Complex w = xn(ed.k) * yn(ed.m) - xn(ed.m) * yn(ed.k);
    if (ed.k != 0) A(ed.k - 1, e) = w;
    if (ed.m != 0) A(ed.m - 1, e) = -w;
  }
  return A;
}

KernelBasis kernel_basis_complete_pivot(const CMat& A) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  CMat M = A;
  // Row equilibration: leaves the kernel unchanged, keeps pivots comparable.
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double scale = M.row(i).cwiseAbs().maxCoeff();
    if (scale > 0) M.row(i) /= scale;
  }
  std::vector<Eigen::Index> colperm(cols);
  for (Eigen::Index j = 0; j < cols; ++j) colperm[j] = j;

  const double tiny = 1e-10;  // relative rank threshold after equilibration
  Eigen::Index rank = 0;
  for (Eigen::Index p = 0; p < std::min(rows, cols); ++p) {
    Eigen::Index pi = p, pj = p;
    double best = 0.0;
    for (Eigen::Index i = p; i < rows; ++i)
      for (Eigen::Index j = p; j < cols; ++j)
        if (std::abs(M(i, j)) > best) {
          best = std::abs(M(i, j));
          pi = i;
          pj = j;
        }
    if (best <= tiny) break;
    M.row(p).swap(M.row(pi));
    M.col(p).swap(M.col(pj));
    std::swap(colperm[p], colperm[pj]);
    for (Eigen::Index i = p + 1; i < rows; ++i) {
      const Complex f = M(i, p) / M(p, p);
      M.row(i).tail(cols - p) -= f * M.row(p).tail(cols - p);
      M(i, p) = Complex(0, 0);
    }
    ++rank;
  }

  KernelBasis out;
  out.rank = static_cast<int>(rank);
  if (rank == cols) return out;  // trivial kernel

  out.basis = CMat::Zero(cols, cols - rank);
  for (Eigen::Index f = rank; f < cols; ++f) {
    CVec v = CVec::Zero(cols);
    v[f] = Complex(1, 0);
    for (Eigen::Index p = rank - 1; p >= 0; --p) {
      Complex acc(0, 0);
      for (Eigen::Index j = p + 1; j < cols; ++j) acc += M(p, j) * v[j];
      v[p] = -acc / M(p, p);
    }
    for (Eigen::Index j = 0; j < cols; ++j) out.basis(colperm[j], f - rank) = v[j];
  }
  return out;
}

KernelResult kernel_vector_complete_pivot(const CMat& A) {
  const KernelBasis kb = kernel_basis_complete_pivot(A);
  KernelResult out;
  out.rank = kb.rank;
  out.vector = CVec::Zero(A.cols());
  if (kb.basis.cols() == 0) return out;
  out.vector = kb.basis.col(kb.basis.cols() - 1);
  out.vector /= out.vector.cwiseAbs().maxCoeff();
  return out;
}

SeedPair seed_nontrivial(const PowerFlowSystem& sys, std::mt19937_64& rng) {
  const PowerNetwork& net = sys.network();
  if (net.is_tree())
    throw TopologyError("tree network: the nontrivial solution set is empty, only the 2^(n-1) "
                        "trivial solutions exist");
  const int half = net.node_count() - 1;
  constexpr int kMaxResamples = 5;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const CVec t = sample_seed_parameters(half, rng);
    const CMat A = seed_incidence_matrix(net, t);
    const KernelBasis ker = kernel_basis_complete_pivot(A);
    if (ker.rank != half) continue;  // degenerate t; resample
    // A generic kernel element: single basis vectors are zero on the other
    // free columns, and zeroed susceptances can decouple a node and leave the
    // seed singular. Random unit-modulus coefficients avoid that a.s.
    CVec b = CVec::Zero(A.cols());
    for (Eigen::Index j = 0; j < ker.basis.cols(); ++j)
      b += std::polar(1.0, phase(rng)) * ker.basis.col(j);
    b /= b.cwiseAbs().maxCoeff();
    if (inf_norm(A * b) > 1e-12) continue;

    CVec z(2 * half);
    for (int k = 0; k < half; ++k) {
      Complex x, y;
      half_angle_point(t[k], x, y);
      z[k] = x;
      z[half + k] = y;
    }
    const NewtonOutcome refined = newton_correct(sys, b, z, 1e-12, 30);
    const CVec& zf = refined.converged ? refined.z : z;
    const double res_scale = 1.0 + inf_norm(zf);
    if (inf_norm(sys.evaluate(b, zf)) > 1e-10 * res_scale * res_scale) continue;
    bool nontrivial = false;
    for (int k = 0; k < half; ++k)
      if (std::abs(zf[half + k]) > 0.01) nontrivial = true;
    if (!nontrivial) continue;
    // The seed must be a regular point of its fiber or tracking cannot start.
    const Eigen::JacobiSVD<CMat> svd(sys.jacobian(b, zf));
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0) || sv(sv.size() - 1) <= 1e-8 * sv(0)) continue;
    return {b, zf, t};
  }
  throw SeedingError("seeding failed: incidence matrix stayed rank-deficient (or unrefinable) after " +
                     std::to_string(kMaxResamples) + " resamples");
}

int default_stall_loops(int node_count) {
  if (node_count <= 8) return 20;
  const int shift = std::min(node_count - 6, 24);
  return 20 + (1 << shift);
}

SolutionRegistry::SolutionRegistry(int dim, double dedup_tol)
    : dim_(dim), index_(dim, dedup_tol), mu_(std::make_unique<std::mutex>()) {}

bool SolutionRegistry::insert(Solution rep, int orbit_size) {
  std::lock_guard lock(*mu_);
  const auto at = [this](std::size_t i) -> const CVec& { return entries_[i].rep.z; };
  if (index_.find(rep.z, at)) return false;
  index_.add(rep.z, entries_.size());
  total_nontrivial_ += orbit_size;
  entries_.push_back({std::move(rep), orbit_size});
  return true;
}

bool SolutionRegistry::contains(const CVec& z) const {
  std::lock_guard lock(*mu_);
  const auto at = [this](std::size_t i) -> const CVec& { return entries_[i].rep.z; };
  return index_.find(z, at).has_value();
}

std::size_t SolutionRegistry::size() const {
  std::lock_guard lock(*mu_);
  return entries_.size();
}

long long SolutionRegistry::total_nontrivial() const {
  std::lock_guard lock(*mu_);
  return total_nontrivial_;
}

std::map<int, long long> SolutionRegistry::orbit_histogram() const {
  std::lock_guard lock(*mu_);
  std::map<int, long long> hist;
  for (const Entry& e : entries_) ++hist[e.orbit_size];
  return hist;
}

namespace {

CVec perturb_vertex(const CVec& base, const MonodromyOptions& opts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(opts.perturb_lo, opts.perturb_hi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVec out(base.size());
  for (Eigen::Index e = 0; e < base.size(); ++e) {
    const double scale = std::abs(base[e]);
    out[e] = base[e] + std::polar((scale > 0 ? scale : 1.0) * mag(rng), phase(rng));
  }
  return out;
}

CVec detour_midpoint(const CVec& b_from, const CVec& b_to, double widen, std::mt19937_64& rng) {
  // A modest complex detour clears the real discriminant locus; retries widen
  // it to route around pinch points the short detours keep grazing.
  std::uniform_real_distribution<double> mag(0.3 * widen, 0.7 * widen);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVec mid = 0.5 * (b_from + b_to);
  for (Eigen::Index e = 0; e < mid.size(); ++e) {
    const double scale = std::max({std::abs(b_from[e]), std::abs(b_to[e]), 1e-3});
    mid[e] += std::polar(scale * mag(rng), phase(rng));
  }
  return mid;
}

// Refinement + acceptance checks + canonicalization of a tracked endpoint.
// Either inserts a canonical representative (with its full orbit booked at
// once) or reports why the endpoint was dropped.
enum class CandidateOutcome { Inserted, Duplicate, NearTrivial, Rejected };

CandidateOutcome consider_endpoint(SolutionRegistry& reg, const PowerFlowSystem& sys,
                                   const SymmetryGroup& group, const CVec& b, const CVec& endpoint,
                                   const MonodromyOptions& opts) {
  const NewtonOutcome refined = newton_iterate(
      [&](const CVec& zz) { return sys.evaluate(b, zz); },
      [&](const CVec& zz) { return sys.jacobian(b, zz); }, endpoint, 1e-12, 30,
      NewtonTolerance::Scaled);
  const CVec& z = refined.converged ? refined.z : endpoint;
  if (near_trivial(z, opts.trivial_tol)) return CandidateOutcome::NearTrivial;
  // Backward-error residual test, matching the tracker's endpoint acceptance.
  const double scale = 1.0 + inf_norm(z);
  if (inf_norm(sys.evaluate(b, z)) > opts.residual_tol * scale * scale)
    return CandidateOutcome::Rejected;
  const Eigen::JacobiSVD<CMat> svd(sys.jacobian(b, z));
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0) || sv(sv.size() - 1) <= opts.singular_ratio * sv(0))
    return CandidateOutcome::Rejected;

  const CanonicalForm canon = canonicalize(z, group, 1e-9, opts.dedup_tol);
  Solution rep = classify_solution(sys, b, canon.representative, opts.trivial_tol, opts.real_tol);
  return reg.insert(std::move(rep), canon.orbit_size) ? CandidateOutcome::Inserted
                                                      : CandidateOutcome::Duplicate;
}

}  // namespace

int monodromy_loops(SolutionRegistry& reg, const PowerFlowSystem& sys, const SymmetryGroup& group,
                    const CVec& b_target, int loops, const MonodromyOptions& opts,
                    std::mt19937_64& rng) {
  int inserted_total = 0;
  for (int loop = 0; loop < loops; ++loop) {
    ++reg.stats.loops_run;
    const CVec b1 = perturb_vertex(b_target, opts, rng);
    const CVec b2 = perturb_vertex(b_target, opts, rng);
    const std::vector<CVec> triangle{b_target, b1, b2, b_target};

    // Phase 1 (parallel): track every current representative around the
    // triangle. The registry is not mutated here, so snapshot reads are safe.
    const std::size_t count = reg.size();
    std::vector<CVec> found;
    std::mutex found_mu;
    std::atomic<long long> failures{0}, trivial_jumps{0};
    parallel_for(count, opts.workers, [&](std::size_t i) {
      const TrackResult tr = track_segments(sys, triangle, reg.entry(i).rep.z, opts.track);
      if (!tr.success()) {
        ++failures;
        return;
      }
      if (near_trivial(tr.endpoint, opts.trivial_tol)) {
        ++trivial_jumps;
        return;
      }
      const CanonicalForm canon = canonicalize(tr.endpoint, group, 1e-9, opts.dedup_tol);
      if (reg.contains(canon.representative)) return;  // stale endpoint
      std::lock_guard lock(found_mu);
      found.push_back(tr.endpoint);
    });
    reg.stats.paths_tracked += static_cast<long long>(count);
    reg.stats.path_failures += failures;
    reg.stats.discarded_near_trivial += trivial_jumps;

    // Phase 2 (serial): validate and insert.
    int inserted = 0;
    for (const CVec& z : found) {
      switch (consider_endpoint(reg, sys, group, b_target, z, opts)) {
        case CandidateOutcome::Inserted: ++inserted; break;
        case CandidateOutcome::NearTrivial: ++reg.stats.discarded_near_trivial; break;
        case CandidateOutcome::Rejected: ++reg.stats.rejected_candidates; break;
        case CandidateOutcome::Duplicate: break;
      }
    }
    inserted_total += inserted;
    log_debug("loop " + std::to_string(reg.stats.loops_run) + ": " + std::to_string(inserted) +
              " new, registry " + std::to_string(reg.size()));
  }
  return inserted_total;
}

SolutionRegistry run_monodromy(const PowerFlowSystem& sys, const RVec& b_target,
                               const MonodromyOptions& opts, std::mt19937_64& rng) {
  const PowerNetwork& net = sys.network();
  if (net.is_tree())
    throw TopologyError("tree network: the nontrivial solution set is empty, only the 2^(n-1) "
                        "trivial solutions exist");
  if (b_target.size() != net.edge_count())
    throw DimensionError("b_target must have one entry per edge");

  const CVec bt = b_target.cast<Complex>();
  const SymmetryGroup group = SymmetryGroup::for_network(net);
  SolutionRegistry reg(sys.dim(), opts.dedup_tol);

  // Seed the nontrivial component and carry the seed to the target point.
  bool seeded = false;
  for (int attempt = 0; attempt < opts.transport_retries && !seeded; ++attempt) {
    ++reg.stats.transport_attempts;
    const SeedPair sp = seed_nontrivial(sys, rng);
    const TrackResult tr = track_segments(sys, {sp.b_seed, bt}, sp.z_seed, opts.track);
    ++reg.stats.paths_tracked;
    if (!tr.success()) {
      ++reg.stats.path_failures;
      continue;
    }
    seeded = consider_endpoint(reg, sys, group, bt, tr.endpoint, opts) == CandidateOutcome::Inserted;
  }
  if (!seeded)
    throw SolverError("initial transport to the target susceptances failed after " +
                      std::to_string(opts.transport_retries) + " fresh seeds");

  const int stall_needed =
      opts.stall_loops > 0 ? opts.stall_loops : default_stall_loops(net.node_count());
  int stale = 0;
  while (stale < stall_needed) {
    if (opts.expected_count > 0 &&
        static_cast<long long>(reg.size()) >= opts.expected_count)
      break;
    const int found = monodromy_loops(reg, sys, group, bt, 1, opts, rng);
    stale = found > 0 ? 0 : stale + 1;
  }
  reg.stats.stale_at_stop = stale;
  log_info("monodromy done: " + std::to_string(reg.size()) + " representatives, " +
           std::to_string(reg.total_nontrivial()) + " nontrivial solutions, " +
           std::to_string(reg.stats.loops_run) + " loops");
  return reg;
}

TransportOutcome transport_fiber(const SolutionRegistry& reg, const PowerFlowSystem& sys,
                                 const CVec& b_from, const CVec& b_to,
                                 const MonodromyOptions& opts, std::mt19937_64& rng) {
  const SymmetryGroup group = SymmetryGroup::for_network(sys.network());
  TransportOutcome out{SolutionRegistry(sys.dim(), opts.dedup_tol), 0};
  out.registry.stats = reg.stats;

  std::vector<std::size_t> pending(reg.size());
  for (std::size_t i = 0; i < pending.size(); ++i) pending[i] = i;

  constexpr int kRetries = 3;
  for (int round = 0; round <= kRetries && !pending.empty(); ++round) {
    const CVec mid = detour_midpoint(b_from, b_to, 1.0 + round, rng);
    const std::vector<CVec> path{b_from, mid, b_to};
    TrackOptions topt = opts.track;
    // Retries step more carefully: jumps happen when a large step crosses a
    // near-singular pinch between two sheets.
    topt.initial_step *= std::pow(0.5, round);
    topt.max_step = std::max(topt.initial_step, topt.max_step * std::pow(0.5, round));
    std::vector<std::size_t> still_failed;
    std::mutex fail_mu;
    parallel_for(pending.size(), opts.workers, [&](std::size_t idx) {
      const std::size_t i = pending[idx];
      const TrackResult tr = track_segments(sys, path, reg.entry(i).rep.z, topt);
      // A duplicate insert means two paths merged (a jump); like any other
      // failure it gets a fresh midpoint on the next round.
      const bool ok = tr.success() && consider_endpoint(out.registry, sys, group, b_to,
                                                        tr.endpoint, opts) ==
                                          CandidateOutcome::Inserted;
      if (!ok) {
        std::lock_guard lock(fail_mu);
        still_failed.push_back(i);
      }
    });
    out.registry.stats.paths_tracked += static_cast<long long>(pending.size());
    out.registry.stats.path_failures += static_cast<long long>(still_failed.size());
    pending = std::move(still_failed);
  }
  out.lost = static_cast<long long>(pending.size());
  out.registry.stats.lost_in_transport += out.lost;
  return out;
}

}  // namespace monoflow
