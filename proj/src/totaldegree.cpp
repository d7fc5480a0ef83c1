#include "monoflow/totaldegree.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>

#include "monoflow/errors.hpp"
#include "monoflow/pointindex.hpp"
#include "monoflow/util.hpp"

namespace monoflow {

namespace {

/// H(z,s) = (1-s) gamma (z_i^2 - r_i) + s F_b(z).
class TotalDegreeHomotopy final : public Homotopy {
 public:
  TotalDegreeHomotopy(const PowerFlowSystem& sys, CVec b, Complex gamma, CVec r)
      : sys_(&sys), b_(std::move(b)), gamma_(gamma), r_(std::move(r)) {}

  int dim() const override { return sys_->dim(); }

  CVec start_residual(const CVec& z) const { return (z.array().square() - r_.array()).matrix(); }

  CVec eval(const CVec& z, double s) const override {
    return (1.0 - s) * gamma_ * start_residual(z) + s * sys_->evaluate(b_, z);
  }

  CMat jacobian(const CVec& z, double s) const override {
    CMat J = s * sys_->jacobian(b_, z);
    J.diagonal() += (2.0 * (1.0 - s) * gamma_) * z;
    return J;
  }

  CVec s_derivative(const CVec& z, double /*s*/) const override {
    return sys_->evaluate(b_, z) - gamma_ * start_residual(z);
  }

 private:
  const PowerFlowSystem* sys_;
  CVec b_;
  Complex gamma_;
  CVec r_;
};

CVec start_root(const CVec& sqrt_r, unsigned long long pattern) {
  CVec z(sqrt_r.size());
  for (Eigen::Index i = 0; i < sqrt_r.size(); ++i)
    z[i] = ((pattern >> i) & 1ULL) ? -sqrt_r[i] : sqrt_r[i];
  return z;
}

}  // namespace

TotalDegreeRun solve_total_degree(const PowerFlowSystem& sys, const RVec& b,
                                  const TotalDegreeOptions& opts, std::mt19937_64& rng) {
  const int dim = sys.dim();
  if (dim > 62) throw ValidationError("total-degree root enumeration needs 2(n-1) <= 62");
  const long long paths = 1LL << dim;  // 4^(n-1)
  if (paths > opts.path_cap && !opts.force)
    throw ValidationError("total degree would track " + std::to_string(paths) +
                          " paths (cap " + std::to_string(opts.path_cap) +
                          "); pass force to override");

  // Random distinct start roots r_i and the gamma blend constant.
  std::uniform_real_distribution<double> modulus(0.5, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVec r(dim);
  for (int i = 0; i < dim; ++i) {
    for (;;) {
      const Complex cand = std::polar(modulus(rng), phase(rng));
      bool distinct = true;
      for (int j = 0; j < i; ++j)
        if (std::abs(cand - r[j]) < 1e-3) distinct = false;
      if (distinct) {
        r[i] = cand;
        break;
      }
    }
  }
  TotalDegreeRun run;
  run.path_count = paths;
  run.gamma = std::polar(1.0, phase(rng));

  const TotalDegreeHomotopy h(sys, b.cast<Complex>(), run.gamma, r);
  const CVec sqrt_r = r.array().sqrt().matrix();

  PointIndex index(dim, opts.dedup_tol);
  std::vector<CVec> stored;
  std::mutex mu;
  std::atomic<long long> finite{0}, diverged{0}, failed{0};

  // Paths stalling near s = 1 at a large magnitude are the excess paths
  // leaving the finite fiber: steps collapse before the hard norm threshold
  // trips, so treat them as divergent rather than retrying them.
  const auto went_to_infinity = [](const TrackResult& tr) {
    return tr.status == TrackStatus::Diverged ||
           (inf_norm(tr.endpoint) > 1e4 && tr.s_reached > 0.5);
  };

  parallel_for(static_cast<std::size_t>(paths), opts.workers, [&](std::size_t p) {
    const CVec z0 = start_root(sqrt_r, static_cast<unsigned long long>(p));
    TrackResult tr = track(h, z0, opts.track);
    if (!tr.success() && !went_to_infinity(tr)) {
      // One retry with a halved initial step; afterwards the path counts as failed.
      TrackOptions retry = opts.track;
      retry.initial_step *= 0.5;
      retry.max_step *= 0.5;
      tr = track(h, z0, retry);
    }
    if (tr.success()) {
      ++finite;
      std::lock_guard lock(mu);
      const auto at = [&stored](std::size_t i) -> const CVec& { return stored[i]; };
      if (!index.find(tr.endpoint, at)) {
        index.add(tr.endpoint, stored.size());
        stored.push_back(tr.endpoint);
      }
    } else if (went_to_infinity(tr)) {
      ++diverged;
    } else {
      ++failed;
    }
  });

  run.finite_paths = finite;
  run.diverged_paths = diverged;
  run.failed_paths = failed;
  const CVec bc = b.cast<Complex>();
  run.endpoints.reserve(stored.size());
  for (CVec& z : stored)
    run.endpoints.push_back(classify_solution(sys, bc, std::move(z), opts.trivial_tol, opts.real_tol));
  log_info("total degree: " + std::to_string(paths) + " paths, " +
           std::to_string(run.endpoints.size()) + " distinct finite endpoints, " +
           std::to_string(run.diverged_paths) + " diverged, " + std::to_string(run.failed_paths) +
           " failed");
  return run;
}

ComparisonReport compare_with_monodromy(const TotalDegreeRun& td, const SolutionRegistry& reg,
                                        const std::vector<Solution>& trivials,
                                        const SymmetryGroup& group, double tol) {
  ComparisonReport rep;
  if (td.endpoints.empty() && reg.size() == 0 && trivials.empty()) return rep;

  const int dim = td.endpoints.empty()
                      ? (reg.size() > 0 ? reg.dim() : static_cast<int>(trivials.front().z.size()))
                      : static_cast<int>(td.endpoints.front().z.size());
  PointIndex index(dim, tol);
  std::vector<const CVec*> td_points;
  for (const Solution& s : td.endpoints) {
    index.add(s.z, td_points.size());
    td_points.push_back(&s.z);
  }
  std::vector<char> td_matched(td_points.size(), 0);
  const auto at = [&td_points](std::size_t i) -> const CVec& { return *td_points[i]; };

  const auto match_one = [&](const CVec& z) {
    if (const auto hit = index.find(z, at); hit && !td_matched[*hit]) {
      td_matched[*hit] = 1;
      ++rep.matched;
      return true;
    }
    return false;
  };

  for (const Solution& t : trivials)
    if (!match_one(t.z)) rep.unmatched_monodromy.push_back(t.z);
  for (std::size_t i = 0; i < reg.size(); ++i)
    for (const CVec& member : orbit_members(reg.entry(i).rep.z, group, tol))
      if (!match_one(member)) rep.unmatched_monodromy.push_back(member);

  for (std::size_t i = 0; i < td_points.size(); ++i)
    if (!td_matched[i]) rep.unmatched_total_degree.push_back(*td_points[i]);
  return rep;
}

}  // namespace monoflow
