#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>

#include "monoflow/types.hpp"

namespace monoflow {

/// Locality index for tolerance-based dedup of complex points. Each point is
/// keyed by a fixed random linear functional of its coordinates; two points
/// within `tol` in the infinity norm have keys within a Lipschitz window, so a
/// lookup only has to compare the few stored points whose keys fall inside
/// that window. Lookup is O(log N + window hits) instead of a full scan.
class PointIndex {
 public:
  PointIndex(int dim, double tol) : tol_(tol) {
    // The functional is internal bookkeeping; a fixed seed keeps it stable.
    std::mt19937_64 rng(0x706f696e744c6f63ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    w_re_.resize(dim);
    w_im_.resize(dim);
    double lipschitz = 0.0;
    for (int i = 0; i < dim; ++i) {
      w_re_[i] = u(rng);
      w_im_[i] = u(rng);
      lipschitz += std::abs(w_re_[i]) + std::abs(w_im_[i]);
    }
    window_ = lipschitz * tol_ + 1e-300;
  }

  double key(const CVec& z) const {
    return w_re_.dot(z.real().matrix()) + w_im_.dot(z.imag().matrix());
  }

  /// Index of a stored point within tol of z, if any. `point_at` maps a
  /// stored id back to its coordinates.
  std::optional<std::size_t> find(const CVec& z,
                                  const std::function<const CVec&(std::size_t)>& point_at) const {
    const double k = key(z);
    const auto lo = keys_.lower_bound(k - window_);
    const auto hi = keys_.upper_bound(k + window_);
    for (auto it = lo; it != hi; ++it)
      if (inf_dist(z, point_at(it->second)) <= tol_) return it->second;
    return std::nullopt;
  }

  void add(const CVec& z, std::size_t id) { keys_.emplace(key(z), id); }

  double tol() const { return tol_; }

 private:
  double tol_;
  RVec w_re_, w_im_;
  double window_;
  std::multimap<double, std::size_t> keys_;
};

}  // namespace monoflow
