#pragma once

#include <vector>

#include "monoflow/numeric.hpp"
#include "monoflow/system.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

/// A family H(z, s) of square systems over s in [0,1] with known Jacobian and
/// parameter derivative. Implementations must be immutable and thread-safe.
class Homotopy {
 public:
  virtual ~Homotopy() = default;
  virtual int dim() const = 0;
  virtual CVec eval(const CVec& z, double s) const = 0;
  virtual CMat jacobian(const CVec& z, double s) const = 0;
  virtual CVec s_derivative(const CVec& z, double s) const = 0;
};

/// Straight-line parameter homotopy b(s) = (1-s) b0 + s b1 over a fixed
/// power flow system.
class SegmentHomotopy final : public Homotopy {
 public:
  SegmentHomotopy(const PowerFlowSystem& sys, CVec b0, CVec b1);

  int dim() const override { return sys_->dim(); }
  CVec eval(const CVec& z, double s) const override;
  CMat jacobian(const CVec& z, double s) const override;
  CVec s_derivative(const CVec& z, double s) const override;

  CVec b_at(double s) const { return (1.0 - s) * b0_ + s * b1_; }

 private:
  const PowerFlowSystem* sys_;
  CVec b0_, b1_, db_;
};

enum class TrackStatus { Success, Diverged, Singular, StepLimit, MinStep };
const char* to_string(TrackStatus status);

struct TrackOptions {
  double initial_step = 0.1;
  double min_step = 1e-7;
  double max_step = 0.2;
  double corrector_tol = 1e-8;   // during tracking
  int max_corrector_iters = 3;   // per step
  int max_steps = 10000;
  double divergence_threshold = 1e8;
  double endpoint_tol = 1e-12;     // refinement target at s = 1
  double endpoint_accept = 1e-10;  // success requires at most this residual
  int doublings_after = 2;         // accepted steps before the step doubles
  // Jump guard: reject a step whose corrector moved the point by more than
  // this fraction of the predictor displacement (correcting onto a nearby
  // sheet moves much farther than polishing the local truncation error).
  // 0 disables the guard.
  double jump_guard = 0.25;
};

struct TrackResult {
  TrackStatus status = TrackStatus::MinStep;
  CVec endpoint;    // meaningful only on Success
  int steps_taken = 0;
  int failures = 0;      // rejected predictor/corrector steps
  double s_reached = 0;  // how far along [0,1] the path got

  bool success() const { return status == TrackStatus::Success; }
};

/// Predictor-corrector continuation of one solution from s = 0 to s = 1:
/// 4th-order Runge-Kutta on the Davidenko ODE dz/ds = -J^-1 dH/ds, Newton
/// correction at fixed s, step doubling after `doublings_after` consecutive
/// accepted steps and halving on rejection. Deterministic: no internal
/// randomness, so equal inputs give bitwise-equal results.
TrackResult track(const Homotopy& h, const CVec& z_start, const TrackOptions& opts);

/// Tracks through a polyline of susceptance waypoints, re-running `track` on
/// each straight segment. Steps and failures accumulate; the first
/// non-success aborts the chain.
TrackResult track_segments(const PowerFlowSystem& sys, const std::vector<CVec>& b_waypoints,
                           const CVec& z_start, const TrackOptions& opts);

}  // namespace monoflow
