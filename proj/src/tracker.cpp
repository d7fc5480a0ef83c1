#include "monoflow/tracker.hpp"

#include <algorithm>

namespace monoflow {

SegmentHomotopy::SegmentHomotopy(const PowerFlowSystem& sys, CVec b0, CVec b1)
    : sys_(&sys), b0_(std::move(b0)), b1_(std::move(b1)) {
  db_ = b1_ - b0_;
}

CVec SegmentHomotopy::eval(const CVec& z, double s) const { return sys_->evaluate(b_at(s), z); }

CMat SegmentHomotopy::jacobian(const CVec& z, double s) const { return sys_->jacobian(b_at(s), z); }

CVec SegmentHomotopy::s_derivative(const CVec& z, double /*s*/) const {
  // Balance rows are linear in b, unit rows do not depend on it.
  return sys_->balance_part(db_, z);
}

const char* to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::Success: return "success";
    case TrackStatus::Diverged: return "diverged";
    case TrackStatus::Singular: return "singular";
    case TrackStatus::StepLimit: return "step-limit";
    case TrackStatus::MinStep: return "min-step";
  }
  return "?";
}

namespace {

// dz/ds = -J(z,s)^-1 dH/ds(z,s); false when the Jacobian pivots collapse.
bool davidenko_rhs(const Homotopy& h, const CVec& z, double s, CVec& out) {
  Eigen::PartialPivLU<CMat> lu(h.jacobian(z, s));
  if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > kPivotFloor)) return false;
  out = lu.solve(-h.s_derivative(z, s));
  return out.allFinite();
}

}  // namespace

TrackResult track(const Homotopy& h, const CVec& z_start, const TrackOptions& opts) {
  TrackResult res;
  CVec z = z_start;
  double s = 0.0;
  double step = opts.initial_step;
  int accepted_in_a_row = 0;

  const auto eval_at = [&h](double sf) {
    return [&h, sf](const CVec& zz) { return h.eval(zz, sf); };
  };
  const auto jac_at = [&h](double sf) {
    return [&h, sf](const CVec& zz) { return h.jacobian(zz, sf); };
  };

  CVec k1(h.dim()), k2(h.dim()), k3(h.dim()), k4(h.dim());
  while (s < 1.0) {
    if (res.steps_taken >= opts.max_steps) {
      res.status = TrackStatus::StepLimit;
      res.endpoint = z;
      res.s_reached = s;
      return res;
    }
    ++res.steps_taken;
    const double ds = std::min(step, 1.0 - s);

    bool ok = davidenko_rhs(h, z, s, k1) &&
              davidenko_rhs(h, z + (0.5 * ds) * k1, s + 0.5 * ds, k2) &&
              davidenko_rhs(h, z + (0.5 * ds) * k2, s + 0.5 * ds, k3) &&
              davidenko_rhs(h, z + ds * k3, s + ds, k4);
    NewtonOutcome corr;
    if (ok) {
      const CVec z_pred = z + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (inf_norm(z_pred) > opts.divergence_threshold) {
        res.status = TrackStatus::Diverged;
        res.endpoint = z_pred;
        res.s_reached = s;
        return res;
      }
      corr = newton_iterate(eval_at(s + ds), jac_at(s + ds), z_pred, opts.corrector_tol,
                            opts.max_corrector_iters, NewtonTolerance::Scaled);
      ok = corr.converged;
      if (ok && opts.jump_guard > 0) {
        const double moved = inf_dist(corr.z, z_pred);
        const double predictor_len = inf_dist(z_pred, z);
        ok = moved <= std::max(opts.jump_guard * predictor_len,
                               100.0 * opts.corrector_tol * (1.0 + inf_norm(corr.z)));
      }
    }

    if (ok) {
      z = std::move(corr.z);
      s += ds;
      if (inf_norm(z) > opts.divergence_threshold) {
        res.status = TrackStatus::Diverged;
        res.endpoint = z;
        res.s_reached = s;
        return res;
      }
      if (++accepted_in_a_row >= opts.doublings_after) {
        step = std::min(step * 2.0, opts.max_step);
        accepted_in_a_row = 0;
      }
    } else {
      ++res.failures;
      accepted_in_a_row = 0;
      step *= 0.5;
      if (step < opts.min_step) {
        res.status = TrackStatus::MinStep;
        res.endpoint = z;
        res.s_reached = s;
        return res;
      }
    }
  }

  // Endpoint refinement at s = 1. Acceptance is a backward-error test: at a
  // point of magnitude M no double evaluation of the quadratic system can be
  // trusted below ~M^2 eps, so the threshold carries the same (1+M)^2 factor
  // as the refinement; at desk norms it coincides with the absolute bound.
  res.s_reached = 1.0;
  NewtonOutcome fin = newton_iterate(eval_at(1.0), jac_at(1.0), std::move(z), opts.endpoint_tol, 30,
                                     NewtonTolerance::Scaled);
  res.endpoint = std::move(fin.z);
  const double scale = 1.0 + inf_norm(res.endpoint);
  if (fin.singular) {
    res.status = TrackStatus::Singular;
  } else if (fin.residual <= opts.endpoint_accept * scale * scale) {
    res.status = TrackStatus::Success;
  } else {
    // Newton stalled without a clean pivot failure: a (near-)singular endpoint.
    res.status = TrackStatus::Singular;
  }
  return res;
}

TrackResult track_segments(const PowerFlowSystem& sys, const std::vector<CVec>& b_waypoints,
                           const CVec& z_start, const TrackOptions& opts) {
  TrackResult total;
  total.endpoint = z_start;
  if (b_waypoints.size() < 2) {
    total.status = TrackStatus::Success;
    return total;
  }
  CVec z = z_start;
  const double nsegs = static_cast<double>(b_waypoints.size() - 1);
  for (std::size_t i = 0; i + 1 < b_waypoints.size(); ++i) {
    SegmentHomotopy seg(sys, b_waypoints[i], b_waypoints[i + 1]);
    TrackResult r = track(seg, z, opts);
    total.steps_taken += r.steps_taken;
    total.failures += r.failures;
    total.status = r.status;
    total.endpoint = std::move(r.endpoint);
    total.s_reached = (static_cast<double>(i) + r.s_reached) / nsegs;
    if (!r.success()) return total;
    z = total.endpoint;
  }
  return total;
}

}  // namespace monoflow
