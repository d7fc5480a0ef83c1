#include <doctest.h>

#include "helpers.hpp"
#include "monoflow/monodromy.hpp"
#include "monoflow/tracker.hpp"

using namespace monoflow;

namespace {

CVec random_complex_b(const CVec& base, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
  CVec out(base.size());
  for (Eigen::Index e = 0; e < base.size(); ++e)
    out[e] = base[e] + std::polar(std::abs(base[e]) * mag(rng), phase(rng));
  return out;
}

}  // namespace

TEST_CASE("a constant path returns the start solution") {
  std::mt19937_64 rng(1);
  const PowerFlowSystem sys(testutil::complete(4));
  const SeedPair sp = seed_nontrivial(sys, rng);
  SegmentHomotopy h(sys, sp.b_seed, sp.b_seed);
  const TrackResult tr = track(h, sp.z_seed, {});
  REQUIRE(tr.success());
  CHECK(inf_dist(tr.endpoint, sp.z_seed) <= 1e-10);
}

TEST_CASE("a triangle loop returns a solution of the same system") {
  std::mt19937_64 rng(2);
  const PowerFlowSystem sys(testutil::complete(4));
  const SeedPair sp = seed_nontrivial(sys, rng);
  const CVec b1 = random_complex_b(sp.b_seed, rng);
  const CVec b2 = random_complex_b(sp.b_seed, rng);
  const TrackResult tr = track_segments(sys, {sp.b_seed, b1, b2, sp.b_seed}, sp.z_seed, {});
  REQUIRE(tr.success());
  CHECK(inf_norm(sys.evaluate(sp.b_seed, tr.endpoint)) <= 1e-10);
}

TEST_CASE("tracking is deterministic: identical inputs, bitwise-identical outputs") {
  std::mt19937_64 rng(3);
  const PowerFlowSystem sys(testutil::cycle(5));
  const SeedPair sp = seed_nontrivial(sys, rng);
  const CVec b1 = random_complex_b(sp.b_seed, rng);
  SegmentHomotopy h(sys, sp.b_seed, b1);
  const TrackResult a = track(h, sp.z_seed, {});
  const TrackResult b = track(h, sp.z_seed, {});
  REQUIRE(a.status == b.status);
  CHECK(a.steps_taken == b.steps_taken);
  CHECK(a.failures == b.failures);
  REQUIRE(a.success());
  for (Eigen::Index i = 0; i < a.endpoint.size(); ++i) {
    CHECK(a.endpoint[i].real() == b.endpoint[i].real());
    CHECK(a.endpoint[i].imag() == b.endpoint[i].imag());
  }
}

TEST_CASE("success endpoints re-correct in at most 3 Newton iterations") {
  std::mt19937_64 rng(4);
  const PowerFlowSystem sys(testutil::complete(4));
  const SeedPair sp = seed_nontrivial(sys, rng);
  for (int trial = 0; trial < 5; ++trial) {
    const CVec b1 = random_complex_b(sp.b_seed, rng);
    SegmentHomotopy h(sys, sp.b_seed, b1);
    const TrackResult tr = track(h, sp.z_seed, {});
    if (!tr.success()) continue;  // flagged failures are acceptable here
    const NewtonOutcome check = newton_correct(sys, b1, tr.endpoint, 1e-10, 3);
    CHECK(check.converged);
  }
}

TEST_CASE("round-trip reversibility on K4 (sampled)") {
  std::mt19937_64 rng(5);
  const PowerFlowSystem sys(testutil::complete(4));
  const SeedPair sp = seed_nontrivial(sys, rng);
  int good = 0, flagged = 0, wrong = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const CVec b1 = random_complex_b(sp.b_seed, rng);
    const TrackResult out = track_segments(sys, {sp.b_seed, b1}, sp.z_seed, {});
    if (!out.success()) {
      ++flagged;
      continue;
    }
    const TrackResult back = track_segments(sys, {b1, sp.b_seed}, out.endpoint, {});
    if (!back.success()) {
      ++flagged;
      continue;
    }
    if (inf_dist(back.endpoint, sp.z_seed) <= 1e-6) ++good;
    else ++wrong;
  }
  CHECK(wrong == 0);  // failures must be flagged statuses, never wrong endpoints
  CHECK(good >= trials - 1);
}

TEST_CASE("a path into a degenerate susceptance ends with a flagged status") {
  // Zeroing one cycle edge makes the target a tree system whose nontrivial
  // component is empty: the tracked solution has nowhere regular to land, so
  // the path must end diverged / min-step / singular, never a silent success.
  std::mt19937_64 rng(6);
  const PowerFlowSystem sys(testutil::cycle(5));
  const SeedPair sp = seed_nontrivial(sys, rng);
  CVec b_degenerate = sp.b_seed;
  b_degenerate[2] = Complex(0, 0);
  SegmentHomotopy h(sys, sp.b_seed, b_degenerate);
  const TrackResult tr = track(h, sp.z_seed, {});
  CHECK_FALSE(tr.success());
  CHECK((tr.status == TrackStatus::Diverged || tr.status == TrackStatus::MinStep ||
         tr.status == TrackStatus::Singular || tr.status == TrackStatus::StepLimit));
}

TEST_CASE("option invariants hold for the defaults") {
  const TrackOptions o;
  CHECK(o.min_step > 0);
  CHECK(o.min_step <= o.initial_step);
  CHECK(o.initial_step <= o.max_step);
  CHECK(o.max_step <= 1.0);
}
