#include <doctest.h>

#include "helpers.hpp"
#include "monoflow/errors.hpp"
#include "monoflow/system.hpp"

using namespace monoflow;

TEST_CASE("system dimensions follow 2(n-1)") {
  CHECK(PowerFlowSystem(testutil::complete(4)).dim() == 6);
  CHECK(PowerFlowSystem(testutil::cycle(10)).dim() == 18);
  CHECK(PowerFlowSystem(testutil::cycle(10)).equation_count() == 18);
}

TEST_CASE("injections are identically zero") {
  const PowerFlowSystem sys(testutil::complete(5));
  CHECK(sys.injections().size() == 4);
  CHECK(sys.injections().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-evaluated K4 point: x = 0, y = 1 at unit susceptances") {
  const PowerFlowSystem sys(testutil::complete(4));
  CVec z(6);
  z << 0, 0, 0, 1, 1, 1;
  const CVec b = CVec::Ones(6);
  const CVec r = sys.evaluate(b, z);
  // Unit rows: 0 + 1 - 1 = 0. Balance at node k: the reference edge term is
  // x_k y_0 - x_0 y_k = -1, every other term has x = 0 on both ends.
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i]) == doctest::Approx(0.0));
  for (int i = 3; i < 6; ++i) {
    CHECK(r[i].real() == doctest::Approx(-1.0));
    CHECK(r[i].imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("evaluation matches an independent re-implementation") {
  std::mt19937_64 rng(2024);
  for (const PowerNetwork& net : {testutil::cycle(5), testutil::complete(4), testutil::complete(6)}) {
    const PowerFlowSystem sys(net);
    for (int trial = 0; trial < 25; ++trial) {
      const CVec z = testutil::random_cvec(sys.dim(), rng);
      const CVec b = testutil::random_cvec(net.edge_count(), rng);
      const CVec ours = sys.evaluate(b, z);
      const CVec theirs = testutil::naive_evaluate(net, b, z);
      const double scale = std::max(1.0, theirs.cwiseAbs().maxCoeff());
      CHECK(inf_dist(ours, theirs) / scale < 1e-14);
    }
  }
}

TEST_CASE("evaluate is linear in b on the balance rows") {
  std::mt19937_64 rng(5);
  const PowerNetwork net = testutil::cycle(6);
  const PowerFlowSystem sys(net);
  const int half = net.node_count() - 1;
  const CVec z = testutil::random_cvec(sys.dim(), rng);
  const CVec b1 = testutil::random_cvec(net.edge_count(), rng);
  const CVec b2 = testutil::random_cvec(net.edge_count(), rng);
  const CVec sum = sys.evaluate(b1 + b2, z);
  const CVec parts = sys.evaluate(b1, z) + sys.evaluate(b2, z);
  // Unit rows are b-independent so they double in `parts`; balance rows add.
  for (int i = 0; i < half; ++i) CHECK(std::abs(sum[i] - 0.5 * parts[i]) < 1e-12);
  for (int i = half; i < 2 * half; ++i) CHECK(std::abs(sum[i] - parts[i]) < 1e-12);
  // balance_part carries exactly the balance rows.
  const CVec bal = sys.balance_part(b1, z);
  const CVec full = sys.evaluate(b1, z);
  for (int i = 0; i < half; ++i) CHECK(bal[i] == Complex(0, 0));
  for (int i = half; i < 2 * half; ++i) CHECK(std::abs(bal[i] - full[i]) < 1e-14);
}

TEST_CASE("dimension mismatches are rejected") {
  const PowerFlowSystem sys(testutil::complete(4));
  CHECK_THROWS_AS(sys.evaluate(CVec::Ones(6), CVec::Ones(5)), DimensionError);
  CHECK_THROWS_AS(sys.evaluate(CVec::Ones(5), CVec::Ones(6)), DimensionError);
  CHECK_THROWS_AS(sys.jacobian(CVec::Ones(6), CVec::Ones(7)), DimensionError);
}

TEST_CASE("near_trivial classification") {
  CVec z(4);
  z << Complex(1, 0), Complex(-1, 0), Complex(0, 0), Complex(0, 0);
  CHECK(near_trivial(z, 1e-6));
  z[2] = Complex(1e-3, 0);
  CHECK_FALSE(near_trivial(z, 1e-6));
  z[2] = Complex(0, 0);
  z[0] = Complex(0.5, 0);
  CHECK_FALSE(near_trivial(z, 1e-6));
}
