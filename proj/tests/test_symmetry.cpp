#include <doctest.h>

#include "helpers.hpp"
#include "monoflow/monodromy.hpp"
#include "monoflow/symmetry.hpp"

using namespace monoflow;

TEST_CASE("bipartition detection on the stock graphs") {
  const Bipartition c6 = detect_bipartition(testutil::cycle(6));
  REQUIRE(c6.present);
  CHECK(c6.side[0] == 0);  // reference node on side T
  for (int k = 0; k < 6; ++k) CHECK(c6.side[k] == k % 2);

  CHECK_FALSE(detect_bipartition(testutil::cycle(5)).present);
  CHECK_FALSE(detect_bipartition(testutil::complete(4)).present);
  CHECK(detect_bipartition(testutil::star(5)).present);
}

TEST_CASE("group orders: 2 without a bipartition, 4 with one") {
  CHECK(SymmetryGroup::for_network(testutil::cycle(5)).order() == 2);
  CHECK(SymmetryGroup::for_network(testutil::complete(4)).order() == 2);
  CHECK(SymmetryGroup::for_network(testutil::cycle(6)).order() == 4);
}

TEST_CASE("group axioms: identity, involutions, closure") {
  for (const PowerNetwork& net : {testutil::cycle(5), testutil::cycle(6)}) {
    const SymmetryGroup g = SymmetryGroup::for_network(net);
    CHECK(g.element(0).is_identity());
    const int half = net.node_count() - 1;
    // Involutions: every signwise square is the identity.
    for (const SignMap& e : g.elements()) {
      CHECK(((e.sign_x * e.sign_x) > 0).all());
      CHECK(((e.sign_y * e.sign_y) > 0).all());
      for (int k = 0; k < half; ++k) {
        CHECK(std::abs(e.sign_x[k]) == 1.0);
        CHECK(std::abs(e.sign_y[k]) == 1.0);
      }
    }
    // Closure: composing any two elements lands on a third.
    for (const SignMap& a : g.elements()) {
      for (const SignMap& b : g.elements()) {
        const Eigen::ArrayXd cx = a.sign_x * b.sign_x;
        const Eigen::ArrayXd cy = a.sign_y * b.sign_y;
        bool found = false;
        for (const SignMap& c : g.elements())
          if ((c.sign_x == cx).all() && (c.sign_y == cy).all()) found = true;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("the bipartite maps compose to the y-negation") {
  const SymmetryGroup g = SymmetryGroup::for_network(testutil::cycle(6));
  REQUIRE(g.order() == 4);
  // elements: 0 = id, 1 = negate-y, 2 and 3 = the bipartite sign maps
  const Eigen::ArrayXd cx = g.element(2).sign_x * g.element(3).sign_x;
  const Eigen::ArrayXd cy = g.element(2).sign_y * g.element(3).sign_y;
  CHECK((cx == g.element(1).sign_x).all());
  CHECK((cy == g.element(1).sign_y).all());
}

TEST_CASE("trivial solutions are fixed by the y-negation") {
  const PowerFlowSystem sys(testutil::complete(4));
  const SymmetryGroup g = SymmetryGroup::for_network(sys.network());
  for (const Solution& s : enumerate_trivial_solutions(sys)) {
    CHECK(inf_dist(g.apply(1, s.z), s.z) == 0.0);
  }
}

TEST_CASE("group elements preserve residuals on solved instances") {
  std::mt19937_64 rng(404);
  for (const PowerNetwork& net : {testutil::complete(4), testutil::cycle(6)}) {
    const PowerFlowSystem sys(net);
    const SeedPair sp = seed_nontrivial(sys, rng);
    const SymmetryGroup g = SymmetryGroup::for_network(net);
    const double base = inf_norm(sys.evaluate(sp.b_seed, sp.z_seed));
    for (int i = 0; i < g.order(); ++i) {
      const CVec image = g.apply(i, sp.z_seed);
      const double res = inf_norm(sys.evaluate(sp.b_seed, image));
      CHECK(res <= 1e-10);                   // images stay solutions
      CHECK(std::abs(res - base) <= 1e-14);  // the maps are exact symmetries
    }
  }
}

TEST_CASE("canonicalize: same representative across an orbit, idempotent") {
  std::mt19937_64 rng(505);
  for (const PowerNetwork& net : {testutil::cycle(5), testutil::cycle(6)}) {
    const PowerFlowSystem sys(net);
    const SeedPair sp = seed_nontrivial(sys, rng);
    const SymmetryGroup g = SymmetryGroup::for_network(net);
    const CanonicalForm base = canonicalize(sp.z_seed, g);
    for (int i = 0; i < g.order(); ++i) {
      const CanonicalForm from_image = canonicalize(g.apply(i, sp.z_seed), g);
      CHECK(inf_dist(from_image.representative, base.representative) < 1e-12);
      CHECK(from_image.orbit_size == base.orbit_size);
    }
    const CanonicalForm twice = canonicalize(base.representative, g);
    CHECK(inf_dist(twice.representative, base.representative) == 0.0);
  }
}

TEST_CASE("generic orbit sizes: 2 on C5, 4 on C6") {
  std::mt19937_64 rng(606);
  {
    const PowerFlowSystem sys(testutil::cycle(5));
    const SeedPair sp = seed_nontrivial(sys, rng);
    const SymmetryGroup g = SymmetryGroup::for_network(sys.network());
    CHECK(canonicalize(sp.z_seed, g).orbit_size == 2);
  }
  {
    const PowerFlowSystem sys(testutil::cycle(6));
    const SeedPair sp = seed_nontrivial(sys, rng);
    const SymmetryGroup g = SymmetryGroup::for_network(sys.network());
    CHECK(canonicalize(sp.z_seed, g).orbit_size == 4);
  }
}

TEST_CASE("orbit_members lists each distinct image once") {
  std::mt19937_64 rng(707);
  const PowerFlowSystem sys(testutil::cycle(6));
  const SeedPair sp = seed_nontrivial(sys, rng);
  const SymmetryGroup g = SymmetryGroup::for_network(sys.network());
  const auto members = orbit_members(sp.z_seed, g);
  CHECK(members.size() == 4);
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      CHECK(inf_dist(members[i], members[j]) > 1e-6);
}
