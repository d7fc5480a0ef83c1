#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "monoflow/report.hpp"

using namespace monoflow;

TEST_CASE("count law of the published C20 run") {
  // Pure arithmetic identity between the reported counts: removing the 2^19
  // trivial solutions from the total leaves exactly four nontrivial solutions
  // per symmetry class.
  const long long total = 1847560;
  const long long up_to_symmetry = 330818;
  const long long trivial = 1LL << 19;
  CHECK(total - trivial == 4 * up_to_symmetry);
}

TEST_CASE("solve report JSON round-trips and satisfies the count identities") {
  const PowerNetwork net = make_network(NetworkFamily::Complete, 4, SusceptanceMode::Uniform, 41);
  SolveConfig cfg;
  cfg.seed = 7;
  cfg.workers = 1;
  cfg.emit_solutions = true;
  const RunReport rep = run_solve(net, cfg);
  const std::string text = report_to_json(rep, true);

  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("method") == "monodromy");
  CHECK(j.at("network").at("n") == 4);
  CHECK(j.at("network").at("edges").size() == 6);
  const auto& counts = j.at("counts");
  CHECK(counts.at("total").get<long long>() ==
        counts.at("trivial").get<long long>() + counts.at("nontrivial").get<long long>());
  CHECK(counts.at("trivial").get<long long>() == 8);
  long long orbit_sum = 0;
  for (const auto& [size, cnt] : counts.at("orbit_size_histogram").items())
    orbit_sum += std::stoll(size) * cnt.get<long long>();
  CHECK(orbit_sum == counts.at("nontrivial").get<long long>());
  CHECK(counts.at("real").get<long long>() >= counts.at("trivial").get<long long>());
  // representatives emitted, one per symmetry class
  CHECK(j.at("solutions").size() ==
        static_cast<std::size_t>(counts.at("nontrivial_up_to_symmetry").get<long long>()));
  for (const auto& s : j.at("solutions")) {
    CHECK(s.at("residual").get<double>() <= 1e-10);
    CHECK_FALSE(s.at("trivial").get<bool>());
  }
  // deterministic mode suppresses the wall clock
  CHECK(j.at("diagnostics").at("wall_seconds").get<double>() == 0.0);
}

TEST_CASE("deterministic solve is reproducible at the JSON level") {
  const PowerNetwork net = make_network(NetworkFamily::Cycle, 5, SusceptanceMode::Uniform, 43);
  SolveConfig cfg;
  cfg.seed = 11;
  cfg.workers = 1;
  const RunReport a = run_solve(net, cfg);
  const RunReport b = run_solve(net, cfg);
  CHECK(report_to_json(a, false) == report_to_json(b, false));
}

TEST_CASE("totaldegree report carries the path diagnostics") {
  const PowerNetwork net = make_network(NetworkFamily::Cycle, 5, SusceptanceMode::Uniform, 47);
  SolveConfig cfg;
  cfg.method = "totaldegree";
  cfg.seed = 3;
  cfg.workers = 1;
  const RunReport rep = run_solve(net, cfg);
  CHECK(rep.paths_tracked == 256);
  CHECK(rep.total == rep.trivial + rep.nontrivial);
  CHECK(rep.trivial == 16);
  CHECK(rep.loops_run == 0);
}

TEST_CASE("tree networks degrade to a trivial-only monodromy report") {
  const PowerNetwork net = testutil::path(4);
  SolveConfig cfg;
  cfg.seed = 1;
  cfg.workers = 1;
  const RunReport rep = run_solve(net, cfg);
  CHECK(rep.nontrivial == 0);
  CHECK(rep.trivial == 8);
  CHECK(rep.total == 8);
  REQUIRE(!rep.warnings.empty());
  CHECK(rep.warnings.back().find("tree") != std::string::npos);
}

TEST_CASE("verify agrees on K4 and flags tree networks") {
  {
    const PowerNetwork net = make_network(NetworkFamily::Complete, 4, SusceptanceMode::Uniform, 53);
    SolveConfig cfg;
    cfg.seed = 5;
    cfg.workers = 1;
    const VerifyResult v = run_verify(net, cfg);
    CHECK(v.comparison.consistent());
    CHECK(v.total_degree_paths == 64);
    CHECK_FALSE(v.tree);
  }
  {
    SolveConfig cfg;
    cfg.seed = 5;
    cfg.workers = 1;
    const VerifyResult v = run_verify(testutil::path(4), cfg);
    CHECK(v.tree);
    CHECK(v.comparison.consistent());
    CHECK(v.monodromy_representatives == 0);
  }
}

TEST_CASE("unknown method is rejected") {
  const PowerNetwork net = testutil::complete(4);
  SolveConfig cfg;
  cfg.method = "polyhedral";
  CHECK_THROWS_AS(run_solve(net, cfg), ValidationError);
}
