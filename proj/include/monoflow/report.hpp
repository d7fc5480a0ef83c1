#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monoflow/monodromy.hpp"
#include "monoflow/network.hpp"
#include "monoflow/totaldegree.hpp"

namespace monoflow {

/// Everything the solve command needs beyond the network itself.
struct SolveConfig {
  std::string method = "monodromy";  // or "totaldegree"
  std::optional<std::uint64_t> seed;
  int stall_loops = 0;
  long long expected_count = 0;
  double dedup_tol = 1e-6;
  double real_tol = 1e-8;
  int workers = 1;
  bool force = false;             // lift the total-degree path cap
  bool emit_solutions = false;
  bool strict_biconnected = false;
};

/// One emitted solution row (monodromy: canonical representatives only;
/// total degree: every distinct finite endpoint).
struct SolutionRecord {
  CVec z;
  double residual;
  bool trivial;
  bool real;
  int orbit_size;
};

struct RunReport {
  std::string method;
  int node_count = 0;
  std::vector<PowerNetwork::Edge> edges;

  long long total = 0;
  long long trivial = 0;
  long long nontrivial = 0;
  long long nontrivial_up_to_symmetry = 0;
  std::map<int, long long> orbit_histogram;
  long long real_count = 0;

  long long loops_run = 0;
  long long paths_tracked = 0;
  long long path_failures = 0;
  double wall_seconds = 0.0;
  bool deterministic = false;  // wall clock suppressed for byte-stable output

  std::vector<SolutionRecord> solutions;  // filled when emit_solutions
  std::vector<std::string> warnings;
};

/// Runs the configured method and assembles the report. Tree networks under
/// monodromy degrade to a trivial-only report with a warning instead of
/// failing.
RunReport run_solve(const PowerNetwork& net, const SolveConfig& cfg);

/// JSON document for a report; schema is stable so runs can be diffed.
std::string report_to_json(const RunReport& report, bool emit_solutions, int indent = 2);

struct VerifyResult {
  ComparisonReport comparison;
  long long total_degree_paths = 0;
  long long monodromy_representatives = 0;
  bool tree = false;
};

/// Runs both methods on identical network/susceptances/seed and matches the
/// solution sets bijectively.
VerifyResult run_verify(const PowerNetwork& net, const SolveConfig& cfg);

std::string verify_to_json(const VerifyResult& v, int indent = 2);

}  // namespace monoflow
