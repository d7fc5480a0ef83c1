#include "monoflow/report.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include <nlohmann/json.hpp>

#include "monoflow/errors.hpp"
#include "monoflow/numeric.hpp"
#include "monoflow/util.hpp"

namespace monoflow {

namespace {

using ordered_json = nlohmann::ordered_json;

bool plain_lex_less(const CVec& a, const CVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

std::uint64_t pick_seed(const SolveConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ordered_json complex_pairs(const CVec& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

ordered_json solution_json(const SolutionRecord& s) {
  const Eigen::Index half = s.z.size() / 2;
  ordered_json j;
  j["x"] = complex_pairs(s.z.head(half));
  j["y"] = complex_pairs(s.z.tail(half));
  j["residual"] = s.residual;
  j["trivial"] = s.trivial;
  j["real"] = s.real;
  j["orbit_size"] = s.orbit_size;
  return j;
}

void fill_network(ordered_json& j, const RunReport& r) {
  ordered_json net;
  net["n"] = r.node_count;
  auto& arr = net["edges"] = ordered_json::array();
  for (const auto& e : r.edges) arr.push_back({e.k, e.m, e.b});
  j["network"] = std::move(net);
}

}  // namespace

RunReport run_solve(const PowerNetwork& net, const SolveConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.method = cfg.method;
  rep.node_count = net.node_count();
  rep.edges = net.edges();
  rep.deterministic = cfg.seed.has_value() && cfg.workers <= 1;

  if (!net.is_biconnected()) {
    if (cfg.strict_biconnected)
      throw ValidationError("network is not biconnected (strict mode rejects it)");
    rep.warnings.push_back("network is not biconnected: the equations partially decouple; "
                           "results are still valid for the coupled system");
  }

  const PowerFlowSystem sys(net);
  const RVec b = net.susceptances();
  std::mt19937_64 rng(pick_seed(cfg));
  const SymmetryGroup group = SymmetryGroup::for_network(net);
  const long long n_trivial = static_cast<long long>(trivial_solution_count(net));

  if (cfg.method == "monodromy") {
    rep.trivial = n_trivial;
    if (net.is_tree()) {
      rep.warnings.push_back("tree topology: the nontrivial solution set is empty; "
                             "reporting trivial solutions only");
      rep.total = rep.trivial;
      rep.real_count = rep.trivial;
    } else {
      MonodromyOptions mo;
      mo.stall_loops = cfg.stall_loops;
      mo.expected_count = cfg.expected_count;
      mo.dedup_tol = cfg.dedup_tol;
      mo.real_tol = cfg.real_tol;
      mo.workers = cfg.workers;
      SolutionRegistry reg = run_monodromy(sys, b, mo, rng);
      rep.nontrivial = reg.total_nontrivial();
      rep.nontrivial_up_to_symmetry = static_cast<long long>(reg.size());
      rep.total = rep.trivial + rep.nontrivial;
      rep.orbit_histogram = reg.orbit_histogram();
      rep.loops_run = reg.stats.loops_run;
      rep.paths_tracked = reg.stats.paths_tracked;
      rep.path_failures = reg.stats.path_failures;
      rep.real_count = rep.trivial;  // trivial solutions are all real
      for (const auto& e : reg.entries()) {
        // Realness is orbit-invariant: sign maps have real coefficients.
        if (e.rep.is_real) rep.real_count += e.orbit_size;
        if (cfg.emit_solutions)
          rep.solutions.push_back({e.rep.z, e.rep.residual, false, e.rep.is_real, e.orbit_size});
      }
    }
  } else if (cfg.method == "totaldegree") {
    TotalDegreeOptions to;
    to.dedup_tol = cfg.dedup_tol;
    to.real_tol = cfg.real_tol;
    to.force = cfg.force;
    to.workers = cfg.workers;
    const TotalDegreeRun td = solve_total_degree(sys, b, to, rng);
    rep.total = static_cast<long long>(td.endpoints.size());
    rep.paths_tracked = td.path_count;
    rep.path_failures = td.failed_paths;

    // Canonical grouping of the nontrivial endpoints gives the quotient counts.
    PointIndex canon_index(sys.dim(), cfg.dedup_tol);
    std::vector<CVec> canon_reps;
    std::vector<int> canon_sizes;
    const auto at = [&canon_reps](std::size_t i) -> const CVec& { return canon_reps[i]; };
    for (const Solution& s : td.endpoints) {
      if (s.is_trivial) {
        ++rep.trivial;
      } else {
        ++rep.nontrivial;
        const CanonicalForm cf = canonicalize(s.z, group, 1e-9, cfg.dedup_tol);
        if (!canon_index.find(cf.representative, at)) {
          canon_index.add(cf.representative, canon_reps.size());
          canon_reps.push_back(cf.representative);
          canon_sizes.push_back(cf.orbit_size);
        }
      }
      if (s.is_real) ++rep.real_count;
      if (cfg.emit_solutions) {
        const int orbit = s.is_trivial ? 1 : canonicalize(s.z, group, 1e-9, cfg.dedup_tol).orbit_size;
        rep.solutions.push_back({s.z, s.residual, s.is_trivial, s.is_real, orbit});
      }
    }
    rep.nontrivial_up_to_symmetry = static_cast<long long>(canon_reps.size());
    for (const int sz : canon_sizes) ++rep.orbit_histogram[sz];
  } else {
    throw ValidationError("unknown method `" + cfg.method + "` (monodromy, totaldegree)");
  }

  std::sort(rep.solutions.begin(), rep.solutions.end(),
            [](const SolutionRecord& a, const SolutionRecord& b) { return plain_lex_less(a.z, b.z); });

  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds =
      rep.deterministic ? 0.0 : std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

std::string report_to_json(const RunReport& r, bool emit_solutions, int indent) {
  ordered_json j;
  fill_network(j, r);
  j["method"] = r.method;
  ordered_json counts;
  counts["total"] = r.total;
  counts["trivial"] = r.trivial;
  counts["nontrivial"] = r.nontrivial;
  counts["nontrivial_up_to_symmetry"] = r.nontrivial_up_to_symmetry;
  counts["real"] = r.real_count;
  ordered_json hist = ordered_json::object();
  for (const auto& [size, n] : r.orbit_histogram) hist[std::to_string(size)] = n;
  counts["orbit_size_histogram"] = std::move(hist);
  j["counts"] = std::move(counts);
  ordered_json diag;
  diag["loops_run"] = r.loops_run;
  diag["paths_tracked"] = r.paths_tracked;
  diag["path_failures"] = r.path_failures;
  diag["wall_seconds"] = r.wall_seconds;
  j["diagnostics"] = std::move(diag);
  j["warnings"] = r.warnings;
  if (emit_solutions) {
    auto& arr = j["solutions"] = ordered_json::array();
    for (const SolutionRecord& s : r.solutions) arr.push_back(solution_json(s));
  }
  return j.dump(indent) + "\n";
}

VerifyResult run_verify(const PowerNetwork& net, const SolveConfig& cfg) {
  const PowerFlowSystem sys(net);
  const RVec b = net.susceptances();
  const SymmetryGroup group = SymmetryGroup::for_network(net);
  const std::uint64_t seed = pick_seed(cfg);

  TotalDegreeOptions to;
  to.dedup_tol = cfg.dedup_tol;
  to.real_tol = cfg.real_tol;
  to.force = cfg.force;
  to.workers = cfg.workers;
  std::mt19937_64 rng_td(seed);
  const TotalDegreeRun td = solve_total_degree(sys, b, to, rng_td);

  VerifyResult v;
  v.total_degree_paths = td.path_count;
  const std::vector<Solution> trivials = enumerate_trivial_solutions(sys);

  if (net.is_tree()) {
    v.tree = true;
    const SolutionRegistry empty(sys.dim(), cfg.dedup_tol);
    v.comparison = compare_with_monodromy(td, empty, trivials, group, cfg.dedup_tol);
    return v;
  }

  MonodromyOptions mo;
  mo.stall_loops = cfg.stall_loops;
  mo.expected_count = cfg.expected_count;
  mo.dedup_tol = cfg.dedup_tol;
  mo.real_tol = cfg.real_tol;
  mo.workers = cfg.workers;
  std::mt19937_64 rng_mono(seed);
  const SolutionRegistry reg = run_monodromy(sys, b, mo, rng_mono);
  v.monodromy_representatives = static_cast<long long>(reg.size());
  v.comparison = compare_with_monodromy(td, reg, trivials, group, cfg.dedup_tol);
  return v;
}

std::string verify_to_json(const VerifyResult& v, int indent) {
  ordered_json j;
  j["consistent"] = v.comparison.consistent();
  j["matched"] = v.comparison.matched;
  j["total_degree_paths"] = v.total_degree_paths;
  j["monodromy_representatives"] = v.monodromy_representatives;
  j["tree"] = v.tree;
  auto dump_points = [](const std::vector<CVec>& pts) {
    ordered_json arr = ordered_json::array();
    for (const CVec& z : pts) arr.push_back(complex_pairs(z));
    return arr;
  };
  j["unmatched_total_degree"] = dump_points(v.comparison.unmatched_total_degree);
  j["unmatched_monodromy"] = dump_points(v.comparison.unmatched_monodromy);
  return j.dump(indent) + "\n";
}

}  // namespace monoflow
