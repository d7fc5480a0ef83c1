#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "monoflow/errors.hpp"
#include "monoflow/monodromy.hpp"
#include "monoflow/network.hpp"
#include "monoflow/numeric.hpp"
#include "monoflow/report.hpp"
#include "monoflow/symmetry.hpp"
#include "monoflow/system.hpp"
#include "monoflow/totaldegree.hpp"
#include "monoflow/tracker.hpp"

namespace py = pybind11;
using namespace monoflow;

namespace {

SusceptanceMode mode_from_string(const std::string& mode) {
  if (mode == "unit") return SusceptanceMode::Unit;
  if (mode == "uniform") return SusceptanceMode::Uniform;
  if (mode == "fixed-seed") return SusceptanceMode::FixedSeed;
  throw ValidationError("unknown susceptance mode `" + mode + "`");
}

MonodromyOptions monodromy_options(int stall_loops, long long expected_count, double dedup_tol,
                                   int workers) {
  MonodromyOptions mo;
  mo.stall_loops = stall_loops;
  mo.expected_count = expected_count;
  mo.dedup_tol = dedup_tol;
  mo.workers = workers;
  return mo;
}

}  // namespace

PYBIND11_MODULE(_monoflow, m) {
  m.doc() = "All complex solutions of lossless zero-injection power flow equations: "
            "monodromy in susceptance space with a total-degree homotopy oracle";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<SeedingError>(m, "SeedingError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<PowerNetwork>(m, "PowerNetwork")
      .def(py::init([](int n, const std::vector<std::tuple<int, int, double>>& edges) {
             std::vector<PowerNetwork::Edge> es;
             es.reserve(edges.size());
             for (const auto& [k, mm, b] : edges) es.push_back({k, mm, b});
             return PowerNetwork(n, std::move(es));
           }),
           py::arg("n"), py::arg("edges"))
      .def_static("parse_text", &PowerNetwork::parse_text, py::arg("text"))
      .def_static("parse_json", &PowerNetwork::parse_json, py::arg("text"))
      .def_static("load", [](const std::string& path) { return PowerNetwork::load(path); },
                  py::arg("path"))
      .def("save", [](const PowerNetwork& net, const std::string& path) { net.save(path); },
           py::arg("path"))
      .def("to_text", &PowerNetwork::to_text)
      .def("to_json", &PowerNetwork::to_json)
      .def_property_readonly("n", &PowerNetwork::node_count)
      .def_property_readonly("edge_count", &PowerNetwork::edge_count)
      .def_property_readonly("edges",
                             [](const PowerNetwork& net) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& e : net.edges()) out.emplace_back(e.k, e.m, e.b);
                               return out;
                             })
      .def("susceptances", &PowerNetwork::susceptances)
      .def("is_tree", &PowerNetwork::is_tree)
      .def("is_biconnected", &PowerNetwork::is_biconnected)
      .def("__repr__", [](const PowerNetwork& net) {
        return "<PowerNetwork n=" + std::to_string(net.node_count()) + " edges=" +
               std::to_string(net.edge_count()) + ">";
      });

  m.def("make_network",
        [](const std::string& family, int n, const std::string& mode, std::uint64_t seed) {
          return make_network(parse_family(family), n, mode_from_string(mode), seed);
        },
        py::arg("family"), py::arg("n"), py::arg("mode") = "unit", py::arg("seed") = 0,
        "Stock topologies: complete, cycle, path, star; susceptance modes unit, uniform, fixed-seed");

  py::class_<Solution>(m, "Solution")
      .def_readonly("z", &Solution::z)
      .def_readonly("residual", &Solution::residual)
      .def_readonly("is_trivial", &Solution::is_trivial)
      .def_readonly("is_real", &Solution::is_real)
      .def_property_readonly("x", &Solution::x)
      .def_property_readonly("y", &Solution::y);

  py::class_<PowerFlowSystem>(m, "PowerFlowSystem")
      .def(py::init<PowerNetwork>(), py::arg("network"))
      .def_property_readonly("dim", &PowerFlowSystem::dim)
      .def_property_readonly("equation_count", &PowerFlowSystem::equation_count)
      .def_property_readonly("network", &PowerFlowSystem::network)
      .def("target_susceptances", &PowerFlowSystem::target_susceptances)
      .def("evaluate", &PowerFlowSystem::evaluate, py::arg("b"), py::arg("z"))
      .def("jacobian", &PowerFlowSystem::jacobian, py::arg("b"), py::arg("z"))
      .def("balance_part", &PowerFlowSystem::balance_part, py::arg("db"), py::arg("z"));

  m.def("trivial_solution_count", &trivial_solution_count, py::arg("network"));
  m.def("enumerate_trivial_solutions", &enumerate_trivial_solutions, py::arg("system"),
        py::arg("cap_exponent") = 30);
  m.def("near_trivial", &near_trivial, py::arg("z"), py::arg("tol") = 1e-6);

  py::class_<NewtonOutcome>(m, "NewtonOutcome")
      .def_readonly("z", &NewtonOutcome::z)
      .def_readonly("residual", &NewtonOutcome::residual)
      .def_readonly("last_step", &NewtonOutcome::last_step)
      .def_readonly("iterations", &NewtonOutcome::iterations)
      .def_readonly("converged", &NewtonOutcome::converged)
      .def_readonly("singular", &NewtonOutcome::singular);

  m.def("newton_correct", &newton_correct, py::arg("system"), py::arg("b"), py::arg("z0"),
        py::arg("tol") = 1e-10, py::arg("max_iters") = 30);
  m.def("linear_solve", &linear_solve, py::arg("A"), py::arg("rhs"));

  py::class_<TrackResult>(m, "TrackResult")
      .def_property_readonly("status", [](const TrackResult& r) { return to_string(r.status); })
      .def_property_readonly("success", &TrackResult::success)
      .def_readonly("endpoint", &TrackResult::endpoint)
      .def_readonly("steps_taken", &TrackResult::steps_taken)
      .def_readonly("failures", &TrackResult::failures)
      .def_readonly("s_reached", &TrackResult::s_reached);

  m.def("track_segments",
        [](const PowerFlowSystem& sys, const std::vector<CVec>& waypoints, const CVec& z) {
          return track_segments(sys, waypoints, z, TrackOptions{});
        },
        py::arg("system"), py::arg("b_waypoints"), py::arg("z_start"),
        py::keep_alive<0, 1>(),
        "Track one solution through a polyline of susceptance vectors");

  py::class_<Bipartition>(m, "Bipartition")
      .def_readonly("present", &Bipartition::present)
      .def_readonly("side", &Bipartition::side);
  m.def("detect_bipartition", &detect_bipartition, py::arg("network"));

  py::class_<SymmetryGroup>(m, "SymmetryGroup")
      .def_static("for_network", &SymmetryGroup::for_network, py::arg("network"))
      .def_property_readonly("order", &SymmetryGroup::order)
      .def("apply", &SymmetryGroup::apply, py::arg("element"), py::arg("z"))
      .def_property_readonly("elements", [](const SymmetryGroup& g) {
        std::vector<std::tuple<Eigen::ArrayXd, Eigen::ArrayXd, std::string>> out;
        for (const SignMap& e : g.elements()) out.emplace_back(e.sign_x, e.sign_y, e.label);
        return out;
      });

  m.def("canonicalize",
        [](const CVec& z, const SymmetryGroup& g, double lex_tol, double orbit_tol) {
          const CanonicalForm cf = canonicalize(z, g, lex_tol, orbit_tol);
          return py::make_tuple(cf.representative, cf.orbit_size);
        },
        py::arg("z"), py::arg("group"), py::arg("lex_tol") = 1e-9, py::arg("orbit_tol") = 1e-6);
  m.def("orbit_members", &orbit_members, py::arg("z"), py::arg("group"),
        py::arg("orbit_tol") = 1e-6);

  py::class_<SeedPair>(m, "SeedPair")
      .def_readonly("b_seed", &SeedPair::b_seed)
      .def_readonly("z_seed", &SeedPair::z_seed)
      .def_readonly("t_used", &SeedPair::t_used);

  m.def("seed_nontrivial",
        [](const PowerFlowSystem& sys, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          return seed_nontrivial(sys, rng);
        },
        py::arg("system"), py::arg("seed") = 0);
  m.def("seed_incidence_matrix", &seed_incidence_matrix, py::arg("network"), py::arg("t"));

  py::class_<MonodromyStats>(m, "MonodromyStats")
      .def_readonly("loops_run", &MonodromyStats::loops_run)
      .def_readonly("paths_tracked", &MonodromyStats::paths_tracked)
      .def_readonly("path_failures", &MonodromyStats::path_failures)
      .def_readonly("discarded_near_trivial", &MonodromyStats::discarded_near_trivial)
      .def_readonly("rejected_candidates", &MonodromyStats::rejected_candidates)
      .def_readonly("lost_in_transport", &MonodromyStats::lost_in_transport);

  py::class_<SolutionRegistry>(m, "SolutionRegistry")
      .def_property_readonly("size", [](const SolutionRegistry& r) { return r.size(); })
      .def_property_readonly("total_nontrivial",
                             [](const SolutionRegistry& r) { return r.total_nontrivial(); })
      .def_property_readonly("orbit_histogram",
                             [](const SolutionRegistry& r) { return r.orbit_histogram(); })
      .def_property_readonly("stats", [](const SolutionRegistry& r) { return r.stats; })
      .def("representatives", [](const SolutionRegistry& r) {
        std::vector<std::pair<Solution, int>> out;
        out.reserve(r.size());
        for (const auto& e : r.entries()) out.emplace_back(e.rep, e.orbit_size);
        return out;
      });

  m.def("run_monodromy",
        [](const PowerFlowSystem& sys, const RVec& b_target, std::uint64_t seed, int stall_loops,
           long long expected_count, double dedup_tol, int workers) {
          std::mt19937_64 rng(seed);
          return run_monodromy(sys, b_target,
                               monodromy_options(stall_loops, expected_count, dedup_tol, workers),
                               rng);
        },
        py::arg("system"), py::arg("b_target"), py::arg("seed") = 0, py::arg("stall_loops") = 0,
        py::arg("expected_count") = 0, py::arg("dedup_tol") = 1e-6, py::arg("workers") = 1);

  m.def("transport_fiber",
        [](const SolutionRegistry& reg, const PowerFlowSystem& sys, const CVec& b_from,
           const CVec& b_to, std::uint64_t seed, int workers) {
          std::mt19937_64 rng(seed);
          MonodromyOptions mo;
          mo.workers = workers;
          TransportOutcome out = transport_fiber(reg, sys, b_from, b_to, mo, rng);
          return py::make_tuple(std::move(out.registry), out.lost);
        },
        py::arg("registry"), py::arg("system"), py::arg("b_from"), py::arg("b_to"),
        py::arg("seed") = 0, py::arg("workers") = 1);

  py::class_<TotalDegreeRun>(m, "TotalDegreeRun")
      .def_readonly("path_count", &TotalDegreeRun::path_count)
      .def_readonly("endpoints", &TotalDegreeRun::endpoints)
      .def_readonly("finite_paths", &TotalDegreeRun::finite_paths)
      .def_readonly("diverged_paths", &TotalDegreeRun::diverged_paths)
      .def_readonly("failed_paths", &TotalDegreeRun::failed_paths)
      .def_readonly("gamma", &TotalDegreeRun::gamma);

  m.def("solve_total_degree",
        [](const PowerFlowSystem& sys, const RVec& b, std::uint64_t seed, bool force, int workers) {
          TotalDegreeOptions opts;
          opts.force = force;
          opts.workers = workers;
          std::mt19937_64 rng(seed);
          return solve_total_degree(sys, b, opts, rng);
        },
        py::arg("system"), py::arg("b"), py::arg("seed") = 0, py::arg("force") = false,
        py::arg("workers") = 1);

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("matched", &ComparisonReport::matched)
      .def_readonly("unmatched_total_degree", &ComparisonReport::unmatched_total_degree)
      .def_readonly("unmatched_monodromy", &ComparisonReport::unmatched_monodromy)
      .def_property_readonly("consistent", &ComparisonReport::consistent);

  m.def("compare_with_monodromy", &compare_with_monodromy, py::arg("total_degree"),
        py::arg("registry"), py::arg("trivials"), py::arg("group"), py::arg("tol") = 1e-6);

  m.def("solve_report_json",
        [](const PowerNetwork& net, const std::string& method, std::uint64_t seed, int stall_loops,
           long long expected_count, int workers, bool emit_solutions, bool force) {
          SolveConfig cfg;
          cfg.method = method;
          cfg.seed = seed;
          cfg.stall_loops = stall_loops;
          cfg.expected_count = expected_count;
          cfg.workers = workers;
          cfg.emit_solutions = emit_solutions;
          cfg.force = force;
          return report_to_json(run_solve(net, cfg), emit_solutions);
        },
        py::arg("network"), py::arg("method") = "monodromy", py::arg("seed") = 0,
        py::arg("stall_loops") = 0, py::arg("expected_count") = 0, py::arg("workers") = 1,
        py::arg("emit_solutions") = false, py::arg("force") = false,
        "Full solve pipeline; returns the CLI's JSON report document");

  m.def("verify_report_json",
        [](const PowerNetwork& net, std::uint64_t seed, int workers, bool force) {
          SolveConfig cfg;
          cfg.seed = seed;
          cfg.workers = workers;
          cfg.force = force;
          const VerifyResult v = run_verify(net, cfg);
          return py::make_tuple(v.comparison.consistent(), verify_to_json(v));
        },
        py::arg("network"), py::arg("seed") = 0, py::arg("workers") = 1, py::arg("force") = false);

  m.attr("__version__") = "0.1.0";
}
