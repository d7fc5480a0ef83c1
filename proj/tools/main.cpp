// monoflow: find all complex solutions of the lossless zero-injection power
// flow equations on a network, by monodromy in susceptance space or by a
// total-degree homotopy, and report the counts up to the solution symmetry.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monoflow/errors.hpp"
#include "monoflow/report.hpp"
#include "monoflow/util.hpp"

namespace {

using namespace monoflow;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct CommonFlags {
  std::string output;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int stall_loops = 0;
  long long expected_count = 0;
  double tol = 1e-6;
  double real_tol = 1e-8;
  int workers = 0;  // 0 = all cores
  bool force = false;
  bool strict_biconnected = false;

  void attach(CLI::App* cmd, bool with_solver_flags) {
    cmd->add_option("--output", output, "Write the report here instead of stdout");
    cmd->add_option("--seed", seed, "RNG seed (single-threaded runs become reproducible)")
        ->each([this](const std::string&) { seed_set = true; });
    if (with_solver_flags) {
      cmd->add_option("--stall-loops", stall_loops,
                      "Stop after this many consecutive loops without a new solution");
      cmd->add_option("--expected-count", expected_count,
                      "Stop early once this many representatives are known");
      cmd->add_option("--tol", tol, "Solution dedup tolerance (default 1e-6)");
      cmd->add_option("--real-tol", real_tol,
                      "Max |imaginary part| for a solution to count as real (default 1e-8)");
      cmd->add_option("--workers", workers, "Worker threads (default: all cores; 1 = deterministic)");
      cmd->add_flag("--force", force, "Lift the total-degree path cap");
      cmd->add_flag("--strict-biconnected", strict_biconnected,
                    "Reject networks that are not biconnected instead of warning");
    }
  }

  SolveConfig to_config(const std::string& method) const {
    SolveConfig cfg;
    cfg.method = method;
    if (seed_set) cfg.seed = seed;
    cfg.stall_loops = stall_loops;
    cfg.expected_count = expected_count;
    cfg.dedup_tol = tol;
    cfg.real_tol = real_tol;
    cfg.workers = workers > 0 ? workers : default_workers();
    cfg.force = force;
    cfg.strict_biconnected = strict_biconnected;
    return cfg;
  }
};

int cmd_solve(const std::string& file, const std::string& method, const CommonFlags& flags,
              bool emit_solutions) {
  const PowerNetwork net = PowerNetwork::load(file);
  SolveConfig cfg = flags.to_config(method);
  cfg.emit_solutions = emit_solutions;
  const RunReport rep = run_solve(net, cfg);
  for (const std::string& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  write_output(report_to_json(rep, emit_solutions), flags.output);
  return kExitOk;
}

int cmd_verify(const std::string& file, const CommonFlags& flags) {
  const PowerNetwork net = PowerNetwork::load(file);
  const SolveConfig cfg = flags.to_config("monodromy");
  const VerifyResult v = run_verify(net, cfg);
  write_output(verify_to_json(v), flags.output);
  if (!v.comparison.consistent()) {
    std::fprintf(stderr, "verify: %zu unmatched total-degree endpoints, %zu unmatched monodromy solutions\n",
                 v.comparison.unmatched_total_degree.size(),
                 v.comparison.unmatched_monodromy.size());
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_gen(const std::string& family, int n, const std::string& mode, const CommonFlags& flags) {
  SusceptanceMode m;
  if (mode == "unit") m = SusceptanceMode::Unit;
  else if (mode == "uniform") m = SusceptanceMode::Uniform;
  else if (mode == "fixed-seed") m = SusceptanceMode::FixedSeed;
  else throw ValidationError("unknown susceptance mode `" + mode + "` (unit, uniform, fixed-seed)");
  const PowerNetwork net = make_network(parse_family(family), n, m, flags.seed);
  if (flags.output.empty() || flags.output == "-") std::cout << net.to_text();
  else net.save(flags.output);
  return kExitOk;
}

struct TableRow {
  std::string network;
  int n = 0;
  int reps = 0;
  double loops_mean = 0;
  double paths_mean = 0;
  long long total = 0, trivial = 0, nontrivial = 0, up_to_symmetry = 0;
  bool counts_stable = true;
  double seconds_mean = 0;
};

// Positional grammar: repeated `<family> <range>` pairs, range `a..b` or `a`.
std::vector<std::pair<NetworkFamily, int>> parse_table_specs(const std::vector<std::string>& args) {
  std::vector<std::pair<NetworkFamily, int>> specs;
  if (args.size() % 2 != 0)
    throw ValidationError("table expects `<family> <size-range>` pairs");
  for (std::size_t i = 0; i < args.size(); i += 2) {
    const NetworkFamily fam = parse_family(args[i]);
    const std::string& range = args[i + 1];
    int lo = 0, hi = 0;
    const auto dots = range.find("..");
    try {
      if (dots == std::string::npos) {
        lo = hi = std::stoi(range);
      } else {
        lo = std::stoi(range.substr(0, dots));
        hi = std::stoi(range.substr(dots + 2));
      }
    } catch (const std::exception&) {
      throw ValidationError("bad size range `" + range + "` (use e.g. 4..6 or 5)");
    }
    if (lo < 2 || hi < lo) throw ValidationError("bad size range `" + range + "`");
    for (int n = lo; n <= hi; ++n) specs.push_back({fam, n});
  }
  return specs;
}

int cmd_table(const std::vector<std::string>& specs_raw, const std::string& method, int reps,
              const std::string& b_mode, const CommonFlags& flags, bool csv) {
  const auto specs = parse_table_specs(specs_raw);
  std::vector<TableRow> rows;
  std::uint64_t seed_base = flags.seed_set ? flags.seed : 12345;
  for (const auto& [fam, n] : specs) {
    TableRow row;
    row.network = std::string(1, std::toupper(family_name(fam)[0])) + std::to_string(n);
    row.n = n;
    row.reps = reps;
    bool first = true;
    for (int r = 0; r < reps; ++r) {
      const std::uint64_t seed = seed_base + 1000003ULL * r;
      SusceptanceMode m = b_mode == "unit" ? SusceptanceMode::Unit : SusceptanceMode::Uniform;
      const PowerNetwork net = make_network(fam, n, m, seed);
      CommonFlags f = flags;
      f.seed = seed;
      f.seed_set = true;
      SolveConfig cfg = f.to_config(method);
      const RunReport rep = run_solve(net, cfg);
      row.loops_mean += static_cast<double>(rep.loops_run) / reps;
      row.paths_mean += static_cast<double>(rep.paths_tracked) / reps;
      row.seconds_mean += rep.wall_seconds / reps;
      if (first) {
        row.total = rep.total;
        row.trivial = rep.trivial;
        row.nontrivial = rep.nontrivial;
        row.up_to_symmetry = rep.nontrivial_up_to_symmetry;
        first = false;
      } else if (row.total != rep.total || row.up_to_symmetry != rep.nontrivial_up_to_symmetry) {
        row.counts_stable = false;
      }
    }
    rows.push_back(row);
  }

  std::ostringstream out;
  if (csv) {
    out << "network,n,method,reps,loops_mean,paths_mean,total,trivial,nontrivial,"
           "up_to_symmetry,counts_stable,seconds_mean\n";
    for (const TableRow& r : rows)
      out << r.network << ',' << r.n << ',' << method << ',' << r.reps << ',' << r.loops_mean << ','
          << r.paths_mean << ',' << r.total << ',' << r.trivial << ',' << r.nontrivial << ','
          << r.up_to_symmetry << ',' << (r.counts_stable ? 1 : 0) << ',' << r.seconds_mean << '\n';
  } else {
    char buf[256];
    out << "# method: " << method << ", reps per network: " << reps << "\n";
    out << "# timings are machine-specific; loop counts depend on the loop strategy and are not\n";
    out << "# comparable across implementations\n";
    std::snprintf(buf, sizeof(buf), "%-8s %4s %12s %12s %10s %10s %12s %10s %8s\n", "network", "n",
                  "loops(mean)", "paths", "total", "trivial", "nontrivial", "up-to-sym", "sec");
    out << buf;
    for (const TableRow& r : rows) {
      std::snprintf(buf, sizeof(buf), "%-8s %4d %12.1f %12.0f %10lld %10lld %12lld %10lld %8.2f%s\n",
                    r.network.c_str(), r.n, r.loops_mean, r.paths_mean, r.total, r.trivial,
                    r.nontrivial, r.up_to_symmetry, r.seconds_mean,
                    r.counts_stable ? "" : "  (counts varied across reps!)");
      out << buf;
    }
  }
  write_output(out.str(), flags.output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monoflow: all complex solutions of lossless zero-injection power flow equations\n"
               "via monodromy in susceptance space, with a total-degree homotopy oracle"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one network and emit a JSON report");
  std::string solve_file, solve_method = "monodromy";
  bool emit_solutions = false;
  CommonFlags solve_flags;
  solve->add_option("network", solve_file, "Network file (.edges text or .json)")->required();
  solve->add_option("--method", solve_method, "monodromy (default) or totaldegree")
      ->check(CLI::IsMember({"monodromy", "totaldegree"}));
  solve->add_flag("--emit-solutions", emit_solutions, "Include full coordinate lists");
  solve_flags.attach(solve, true);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Run monodromy and total degree on the same network and match the solution sets");
  std::string verify_file;
  CommonFlags verify_flags;
  verify->add_option("network", verify_file, "Network file")->required();
  verify_flags.attach(verify, true);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a stock network file");
  std::string gen_family, gen_mode = "unit";
  int gen_n = 0;
  CommonFlags gen_flags;
  gen->add_option("family", gen_family, "complete, cycle, path or star")->required();
  gen->add_option("n", gen_n, "Node count")->required();
  gen->add_option("--b", gen_mode, "Susceptance mode: unit, uniform or fixed-seed");
  gen_flags.attach(gen, false);

  // table
  auto* table = app.add_subcommand("table", "Batch runs formatted as a per-network table");
  std::vector<std::string> table_specs;
  std::string table_method = "monodromy", table_b = "uniform";
  int table_reps = 1;
  bool table_csv = false;
  CommonFlags table_flags;
  table->add_option("specs", table_specs, "Pairs of <family> <size-range>, e.g. complete 4..6");
  table->add_option("--method", table_method, "monodromy or totaldegree")
      ->check(CLI::IsMember({"monodromy", "totaldegree"}));
  table->add_option("--reps", table_reps, "Repetitions per network")->check(CLI::PositiveNumber);
  table->add_option("--b", table_b, "Susceptance mode per rep: unit or uniform");
  table->add_flag("--csv", table_csv, "Emit CSV instead of aligned text");
  table_flags.attach(table, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_file, solve_method, solve_flags, emit_solutions);
    if (verify->parsed()) return cmd_verify(verify_file, verify_flags);
    if (gen->parsed()) return cmd_gen(gen_family, gen_n, gen_mode, gen_flags);
    if (table->parsed())
      return cmd_table(table_specs, table_method, table_reps, table_b, table_flags, table_csv);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitUsage;
}
