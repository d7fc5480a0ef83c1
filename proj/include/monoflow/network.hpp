#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "monoflow/types.hpp"

namespace monoflow {

/// Undirected weighted network. Node 0 is the reference node (its voltage
/// phasor is pinned to x_0 = 1, y_0 = 0); the susceptance b of every line is
/// real, finite and nonzero.
class PowerNetwork {
 public:
  struct Edge {
    int k;
    int m;
    double b;
  };

  /// Validates on construction: dense indices 0..n-1, no self-loops, no
  /// duplicate lines in either orientation, nonzero finite susceptances,
  /// connected graph.
  PowerNetwork(int node_count, std::vector<Edge> edges);

  /// Parses the plain-text edge-list format: optional `#` comments, a header
  /// line `n <node-count>`, then one `<k> <m> <b>` line per edge.
  static PowerNetwork parse_text(const std::string& text);

  /// Parses the JSON form {"n": int, "edges": [[k, m, b], ...]}.
  static PowerNetwork parse_json(const std::string& text);

  /// Loads from disk, dispatching on the `.json` extension.
  static PowerNetwork load(const std::filesystem::path& path);

  std::string to_text() const;
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Per-node incidence: list of (neighbor, edge index).
  const std::vector<std::vector<std::pair<int, int>>>& adjacency() const { return adj_; }

  /// Susceptance vector in edge order.
  RVec susceptances() const;

  /// |E| == n-1 on a connected graph.
  bool is_tree() const { return edge_count() == n_ - 1; }

  /// True when no single vertex removal disconnects the graph.
  bool is_biconnected() const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

enum class NetworkFamily { Complete, Cycle, Path, Star };
enum class SusceptanceMode { Unit, Uniform, FixedSeed };

NetworkFamily parse_family(const std::string& name);
const char* family_name(NetworkFamily family);

/// Builds one of the stock topologies. Unit mode sets every b to 1; Uniform
/// draws b from [-2,2] excluding (-0.1,0.1) using `seed`; FixedSeed is the
/// same draw with a built-in constant seed.
PowerNetwork make_network(NetworkFamily family, int n, SusceptanceMode mode, std::uint64_t seed = 0);

/// One susceptance draw from the Uniform distribution above.
double draw_susceptance(std::mt19937_64& rng);

}  // namespace monoflow
