#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monoflow/network.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

/// Two-coloring of the nodes, when one exists. Side T always contains the
/// reference node 0 so the fixed constant x_0 = 1 never gets negated.
struct Bipartition {
  bool present = false;
  std::vector<std::uint8_t> side;  // per node, 1 = S, 0 = T; empty when !present

  bool in_s(int node) const { return present && side[node] == 1; }
};

/// Breadth-first 2-coloring with node 0 forced to T.
Bipartition detect_bipartition(const PowerNetwork& net);

/// One coordinatewise sign map (sx, sy) acting on z = (x, y).
struct SignMap {
  Eigen::ArrayXd sign_x;  // entries +-1, length n-1
  Eigen::ArrayXd sign_y;
  std::string label;

  CVec apply(const CVec& z) const;
  bool is_identity() const;
};

/// The solution symmetry group: {id, y-negation} for every network, extended
/// to a Klein four-group on bipartite networks by the maps that negate x on S
/// together with y on T, and x on S together with y on S. Every element is an
/// involution and the set is closed under composition.
class SymmetryGroup {
 public:
  static SymmetryGroup build(const Bipartition& bip, int node_count);
  static SymmetryGroup for_network(const PowerNetwork& net);

  int order() const { return static_cast<int>(elems_.size()); }
  const std::vector<SignMap>& elements() const { return elems_; }
  const SignMap& element(int i) const { return elems_[i]; }
  CVec apply(int i, const CVec& z) const { return elems_[i].apply(z); }

 private:
  std::vector<SignMap> elems_;
};

/// Tolerant lexicographic order on the flattened coordinate sequence,
/// comparing real then imaginary part of each entry; entries within tol are
/// treated as ties.
bool lex_less_tol(const CVec& a, const CVec& b, double tol);

struct CanonicalForm {
  CVec representative;  // lexicographic minimum over the orbit
  int orbit_size;       // distinct orbit members at orbit_tol (1, 2 or 4)
};

CanonicalForm canonicalize(const CVec& z, const SymmetryGroup& group, double lex_tol = 1e-9,
                           double orbit_tol = 1e-6);

/// All distinct orbit members at orbit_tol, representative first.
std::vector<CVec> orbit_members(const CVec& z, const SymmetryGroup& group, double orbit_tol = 1e-6);

}  // namespace monoflow
