#include "monoflow/symmetry.hpp"

#include <deque>

#include "monoflow/errors.hpp"

namespace monoflow {

Bipartition detect_bipartition(const PowerNetwork& net) {
  const int n = net.node_count();
  std::vector<int> color(n, -1);
  std::deque<int> queue{0};
  color[0] = 0;  // reference node on side T
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [w, e] : net.adjacency()[v]) {
      if (color[w] == -1) {
        color[w] = 1 - color[v];
        queue.push_back(w);
      } else if (color[w] == color[v]) {
        return {};  // odd cycle
      }
    }
  }
  Bipartition bip;
  bip.present = true;
  bip.side.assign(color.begin(), color.end());
  return bip;
}

CVec SignMap::apply(const CVec& z) const {
  const Eigen::Index half = sign_x.size();
  CVec out(z.size());
  out.head(half).array() = z.head(half).array() * sign_x.cast<Complex>();
  out.tail(half).array() = z.tail(half).array() * sign_y.cast<Complex>();
  return out;
}

bool SignMap::is_identity() const {
  return (sign_x > 0).all() && (sign_y > 0).all();
}

SymmetryGroup SymmetryGroup::build(const Bipartition& bip, int node_count) {
  const int half = node_count - 1;
  const Eigen::ArrayXd plus = Eigen::ArrayXd::Ones(half);
  SymmetryGroup g;
  g.elems_.push_back({plus, plus, "id"});
  g.elems_.push_back({plus, -plus, "negate-y"});
  if (bip.present) {
    Eigen::ArrayXd s_mask(half);  // +1 on T, -1 on S, for nodes 1..n-1
    for (int k = 1; k < node_count; ++k) s_mask[k - 1] = bip.side[k] == 1 ? -1.0 : 1.0;
    g.elems_.push_back({s_mask, -s_mask, "negate-x(S),y(T)"});
    g.elems_.push_back({s_mask, s_mask, "negate-x(S),y(S)"});
  }
  return g;
}

SymmetryGroup SymmetryGroup::for_network(const PowerNetwork& net) {
  return build(detect_bipartition(net), net.node_count());
}

bool lex_less_tol(const CVec& a, const CVec& b, double tol) {
  if (a.size() != b.size()) throw DimensionError("lex_less_tol: size mismatch");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() < b[i].real() - tol) return true;
    if (a[i].real() > b[i].real() + tol) return false;
    if (a[i].imag() < b[i].imag() - tol) return true;
    if (a[i].imag() > b[i].imag() + tol) return false;
  }
  return false;
}

CanonicalForm canonicalize(const CVec& z, const SymmetryGroup& group, double lex_tol,
                           double orbit_tol) {
  std::vector<CVec> images;
  images.reserve(group.order());
  for (int i = 0; i < group.order(); ++i) images.push_back(group.apply(i, z));

  int best = 0;
  for (int i = 1; i < static_cast<int>(images.size()); ++i)
    if (lex_less_tol(images[i], images[best], lex_tol)) best = i;

  int distinct = 0;
  for (int i = 0; i < static_cast<int>(images.size()); ++i) {
    bool fresh = true;
    for (int j = 0; j < i && fresh; ++j)
      if (inf_dist(images[i], images[j]) <= orbit_tol) fresh = false;
    if (fresh) ++distinct;
  }
  return {std::move(images[best]), distinct};
}

std::vector<CVec> orbit_members(const CVec& z, const SymmetryGroup& group, double orbit_tol) {
  const CanonicalForm canon = canonicalize(z, group, 1e-9, orbit_tol);
  std::vector<CVec> members{canon.representative};
  for (int i = 0; i < group.order(); ++i) {
    CVec img = group.apply(i, canon.representative);
    bool fresh = true;
    for (const CVec& m : members)
      if (inf_dist(img, m) <= orbit_tol) {
        fresh = false;
        break;
      }
    if (fresh) members.push_back(std::move(img));
  }
  return members;
}

}  // namespace monoflow
