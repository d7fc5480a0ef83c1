#include "monoflow/system.hpp"

#include <cmath>

#include "monoflow/errors.hpp"

namespace monoflow {

PowerFlowSystem::PowerFlowSystem(PowerNetwork net) : net_(std::move(net)) {
  injections_ = RVec::Zero(net_.node_count() - 1);
}

CVec PowerFlowSystem::target_susceptances() const {
  return net_.susceptances().cast<Complex>();
}

void PowerFlowSystem::check_dims(const CVec& b, const CVec& z) const {
  if (z.size() != dim())
    throw DimensionError("point has size " + std::to_string(z.size()) + ", system has " +
                         std::to_string(dim()) + " variables");
  if (b.size() != net_.edge_count())
    throw DimensionError("susceptance vector has size " + std::to_string(b.size()) + ", network has " +
                         std::to_string(net_.edge_count()) + " edges");
}

// x_0 = 1 and y_0 = 0 are constants; variables start at node 1.
namespace {
inline Complex xval(const CVec& z, int node) {
  return node == 0 ? Complex(1.0, 0.0) : z[node - 1];
}
inline Complex yval(const CVec& z, int node, int half) {
  return node == 0 ? Complex(0.0, 0.0) : z[half + node - 1];
}
}  // namespace

CVec PowerFlowSystem::evaluate(const CVec& b, const CVec& z) const {
  check_dims(b, z);
  const int half = dim() / 2;
  CVec r(dim());
  for (int k = 1; k <= half; ++k) {
    const Complex x = z[k - 1];
    const Complex y = z[half + k - 1];
    r[k - 1] = x * x + y * y - 1.0;
    r[half + k - 1] = -injections_[k - 1];
  }
  for (int e = 0; e < net_.edge_count(); ++e) {
    const auto& ed = net_.edges()[e];
    const Complex w = xval(z, ed.k) * yval(z, ed.m, half) -
                      xval(z, ed.m) * yval(z, ed.k, half);
    if (ed.k != 0) r[half + ed.k - 1] += b[e] * w;
    if (ed.m != 0) r[half + ed.m - 1] -= b[e] * w;  // antisymmetric seen from m
  }
  return r;
}

CVec PowerFlowSystem::balance_part(const CVec& db, const CVec& z) const {
  check_dims(db, z);
  const int half = dim() / 2;
  CVec r = CVec::Zero(dim());
  for (int e = 0; e < net_.edge_count(); ++e) {
    if (db[e] == Complex(0.0, 0.0)) continue;
    const auto& ed = net_.edges()[e];
    const Complex w = xval(z, ed.k) * yval(z, ed.m, half) -
                      xval(z, ed.m) * yval(z, ed.k, half);
    if (ed.k != 0) r[half + ed.k - 1] += db[e] * w;
    if (ed.m != 0) r[half + ed.m - 1] -= db[e] * w;
  }
  return r;
}

CMat PowerFlowSystem::jacobian(const CVec& b, const CVec& z) const {
  check_dims(b, z);
  const int half = dim() / 2;
  CMat J = CMat::Zero(dim(), dim());
  for (int k = 1; k <= half; ++k) {
    J(k - 1, k - 1) = 2.0 * z[k - 1];
    J(k - 1, half + k - 1) = 2.0 * z[half + k - 1];
  }
  // Balance row at node k: sum over incident edges of b (x_k y_m - x_m y_k).
  for (int e = 0; e < net_.edge_count(); ++e) {
    const auto& ed = net_.edges()[e];
    for (const auto& [self, other] : {std::pair{ed.k, ed.m}, std::pair{ed.m, ed.k}}) {
      if (self == 0) continue;
      const int row = half + self - 1;
      const Complex xo = xval(z, other);
      const Complex yo = yval(z, other, half);
      J(row, self - 1) += b[e] * yo;          // d/dx_self
      J(row, half + self - 1) += -b[e] * xo;  // d/dy_self
      if (other != 0) {
        J(row, other - 1) += -b[e] * yval(z, self, half);        // d/dx_other
        J(row, half + other - 1) += b[e] * xval(z, self);  // d/dy_other
      }
    }
  }
  return J;
}

unsigned long long trivial_solution_count(const PowerNetwork& net) {
  const int exp = net.node_count() - 1;
  if (exp > 62) throw ValidationError("trivial solution count overflows 64 bits for n > 63");
  return 1ULL << exp;
}

std::vector<Solution> enumerate_trivial_solutions(const PowerFlowSystem& sys, int cap_exponent) {
  const int half = sys.dim() / 2;
  if (half > cap_exponent)
    throw ValidationError("refusing to materialize 2^" + std::to_string(half) +
                          " trivial solutions (cap is 2^" + std::to_string(cap_exponent) + ")");
  const unsigned long long count = 1ULL << half;
  std::vector<Solution> out;
  out.reserve(count);
  for (unsigned long long pattern = 0; pattern < count; ++pattern) {
    Solution s;
    s.z = CVec::Zero(2 * half);
    for (int k = 0; k < half; ++k)
      s.z[k] = ((pattern >> k) & 1ULL) ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
    s.residual = 0.0;  // exact: every balance term carries a factor y = 0
    s.is_trivial = true;
    s.is_real = true;
    out.push_back(std::move(s));
  }
  return out;
}

bool near_trivial(const CVec& z, double tol) {
  const Eigen::Index half = z.size() / 2;
  for (Eigen::Index k = 0; k < half; ++k) {
    const Complex x = z[k];
    const Complex y = z[half + k];
    if (std::abs(y) > tol) return false;
    if (std::abs(x - 1.0) > tol && std::abs(x + 1.0) > tol) return false;
  }
  return true;
}

Solution classify_solution(const PowerFlowSystem& sys, const CVec& b, CVec z,
                           double trivial_tol, double real_tol) {
  Solution s;
  s.residual = inf_norm(sys.evaluate(b, z));
  s.is_trivial = near_trivial(z, trivial_tol);
  double max_imag = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) max_imag = std::max(max_imag, std::abs(z[i].imag()));
  s.is_real = max_imag < real_tol;
  s.z = std::move(z);
  return s;
}

}  // namespace monoflow
