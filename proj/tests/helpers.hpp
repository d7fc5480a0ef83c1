#pragma once

#include <random>

#include "monoflow/network.hpp"
#include "monoflow/system.hpp"
#include "monoflow/types.hpp"

namespace testutil {

using monoflow::Complex;
using monoflow::CVec;
using monoflow::RVec;

inline CVec random_cvec(int n, std::mt19937_64& rng, double radius = 2.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(u(rng), u(rng));
  return v;
}

inline RVec random_susceptances(const monoflow::PowerNetwork& net, std::mt19937_64& rng) {
  RVec b(net.edge_count());
  for (int e = 0; e < net.edge_count(); ++e) b[e] = monoflow::draw_susceptance(rng);
  return b;
}

inline monoflow::PowerNetwork complete(int n) {
  return monoflow::make_network(monoflow::NetworkFamily::Complete, n, monoflow::SusceptanceMode::Unit);
}

inline monoflow::PowerNetwork cycle(int n) {
  return monoflow::make_network(monoflow::NetworkFamily::Cycle, n, monoflow::SusceptanceMode::Unit);
}

inline monoflow::PowerNetwork path(int n) {
  return monoflow::make_network(monoflow::NetworkFamily::Path, n, monoflow::SusceptanceMode::Unit);
}

inline monoflow::PowerNetwork star(int n) {
  return monoflow::make_network(monoflow::NetworkFamily::Star, n, monoflow::SusceptanceMode::Unit);
}

/// Straightforward re-evaluation of the power flow equations, written
/// independently of the library path (dense susceptance lookup, sum over all
/// node pairs). Double-entry bookkeeping for the evaluation tests.
inline CVec naive_evaluate(const monoflow::PowerNetwork& net, const CVec& b, const CVec& z) {
  const int n = net.node_count();
  const int half = n - 1;
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
  for (int e = 0; e < net.edge_count(); ++e) {
    const auto& ed = net.edges()[e];
    B(ed.k, ed.m) = b[e];
    B(ed.m, ed.k) = b[e];
  }
  CVec x(n), y(n);
  x[0] = Complex(1, 0);
  y[0] = Complex(0, 0);
  for (int k = 1; k < n; ++k) {
    x[k] = z[k - 1];
    y[k] = z[half + k - 1];
  }
  CVec r(2 * half);
  for (int k = 1; k < n; ++k) {
    r[k - 1] = x[k] * x[k] + y[k] * y[k] - 1.0;
    Complex acc(0, 0);
    for (int m = 0; m < n; ++m) acc += B(k, m) * (x[k] * y[m] - x[m] * y[k]);
    r[half + k - 1] = acc;  // P_k = 0
  }
  return r;
}

}  // namespace testutil
