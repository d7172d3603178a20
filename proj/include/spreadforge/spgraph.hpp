#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadforge/graph.hpp"
#include "spreadforge/projgeom.hpp"

// Collinearity graphs of symplectic polar spaces, strong regularity
// certification, integer spectra, and tight negative eigenfunctions.

namespace spreadforge::spgraph {

using geom::WGeometry;
using gf::Field;
using graph::Graph;

struct SrgParams {
  int v = 0, k = 0, lambda = 0, mu = 0;
};

struct SrgCheck {
  bool ok = false;
  SrgParams params;
  std::string witness;
};

// vertices = points of PG(2e-1,q), adjacency = distinct perpendicular points
inline Graph build_sp_graph(int e, const Field& F) {
  if (e < 2) throw std::invalid_argument("build_sp_graph: e < 2");
  geom::PointTable pt(F, 2 * e - 1);
  geom::SymplecticForm J = geom::SymplecticForm::standard(F, 2 * e);
  Graph g(pt.size());
  g.labels.resize(pt.size());
  for (int v = 0; v < pt.size(); ++v) g.labels[v] = v;
  for (int a = 0; a < pt.size(); ++a)
    for (int b = a + 1; b < pt.size(); ++b)
      if (J.eval(F, pt.point(a), pt.point(b)) == F.zero()) g.add_edge(a, b);
  return g;
}

inline Graph sp_graph_of(const WGeometry& w) {
  Graph g(w.pts.size());
  g.labels.resize(g.n);
  for (int v = 0; v < g.n; ++v) g.labels[v] = v;
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      if (w.adjacent(a, b)) g.add_edge(a, b);
  return g;
}

// brute-force common-neighbor audit over every vertex pair
inline SrgCheck verify_srg(const Graph& g) {
  SrgCheck out;
  if (g.n < 2) {
    out.witness = "fewer than two vertices";
    return out;
  }
  int k = g.degree(0);
  for (int v = 1; v < g.n; ++v)
    if (g.degree(v) != k) {
      out.witness = "not regular: vertex " + std::to_string(v) + " has degree " +
                    std::to_string(g.degree(v)) + ", vertex 0 has " + std::to_string(k);
      return out;
    }
  if (k == 0 || k == g.n - 1) {
    out.witness = k == 0 ? "empty graph" : "complete graph";
    return out;
  }
  int lambda = -1, mu = -1;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) {
      int c = g.common_neighbors(u, v);
      int& ref = g.has(u, v) ? lambda : mu;
      if (ref < 0) ref = c;
      if (ref != c) {
        out.witness = std::string(g.has(u, v) ? "adjacent" : "non-adjacent") + " pair (" +
                      std::to_string(u) + "," + std::to_string(v) + ") has " + std::to_string(c) +
                      " common neighbors, expected " + std::to_string(ref);
        return out;
      }
    }
  out.ok = true;
  out.params = {g.n, k, lambda, mu};
  return out;
}

inline SrgParams require_srg(const Graph& g) {
  SrgCheck c = verify_srg(g);
  if (!c.ok) throw std::runtime_error("require_srg: " + c.witness);
  return c.params;
}

struct SpectrumReport {
  int r = 0, s = 0, delta = 0;
  long long m_r = 0, m_s = 0;
  long long modified[3][3] = {};  // rows: (1, k, v-1-k), (m_r, r, -1-r), (m_s, s, -1-s)
};

inline SpectrumReport srg_spectrum(const SrgParams& p) {
  if (p.mu == p.k || p.mu == 0)
    throw std::domain_error("srg_spectrum: imprimitive parameters");
  long long d2 = (long long)(p.lambda - p.mu) * (p.lambda - p.mu) + 4ll * (p.k - p.mu);
  long long d = 0;
  while (d * d < d2) ++d;
  if (d * d != d2) throw std::domain_error("srg_spectrum: irrational eigenvalues");
  SpectrumReport rep;
  rep.delta = (int)d;
  rep.r = (int)((p.lambda - p.mu + d) / 2);
  rep.s = (int)((p.lambda - p.mu - d) / 2);
  rep.m_r = -((long long)(p.v - 1) * rep.s + p.k) / d;
  rep.m_s = ((long long)(p.v - 1) * rep.r + p.k) / d;
  if (1 + rep.m_r + rep.m_s != p.v || p.k + rep.m_r * rep.r + rep.m_s * rep.s != 0)
    throw std::domain_error("srg_spectrum: trace identities fail");
  long long m[3][3] = {{1, p.k, p.v - 1 - p.k},
                       {rep.m_r, rep.r, -1 - rep.r},
                       {rep.m_s, rep.s, -1 - rep.s}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rep.modified[i][j] = m[i][j];
  return rep;
}

struct EigenFunction {
  std::vector<long long> values;
  long long theta = 0;

  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < (int)values.size(); ++i)
      if (values[i] != 0) s.push_back(i);
    return s;
  }
};

// theta f(u) = sum of f over the neighbors of u, exactly, at every vertex
inline bool check_eigenfunction(const Graph& g, const EigenFunction& f) {
  if ((int)f.values.size() != g.n)
    throw std::invalid_argument("check_eigenfunction: size mismatch");
  bool nonzero = false;
  for (auto v : f.values)
    if (v != 0) nonzero = true;
  if (!nonzero) throw std::domain_error("check_eigenfunction: zero function");
  for (int u = 0; u < g.n; ++u) {
    long long sum = 0;
    for (int v = 0; v < g.n; ++v)
      if (g.has(u, v)) sum += f.values[v];
    if (sum != f.theta * f.values[u]) return false;
  }
  return true;
}

// +1 on one line of an orthogonal hyperbolic pair, -1 on its polar line;
// support 2(q+1) meets the weight-distribution bound with theta = -(q+1)
inline EigenFunction build_wd_eigenfunction(const WGeometry& w, const geom::HyperbolicPair& pair) {
  if (pair.line < 0 || pair.line >= w.lines.size() || w.line_isotropic[pair.line] ||
      w.line_polar[pair.line] != pair.partner)
    throw std::domain_error("build_wd_eigenfunction: not an orthogonal hyperbolic pair");
  EigenFunction f;
  f.values.assign(w.pts.size(), 0);
  f.theta = -(w.q + 1);
  for (int id : w.lines.line_pts[pair.line]) f.values[id] = 1;
  for (int id : w.lines.line_pts[pair.partner]) f.values[id] = -1;
  return f;
}

}  // namespace spreadforge::spgraph
