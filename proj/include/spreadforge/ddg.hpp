#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "canonical.hpp"
#include "graph.hpp"
#include "projgeom.hpp"
#include "spgraph.hpp"
#include "spreads.hpp"

// Divisible design graphs from symplectic and special spreads: the four
// constructions, exhaustive parameter certification, equitable quotients,
// side-assignment census, and recovery of the geometry from the adjacency
// relation alone.

namespace spreadforge::ddg {

using gf::Field;
using graph::Graph;
using geom::WGeometry;
using spreads::SpecialSpread;
using spreads::SymplecticSpread;

struct DdgParams {
  long long v = 0, k = 0, lambda1 = 0, lambda2 = 0, m = 0, n = 0;
  bool proper() const { return m > 1 && n > 1 && lambda1 != lambda2; }
  friend bool operator==(const DdgParams&, const DdgParams&) = default;
};

// ------------------------------------------------------ vertex partitions

struct VertexPartition {
  int n = 0;
  std::vector<std::vector<int>> classes;  // each sorted ascending
  std::vector<int> class_of;
};

inline VertexPartition make_partition(int n, std::vector<std::vector<int>> classes) {
  VertexPartition p;
  p.n = n;
  p.class_of.assign(n, -1);
  if (classes.empty()) throw std::invalid_argument("make_partition: no classes");
  for (size_t c = 0; c < classes.size(); ++c) {
    auto& cl = classes[c];
    if (cl.empty()) throw std::invalid_argument("make_partition: empty class");
    std::sort(cl.begin(), cl.end());
    for (int v : cl) {
      if (v < 0 || v >= n) throw std::invalid_argument("make_partition: vertex out of range");
      if (p.class_of[v] != -1) throw std::invalid_argument("make_partition: overlapping classes");
      p.class_of[v] = (int)c;
    }
  }
  for (int v = 0; v < n; ++v)
    if (p.class_of[v] == -1) throw std::invalid_argument("make_partition: uncovered vertex");
  p.classes = std::move(classes);
  return p;
}

// complement between different classes, keep each induced subgraph
inline Graph partial_complement(const Graph& g, const VertexPartition& pt) {
  if (pt.n != g.n) throw std::invalid_argument("partial_complement: size mismatch");
  Graph out(g.n);
  out.labels = g.labels;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) {
      bool e = pt.class_of[u] == pt.class_of[v] ? g.has(u, v) : !g.has(u, v);
      if (e) out.add_edge(u, v);
    }
  return out;
}

// ------------------------------------------------------ DDG certification

struct DdgCheck {
  bool ok = false;
  DdgParams params;
  bool proper = false;
  std::string witness;
};

// exhaustive pair audit: k-regular, same-class pairs share lambda1 common
// neighbors, cross-class pairs share lambda2
inline DdgCheck verify_ddg(const Graph& g, const VertexPartition& pt) {
  if (pt.n != g.n) throw std::invalid_argument("verify_ddg: size mismatch");
  size_t size = pt.classes[0].size();
  for (const auto& cl : pt.classes)
    if (cl.size() != size) throw std::invalid_argument("verify_ddg: unequal class sizes");

  DdgCheck out;
  out.params.v = g.n;
  out.params.m = (long long)pt.classes.size();
  out.params.n = (long long)size;
  out.params.k = g.n ? g.degree(0) : 0;
  for (int v = 0; v < g.n; ++v)
    if (g.degree(v) != out.params.k) {
      out.witness = "vertex " + std::to_string(v) + " has degree " +
                    std::to_string(g.degree(v)) + ", expected " + std::to_string(out.params.k);
      return out;
    }
  long long l1 = -1, l2 = -1;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) {
      long long c = g.common_neighbors(u, v);
      long long& ref = pt.class_of[u] == pt.class_of[v] ? l1 : l2;
      if (ref == -1) ref = c;
      if (c != ref) {
        out.witness = std::string(pt.class_of[u] == pt.class_of[v] ? "same" : "cross") +
                      "-class pair (" + std::to_string(u) + "," + std::to_string(v) + ") has " +
                      std::to_string(c) + " common neighbors, expected " + std::to_string(ref);
        return out;
      }
    }
  out.params.lambda1 = l1 == -1 ? 0 : l1;
  out.params.lambda2 = l2 == -1 ? 0 : l2;
  out.ok = true;
  out.proper = out.params.proper();
  return out;
}

// ------------------------------------------------------ equitable quotients

using QuotientMatrix = std::vector<std::vector<long long>>;

struct EquitableReport {
  bool equitable = false;
  QuotientMatrix quotient;
  std::string witness;
  bool has_theta = false;
  long long theta = 0;  // non-principal quotient eigenvalue of a 2-partition
};

inline EquitableReport is_equitable(const Graph& g, const VertexPartition& pt) {
  if (pt.n != g.n) throw std::invalid_argument("is_equitable: size mismatch");
  EquitableReport rep;
  size_t m = pt.classes.size();
  rep.quotient.assign(m, std::vector<long long>(m, -1));
  for (size_t j = 0; j < m; ++j) {
    std::vector<uint64_t> mask(g.words, 0);
    for (int v : pt.classes[j]) mask[v / 64] |= 1ull << (v % 64);
    for (int u = 0; u < g.n; ++u) {
      const uint64_t* row = g.row(u);
      long long c = 0;
      for (int w = 0; w < g.words; ++w) c += std::popcount(row[w] & mask[w]);
      long long& ref = rep.quotient[pt.class_of[u]][j];
      if (ref == -1) ref = c;
      if (c != ref) {
        rep.witness = "vertex " + std::to_string(u) + " of class " +
                      std::to_string(pt.class_of[u]) + " has " + std::to_string(c) +
                      " neighbors in class " + std::to_string(j) + ", another vertex has " +
                      std::to_string(ref);
        return rep;
      }
    }
  }
  rep.equitable = true;
  if (m == 2) {
    long long a = rep.quotient[0][0], b = rep.quotient[0][1];
    long long c = rep.quotient[1][0], d = rep.quotient[1][1];
    long long disc = (a - d) * (a - d) + 4 * b * c;
    long long r = (long long)std::max(0.0, std::sqrt((double)disc));
    while (r * r < disc) ++r;
    while (r > 0 && r * r > disc) --r;
    if (r * r == disc && (a + d - r) % 2 == 0) {
      rep.has_theta = true;
      rep.theta = (a + d - r) / 2;  // the smaller of the two eigenvalues
    }
  }
  return rep;
}

// ------------------------------------------------------ the constructions

struct DdgInstance {
  Graph graph;
  VertexPartition partition;
  DdgParams params;
};

inline DdgParams theorem1_params(long long q) {
  return {(q * q + 1) * (q + 1), q * q * q + q + 1, q * q * q - q * q + q + 1,
          q * q * q - q * q + 2 * q, q * q + 1, q + 1};
}

inline DdgParams theorem2_params(long long q) {
  return {(q * q + 1) * (q + 1),
          (q * q * q + q * q + 3 * q + 1) / 2,
          (q * q * q - q * q + 3 * q + 1) / 2,
          q * q + q,
          2,
          (q * q + 1) * (q + 1) / 2};
}

inline long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// degree formula corrected: the clique removal costs q^{e-1} per vertex,
// so k = q^e (q^{e-1} - 1)/(q - 1)
inline DdgParams theorem3_params(int e, long long q) {
  long long v = (ipow(q, 2 * e) - 1) / (q - 1);
  return {v,
          ipow(q, e) * (ipow(q, e - 1) - 1) / (q - 1),
          ipow(q, e) * (ipow(q, e - 2) - 1) / (q - 1),
          (ipow(q, e - 1) - 1) * (ipow(q, e - 1) - 1) / (q - 1),
          ipow(q, e) + 1,
          (ipow(q, e) - 1) / (q - 1)};
}

inline DdgParams theorem4_params(int e, long long q) {
  long long v = (ipow(q, 2 * e) - 1) / (q - 1);
  return {v,
          v / 2 - ipow(q, e - 1),
          v / 2 - ipow(q, 2 * e - 2) - ipow(q, e - 1),
          ipow(q, 2 * e - 2) - ipow(q, e - 1),
          2,
          v / 2};
}

// remove the complete bipartite graph between every spread line and its
// polar, then take the complement; classes are the individual spread lines
inline DdgInstance theorem1_graph(const WGeometry& w, const SpecialSpread& s) {
  Graph y = spgraph::sp_graph_of(w);
  for (const auto& pr : s.pairs())
    for (int a : w.lines.line_pts[pr.line])
      for (int b : w.lines.line_pts[pr.partner]) y.remove_edge(a, b);
  DdgInstance out{y.complement(), {}, theorem1_params(w.q)};
  std::vector<std::vector<int>> classes;
  for (int l : s.lines) classes.push_back(w.lines.line_pts[l]);
  out.partition = make_partition(y.n, std::move(classes));
  return out;
}

// side[i] routes pairs()[i]: 0 puts the line in V1, 1 its polar; the induced
// subgraphs on V1 and V2 are complemented, edges across are kept
inline DdgInstance theorem2_graph(const WGeometry& w, const SpecialSpread& s,
                                  const std::vector<int>& side) {
  auto pairs = s.pairs();
  if (side.size() != pairs.size())
    throw std::invalid_argument("theorem2_graph: one side bit per pair expected");
  std::vector<int> v1;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (side[i] != 0 && side[i] != 1)
      throw std::invalid_argument("theorem2_graph: side bits must be 0 or 1");
    const auto& pts = w.lines.line_pts[side[i] ? pairs[i].partner : pairs[i].line];
    v1.insert(v1.end(), pts.begin(), pts.end());
  }
  Graph g = spgraph::sp_graph_of(w);
  std::vector<int> v2;
  std::vector<char> in1(g.n, 0);
  for (int v : v1) in1[v] = 1;
  for (int v = 0; v < g.n; ++v)
    if (!in1[v]) v2.push_back(v);
  for (const auto& part : {v1, v2})
    for (size_t i = 0; i < part.size(); ++i)
      for (size_t j = i + 1; j < part.size(); ++j) {
        int a = part[i], b = part[j];
        if (g.has(a, b))
          g.remove_edge(a, b);
        else
          g.add_edge(a, b);
      }
  DdgInstance out{std::move(g), {}, theorem2_params(w.q)};
  out.partition = make_partition(out.graph.n, {v1, v2});
  return out;
}

// remove the edges of the spread cliques; classes are the cliques
inline DdgInstance theorem3_graph(int e, const Field& F, const SymplecticSpread& s) {
  if (s.e != e || s.q != F.q()) throw std::domain_error("theorem3_graph: spread/field mismatch");
  auto cert = spreads::verify_symplectic_spread(F, s);
  if (!cert.ok) throw std::domain_error("theorem3_graph: " + cert.witness);
  Graph g = spgraph::build_sp_graph(e, F);
  for (const auto& member : s.member_pts)
    for (size_t i = 0; i < member.size(); ++i)
      for (size_t j = i + 1; j < member.size(); ++j) g.remove_edge(member[i], member[j]);
  DdgInstance out{std::move(g), {}, theorem3_params(e, F.q())};
  out.partition = make_partition(out.graph.n, s.member_pts);
  return out;
}

// side[i] == 1 puts clique i into V1; both sides must hold (q^e+1)/2 cliques
inline DdgInstance theorem4_graph(int e, const Field& F, const SymplecticSpread& s,
                                  const std::vector<int>& side) {
  if (s.e != e || s.q != F.q()) throw std::domain_error("theorem4_graph: spread/field mismatch");
  if (F.q() % 2 == 0) throw std::domain_error("theorem4_graph: q must be odd");
  if (side.size() != s.member_pts.size())
    throw std::invalid_argument("theorem4_graph: one side bit per clique expected");
  long long ones = std::count(side.begin(), side.end(), 1);
  if (2 * ones != (long long)side.size())
    throw std::domain_error("theorem4_graph: assignment must split the cliques evenly");
  auto cert = spreads::verify_symplectic_spread(F, s);
  if (!cert.ok) throw std::domain_error("theorem4_graph: " + cert.witness);
  Graph g = spgraph::build_sp_graph(e, F);
  std::vector<int> v1, v2;
  for (size_t i = 0; i < side.size(); ++i) {
    auto& dst = side[i] ? v1 : v2;
    dst.insert(dst.end(), s.member_pts[i].begin(), s.member_pts[i].end());
  }
  for (const auto& part : {v1, v2})
    for (size_t i = 0; i < part.size(); ++i)
      for (size_t j = i + 1; j < part.size(); ++j) {
        int a = part[i], b = part[j];
        if (g.has(a, b))
          g.remove_edge(a, b);
        else
          g.add_edge(a, b);
      }
  DdgInstance out{std::move(g), {}, theorem4_params(e, F.q())};
  out.partition = make_partition(out.graph.n, {v1, v2});
  return out;
}

// ------------------------------------------- Theorem 2 isomorphism census

struct Theorem2Class {
  std::vector<int> side;  // representative assignment
  canon::CanonicalForm cert;
  long long count = 0;  // assignments that land in this class
};

struct Theorem2Census {
  long long assignments = 0;
  std::vector<Theorem2Class> classes;
};

// all 2^{(q^2+1)/2 - 1} side assignments (the global V1/V2 swap is fixed by
// pinning the first pair), bucketed by an invariant fingerprint, buckets then
// resolved into isomorphism classes by canonical form; the per-assignment
// fingerprint and certificate computations fan out over `threads` workers
inline Theorem2Census enumerate_theorem2_graphs(const WGeometry& w, const SpecialSpread& s,
                                                int threads = 1) {
  size_t p = s.pairs().size();
  if (threads < 1) throw std::invalid_argument("enumerate_theorem2_graphs: threads < 1");
  Theorem2Census census;
  census.assignments = 1ll << (p - 1);
  size_t total = (size_t)census.assignments;

  auto side_of = [p](long long a) {
    std::vector<int> side(p, 0);
    for (size_t i = 1; i < p; ++i) side[i] = (int)((a >> (i - 1)) & 1);
    return side;
  };

  std::vector<uint64_t> fps(total);
  std::vector<canon::CanonicalForm> certs(total);
  auto work = [&](size_t lane, size_t stride) {
    for (size_t a = lane; a < total; a += stride) {
      Graph g = theorem2_graph(w, s, side_of((long long)a)).graph;
      fps[a] = canon::invariant_fingerprint(g);
      certs[a] = canon::canonical_form(g);
    }
  };
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, (size_t)t, (size_t)threads);
    for (auto& th : pool) th.join();
  }

  std::map<uint64_t, std::vector<size_t>> buckets;
  for (size_t a = 0; a < total; ++a) buckets[fps[a]].push_back(a);
  for (auto& [fp, members] : buckets) {
    std::vector<size_t> reps;
    for (size_t a : members) {
      size_t home = census.classes.size();
      for (size_t r : reps)
        if (census.classes[r].cert == certs[a]) {
          home = r;
          break;
        }
      if (home < census.classes.size()) {
        census.classes[home].count += 1;
      } else {
        reps.push_back(census.classes.size());
        census.classes.push_back({side_of((long long)a), std::move(certs[a]), 1});
      }
    }
  }
  std::sort(census.classes.begin(), census.classes.end(),
            [](const Theorem2Class& a, const Theorem2Class& b) { return a.cert < b.cert; });
  return census;
}

// --------------------------------------- geometry recovery from adjacency

struct Reconstruction {
  int q = 0;
  std::vector<std::vector<int>> symplectic_lines;  // all totally isotropic lines
  std::vector<std::vector<int>> hyperbolic_lines;  // the special spread classes
  std::vector<int> partner;                        // polar class index
};

namespace detail {

[[noreturn]] inline void fail(const std::string& stage, const std::string& what) {
  throw std::runtime_error("reconstruct[" + stage + "]: " + what);
}

}  // namespace detail

// Rebuilds the geometry from the complement of a Theorem 1 graph. Pairs
// inside one spread line are the only ones with no common neighbors, which
// yields the classes; a class has no edges toward its polar class only, which
// yields the pairing; restoring those complete bipartite graphs recovers the
// point graph of the polar space, whose local cliques are the isotropic
// lines. Every structural claim is checked, with a staged witness on failure.
inline Reconstruction reconstruct(const Graph& y) {
  Reconstruction out;
  if (y.n == 0) detail::fail("degree", "empty graph");
  long long kp = y.degree(0);
  for (int v = 0; v < y.n; ++v)
    if (y.degree(v) != kp)
      detail::fail("degree", "vertex " + std::to_string(v) + " has degree " +
                                 std::to_string(y.degree(v)) + ", vertex 0 has " +
                                 std::to_string(kp));
  long long q = 0;
  while (q * q < kp + 1) ++q;
  if (q * q != kp + 1 || q < 3 || q % 2 == 0)
    detail::fail("degree", "degree " + std::to_string(kp) + " is not q^2-1 for odd q >= 3");
  out.q = (int)q;
  if ((long long)y.n != (q * q + 1) * (q + 1))
    detail::fail("degree", std::to_string(y.n) + " vertices, expected " +
                               std::to_string((q * q + 1) * (q + 1)));

  // classes: the zero-common-neighbor relation on non-adjacent pairs
  std::vector<int> class_of(y.n, -1);
  for (int u = 0; u < y.n; ++u) {
    if (class_of[u] == -1) {
      class_of[u] = (int)out.hyperbolic_lines.size();
      out.hyperbolic_lines.push_back({u});
    }
    for (int v = u + 1; v < y.n; ++v) {
      if (y.has(u, v) || y.common_neighbors(u, v) != 0) continue;
      if (class_of[v] == -1) {
        class_of[v] = class_of[u];
        out.hyperbolic_lines[class_of[u]].push_back(v);
      } else if (class_of[v] != class_of[u]) {
        detail::fail("classes", "zero-common relation is not transitive at (" +
                                    std::to_string(u) + "," + std::to_string(v) + ")");
      }
    }
  }
  if ((long long)out.hyperbolic_lines.size() != q * q + 1)
    detail::fail("classes", std::to_string(out.hyperbolic_lines.size()) + " classes, expected " +
                                std::to_string(q * q + 1));
  for (const auto& cl : out.hyperbolic_lines) {
    if ((long long)cl.size() != q + 1)
      detail::fail("classes", "class of size " + std::to_string(cl.size()) + ", expected " +
                                  std::to_string(q + 1));
    for (size_t i = 0; i < cl.size(); ++i)
      for (size_t j = i + 1; j < cl.size(); ++j)
        if (y.has(cl[i], cl[j]) || y.common_neighbors(cl[i], cl[j]) != 0)
          detail::fail("classes", "pair (" + std::to_string(cl[i]) + "," +
                                      std::to_string(cl[j]) +
                                      ") joined a class without the zero-common relation");
  }

  // pairing: exactly one other class receives no edges
  int m = (int)out.hyperbolic_lines.size();
  out.partner.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      bool any = false;
      for (int u : out.hyperbolic_lines[i]) {
        for (int v : out.hyperbolic_lines[j])
          if (y.has(u, v)) {
            any = true;
            break;
          }
        if (any) break;
      }
      if (!any) {
        if (out.partner[i] != -1)
          detail::fail("pairing", "class " + std::to_string(i) + " isolated from classes " +
                                      std::to_string(out.partner[i]) + " and " + std::to_string(j));
        out.partner[i] = j;
      }
    }
    if (out.partner[i] == -1)
      detail::fail("pairing", "class " + std::to_string(i) + " has edges to every other class");
  }
  for (int i = 0; i < m; ++i)
    if (out.partner[out.partner[i]] != i)
      detail::fail("pairing", "pairing is not an involution at class " + std::to_string(i));

  // restore the complete bipartite graphs between polar classes
  Graph sp = y;
  for (int i = 0; i < m; ++i) {
    if (out.partner[i] < i) continue;
    for (int u : out.hyperbolic_lines[i])
      for (int v : out.hyperbolic_lines[out.partner[i]]) sp.add_edge(u, v);
  }
  for (int v = 0; v < sp.n; ++v)
    if (sp.degree(v) != q * (q + 1))
      detail::fail("point graph", "vertex " + std::to_string(v) + " has degree " +
                                      std::to_string(sp.degree(v)) + ", expected " +
                                      std::to_string(q * (q + 1)));

  // lines through x = connected components of its restored local graph
  std::set<std::vector<int>> lines;
  std::vector<int> nbrs;
  for (int x = 0; x < sp.n; ++x) {
    nbrs.clear();
    for (int v = 0; v < sp.n; ++v)
      if (sp.has(x, v)) nbrs.push_back(v);
    Graph local = graph::induced(sp, nbrs);
    auto comps = graph::connected_components(local);
    if ((long long)comps.size() != q + 1)
      detail::fail("lines", "vertex " + std::to_string(x) + " has " +
                                std::to_string(comps.size()) + " local components, expected " +
                                std::to_string(q + 1));
    for (const auto& comp : comps) {
      if ((long long)comp.size() != q)
        detail::fail("lines", "local component of size " + std::to_string(comp.size()) +
                                  " at vertex " + std::to_string(x) + ", expected " +
                                  std::to_string(q));
      std::vector<int> line{x};
      for (int i : comp) {
        for (int j : comp)
          if (i != j && !local.has(i, j))
            detail::fail("lines", "local component at vertex " + std::to_string(x) +
                                      " is not a clique");
        line.push_back(nbrs[i]);
      }
      std::sort(line.begin(), line.end());
      lines.insert(std::move(line));
    }
  }
  if ((long long)lines.size() != (q * q + 1) * (q + 1))
    detail::fail("lines", std::to_string(lines.size()) + " lines recovered, expected " +
                              std::to_string((q * q + 1) * (q + 1)));
  out.symplectic_lines.assign(lines.begin(), lines.end());

  // polar classes reappear as the non-edges of restored pairs: for u the set
  // of new neighbors is exactly the polar line of its class
  for (int u = 0; u < y.n; ++u) {
    std::vector<int> t;
    for (int v = 0; v < y.n; ++v)
      if (sp.has(u, v) && !y.has(u, v)) t.push_back(v);
    if (t != out.hyperbolic_lines[out.partner[class_of[u]]])
      detail::fail("polar", "restored neighbors of vertex " + std::to_string(u) +
                                " do not match the polar class");
  }
  return out;
}

}  // namespace spreadforge::ddg
