#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Dense undirected graphs on bitset rows, plus graph6 text encoding.

namespace spreadforge::graph {

struct Graph {
  int n = 0, words = 0;
  std::vector<uint64_t> bits;
  std::vector<int32_t> labels;  // optional: vertex id -> external id

  Graph() = default;
  explicit Graph(int n_in) : n(n_in), words((n_in + 63) / 64), bits((size_t)n_in * words) {}

  uint64_t* row(int v) { return bits.data() + (size_t)v * words; }
  const uint64_t* row(int v) const { return bits.data() + (size_t)v * words; }

  bool has(int u, int v) const { return (row(u)[v / 64] >> (v % 64)) & 1; }

  void add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("Graph::add_edge: loop");
    row(u)[v / 64] |= 1ull << (v % 64);
    row(v)[u / 64] |= 1ull << (u % 64);
  }

  void remove_edge(int u, int v) {
    row(u)[v / 64] &= ~(1ull << (v % 64));
    row(v)[u / 64] &= ~(1ull << (u % 64));
  }

  int degree(int v) const {
    int d = 0;
    for (int w = 0; w < words; ++w) d += std::popcount(row(v)[w]);
    return d;
  }

  long long edge_count() const {
    long long total = 0;
    for (int v = 0; v < n; ++v) total += degree(v);
    return total / 2;
  }

  int common_neighbors(int u, int v) const {
    int c = 0;
    for (int w = 0; w < words; ++w) c += std::popcount(row(u)[w] & row(v)[w]);
    return c;
  }

  Graph complement() const {
    Graph g(n);
    g.labels = labels;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (!has(u, v)) g.add_edge(u, v);
    return g;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n == b.n && a.bits == b.bits;
  }
};

// perm[v] = new position of v
inline Graph relabel(const Graph& g, const std::vector<int>& perm) {
  Graph h(g.n);
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v)
      if (g.has(u, v)) h.add_edge(perm[u], perm[v]);
  return h;
}

inline Graph induced(const Graph& g, const std::vector<int>& verts) {
  Graph h((int)verts.size());
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t j = i + 1; j < verts.size(); ++j)
      if (g.has(verts[i], verts[j])) h.add_edge((int)i, (int)j);
  return h;
}

inline std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::vector<int> comp(g.n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s}, members;
    comp[s] = (int)out.size();
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int u = 0; u < g.n; ++u)
        if (comp[u] < 0 && g.has(v, u)) {
          comp[u] = comp[s];
          stack.push_back(u);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

// ---------------------------------------------------------------- graph6

inline std::string to_graph6(const Graph& g) {
  if (g.n > 258047) throw std::invalid_argument("to_graph6: too many vertices");
  std::string s;
  if (g.n <= 62) {
    s.push_back((char)(g.n + 63));
  } else {
    s.push_back('~');
    s.push_back((char)(((g.n >> 12) & 63) + 63));
    s.push_back((char)(((g.n >> 6) & 63) + 63));
    s.push_back((char)((g.n & 63) + 63));
  }
  int acc = 0, nbits = 0;
  for (int v = 1; v < g.n; ++v)
    for (int u = 0; u < v; ++u) {
      acc = (acc << 1) | (g.has(u, v) ? 1 : 0);
      if (++nbits == 6) {
        s.push_back((char)(acc + 63));
        acc = 0;
        nbits = 0;
      }
    }
  if (nbits > 0) s.push_back((char)((acc << (6 - nbits)) + 63));
  return s;
}

inline Graph from_graph6(const std::string& s) {
  size_t pos = 0;
  auto next = [&]() -> int {
    if (pos >= s.size()) throw std::invalid_argument("from_graph6: truncated");
    int c = (unsigned char)s[pos++] - 63;
    if (c < 0 || c > 63) throw std::invalid_argument("from_graph6: bad character");
    return c;
  };
  long long n;
  int c0 = next();
  if (c0 < 63) {
    n = c0;
  } else {
    long long a = next(), b = next(), c = next();
    n = (a << 12) | (b << 6) | c;
  }
  Graph g((int)n);
  int acc = 0, nbits = 0;
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) {
      if (nbits == 0) {
        acc = next();
        nbits = 6;
      }
      if ((acc >> (nbits - 1)) & 1) g.add_edge(u, v);
      --nbits;
    }
  return g;
}

}  // namespace spreadforge::graph
