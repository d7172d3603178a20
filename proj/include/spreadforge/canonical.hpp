#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"

// Canonical graph labeling by equitable refinement with vertex
// individualization. The certificate is the maximum, over the backtrack
// leaves that survive invariant and automorphism pruning, of the refinement
// trace followed by the relabeled adjacency rows. Two graphs are isomorphic
// exactly when their certificates are equal.

namespace spreadforge::canon {

using graph::Graph;

struct CanonicalForm {
  int n = 0;
  std::vector<uint64_t> trace;
  std::vector<uint64_t> bits;  // relabeled adjacency rows, g.words words per row
  std::vector<int> labeling;   // original vertex -> canonical position

  friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
    return a.n == b.n && a.trace == b.trace && a.bits == b.bits;
  }
  friend bool operator!=(const CanonicalForm& a, const CanonicalForm& b) { return !(a == b); }
  friend bool operator<(const CanonicalForm& a, const CanonicalForm& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.trace != b.trace) return a.trace < b.trace;
    return a.bits < b.bits;
  }
};

namespace detail {

inline uint64_t mix(uint64_t h, uint64_t x) {
  return (h ^ (x + 0x9e3779b97f4a7c15ull)) * 0x100000001b3ull;
}

struct Partition {
  std::vector<int> lab;      // position -> vertex
  std::vector<int> pos;      // vertex -> position
  std::vector<int> cell_of;  // position -> cell id
  struct Cell {
    int start = 0, size = 0;
  };
  std::vector<Cell> cells;

  explicit Partition(int n) : lab(n), pos(n), cell_of(n, 0) {
    for (int i = 0; i < n; ++i) lab[i] = pos[i] = i;
    cells.push_back({0, n});
  }
  bool discrete() const { return cells.size() == lab.size(); }
};

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

class Searcher {
 public:
  Searcher(const Graph& g, long long budget) : g_(&g), n_(g.n), words_(g.words), budget_(budget) {}

  CanonicalForm run() {
    Partition p(n_);
    std::vector<uint64_t> trace;
    refine(p, {0}, trace);
    descend(p, trace, {}, false);
    best_.n = n_;
    return best_;
  }

 private:
  const Graph* g_;
  int n_, words_;
  long long budget_, nodes_ = 0;
  bool have_best_ = false, have_first_ = false;
  CanonicalForm best_;
  std::vector<uint64_t> first_bits_;
  std::vector<int> first_labeling_;
  std::vector<std::vector<int>> autos_;

  // split every cell by neighbor counts toward queued splitter cells
  void refine(Partition& p, std::vector<int> queue, std::vector<uint64_t>& trace) {
    if (++nodes_ > budget_)
      throw std::runtime_error("canonical_form: node budget exceeded at " +
                               std::to_string(nodes_) + " refinements with " +
                               std::to_string(p.cells.size()) + " cells");
    std::vector<uint64_t> mask(words_);
    std::vector<int> cnt, order;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      auto sp = p.cells[queue[qi]];
      std::fill(mask.begin(), mask.end(), 0);
      for (int i = sp.start; i < sp.start + sp.size; ++i)
        mask[p.lab[i] / 64] |= 1ull << (p.lab[i] % 64);
      for (int cp = 0; cp < n_;) {
        int cid = p.cell_of[cp];
        auto c = p.cells[cid];
        cp = c.start + c.size;
        if (c.size == 1) continue;
        cnt.assign(c.size, 0);
        int mn = n_ + 1, mx = -1;
        for (int i = 0; i < c.size; ++i) {
          const uint64_t* row = g_->row(p.lab[c.start + i]);
          int d = 0;
          for (int w = 0; w < words_; ++w) d += std::popcount(row[w] & mask[w]);
          cnt[i] = d;
          mn = std::min(mn, d);
          mx = std::max(mx, d);
        }
        if (mn == mx) continue;
        order.resize(c.size);
        for (int i = 0; i < c.size; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cnt[a] < cnt[b]; });
        std::vector<int> verts(c.size);
        for (int i = 0; i < c.size; ++i) verts[i] = p.lab[c.start + order[i]];
        uint64_t ev = mix(mix(0xc817u, (uint64_t)sp.start), (uint64_t)c.start);
        int at = 0;
        while (at < c.size) {
          int run = at;
          while (run < c.size && cnt[order[run]] == cnt[order[at]]) ++run;
          int id = at == 0 ? cid : (int)p.cells.size();
          if (at == 0)
            p.cells[cid] = {c.start, run - at};
          else
            p.cells.push_back({c.start + at, run - at});
          for (int i = at; i < run; ++i) {
            p.lab[c.start + i] = verts[i];
            p.pos[verts[i]] = c.start + i;
            p.cell_of[c.start + i] = id;
          }
          ev = mix(ev, ((uint64_t)(run - at) << 20) | (uint64_t)cnt[order[at]]);
          queue.push_back(id);
          at = run;
        }
        trace.push_back(ev);
      }
    }
  }

  // node trace as a prefix against the current best: -1 dominated, 0 tied, 1 ahead
  int compare_prefix(const std::vector<uint64_t>& trace) const {
    size_t m = std::min(trace.size(), best_.trace.size());
    for (size_t i = 0; i < m; ++i)
      if (trace[i] != best_.trace[i]) return trace[i] > best_.trace[i] ? 1 : -1;
    return trace.size() > best_.trace.size() ? 1 : 0;
  }

  std::vector<uint64_t> leaf_bits(const Partition& p) const {
    std::vector<uint64_t> bits((size_t)n_ * words_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (g_->has(p.lab[i], p.lab[j])) bits[(size_t)i * words_ + j / 64] |= 1ull << (j % 64);
    return bits;
  }

  void record_auto(const std::vector<int>& lab_to, const std::vector<int>& pos_from) {
    if (autos_.size() >= 64) return;
    std::vector<int> phi(n_);
    for (int v = 0; v < n_; ++v) phi[v] = lab_to[pos_from[v]];
    bool moved = false;
    for (int v = 0; v < n_; ++v) moved |= phi[v] != v;
    if (moved) autos_.push_back(std::move(phi));
  }

  void handle_leaf(const Partition& p, const std::vector<uint64_t>& trace) {
    std::vector<uint64_t> bits = leaf_bits(p);
    std::vector<int> labeling(n_);
    for (int v = 0; v < n_; ++v) labeling[v] = p.pos[v];
    if (!have_first_) {
      have_first_ = true;
      first_bits_ = bits;
      first_labeling_ = labeling;
    } else if (bits == first_bits_) {
      // lab_first maps canonical positions to vertices of the first leaf
      std::vector<int> lab_first(n_);
      for (int v = 0; v < n_; ++v) lab_first[first_labeling_[v]] = v;
      record_auto(lab_first, labeling);
    }
    bool better = true;
    if (have_best_) {
      if (trace != best_.trace)
        better = std::lexicographical_compare(best_.trace.begin(), best_.trace.end(),
                                              trace.begin(), trace.end());
      else if (bits == best_.bits) {
        std::vector<int> lab_best(n_);
        for (int v = 0; v < n_; ++v) lab_best[best_.labeling[v]] = v;
        record_auto(lab_best, labeling);
        return;
      } else
        better = bits > best_.bits;
    }
    if (better) {
      have_best_ = true;
      best_.trace = trace;
      best_.bits = std::move(bits);
      best_.labeling = std::move(labeling);
    }
  }

  // first smallest non-singleton cell in position order
  int target_cell(const Partition& p) const {
    int pick = -1, size = n_ + 1;
    for (int cp = 0; cp < n_;) {
      int cid = p.cell_of[cp];
      auto c = p.cells[cid];
      cp = c.start + c.size;
      if (c.size > 1 && c.size < size) {
        size = c.size;
        pick = cid;
      }
    }
    return pick;
  }

  void descend(const Partition& p, const std::vector<uint64_t>& trace,
               const std::vector<int>& path, bool dominates) {
    if (p.discrete()) {
      handle_leaf(p, trace);
      return;
    }
    int tc = target_cell(p);
    auto cell = p.cells[tc];
    std::vector<int> candidates(p.lab.begin() + cell.start,
                                p.lab.begin() + cell.start + cell.size);
    DisjointSets orbits(n_);
    for (const auto& phi : autos_) {
      bool fixes = true;
      for (int v : path)
        if (phi[v] != v) {
          fixes = false;
          break;
        }
      if (fixes)
        for (int v = 0; v < n_; ++v)
          if (phi[v] != v) orbits.unite(v, phi[v]);
    }
    std::vector<int> tried;
    std::vector<int> next_path = path;
    next_path.push_back(0);
    for (int v : candidates) {
      int root = orbits.find(v);
      if (std::find(tried.begin(), tried.end(), root) != tried.end()) continue;
      tried.push_back(root);

      Partition child = p;
      int cs = child.cells[tc].start;
      int vp = child.pos[v];
      std::swap(child.lab[cs], child.lab[vp]);
      child.pos[child.lab[vp]] = vp;
      child.pos[v] = cs;
      int singleton = (int)child.cells.size();
      child.cells.push_back({cs, 1});
      child.cell_of[cs] = singleton;
      child.cells[tc] = {cs + 1, cell.size - 1};

      std::vector<uint64_t> child_trace = trace;
      child_trace.push_back(mix(0x1d1duLL, ((uint64_t)cell.start << 24) | (uint64_t)path.size()));
      refine(child, {singleton, tc}, child_trace);

      bool child_dominates = dominates;
      if (have_best_ && !dominates) {
        int cmp = compare_prefix(child_trace);
        if (cmp < 0) continue;
        child_dominates = cmp > 0;
      }
      next_path.back() = v;
      descend(child, child_trace, next_path, child_dominates);
    }
  }
};

}  // namespace detail

inline CanonicalForm canonical_form(const Graph& g, long long node_budget = 2000000) {
  if (g.n > 400) throw std::invalid_argument("canonical_form: more than 400 vertices");
  CanonicalForm out;
  out.n = g.n;
  if (g.n == 0) return out;
  detail::Searcher s(g, node_budget);
  return s.run();
}

inline Graph canonical_graph(const Graph& g) {
  CanonicalForm cf = canonical_form(g);
  return graph::relabel(g, cf.labeling);
}

inline bool isomorphic(const Graph& a, const Graph& b) {
  if (a.n != b.n || a.edge_count() != b.edge_count()) return false;
  return canonical_form(a) == canonical_form(b);
}

// cheap isomorphism-invariant hash: per-vertex profiles of common-neighbor
// counts toward neighbors and non-neighbors, folded over the sorted vertex set
inline uint64_t invariant_fingerprint(const Graph& g) {
  std::vector<uint64_t> vh(g.n);
  std::vector<int> adj_c, non_c;
  for (int v = 0; v < g.n; ++v) {
    adj_c.clear();
    non_c.clear();
    for (int u = 0; u < g.n; ++u) {
      if (u == v) continue;
      (g.has(v, u) ? adj_c : non_c).push_back(g.common_neighbors(v, u));
    }
    std::sort(adj_c.begin(), adj_c.end());
    std::sort(non_c.begin(), non_c.end());
    uint64_t h = 0xcbf29ce484222325ull ^ (uint64_t)adj_c.size();
    for (int c : adj_c) h = detail::mix(h, (uint64_t)c);
    h = detail::mix(h, 0xabcdu);
    for (int c : non_c) h = detail::mix(h, (uint64_t)c);
    vh[v] = h;
  }
  std::sort(vh.begin(), vh.end());
  uint64_t out = detail::mix(0x5eedu, (uint64_t)g.n);
  for (uint64_t h : vh) out = detail::mix(out, h);
  return out;
}

}  // namespace spreadforge::canon
