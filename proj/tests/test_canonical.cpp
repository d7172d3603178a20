#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "spreadforge/canonical.hpp"
#include "spreadforge/graph.hpp"

using spreadforge::graph::Graph;
using spreadforge::graph::relabel;
using namespace spreadforge::canon;

namespace {

Graph random_graph(int n, double p, std::mt19937& rng) {
  Graph g(n);
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

std::vector<int> random_perm(int n, std::mt19937& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

bool brute_force_isomorphic(const Graph& a, const Graph& b) {
  if (a.n != b.n || a.edge_count() != b.edge_count()) return false;
  std::vector<int> perm(a.n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int u = 0; u < a.n && ok; ++u)
      for (int v = u + 1; v < a.n && ok; ++v)
        if (a.has(u, v) != b.has(perm[u], perm[v])) ok = false;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Graph cycle(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph petersen() {
  Graph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
    g.add_edge(i, 5 + i);
  }
  return g;
}

}  // namespace

TEST_CASE("certificate is invariant under relabeling") {
  std::mt19937 rng(20260819);
  for (int n : {1, 2, 5, 8, 12, 20}) {
    for (int rep = 0; rep < 8; ++rep) {
      Graph g = random_graph(n, 0.4, rng);
      CanonicalForm cf = canonical_form(g);
      for (int t = 0; t < 3; ++t) {
        Graph h = relabel(g, random_perm(n, rng));
        REQUIRE(canonical_form(h) == cf);
        REQUIRE(canonical_graph(h) == canonical_graph(g));
        REQUIRE(invariant_fingerprint(h) == invariant_fingerprint(g));
      }
    }
  }
}

TEST_CASE("certificate equality matches brute-force isomorphism") {
  std::mt19937 rng(7);
  int equal = 0;
  for (int rep = 0; rep < 40; ++rep) {
    int n = 6 + (int)(rng() % 2);
    Graph a = random_graph(n, 0.5, rng);
    Graph b = random_graph(n, 0.5, rng);
    if (a.edge_count() != b.edge_count()) continue;
    bool iso = brute_force_isomorphic(a, b);
    REQUIRE((canonical_form(a) == canonical_form(b)) == iso);
    REQUIRE(isomorphic(a, b) == iso);
    equal += iso;
  }
  // shuffled copies keep the whole pipeline honest on the positive side
  for (int rep = 0; rep < 10; ++rep) {
    Graph a = random_graph(7, 0.5, rng);
    Graph b = relabel(a, random_perm(7, rng));
    REQUIRE(brute_force_isomorphic(a, b));
    REQUIRE(isomorphic(a, b));
    ++equal;
  }
  REQUIRE(equal >= 10);
}

TEST_CASE("regular non-isomorphic pairs are separated") {
  Graph c8 = cycle(8);
  Graph two_c4(8);
  for (int off : {0, 4})
    for (int i = 0; i < 4; ++i) two_c4.add_edge(off + i, off + (i + 1) % 4);
  REQUIRE(!isomorphic(c8, two_c4));
  REQUIRE(invariant_fingerprint(c8) != invariant_fingerprint(two_c4));

  // Petersen and its relabelings, against another cubic graph on 10 vertices
  Graph p = petersen();
  std::mt19937 rng(99);
  REQUIRE(isomorphic(p, relabel(p, random_perm(10, rng))));
  Graph prism(10);  // pentagonal prism, also cubic
  for (int i = 0; i < 5; ++i) {
    prism.add_edge(i, (i + 1) % 5);
    prism.add_edge(5 + i, 5 + (i + 1) % 5);
    prism.add_edge(i, 5 + i);
  }
  REQUIRE(!isomorphic(p, prism));
}

TEST_CASE("canonical labeling is a permutation onto the canonical graph") {
  std::mt19937 rng(3);
  Graph g = random_graph(15, 0.3, rng);
  CanonicalForm cf = canonical_form(g);
  std::vector<int> seen(15, 0);
  for (int v = 0; v < 15; ++v) seen[cf.labeling[v]] += 1;
  REQUIRE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  Graph canon = relabel(g, cf.labeling);
  REQUIRE(canon == canonical_graph(g));
  REQUIRE(canon.edge_count() == g.edge_count());
}

TEST_CASE("canonical form guards") {
  REQUIRE_THROWS_AS(canonical_form(petersen(), 2), std::runtime_error);
  REQUIRE_THROWS_AS(canonical_form(Graph(401)), std::invalid_argument);
  CanonicalForm empty = canonical_form(Graph(0));
  REQUIRE(empty.n == 0);
}
