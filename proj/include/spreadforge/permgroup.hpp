#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

// Permutations as image vectors, orbits, and a stabilizer chain built by
// deterministic Schreier-Sims sifting.  Sized for degrees in the hundreds,
// which covers every group this project touches.

namespace spreadforge::perm {

using Perm = std::vector<int32_t>;

inline Perm identity(int n) {
  Perm p((size_t)n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

// apply a, then b
inline Perm compose(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = b[(size_t)a[i]];
  return c;
}

inline Perm inverse(const Perm& a) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[(size_t)a[i]] = (int32_t)i;
  return c;
}

inline bool is_identity(const Perm& a) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != (int32_t)i) return false;
  return true;
}

inline std::vector<int32_t> orbit_of(int32_t x, const std::vector<Perm>& gens) {
  std::vector<int32_t> orb{x};
  if (gens.empty()) return orb;
  std::vector<char> seen(gens[0].size(), 0);
  seen[(size_t)x] = 1;
  for (size_t i = 0; i < orb.size(); ++i)
    for (const Perm& g : gens) {
      int32_t y = g[(size_t)orb[i]];
      if (!seen[(size_t)y]) {
        seen[(size_t)y] = 1;
        orb.push_back(y);
      }
    }
  return orb;
}

// seeded generator-index sequence, so parallel actions can walk in step
inline std::vector<int> walk_indices(size_t n_gens, uint64_t seed, int length = 24) {
  if (n_gens == 0) throw std::invalid_argument("walk_indices: no generators");
  std::vector<int> out;
  out.reserve(length);
  uint64_t s = seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
  for (int i = 0; i < length; ++i) {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    out.push_back((int)((s >> 33) % n_gens));
  }
  return out;
}

// deterministic pseudo-random group element, a seeded generator walk
inline Perm product_walk(const std::vector<Perm>& gens, uint64_t seed, int length = 24) {
  if (gens.empty()) throw std::invalid_argument("product_walk: no generators");
  Perm p = identity((int)gens[0].size());
  for (int i : walk_indices(gens.size(), seed, length)) p = compose(p, gens[i]);
  return p;
}

class StabilizerChain {
 public:
  explicit StabilizerChain(int n) : n_(n) {}

  // true when the new generator enlarged the group
  bool extend(const Perm& g) {
    if ((int)g.size() != n_) throw std::invalid_argument("StabilizerChain: degree mismatch");
    auto [lvl, h] = sift(g, 0);
    if (h.empty()) return false;
    add_strong(lvl, std::move(h));
    verify_from(lvl);
    return true;
  }

  bool contains(const Perm& g) const {
    if ((int)g.size() != n_) throw std::invalid_argument("StabilizerChain: degree mismatch");
    return sift(g, 0).second.empty();
  }

  unsigned long long order() const {
    unsigned long long o = 1;
    for (const Level& lv : levels_) o *= (unsigned long long)lv.orbit.size();
    return o;
  }

  std::vector<int32_t> base() const {
    std::vector<int32_t> b;
    for (const Level& lv : levels_) b.push_back(lv.base);
    return b;
  }

 private:
  struct Level {
    int32_t base = 0;
    std::vector<int32_t> orbit;
    std::vector<int32_t> where;  // point -> orbit index, -1 outside
    std::vector<Perm> transversal;
  };

  int n_;
  std::vector<Perm> strong_;  // every strong generator; levels filter by prefix
  std::vector<Level> levels_;

  // the generators acting at a level are those fixing all earlier base points
  bool fixes_prefix(const Perm& h, size_t lvl) const {
    for (size_t j = 0; j < lvl; ++j)
      if (h[(size_t)levels_[j].base] != levels_[j].base) return false;
    return true;
  }

  // strip through levels >= from; empty residue means membership
  std::pair<size_t, Perm> sift(Perm h, size_t from) const {
    for (size_t i = from; i < levels_.size(); ++i) {
      const Level& lv = levels_[i];
      int32_t p = h[(size_t)lv.base];
      if (lv.where[(size_t)p] < 0) return {i, std::move(h)};
      h = compose(h, inverse(lv.transversal[(size_t)lv.where[(size_t)p]]));
    }
    if (is_identity(h)) return {levels_.size(), Perm{}};
    return {levels_.size(), std::move(h)};
  }

  void add_strong(size_t lvl, Perm h) {
    if (lvl == levels_.size()) {
      Level lv;
      lv.base = 0;
      while (h[(size_t)lv.base] == lv.base) ++lv.base;
      levels_.push_back(std::move(lv));
    }
    strong_.push_back(std::move(h));
  }

  void rebuild_orbit(size_t lvl) {
    Level& lv = levels_[lvl];
    std::vector<const Perm*> gens;
    for (const Perm& s : strong_)
      if (fixes_prefix(s, lvl)) gens.push_back(&s);
    lv.orbit.assign(1, lv.base);
    lv.where.assign((size_t)n_, -1);
    lv.where[(size_t)lv.base] = 0;
    lv.transversal.assign(1, identity(n_));
    for (size_t i = 0; i < lv.orbit.size(); ++i)
      for (const Perm* g : gens) {
        int32_t y = (*g)[(size_t)lv.orbit[i]];
        if (lv.where[(size_t)y] < 0) {
          lv.where[(size_t)y] = (int32_t)lv.orbit.size();
          lv.orbit.push_back(y);
          lv.transversal.push_back(compose(lv.transversal[i], *g));
        }
      }
  }

  // walk the levels deepest-first; a Schreier product that fails to strip
  // becomes a new strong generator and the walk restarts where it landed
  void verify_from(size_t start) {
    size_t i = start;
    while (true) {
      rebuild_orbit(i);
      bool descended = false;
      for (size_t oi = 0; oi < levels_[i].orbit.size() && !descended; ++oi)
        for (size_t gi = 0; gi < strong_.size() && !descended; ++gi) {
          if (!fixes_prefix(strong_[gi], i)) continue;
          const Level& lv = levels_[i];
          const Perm& s = strong_[gi];
          int32_t moved = s[(size_t)lv.orbit[oi]];
          Perm sch = compose(compose(lv.transversal[oi], s),
                             inverse(lv.transversal[(size_t)lv.where[(size_t)moved]]));
          auto [l2, h2] = sift(std::move(sch), i + 1);
          if (!h2.empty()) {
            add_strong(l2, std::move(h2));
            i = l2;
            descended = true;
          }
        }
      if (descended) continue;
      if (i == 0) return;
      --i;
    }
  }
};

}  // namespace spreadforge::perm
