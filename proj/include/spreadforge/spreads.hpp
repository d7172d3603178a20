#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadforge/projgeom.hpp"

// Spreads of symplectic spaces: the field-model spread of PG(2e-1,q) made of
// totally isotropic subspaces, and special spreads of PG(3,q) made of
// hyperbolic lines closed under the polarity.

namespace spreadforge::spreads {

using geom::HyperbolicPair;
using geom::PointTable;
using geom::Subspace;
using geom::WGeometry;
using gf::Fe;
using gf::Field;
using linalg::Mat;
using linalg::Vec;

struct Certificate {
  bool ok = false;
  std::string witness;
};

// ------------------------------------------------------ symplectic spreads

struct SymplecticSpread {
  int q = 0, e = 0;
  std::vector<Subspace> members;
  std::vector<std::vector<int>> member_pts;  // ascending ids in PG(2e-1,q)
  Mat base_change;                           // field-model row coords -> default-J coords
};

namespace detail {

// rows T with T G T^t equal to the standard alternating Gram matrix
inline Mat symplectic_basis(const Field& F, const Mat& G) {
  int n = G.rows;
  std::vector<Vec> pool;
  for (int i = 0; i < n; ++i) {
    Vec e(n, F.zero());
    e[i] = F.one();
    pool.push_back(std::move(e));
  }
  auto form = [&](const Vec& x, const Vec& y) {
    return linalg::dot(F, linalg::vec_mat(F, x, G), y);
  };
  std::vector<Vec> rows;
  while (!pool.empty()) {
    Vec u = pool.front();
    pool.erase(pool.begin());
    int vi = -1;
    for (int i = 0; i < (int)pool.size(); ++i)
      if (form(u, pool[i]) != F.zero()) { vi = i; break; }
    if (vi < 0) throw std::logic_error("symplectic_basis: degenerate form");
    Vec v = pool[vi];
    pool.erase(pool.begin() + vi);
    Fe s = F.inv(form(u, v));
    for (auto& c : v) c = F.mul(c, s);
    for (auto& w : pool) {
      Fe lam = form(w, v), mu = form(w, u);
      // w - lam u + mu v is orthogonal to both u and v
      for (int c = 0; c < n; ++c)
        w[c] = F.add(F.sub(w[c], F.mul(lam, u[c])), F.mul(mu, v[c]));
    }
    rows.push_back(std::move(u));
    rows.push_back(std::move(v));
  }
  return linalg::mat_from_rows(rows);
}

}  // namespace detail

// V = GF(q^e)^2 with form Tr(x1 y2 - x2 y1); members {(x, mx)} and {(0, y)},
// carried to default-J coordinates by a recorded base change
inline SymplecticSpread build_symplectic_spread(int e, const Field& F) {
  if (e < 2) throw std::invalid_argument("build_symplectic_spread: e < 2");
  if (F.k() != 1)
    throw std::invalid_argument("build_symplectic_spread: only prime q supported");
  int q = F.q();
  Field E(q, e);
  int dim = 2 * e;

  auto trace = [&](Fe x) {
    Fe s = x, t = x;
    for (int i = 1; i < e; ++i) {
      t = E.frobenius(t);
      s = E.add(s, t);
    }
    if (s.v >= (unsigned)q) throw std::logic_error("trace left the prime subfield");
    return Fe{s.v};
  };
  // coordinates of (a,b) over GF(q) in the basis 1, t, ..., t^(e-1) per slot
  auto coords = [&](Fe a, Fe b) {
    Vec v(dim);
    std::vector<int> da = E.coeffs(a), db = E.coeffs(b);
    for (int i = 0; i < e; ++i) {
      v[i] = F.el(da[i]);
      v[e + i] = F.el(db[i]);
    }
    return v;
  };

  // Gram of the trace form on the product basis
  Mat G(dim, dim);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      Fe ti = E.pow(E.el(q), i), tj = E.pow(E.el(q), j);
      Fe tr = trace(E.mul(ti, tj));
      G.at(i, e + j) = tr;
      G.at(e + j, i) = F.neg(tr);
    }

  Mat T = detail::symplectic_basis(F, G);
  Mat J = geom::SymplecticForm::standard(F, dim).gram;
  if (!(linalg::mat_mul(F, linalg::mat_mul(F, T, G), linalg::transpose(T)) == J))
    throw std::logic_error("build_symplectic_spread: base change failed");
  Mat Tinv = linalg::mat_inverse(F, T);

  SymplecticSpread s;
  s.q = q;
  s.e = e;
  s.base_change = Tinv;
  PointTable pt(F, dim - 1);
  auto add_member = [&](const std::vector<std::pair<Fe, Fe>>& basis_pairs) {
    Mat rows((int)basis_pairs.size(), dim);
    for (int r = 0; r < rows.rows; ++r)
      rows.set_row(r, linalg::vec_mat(F, coords(basis_pairs[r].first, basis_pairs[r].second), Tinv));
    Subspace m = geom::span_rows(F, rows);
    if (m.rank() != e) throw std::logic_error("build_symplectic_spread: member rank off");
    s.member_pts.push_back(geom::points_of(F, pt, m));
    s.members.push_back(std::move(m));
  };

  for (int m = 0; m < E.q(); ++m) {
    std::vector<std::pair<Fe, Fe>> rows;
    for (int i = 0; i < e; ++i) {
      Fe ti = E.pow(E.el(q), i);
      rows.push_back({ti, E.mul(E.el(m), ti)});
    }
    add_member(rows);
  }
  std::vector<std::pair<Fe, Fe>> inf;
  for (int i = 0; i < e; ++i) inf.push_back({E.zero(), E.pow(E.el(q), i)});
  add_member(inf);
  return s;
}

inline Certificate verify_symplectic_spread(const Field& F, const SymplecticSpread& s) {
  Certificate out;
  int dim = 2 * s.e;
  PointTable pt(F, dim - 1);
  geom::SymplecticForm J = geom::SymplecticForm::standard(F, dim);
  long long qe = 1;
  for (int i = 0; i < s.e; ++i) qe *= s.q;
  std::vector<int> seen(pt.size(), -1);
  for (int i = 0; i < (int)s.members.size(); ++i) {
    if (!geom::is_totally_isotropic(F, s.members[i], J.gram)) {
      out.witness = "member " + std::to_string(i) + " is not totally isotropic";
      return out;
    }
    long long size = (qe - 1) / (s.q - 1);
    if ((long long)s.member_pts[i].size() != size) {
      out.witness = "member " + std::to_string(i) + " has wrong size";
      return out;
    }
    for (int id : s.member_pts[i]) {
      if (seen[id] >= 0) {
        out.witness = "point " + std::to_string(id) + " covered by members " +
                      std::to_string(seen[id]) + " and " + std::to_string(i);
        return out;
      }
      seen[id] = i;
    }
    // totally isotropic member = clique in the collinearity graph
    for (size_t a = 0; a < s.member_pts[i].size(); ++a)
      for (size_t b = a + 1; b < s.member_pts[i].size(); ++b)
        if (J.eval(F, pt.point(s.member_pts[i][a]), pt.point(s.member_pts[i][b])) != F.zero()) {
          out.witness = "member " + std::to_string(i) + " is not a clique";
          return out;
        }
  }
  for (int id = 0; id < pt.size(); ++id)
    if (seen[id] < 0) {
      out.witness = "point " + std::to_string(id) + " not covered";
      return out;
    }
  if ((long long)s.members.size() != qe + 1) {
    out.witness = "expected " + std::to_string(qe + 1) + " members, got " +
                  std::to_string(s.members.size());
    return out;
  }
  out.ok = true;
  return out;
}

// --------------------------------------------------------- special spreads

struct SpecialSpread {
  int q = 0;
  std::vector<int32_t> lines;    // ascending line ids in the host WGeometry
  std::vector<int32_t> partner;  // partner[i] = polar line of lines[i]

  std::vector<HyperbolicPair> pairs() const {
    std::vector<HyperbolicPair> out;
    for (size_t i = 0; i < lines.size(); ++i)
      if (lines[i] < partner[i]) out.push_back({lines[i], partner[i]});
    return out;
  }
};

inline std::vector<int> union_points(const WGeometry& w, const HyperbolicPair& p) {
  std::vector<int> u;
  const auto& a = w.lines.line_pts[p.line];
  const auto& b = w.lines.line_pts[p.partner];
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

// all unordered pairs {hyperbolic line, its polar}, ordered by smaller line id
inline std::vector<HyperbolicPair> enumerate_U(const WGeometry& w) {
  std::vector<HyperbolicPair> out;
  for (int l = 0; l < w.lines.size(); ++l)
    if (!w.line_isotropic[l] && l < w.line_polar[l]) out.push_back({l, w.line_polar[l]});
  return out;
}

struct UCatalog {
  std::vector<HyperbolicPair> pairs;
  std::vector<int32_t> u_of_line;  // line id -> pair index, -1 for isotropic lines

  UCatalog() = default;
  explicit UCatalog(const WGeometry& w) : pairs(enumerate_U(w)) {
    u_of_line.assign(w.lines.size(), -1);
    for (int i = 0; i < (int)pairs.size(); ++i) {
      u_of_line[pairs[i].line] = i;
      u_of_line[pairs[i].partner] = i;
    }
  }
};

inline SpecialSpread spread_from_lines(const WGeometry& w, std::vector<int32_t> line_ids) {
  SpecialSpread s;
  s.q = w.q;
  std::sort(line_ids.begin(), line_ids.end());
  s.lines = std::move(line_ids);
  s.partner.resize(s.lines.size());
  for (size_t i = 0; i < s.lines.size(); ++i) s.partner[i] = w.line_polar[s.lines[i]];
  return s;
}

inline Certificate verify_special_spread(const WGeometry& w, const SpecialSpread& s) {
  Certificate out;
  int q = w.q;
  if ((int)s.lines.size() != q * q + 1) {
    out.witness = "expected " + std::to_string(q * q + 1) + " lines, got " +
                  std::to_string(s.lines.size());
    return out;
  }
  std::vector<int> cover(w.pts.size(), -1);
  for (size_t i = 0; i < s.lines.size(); ++i) {
    int l = s.lines[i];
    if (l < 0 || l >= w.lines.size()) {
      out.witness = "line id " + std::to_string(l) + " out of range";
      return out;
    }
    for (int id : w.lines.line_pts[l]) {
      if (cover[id] >= 0) {
        out.witness = "point " + std::to_string(id) + " covered twice (lines " +
                      std::to_string(s.lines[cover[id]]) + ", " + std::to_string(l) + ")";
        return out;
      }
      cover[id] = (int)i;
    }
  }
  for (int id = 0; id < w.pts.size(); ++id)
    if (cover[id] < 0) {
      out.witness = "point " + std::to_string(id) + " not covered";
      return out;
    }
  for (int l : s.lines)
    if (w.line_isotropic[l]) {
      out.witness = "line " + std::to_string(l) + " is totally isotropic";
      return out;
    }
  std::vector<char> in_s(w.lines.size(), 0);
  for (int l : s.lines) in_s[l] = 1;
  for (size_t i = 0; i < s.lines.size(); ++i) {
    int l = s.lines[i], p = s.partner[i];
    if (p < 0 || p >= w.lines.size() || !in_s[p] || p == l) {
      out.witness = "line " + std::to_string(l) + " has no partner inside the spread";
      return out;
    }
    // the stated partner must be the polar line, i.e. fully orthogonal
    if (w.line_polar[l] != p) {
      out.witness = "line " + std::to_string(l) + " paired with " + std::to_string(p) +
                    ", which is not fully orthogonal to it";
      return out;
    }
    // and no other member is fully orthogonal to l
    for (int m : s.lines) {
      if (m == l || m == p) continue;
      bool all = true;
      for (int a : w.lines.line_pts[l]) {
        for (int b : w.lines.line_pts[m])
          if (!w.adjacent(a, b)) { all = false; break; }
        if (!all) break;
      }
      if (all) {
        out.witness = "partner of line " + std::to_string(l) + " is not unique (" +
                      std::to_string(m) + " also orthogonal)";
        return out;
      }
    }
  }
  // each pair induces complete bipartite K_{q+1,q+1}, and every outside
  // vertex has exactly one neighbor on each side
  for (const HyperbolicPair& pr : spread_from_lines(w, s.lines).pairs()) {
    const auto& a = w.lines.line_pts[pr.line];
    const auto& b = w.lines.line_pts[pr.partner];
    for (int x : a)
      for (int y : a)
        if (x < y && w.adjacent(x, y)) {
          out.witness = "points " + std::to_string(x) + "," + std::to_string(y) +
                        " of one line are orthogonal";
          return out;
        }
    for (int x : a)
      for (int y : b)
        if (!w.adjacent(x, y)) {
          out.witness = "pair (" + std::to_string(pr.line) + "," + std::to_string(pr.partner) +
                        ") misses cross edge " + std::to_string(x) + "-" + std::to_string(y);
          return out;
        }
    std::vector<char> in_u(w.pts.size(), 0);
    for (int id : a) in_u[id] = 1;
    for (int id : b) in_u[id] = 1;
    for (int x = 0; x < w.pts.size(); ++x) {
      if (in_u[x]) continue;
      int na = 0, nb = 0;
      for (int id : a) na += w.adjacent(x, id);
      for (int id : b) nb += w.adjacent(x, id);
      if (na != 1 || nb != 1) {
        out.witness = "outside vertex " + std::to_string(x) + " sees " + std::to_string(na) +
                      "/" + std::to_string(nb) + " points of pair (" + std::to_string(pr.line) +
                      "," + std::to_string(pr.partner) + ")";
        return out;
      }
    }
  }
  out.ok = true;
  return out;
}

// ------------------------------------------------- the ovoid construction

struct SpecialSpreadBuild {
  SpecialSpread spread;
  int z_id = -1;
  Subspace beta, alpha, alpha_perp;
  std::vector<int> elliptic, q1, q2, ovoid;  // point ids in the Plucker space
  int solids_tried = 0;
};

// Fix z off the Plucker quadric whose polar hyperplane carries the images of
// the totally isotropic lines. Find a solid through z with elliptic quadric
// section, cut it with the polar hyperplane to get a plane alpha, and swap
// the conic alpha cuts out for the conic its polar plane cuts out:
//   O = (beta-section \ alpha-section) + polar-plane-section.
// The preimage of O is a spread of hyperbolic lines closed under the polarity.
inline SpecialSpreadBuild construct_special_spread(const WGeometry& w, int solid_skip = 0,
                                                   int budget = 10000) {
  if (w.q % 2 == 0) throw std::invalid_argument("construct_special_spread: q must be odd");
  const Field& F = w.F;
  const PointTable& p5 = w.klein.p5;
  const geom::QuadraticForm& quad = w.klein.quad;
  Mat gram6 = quad.bilinear_gram(F);
  int q = w.q;

  std::vector<char> on_q(p5.size(), 0);
  for (int id = 0; id < p5.size(); ++id)
    if (quad.eval(F, p5.point(id)) == F.zero()) on_q[id] = 1;

  SpecialSpreadBuild b;
  Vec zv(6, F.zero());
  zv[0] = F.one();
  zv[5] = F.one();
  b.z_id = p5.id_of(F, zv);
  if (on_q[b.z_id]) throw std::logic_error("construct_special_spread: z on the quadric");
  Subspace z_perp = geom::perp(F, geom::span_of_points(F, p5, {b.z_id}), gram6);

  auto section = [&](const Subspace& s) {
    std::vector<int> hits;
    for (int id : geom::points_of(F, p5, s))
      if (on_q[id]) hits.push_back(id);
    return hits;
  };

  // spanning points are taken off the quadric, in colex triple order so the
  // early candidates are genuinely different solids; a fixed shuffle keeps
  // the low-id points from all lying in one degenerate flat
  std::vector<int> ext;
  for (int id = 0; id < p5.size(); ++id)
    if (!on_q[id] && id != b.z_id) ext.push_back(id);
  uint64_t lcg = 0x9e3779b97f4a7c15ull;
  for (int i = (int)ext.size() - 1; i > 0; --i) {
    lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
    std::swap(ext[i], ext[(int)((lcg >> 33) % (uint64_t)(i + 1))]);
  }
  std::vector<uint64_t> seen_solids;
  bool found = false;
  for (int k = 2; k < (int)ext.size() && !found; ++k) {
    for (int j = 1; j < k && !found; ++j) {
      for (int i = 0; i < j && !found; ++i) {
        Mat rows(4, 6);
        rows.set_row(0, p5.point(b.z_id));
        rows.set_row(1, p5.point(ext[i]));
        rows.set_row(2, p5.point(ext[j]));
        rows.set_row(3, p5.point(ext[k]));
        Subspace solid = geom::span_rows(F, rows);
        if (solid.rank() != 4) continue;
        if (++b.solids_tried > budget)
          throw std::runtime_error("construct_special_spread: no elliptic solid in budget");
        std::vector<int> hits = section(solid);
        if ((int)hits.size() != q * q + 1) continue;
        uint64_t key = geom::subspace_key(p5, solid);
        if (std::find(seen_solids.begin(), seen_solids.end(), key) != seen_solids.end()) continue;
        seen_solids.push_back(key);
        if (solid_skip > 0) { --solid_skip; continue; }
        b.beta = solid;
        b.elliptic = std::move(hits);
        found = true;
      }
    }
  }
  if (!found) throw std::runtime_error("construct_special_spread: no elliptic solid found");

  b.alpha = geom::subspace_intersection(F, b.beta, z_perp);
  if (b.alpha.rank() != 3) throw std::logic_error("construct_special_spread: alpha not a plane");
  b.q1 = section(b.alpha);
  if ((int)b.q1.size() != q + 1)
    throw std::logic_error("construct_special_spread: alpha section is not a conic");
  b.alpha_perp = geom::perp(F, b.alpha, gram6);
  if (!geom::subspace_contains(F, b.alpha_perp, zv))
    throw std::logic_error("construct_special_spread: polar plane misses z");
  b.q2 = section(b.alpha_perp);
  if ((int)b.q2.size() != q + 1)
    throw std::logic_error("construct_special_spread: polar-plane section is not a conic");

  std::vector<char> drop(p5.size(), 0);
  for (int id : b.q1) drop[id] = 1;
  for (int id : b.elliptic)
    if (!drop[id]) b.ovoid.push_back(id);
  for (int id : b.q2) b.ovoid.push_back(id);
  std::sort(b.ovoid.begin(), b.ovoid.end());
  if ((int)b.ovoid.size() != q * q + 1 ||
      std::adjacent_find(b.ovoid.begin(), b.ovoid.end()) != b.ovoid.end())
    throw std::logic_error("construct_special_spread: ovoid degenerate");

  std::vector<int32_t> line_ids;
  for (int id : b.ovoid) line_ids.push_back(w.klein.preimage(id));
  b.spread = spread_from_lines(w, std::move(line_ids));
  Certificate cert = verify_special_spread(w, b.spread);
  if (!cert.ok)
    throw std::logic_error("construct_special_spread: output rejected: " + cert.witness);
  return b;
}

}  // namespace spreadforge::spreads
