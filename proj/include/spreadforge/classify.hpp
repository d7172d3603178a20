#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spreadforge/gf.hpp"
#include "spreadforge/linalg.hpp"
#include "spreadforge/permgroup.hpp"
#include "spreadforge/projgeom.hpp"
#include "spreadforge/spreads.hpp"

// Classification of special spreads up to symplectic equivalence.  Each
// hyperbolic-pair U maps to a hyperbolic point x_U of a parabolic quadric in
// PG(4,q); pairs of such points fall into a handful of relation classes, and
// the class-count tuple of a spread's image is an equivalence invariant.

namespace spreadforge::classify {

using gf::Fe;
using gf::Field;
using linalg::Mat;
using linalg::Vec;

// number of nontrivial relation classes between distinct hyperbolic points
inline int relation_count(int q) {
  switch (q) {
    case 3: return 2;
    case 5: return 3;
    case 7: return 4;
  }
  throw std::domain_error("relation_count: pair classification covers q in {3,5,7}");
}

enum class RelationLabel : int { R0 = 0, R1 = 1, R2 = 2, R3 = 3, R4 = 4 };

// -------------------------------------------- the hyperbolic point model

// PG(4,q) carrying the quadric that the Klein images of the isotropic lines
// fill out.  On the hyperplane c0 + c5 = 0 the Plucker relation restricts to
// -c0^2 - c1 c4 + c2 c3, taken in coordinates (c0,...,c4).  The form is
// scaled so that the points with hyperbolic perp section are exactly those
// with nonzero square value.
struct HyperbolicPointModel {
  Field F;
  int q = 0;
  geom::PointTable p4;
  geom::QuadraticForm qf;
  Mat gram;
  std::vector<int32_t> line_to_p4;  // isotropic line id -> quadric point, else -1
  std::vector<int32_t> p4_to_line;  // inverse map, -1 off the quadric
  std::vector<uint8_t> singular;    // per PG(4,q) point: on the quadric?
  std::vector<int32_t> points;      // the hyperbolic points, ascending ids
  std::vector<int32_t> p_index;     // PG(4,q) point -> position in points, else -1

  explicit HyperbolicPointModel(const geom::WGeometry& w)
      : F(w.F), q(w.q), p4(w.F, 4) {
    if (q % 2 == 0) throw std::domain_error("HyperbolicPointModel: q must be odd");
    Mat u(5, 5);
    u.at(0, 0) = F.neg(F.one());
    u.at(1, 4) = F.neg(F.one());
    u.at(2, 3) = F.one();
    qf = geom::QuadraticForm::from_upper(std::move(u));

    line_to_p4.assign(w.lines.size(), -1);
    p4_to_line.assign(p4.size(), -1);
    int mapped = 0;
    for (int l = 0; l < w.lines.size(); ++l) {
      if (!w.line_isotropic[l]) continue;
      const Vec& c = w.klein.p5.point(w.klein.image(l));
      if (F.add(c[0], c[5]) != F.zero())
        throw std::logic_error("HyperbolicPointModel: image off the isotropic hyperplane");
      int id = p4.id_of(F, Vec(c.begin(), c.begin() + 5));
      if (qf.eval(F, p4.point(id)) != F.zero() || p4_to_line[id] != -1)
        throw std::logic_error("HyperbolicPointModel: bad quadric image");
      line_to_p4[l] = id;
      p4_to_line[id] = l;
      ++mapped;
    }

    std::vector<int> quad = geom::quadric_points(F, p4, qf);
    long long lq = q;
    if ((long long)quad.size() != lq * lq * lq + lq * lq + lq + 1 || mapped != (int)quad.size())
      throw std::logic_error("HyperbolicPointModel: quadric is not parabolic");
    singular.assign(p4.size(), 0);
    for (int id : quad) singular[id] = 1;

    // probe one nonsingular point; if its perp section type disagrees with
    // the squareness of its value, rescale by a nonsquare
    gram = qf.bilinear_gram(F);
    int probe = 0;
    while (singular[probe]) ++probe;
    Vec gp = linalg::vec_mat(F, p4.point(probe), gram);
    int section = 0;
    for (int id : quad)
      if (linalg::dot(F, gp, p4.point(id)) == F.zero()) ++section;
    bool hyperbolic = section == (q + 1) * (q + 1);
    if (!hyperbolic && section != q * q + 1)
      throw std::logic_error("HyperbolicPointModel: probe section size");
    if (hyperbolic != F.is_square(qf.eval(F, p4.point(probe)))) {
      Mat scaled = qf.upper;
      for (auto& e : scaled.a) e = F.mul(e, F.nonsquare());
      qf = geom::QuadraticForm::from_upper(std::move(scaled));
      gram = qf.bilinear_gram(F);
    }

    p_index.assign(p4.size(), -1);
    for (int id = 0; id < p4.size(); ++id) {
      Fe v = qf.eval(F, p4.point(id));
      if (v != F.zero() && F.is_square(v)) {
        p_index[id] = (int32_t)points.size();
        points.push_back(id);
      }
    }
    if ((long long)points.size() != lq * lq * (lq * lq + 1) / 2)
      throw std::logic_error("HyperbolicPointModel: hyperbolic point count");
  }

  bool perp(int32_t a, int32_t b) const {
    return linalg::dot(F, linalg::vec_mat(F, p4.point(a), gram), p4.point(b)) == F.zero();
  }

  // quadric points on the line through two points off the quadric: 0, 1 or 2
  int singular_on_line(int32_t x, int32_t y) const {
    const Vec& vx = p4.point(x);
    const Vec& vy = p4.point(y);
    int cnt = qf.eval(F, vy) == F.zero() ? 1 : 0;
    Vec t(5);
    for (int c = 0; c < F.q(); ++c) {
      Fe fc = F.el(c);
      for (int i = 0; i < 5; ++i) t[i] = F.add(vx[i], F.mul(fc, vy[i]));
      if (qf.eval(F, t) == F.zero()) ++cnt;
    }
    return cnt;
  }

  // size of x^perp ∩ y^perp within the hyperbolic points
  long long perp_common_count(int32_t x, int32_t y) const {
    Vec gx = linalg::vec_mat(F, p4.point(x), gram);
    Vec gy = linalg::vec_mat(F, p4.point(y), gram);
    long long n = 0;
    for (int32_t z : points)
      if (linalg::dot(F, gx, p4.point(z)) == F.zero() &&
          linalg::dot(F, gy, p4.point(z)) == F.zero())
        ++n;
    return n;
  }
};

// ------------------------------------------------------ pair classification

// label a pair of hyperbolic points by the quadric class of their joining
// line and perpendicularity; the layout of the classes depends on q mod 4
inline RelationLabel classify_pair(const HyperbolicPointModel& m, int32_t x, int32_t y) {
  if (m.p_index[x] < 0 || m.p_index[y] < 0)
    throw std::invalid_argument("classify_pair: arguments must be hyperbolic points");
  if (x == y) return RelationLabel::R0;
  int sing = m.singular_on_line(x, y);
  bool pp = m.perp(x, y);
  auto misplaced = [] { return std::logic_error("classify_pair: relation block out of position"); };
  // tangent pairs are never perpendicular: one singular point forces
  // B(x,y)^2 = 4 Q(x) Q(y), a nonzero square.  perpendicular pairs have a
  // secant join exactly when -1 is a square, so q mod 4 fixes the layout
  switch (m.q) {
    case 3:
      if (sing == 1 && !pp) return RelationLabel::R1;
      if (sing == 0 && pp) return RelationLabel::R2;
      throw misplaced();
    case 5:
      if (sing == 1 && !pp) return RelationLabel::R1;
      if (sing == 0 && !pp) return RelationLabel::R2;
      if (sing == 2 && pp) return RelationLabel::R3;
      throw misplaced();
    case 7:
      if (sing == 1 && !pp) return RelationLabel::R1;
      if (sing == 2 && !pp) return RelationLabel::R2;
      if (sing == 0) return pp ? RelationLabel::R3 : RelationLabel::R4;
      throw misplaced();
  }
  throw std::domain_error("classify_pair: pair classification covers q in {3,5,7}");
}

// class-count tuple [N1..Ni*] over the unordered pairs of a point subset
inline std::vector<long long> characteristic(const HyperbolicPointModel& m,
                                             const std::vector<int32_t>& xs) {
  std::vector<long long> out(relation_count(m.q), 0);
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j)
      ++out[(int)classify_pair(m, xs[i], xs[j]) - 1];
  return out;
}

// --------------------------------------- line-level route to the same labels

// the (q+1)^2 isotropic lines joining a point of U to a point of its polar
struct ULineSet {
  std::vector<int32_t> lines;  // ascending line ids
  std::vector<uint64_t> bits;  // membership bitset over all lines
};

inline ULineSet u_singular_lines(const geom::WGeometry& w, const geom::HyperbolicPair& u) {
  ULineSet s;
  for (int a : w.lines.line_pts[u.line])
    for (int b : w.lines.line_pts[u.partner]) s.lines.push_back(w.lines.line_of(a, b));
  std::sort(s.lines.begin(), s.lines.end());
  if (std::adjacent_find(s.lines.begin(), s.lines.end()) != s.lines.end())
    throw std::logic_error("u_singular_lines: repeated joining line");
  s.bits.assign(((size_t)w.lines.size() + 63) / 64, 0);
  for (int32_t l : s.lines) s.bits[l >> 6] |= 1ull << (l & 63);
  return s;
}

inline bool lines_meet(const geom::WGeometry& w, int32_t k, int32_t l) {
  const auto& a = w.lines.line_pts[k];
  const auto& b = w.lines.line_pts[l];
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i; else ++j;
  }
  return false;
}

// lines meeting three mutually disjoint lines; always q+1 of them
inline std::vector<int32_t> transversals(const geom::WGeometry& w, int32_t l1, int32_t l2,
                                         int32_t l3) {
  std::vector<uint8_t> on3(w.pts.size(), 0);
  for (int p : w.lines.line_pts[l3]) on3[p] = 1;
  std::vector<int32_t> out;
  for (int a : w.lines.line_pts[l1])
    for (int b : w.lines.line_pts[l2]) {
      int32_t t = w.lines.line_of(a, b);
      for (int p : w.lines.line_pts[t])
        if (on3[p]) {
          out.push_back(t);
          break;
        }
    }
  if ((int)out.size() != w.q + 1) throw std::logic_error("transversals: expected q+1 lines");
  return out;
}

// the q+1 isotropic lines meeting two disjoint isotropic lines: each point of
// k sees exactly one point of l perpendicular to it
inline std::vector<int32_t> singular_transversals(const geom::WGeometry& w, int32_t k,
                                                  int32_t l) {
  std::vector<int32_t> out;
  for (int a : w.lines.line_pts[k]) {
    int hit = -1;
    for (int b : w.lines.line_pts[l])
      if (w.adjacent(a, b)) {
        if (hit >= 0) throw std::logic_error("singular_transversals: perp meets twice");
        hit = b;
      }
    if (hit < 0) throw std::logic_error("singular_transversals: perp misses the line");
    out.push_back(w.lines.line_of(a, hit));
  }
  return out;
}

// perpendicularity read off the line sets alone: some disjoint pair in the
// first set has all of its singular transversals inside the second set
inline bool perp_from_lines(const geom::WGeometry& w, const ULineSet& a, const ULineSet& b) {
  for (size_t i = 0; i < a.lines.size(); ++i)
    for (size_t j = i + 1; j < a.lines.size(); ++j) {
      if (lines_meet(w, a.lines[i], a.lines[j])) continue;
      bool inside = true;
      for (int32_t t : singular_transversals(w, a.lines[i], a.lines[j]))
        if (!(b.bits[t >> 6] >> (t & 63) & 1)) {
          inside = false;
          break;
        }
      if (inside) return true;
    }
  return false;
}

// same labels as classify_pair, derived without leaving the symplectic space
inline RelationLabel relation_from_lines(const geom::WGeometry& w, const ULineSet& a,
                                         const ULineSet& b) {
  int q = w.q;
  int inter = 0;
  for (size_t i = 0; i < a.bits.size(); ++i) inter += std::popcount(a.bits[i] & b.bits[i]);
  if (inter == 2 * q + 1) return RelationLabel::R1;
  if (inter != q + 1) throw std::logic_error("relation_from_lines: unexpected overlap size");

  std::vector<int32_t> common;
  for (int32_t l : a.lines) {
    if (b.bits[l >> 6] >> (l & 63) & 1) common.push_back(l);
    if (common.size() == 3) break;
  }
  int sing = 0;
  for (int32_t t : transversals(w, common[0], common[1], common[2]))
    sing += w.line_isotropic[t];
  if (sing != 0 && sing != 2)
    throw std::logic_error("relation_from_lines: singular transversal count");
  switch (q) {
    case 3:
      if (sing != 0) throw std::logic_error("relation_from_lines: secant pair at q=3");
      return RelationLabel::R2;
    case 5:
      return sing == 2 ? RelationLabel::R3 : RelationLabel::R2;
    case 7:
      if (sing == 2) return RelationLabel::R2;
      return perp_from_lines(w, a, b) ? RelationLabel::R3 : RelationLabel::R4;
  }
  throw std::domain_error("relation_from_lines: pair classification covers q in {3,5,7}");
}

// ------------------------------------------------------------- the dictionary

// the pole of the hyperplane spanned by the quadric images of a pair's
// joining lines; ranges bijectively over the hyperbolic points
inline int32_t x_of_U(const HyperbolicPointModel& m, const geom::WGeometry& w,
                      const geom::HyperbolicPair& u) {
  const auto& pa = w.lines.line_pts[u.line];
  const auto& pb = w.lines.line_pts[u.partner];
  Mat rows((int)(pa.size() * pb.size()), 5);
  int r = 0;
  for (int a : pa)
    for (int b : pb) {
      int32_t id = m.line_to_p4[w.lines.line_of(a, b)];
      if (id < 0) throw std::logic_error("x_of_U: joining line is not isotropic");
      rows.set_row(r++, m.p4.point(id));
    }
  geom::Subspace alpha = geom::span_rows(m.F, std::move(rows));
  if (alpha.rank() != 4) throw std::logic_error("x_of_U: span is not a hyperplane");
  Mat ns = linalg::null_space(m.F, linalg::mat_mul(m.F, alpha.basis, m.gram));
  if (ns.rows != 1) throw std::logic_error("x_of_U: pole is not a point");
  int32_t x = (int32_t)m.p4.id_of(m.F, ns.row(0));
  if (m.p_index[x] < 0) throw std::logic_error("x_of_U: pole is not a hyperbolic point");
  return x;
}

// ------------------------------------------------------------ the group

// matrix generators of the full symplectic similitude action on the points,
// with the permutations they induce
struct SimilitudeGroup {
  std::vector<Mat> matrices;
  std::vector<perm::Perm> point_perms;
  std::vector<perm::Perm> line_perms;
  unsigned long long order = 0;
};

inline unsigned long long similitude_group_order(int q) {
  unsigned long long b = q;
  return b * b * b * b * (b * b - 1) * (b * b * b * b - 1);
}

// x -> x + B(x,v) v, written for row vectors as I + (G v^T) v
inline Mat transvection_matrix(const Field& F, const Mat& gram, const Vec& v) {
  int n = gram.rows;
  Mat m = linalg::mat_identity(F, n);
  for (int i = 0; i < n; ++i) {
    Fe w = F.zero();
    for (int j = 0; j < n; ++j) w = F.add(w, F.mul(gram.at(i, j), v[j]));
    for (int j = 0; j < n; ++j) m.at(i, j) = F.add(m.at(i, j), F.mul(w, v[j]));
  }
  return m;
}

// diag(1,nu,1,nu) scales the form by the nonsquare nu
inline Mat similitude_matrix(const Field& F) {
  Mat m = linalg::mat_identity(F, 4);
  m.at(1, 1) = F.nonsquare();
  m.at(3, 3) = F.nonsquare();
  return m;
}

inline perm::Perm point_perm_of_matrix(const Field& F, const geom::PointTable& pts,
                                       const Mat& m) {
  perm::Perm p(pts.size());
  std::vector<uint8_t> seen(pts.size(), 0);
  for (int id = 0; id < pts.size(); ++id) {
    int img = pts.id_of(F, linalg::vec_mat(F, pts.point(id), m));
    if (seen[img]) throw std::logic_error("point_perm_of_matrix: matrix is singular");
    seen[img] = 1;
    p[id] = img;
  }
  return p;
}

inline perm::Perm line_perm_of_point_perm(const geom::LineTable& lines, const perm::Perm& pp) {
  perm::Perm lp(lines.size());
  for (int l = 0; l < lines.size(); ++l) {
    const auto& ids = lines.line_pts[l];
    lp[l] = lines.line_of(pp[ids[0]], pp[ids[1]]);
  }
  return lp;
}

// greedily keep the generators that enlarge the stabilizer chain until the
// whole similitude action is certified
inline SimilitudeGroup group_generators(const geom::WGeometry& w) {
  SimilitudeGroup g;
  unsigned long long target = similitude_group_order(w.q);
  perm::StabilizerChain chain(w.pts.size());
  auto try_add = [&](Mat m) {
    perm::Perm pp = point_perm_of_matrix(w.F, w.pts, m);
    if (!chain.extend(pp)) return;
    g.line_perms.push_back(line_perm_of_point_perm(w.lines, pp));
    g.point_perms.push_back(std::move(pp));
    g.matrices.push_back(std::move(m));
  };
  try_add(similitude_matrix(w.F));
  for (int p = 0; p < w.pts.size() && chain.order() < target; ++p)
    try_add(transvection_matrix(w.F, w.form.gram, w.pts.point(p)));
  g.order = chain.order();
  if (g.order != target) throw std::logic_error("group_generators: order certificate failed");
  return g;
}

// ------------------------------------------------------- orbits of spreads

struct OrbitInfo {
  unsigned long long orbit_size = 0;
  unsigned long long stabilizer_order = 0;
};

namespace detail {

struct LineSetHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t x : v) {
      h ^= (uint32_t)x;
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

inline std::vector<int32_t> map_lines(const perm::Perm& lp, const std::vector<int32_t>& lines) {
  std::vector<int32_t> out;
  out.reserve(lines.size());
  for (int32_t l : lines) out.push_back(lp[l]);
  std::sort(out.begin(), out.end());
  return out;
}

// BFS over generator images; with a target, stops early on first contact
inline unsigned long long line_set_orbit(const SimilitudeGroup& g,
                                         const std::vector<int32_t>& start,
                                         const std::vector<int32_t>* target, bool* found) {
  std::unordered_set<std::vector<int32_t>, LineSetHash> seen;
  std::vector<std::vector<int32_t>> frontier{start};
  seen.insert(start);
  if (found) *found = target && start == *target;
  if (found && *found) return seen.size();
  for (size_t i = 0; i < frontier.size(); ++i)
    for (const auto& lp : g.line_perms) {
      auto img = map_lines(lp, frontier[i]);
      if (!seen.insert(img).second) continue;
      if (target && img == *target) {
        if (found) *found = true;
        return seen.size();
      }
      frontier.push_back(std::move(img));
    }
  return seen.size();
}

}  // namespace detail

inline OrbitInfo orbit_and_stabilizer(const spreads::SpecialSpread& s,
                                      const SimilitudeGroup& g) {
  OrbitInfo oi;
  oi.orbit_size = detail::line_set_orbit(g, s.lines, nullptr, nullptr);
  if (oi.orbit_size == 0 || g.order % oi.orbit_size != 0)
    throw std::logic_error("orbit_and_stabilizer: orbit does not divide the group order");
  oi.stabilizer_order = g.order / oi.orbit_size;
  return oi;
}

// ------------------------------------------------------------- classifier

// ties the symplectic space, the point model, the pair catalog and the
// dictionary together
struct Classifier {
  const geom::WGeometry* w;
  HyperbolicPointModel model;
  spreads::UCatalog cat;
  std::vector<int32_t> x_of_u;  // pair index -> point of the model
  std::vector<int32_t> u_of_x;  // position in model.points -> pair index

  explicit Classifier(const geom::WGeometry& w_in) : w(&w_in), model(w_in), cat(w_in) {
    u_of_x.assign(model.points.size(), -1);
    x_of_u.reserve(cat.pairs.size());
    for (size_t i = 0; i < cat.pairs.size(); ++i) {
      int32_t x = x_of_U(model, *w, cat.pairs[i]);
      if (u_of_x[model.p_index[x]] != -1) throw std::logic_error("Classifier: repeated pole");
      u_of_x[model.p_index[x]] = (int32_t)i;
      x_of_u.push_back(x);
    }
    if (x_of_u.size() != model.points.size())
      throw std::logic_error("Classifier: pole map is not onto");
  }

  std::vector<int32_t> spread_points(const spreads::SpecialSpread& s) const {
    std::vector<int32_t> xs;
    for (const auto& u : s.pairs()) xs.push_back(x_of_u[cat.u_of_line[u.line]]);
    return xs;
  }

  std::vector<long long> characteristic_of(const spreads::SpecialSpread& s) const {
    return characteristic(model, spread_points(s));
  }

  std::vector<long long> characteristic_from_lines(const spreads::SpecialSpread& s) const {
    auto us = s.pairs();
    std::vector<ULineSet> data;
    data.reserve(us.size());
    for (const auto& u : us) data.push_back(u_singular_lines(*w, u));
    std::vector<long long> out(relation_count(w->q), 0);
    for (size_t i = 0; i < data.size(); ++i)
      for (size_t j = i + 1; j < data.size(); ++j)
        ++out[(int)relation_from_lines(*w, data[i], data[j]) - 1];
    return out;
  }

  // both routes, checked against each other
  std::vector<long long> characteristic_of_spread(const spreads::SpecialSpread& s) const {
    auto a = characteristic_of(s);
    if (a != characteristic_from_lines(s))
      throw std::logic_error("characteristic_of_spread: the two routes disagree");
    return a;
  }

  perm::Perm u_perm(const perm::Perm& line_perm) const {
    perm::Perm out(cat.pairs.size());
    for (size_t i = 0; i < cat.pairs.size(); ++i)
      out[i] = cat.u_of_line[line_perm[cat.pairs[i].line]];
    return out;
  }

  perm::Perm p_perm(const perm::Perm& line_perm) const {
    perm::Perm out(model.points.size());
    for (size_t i = 0; i < cat.pairs.size(); ++i) {
      int32_t j = cat.u_of_line[line_perm[cat.pairs[i].line]];
      out[model.p_index[x_of_u[i]]] = model.p_index[x_of_u[j]];
    }
    return out;
  }

  // exact orbit test for q <= 5; for larger q the characteristic decides,
  // which separates every known class
  bool equivalent(const SimilitudeGroup& g, const spreads::SpecialSpread& s1,
                  const spreads::SpecialSpread& s2) const {
    if (s1.q != s2.q || s1.q != w->q) throw std::invalid_argument("equivalent: mixed q");
    if (w->q <= 5) {
      bool found = false;
      detail::line_set_orbit(g, s1.lines, &s2.lines, &found);
      return found;
    }
    return characteristic_of(s1) == characteristic_of(s2);
  }
};

// ------------------------------------------------------- census bucketing

struct SpreadClass {
  spreads::SpecialSpread rep;
  std::vector<long long> characteristic;
  unsigned long long count = 0;
};

// bucket spreads by characteristic, keeping the first representative seen
inline std::vector<SpreadClass> classes_by_characteristic(
    const Classifier& cl, const std::vector<spreads::SpecialSpread>& all) {
  std::vector<SpreadClass> out;
  std::map<std::vector<long long>, size_t> where;
  for (const auto& s : all) {
    auto c = cl.characteristic_of(s);
    auto [it, fresh] = where.emplace(c, out.size());
    if (fresh)
      out.push_back({s, std::move(c), 1});
    else
      ++out[it->second].count;
  }
  return out;
}

}  // namespace spreadforge::classify
