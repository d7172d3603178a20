#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spreadforge/linalg.hpp"

// Projective spaces PG(n,q): interned point tables, row-span subspaces,
// symplectic and quadratic forms, quadrics, and the line <-> point
// correspondence between PG(3,q) and the hyperbolic quadric in PG(5,q).

namespace spreadforge::geom {

using gf::Fe;
using gf::Field;
using linalg::Mat;
using linalg::Vec;

// ---------------------------------------------------------------- points

class PointTable {
 public:
  PointTable() = default;

  // all points of PG(n,q) in lexicographic order of normalized coordinates
  PointTable(const Field& F, int n) : q_(F.q()), dim_(n + 1) {
    if (n < 1) throw std::invalid_argument("PointTable: n < 1");
    long long total = 1;
    for (int i = 0; i < dim_; ++i) total *= q_;
    for (long long m = 1; m < total; ++m) {
      Vec v(dim_);
      long long t = m;
      for (int i = dim_ - 1; i >= 0; --i) {
        v[i] = F.el((int)(t % q_));
        t /= q_;
      }
      int lead = 0;
      while (v[lead] == F.zero()) ++lead;
      if (v[lead] != F.one()) continue;
      index_.emplace(encode(v), (int32_t)pts_.size());
      pts_.push_back(std::move(v));
    }
  }

  int n() const { return dim_ - 1; }
  int dim() const { return dim_; }
  int q() const { return q_; }
  int size() const { return (int)pts_.size(); }
  const Vec& point(int id) const { return pts_[id]; }

  // scale so the first nonzero coordinate is 1; false on the zero vector
  bool normalize(const Field& F, Vec& v) const {
    int lead = -1;
    for (int i = 0; i < (int)v.size(); ++i)
      if (v[i] != F.zero()) { lead = i; break; }
    if (lead < 0) return false;
    Fe s = F.inv(v[lead]);
    for (auto& c : v) c = F.mul(c, s);
    return true;
  }

  int id_of(const Field& F, Vec v) const {
    if (!normalize(F, v)) throw std::invalid_argument("PointTable::id_of: zero vector");
    auto it = index_.find(encode(v));
    if (it == index_.end()) throw std::logic_error("PointTable::id_of: not found");
    return it->second;
  }

  uint64_t encode(const Vec& v) const {
    uint64_t key = 0;
    for (int i = 0; i < (int)v.size(); ++i) key = key * (uint64_t)q_ + v[i].v;
    return key;
  }

 private:
  int q_ = 0, dim_ = 0;
  std::vector<Vec> pts_;
  std::unordered_map<uint64_t, int32_t> index_;
};

// ------------------------------------------------------------- subspaces

struct Subspace {
  Mat basis;  // reduced row echelon, full row rank

  int rank() const { return basis.rows; }
  int pdim() const { return basis.rows - 1; }

  friend bool operator==(const Subspace& a, const Subspace& b) { return a.basis == b.basis; }
};

inline Subspace span_rows(const Field& F, Mat m) {
  int r = linalg::rref(F, m);
  Mat basis(r, m.cols);
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < m.cols; ++c) basis.at(i, c) = m.at(i, c);
  return {std::move(basis)};
}

inline Subspace span_of_points(const Field& F, const PointTable& pt, const std::vector<int>& ids) {
  Mat m((int)ids.size(), pt.dim());
  for (int i = 0; i < (int)ids.size(); ++i) m.set_row(i, pt.point(ids[i]));
  return span_rows(F, m);
}

inline Subspace line_through(const Field& F, const PointTable& pt, int a, int b) {
  if (a == b) throw std::invalid_argument("line_through: coincident points");
  Subspace s = span_of_points(F, pt, {a, b});
  if (s.rank() != 2) throw std::logic_error("line_through: degenerate span");
  return s;
}

inline bool subspace_contains(const Field& F, const Subspace& s, const Vec& v) {
  Mat m(s.basis.rows + 1, s.basis.cols);
  for (int r = 0; r < s.basis.rows; ++r)
    for (int c = 0; c < m.cols; ++c) m.at(r, c) = s.basis.at(r, c);
  m.set_row(s.basis.rows, v);
  return linalg::rref(F, m) == s.basis.rows;
}

// point ids of a subspace, ascending
inline std::vector<int> points_of(const Field& F, const PointTable& pt, const Subspace& s) {
  int r = s.rank();
  std::vector<int> ids;
  std::vector<int> coef(r, 0);
  for (int lead = 0; lead < r; ++lead) {
    // first nonzero coefficient fixed to 1: each point appears once
    long long combos = 1;
    for (int i = lead + 1; i < r; ++i) combos *= F.q();
    for (long long m = 0; m < combos; ++m) {
      Vec v(s.basis.cols);
      Vec c(r, F.zero());
      c[lead] = F.one();
      long long t = m;
      for (int i = lead + 1; i < r; ++i) {
        c[i] = F.el((int)(t % F.q()));
        t /= F.q();
      }
      for (int i = lead; i < r; ++i) {
        if (c[i] == F.zero()) continue;
        for (int j = 0; j < s.basis.cols; ++j)
          v[j] = F.add(v[j], F.mul(c[i], s.basis.at(i, j)));
      }
      ids.push_back(pt.id_of(F, v));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline Subspace subspace_intersection(const Field& F, const Subspace& a, const Subspace& b) {
  int ra = a.basis.rows, rb = b.basis.rows, n = a.basis.cols;
  Mat stacked(ra + rb, n);
  for (int r = 0; r < ra; ++r)
    for (int c = 0; c < n; ++c) stacked.at(r, c) = a.basis.at(r, c);
  for (int r = 0; r < rb; ++r)
    for (int c = 0; c < n; ++c) stacked.at(ra + r, c) = F.neg(b.basis.at(r, c));
  Mat z = linalg::null_space(F, linalg::transpose(stacked));
  Mat inter(z.rows, n);
  for (int r = 0; r < z.rows; ++r) {
    Vec v(n);
    for (int k = 0; k < ra; ++k) {
      if (z.at(r, k) == F.zero()) continue;
      for (int c = 0; c < n; ++c) v[c] = F.add(v[c], F.mul(z.at(r, k), a.basis.at(k, c)));
    }
    inter.set_row(r, v);
  }
  return span_rows(F, inter);
}

inline uint64_t subspace_key(const PointTable& pt, const Subspace& s) {
  uint64_t h = 1469598103934665603ull;
  for (int r = 0; r < s.basis.rows; ++r) {
    uint64_t e = pt.encode(s.basis.row(r));
    h = (h ^ e) * 1099511628211ull;
  }
  return h;
}

// ----------------------------------------------------------------- forms

// alternating form given by a Gram matrix
struct SymplecticForm {
  Mat gram;

  // pairs (x1,x2),(x3,x4),... : B(x,y) = x1 y2 - x2 y1 + x3 y4 - x4 y3 + ...
  static SymplecticForm standard(const Field& F, int dim) {
    if (dim % 2 != 0) throw std::invalid_argument("SymplecticForm: odd dimension");
    Mat g(dim, dim);
    for (int i = 0; i + 1 < dim; i += 2) {
      g.at(i, i + 1) = F.one();
      g.at(i + 1, i) = F.neg(F.one());
    }
    return {std::move(g)};
  }

  Fe eval(const Field& F, const Vec& x, const Vec& y) const {
    return linalg::dot(F, linalg::vec_mat(F, x, gram), y);
  }
};

inline Subspace perp(const Field& F, const Subspace& s, const Mat& gram) {
  return span_rows(F, linalg::null_space(F, linalg::mat_mul(F, s.basis, gram)));
}

inline bool is_totally_isotropic(const Field& F, const Subspace& s, const Mat& gram) {
  Mat prod = linalg::mat_mul(F, linalg::mat_mul(F, s.basis, gram), linalg::transpose(s.basis));
  for (auto e : prod.a)
    if (e != F.zero()) return false;
  return true;
}

// quadratic form stored by its upper-triangular coefficient matrix
struct QuadraticForm {
  Mat upper;

  static QuadraticForm from_upper(Mat u) {
    for (int r = 0; r < u.rows; ++r)
      for (int c = 0; c < r; ++c)
        if (u.at(r, c).v != 0) throw std::invalid_argument("QuadraticForm: not upper triangular");
    return {std::move(u)};
  }

  // p12 p34 - p13 p24 + p14 p23 on Plucker coordinates
  static QuadraticForm plucker_relation(const Field& F) {
    Mat u(6, 6);
    u.at(0, 5) = F.one();
    u.at(1, 4) = F.neg(F.one());
    u.at(2, 3) = F.one();
    return {std::move(u)};
  }

  Fe eval(const Field& F, const Vec& v) const {
    Fe s = F.zero();
    for (int i = 0; i < upper.rows; ++i) {
      if (v[i] == F.zero()) continue;
      for (int j = i; j < upper.cols; ++j) {
        if (upper.at(i, j) == F.zero()) continue;
        s = F.add(s, F.mul(upper.at(i, j), F.mul(v[i], v[j])));
      }
    }
    return s;
  }

  // B(x,y) = Q(x+y) - Q(x) - Q(y)
  Mat bilinear_gram(const Field& F) const {
    Mat g(upper.rows, upper.cols);
    for (int r = 0; r < upper.rows; ++r)
      for (int c = 0; c < upper.cols; ++c) g.at(r, c) = F.add(upper.at(r, c), upper.at(c, r));
    return g;
  }
};

// -------------------------------------------------------------- quadrics

inline std::vector<int> quadric_points(const Field& F, const PointTable& pt, const QuadraticForm& qf) {
  std::vector<int> ids;
  for (int i = 0; i < pt.size(); ++i)
    if (qf.eval(F, pt.point(i)) == F.zero()) ids.push_back(i);
  return ids;
}

enum class QuadricType { elliptic, hyperbolic, parabolic, degenerate };

inline const char* quadric_type_name(QuadricType t) {
  switch (t) {
    case QuadricType::elliptic: return "elliptic";
    case QuadricType::hyperbolic: return "hyperbolic";
    case QuadricType::parabolic: return "parabolic";
    default: return "degenerate";
  }
}

struct QuadricInfo {
  QuadricType type = QuadricType::degenerate;
  int points = 0;
  bool singular = false;
};

// singular means the quadric contains a point in the radical of its bilinear form
inline bool quadric_is_singular(const Field& F, const PointTable& pt, const QuadraticForm& qf,
                                const std::vector<int>& on_quadric) {
  Mat g = qf.bilinear_gram(F);
  for (int id : on_quadric) {
    Vec w = linalg::vec_mat(F, pt.point(id), g);
    bool rad = true;
    for (auto e : w)
      if (e != F.zero()) { rad = false; break; }
    if (rad) return true;
  }
  return false;
}

// classification by exact point count against the nondegenerate counts
inline QuadricInfo quadric_type(const Field& F, const PointTable& pt, const QuadraticForm& qf) {
  QuadricInfo info;
  std::vector<int> on = quadric_points(F, pt, qf);
  info.points = (int)on.size();
  info.singular = quadric_is_singular(F, pt, qf, on);
  long long q = F.q();
  int dim = pt.dim();
  if (!info.singular) {
    if (dim == 3 && info.points == q + 1) info.type = QuadricType::parabolic;  // conic
    if (dim == 4 && info.points == q * q + 1) info.type = QuadricType::elliptic;
    if (dim == 4 && info.points == (q + 1) * (q + 1)) info.type = QuadricType::hyperbolic;
    if (dim == 5 && info.points == q * q * q + q * q + q + 1) info.type = QuadricType::parabolic;
    if (dim == 6 && info.points == (q * q + 1) * (q * q + q + 1)) info.type = QuadricType::hyperbolic;
    if (dim == 6 && info.points == (q * q + 1) * (q * q - q + 1)) info.type = QuadricType::elliptic;
  }
  return info;
}

// tangent / secant / external according to intersection size with the quadric
enum class LineClass { external, tangent, secant, contained };

inline LineClass line_class(const Field& F, const PointTable& pt, const QuadraticForm& qf,
                            const Subspace& line) {
  if (line.rank() != 2) throw std::invalid_argument("line_class: not a line");
  int hits = 0;
  for (int id : points_of(F, pt, line))
    if (qf.eval(F, pt.point(id)) == F.zero()) ++hits;
  if (hits == 0) return LineClass::external;
  if (hits == 1) return LineClass::tangent;
  if (hits == 2) return LineClass::secant;
  if (hits == F.q() + 1) return LineClass::contained;
  throw std::logic_error("line_class: impossible intersection count");
}

// interior / exterior of a conic in PG(2,q), q odd: exterior points lie on
// two tangents, interior points on none
enum class ConicPointClass { on_conic, interior, exterior };

inline ConicPointClass conic_point_class(const Field& F, const PointTable& pt,
                                         const QuadraticForm& conic, int x) {
  if (pt.dim() != 3) throw std::invalid_argument("conic_point_class: not PG(2,q)");
  if (F.q() % 2 == 0) throw std::invalid_argument("conic_point_class: q must be odd");
  if (conic.eval(F, pt.point(x)) == F.zero()) return ConicPointClass::on_conic;
  int tangents = 0;
  for (int y = 0; y < pt.size(); ++y) {
    if (y == x) continue;
    Subspace l = line_through(F, pt, x, y);
    // count each line once, via its lexicographically least second point
    bool first = true;
    for (int id : points_of(F, pt, l))
      if (id != x && id < y) { first = false; break; }
    if (!first) continue;
    if (line_class(F, pt, conic, l) == LineClass::tangent) ++tangents;
  }
  if (tangents == 0) return ConicPointClass::interior;
  if (tangents == 2) return ConicPointClass::exterior;
  throw std::logic_error("conic_point_class: unexpected tangent count");
}

// ----------------------------------------------------------------- lines

// every line of PG(3,q), discovered in lexicographic point-pair order
struct LineTable {
  std::vector<Subspace> lines;
  std::vector<std::vector<int>> line_pts;  // ascending point ids
  std::vector<std::vector<int>> through;   // point id -> line ids
  std::unordered_map<uint64_t, int32_t> of_pair;

  static uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return ((uint64_t)a << 32) | (uint32_t)b;
  }

  LineTable() = default;

  LineTable(const Field& F, const PointTable& pt) {
    through.resize(pt.size());
    for (int a = 0; a < pt.size(); ++a) {
      for (int b = a + 1; b < pt.size(); ++b) {
        if (of_pair.count(pair_key(a, b))) continue;
        Subspace l = line_through(F, pt, a, b);
        std::vector<int> ids = points_of(F, pt, l);
        int32_t id = (int32_t)lines.size();
        for (size_t i = 0; i < ids.size(); ++i) {
          through[ids[i]].push_back(id);
          for (size_t j = i + 1; j < ids.size(); ++j)
            of_pair.emplace(pair_key(ids[i], ids[j]), id);
        }
        lines.push_back(std::move(l));
        line_pts.push_back(std::move(ids));
      }
    }
  }

  int size() const { return (int)lines.size(); }

  int line_of(int a, int b) const {
    auto it = of_pair.find(pair_key(a, b));
    if (it == of_pair.end()) throw std::invalid_argument("LineTable::line_of: coincident points");
    return it->second;
  }
};

// ----------------------------------------------- Plucker / Klein mapping

// p12, p13, p14, p23, p24, p34 of a 2 x 4 basis
inline Vec plucker(const Field& F, const Mat& b) {
  if (b.rows != 2 || b.cols != 4) throw std::invalid_argument("plucker: need a 2x4 basis");
  auto minor = [&](int i, int j) {
    return F.sub(F.mul(b.at(0, i), b.at(1, j)), F.mul(b.at(0, j), b.at(1, i)));
  };
  return {minor(0, 1), minor(0, 2), minor(0, 3), minor(1, 2), minor(1, 3), minor(2, 3)};
}

// bijection lines of PG(3,q) <-> points of the Plucker quadric in PG(5,q)
struct KleinMap {
  PointTable p5;
  QuadraticForm quad;
  std::vector<int32_t> line_to_p5;
  std::unordered_map<int32_t, int32_t> p5_to_line;

  KleinMap() = default;

  KleinMap(const Field& F, const LineTable& lt)
      : p5(F, 5), quad(QuadraticForm::plucker_relation(F)) {
    line_to_p5.resize(lt.size());
    for (int l = 0; l < lt.size(); ++l) {
      Vec pl = plucker(F, lt.lines[l].basis);
      if (quad.eval(F, pl) != F.zero()) throw std::logic_error("KleinMap: image off the quadric");
      int id = p5.id_of(F, pl);
      line_to_p5[l] = id;
      p5_to_line.emplace(id, l);
    }
  }

  int image(int line_id) const { return line_to_p5[line_id]; }

  int preimage(int p5_id) const {
    auto it = p5_to_line.find(p5_id);
    if (it == p5_to_line.end())
      throw std::invalid_argument("KleinMap::preimage: point not on the quadric");
    return it->second;
  }
};

// a non-isotropic line together with its polar line
struct HyperbolicPair {
  int32_t line = -1, partner = -1;
};

// ------------------------------------------- the symplectic space PG(3,q)

// PG(3,q) with the standard alternating form: points, lines, polarity,
// collinearity bitsets, Klein data
struct WGeometry {
  Field F;
  int q;
  PointTable pts;
  SymplecticForm form;
  LineTable lines;
  std::vector<uint8_t> line_isotropic;
  std::vector<int32_t> line_polar;  // image of each line under the polarity
  int words = 0;
  std::vector<uint64_t> adj;  // adjacency: distinct points with B(x,y) = 0
  KleinMap klein;

  explicit WGeometry(int q_in, bool with_klein = true)
      : F(Field::of_order(q_in)), q(q_in), pts(F, 3), form(SymplecticForm::standard(F, 4)),
        lines(F, pts) {
    int n = pts.size();
    words = (n + 63) / 64;
    adj.assign((size_t)n * words, 0);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (form.eval(F, pts.point(a), pts.point(b)) == F.zero()) {
          adj[(size_t)a * words + b / 64] |= 1ull << (b % 64);
          adj[(size_t)b * words + a / 64] |= 1ull << (a % 64);
        }
    line_isotropic.resize(lines.size());
    line_polar.resize(lines.size());
    for (int l = 0; l < lines.size(); ++l) {
      line_isotropic[l] = is_totally_isotropic(F, lines.lines[l], form.gram) ? 1 : 0;
      Subspace pol = perp(F, lines.lines[l], form.gram);
      std::vector<int> ids = points_of(F, pts, pol);
      line_polar[l] = lines.line_of(ids[0], ids[1]);
    }
    if (with_klein) klein = KleinMap(F, lines);
  }

  bool adjacent(int a, int b) const {
    return (adj[(size_t)a * words + b / 64] >> (b % 64)) & 1;
  }

  HyperbolicPair hyperbolic_pair(int line) const {
    if (line < 0 || line >= lines.size() || line_isotropic[line])
      throw std::invalid_argument("WGeometry::hyperbolic_pair: line is not hyperbolic");
    return {line, line_polar[line]};
  }

  const uint64_t* row(int a) const { return adj.data() + (size_t)a * words; }
};

}  // namespace spreadforge::geom
