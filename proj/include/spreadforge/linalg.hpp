#pragma once

#include <stdexcept>
#include <vector>

#include "spreadforge/gf.hpp"

// Row-vector linear algebra over a gf::Field. Subspaces are row spans.

namespace spreadforge::linalg {

using gf::Fe;
using gf::Field;

using Vec = std::vector<Fe>;

struct Mat {
  int rows = 0, cols = 0;
  std::vector<Fe> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c) {}

  Fe& at(int r, int c) { return a[(size_t)r * cols + c]; }
  Fe at(int r, int c) const { return a[(size_t)r * cols + c]; }

  Vec row(int r) const { return Vec(a.begin() + (size_t)r * cols, a.begin() + (size_t)(r + 1) * cols); }

  void set_row(int r, const Vec& v) {
    for (int c = 0; c < cols; ++c) at(r, c) = v[c];
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

inline Mat mat_identity(const Field& F, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = F.one();
  return m;
}

inline Mat mat_from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return Mat(0, 0);
  Mat m((int)rows.size(), (int)rows[0].size());
  for (int r = 0; r < m.rows; ++r) m.set_row(r, rows[r]);
  return m;
}

inline Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) t.at(c, r) = m.at(r, c);
  return t;
}

inline Mat mat_mul(const Field& F, const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Mat z(x.rows, y.cols);
  for (int r = 0; r < x.rows; ++r)
    for (int k = 0; k < x.cols; ++k) {
      Fe xv = x.at(r, k);
      if (xv == F.zero()) continue;
      for (int c = 0; c < y.cols; ++c)
        z.at(r, c) = F.add(z.at(r, c), F.mul(xv, y.at(k, c)));
    }
  return z;
}

inline Vec vec_mat(const Field& F, const Vec& v, const Mat& m) {
  if ((int)v.size() != m.rows) throw std::invalid_argument("vec_mat: shape mismatch");
  Vec r(m.cols);
  for (int k = 0; k < m.rows; ++k) {
    if (v[k] == F.zero()) continue;
    for (int c = 0; c < m.cols; ++c) r[c] = F.add(r[c], F.mul(v[k], m.at(k, c)));
  }
  return r;
}

inline Fe dot(const Field& F, const Vec& u, const Vec& v) {
  Fe s = F.zero();
  for (size_t i = 0; i < u.size(); ++i) s = F.add(s, F.mul(u[i], v[i]));
  return s;
}

// reduced row echelon form in place; returns rank
inline int rref(const Field& F, Mat& m) {
  int rank = 0;
  for (int c = 0; c < m.cols && rank < m.rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < m.rows; ++r)
      if (m.at(r, c) != F.zero()) { pivot = r; break; }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(rank, j));
    Fe pinv = F.inv(m.at(rank, c));
    for (int j = 0; j < m.cols; ++j) m.at(rank, j) = F.mul(m.at(rank, j), pinv);
    for (int r = 0; r < m.rows; ++r) {
      if (r == rank) continue;
      Fe f = m.at(r, c);
      if (f == F.zero()) continue;
      for (int j = 0; j < m.cols; ++j)
        m.at(r, j) = F.sub(m.at(r, j), F.mul(f, m.at(rank, j)));
    }
    ++rank;
  }
  return rank;
}

inline int rank_of(const Field& F, Mat m) { return rref(F, m); }

// basis of {x : m x^T = 0}, one row per free column
inline Mat null_space(const Field& F, Mat m) {
  int rank = rref(F, m);
  std::vector<int> pivot_col(rank, -1);
  std::vector<char> is_pivot(m.cols, 0);
  for (int r = 0, c = 0; r < rank; ++r) {
    while (c < m.cols && m.at(r, c) == F.zero()) ++c;
    pivot_col[r] = c;
    is_pivot[c] = 1;
  }
  Mat basis(m.cols - rank, m.cols);
  int b = 0;
  for (int c = 0; c < m.cols; ++c) {
    if (is_pivot[c]) continue;
    basis.at(b, c) = F.one();
    for (int r = 0; r < rank; ++r) basis.at(b, pivot_col[r]) = F.neg(m.at(r, c));
    ++b;
  }
  return basis;
}

inline Mat mat_inverse(const Field& F, const Mat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("mat_inverse: not square");
  int n = m.rows;
  if (rank_of(F, m) != n) throw std::domain_error("mat_inverse: singular");
  Mat aug(n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) aug.at(r, c) = m.at(r, c);
    aug.at(r, n + r) = F.one();
  }
  rref(F, aug);
  Mat inv(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv.at(r, c) = aug.at(r, n + c);
  return inv;
}

}  // namespace spreadforge::linalg
