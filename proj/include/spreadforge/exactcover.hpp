#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadforge/spreads.hpp"

// Exact cover via Algorithm X over bitset columns, plus the instance builders
// that turn a special-spread search into an exact cover: partition the points
// of W(q) by the 2(q+1)-point unions of polar line pairs, or dually cover the
// singular lines of a parabolic quadric in PG(4,q) by hyperbolic-section
// points.

namespace spreadforge::cover {

using geom::WGeometry;
using gf::Field;

struct ExactCoverInstance {
  int32_t n_cols = 0;
  std::vector<std::vector<int32_t>> rows;  // each strictly increasing
  std::vector<int64_t> row_tags;           // optional payload, parallel to rows
};

inline void validate_instance(const ExactCoverInstance& inst) {
  if (inst.n_cols < 0) throw std::invalid_argument("exact cover: negative column count");
  if (!inst.row_tags.empty() && inst.row_tags.size() != inst.rows.size())
    throw std::invalid_argument("exact cover: row_tags size mismatch");
  for (size_t r = 0; r < inst.rows.size(); ++r) {
    const auto& row = inst.rows[r];
    if (row.empty())
      throw std::invalid_argument("exact cover: row " + std::to_string(r) + " is empty");
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0 || row[i] >= inst.n_cols)
        throw std::invalid_argument("exact cover: row " + std::to_string(r) +
                                    " has an out-of-range column");
      if (i > 0 && row[i] <= row[i - 1])
        throw std::invalid_argument("exact cover: row " + std::to_string(r) +
                                    " is not strictly increasing");
    }
  }
}

// columns no row touches; nonempty means the instance has no cover at all
inline std::vector<int32_t> uncovered_columns(const ExactCoverInstance& inst) {
  std::vector<char> seen((size_t)inst.n_cols, 0);
  for (const auto& row : inst.rows)
    for (int32_t c : row) seen[(size_t)c] = 1;
  std::vector<int32_t> out;
  for (int32_t c = 0; c < inst.n_cols; ++c)
    if (!seen[(size_t)c]) out.push_back(c);
  return out;
}

struct CoverSolution {
  std::vector<int32_t> rows;  // ascending, forced rows included
};

// a solution prefix marker: the search order is deterministic, so the last
// emitted solution pins down exactly where to pick the search back up
struct Checkpoint {
  uint64_t emitted = 0;
  std::vector<int32_t> last_solution;
};

struct SolveOptions {
  std::vector<int32_t> forced_rows;
  uint64_t max_solutions = 0;  // cap on this run's emissions, 0 = none
  const Checkpoint* resume = nullptr;
  std::function<bool(const CoverSolution&)> on_solution;  // return false to stop
  bool store_solutions = true;
};

struct SolveResult {
  std::vector<CoverSolution> solutions;
  uint64_t emitted = 0;        // this run
  uint64_t total_emitted = 0;  // including the resumed-over prefix
  uint64_t nodes = 0;
  bool truncated = false;
  Checkpoint checkpoint;  // valid once total_emitted > 0
};

namespace detail {

using Words = std::vector<uint64_t>;

inline Words make_words(int32_t bits) { return Words(((size_t)bits + 63) / 64, 0); }
inline void set_bit(Words& w, int32_t i) { w[(size_t)i >> 6] |= uint64_t(1) << (i & 63); }
inline bool test_bit(const Words& w, int32_t i) {
  return (w[(size_t)i >> 6] >> (i & 63)) & 1;
}
inline void or_into(Words& a, const Words& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] |= b[i];
}
inline void andnot_into(Words& a, const Words& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] &= ~b[i];
}
inline bool intersects(const Words& a, const Words& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & b[i]) return true;
  return false;
}

inline int32_t next_bit(const Words& w, int32_t from) {
  if (from < 0) from = 0;
  size_t wi = (size_t)from >> 6;
  if (wi >= w.size()) return -1;
  uint64_t cur = w[wi] & (~uint64_t(0) << (from & 63));
  for (;;) {
    if (cur) return (int32_t)(wi * 64 + (size_t)std::countr_zero(cur));
    if (++wi == w.size()) return -1;
    cur = w[wi];
  }
}

}  // namespace detail

inline SolveResult solve_all(const ExactCoverInstance& inst, const SolveOptions& opts = {}) {
  using namespace detail;
  validate_instance(inst);

  const int32_t n_cols = inst.n_cols;
  const int32_t n_rows = (int32_t)inst.rows.size();

  std::vector<Words> row_cols((size_t)n_rows, make_words(n_cols));
  std::vector<Words> col_rows((size_t)n_cols, make_words(n_rows));
  for (int32_t r = 0; r < n_rows; ++r)
    for (int32_t c : inst.rows[(size_t)r]) {
      set_bit(row_cols[(size_t)r], c);
      set_bit(col_rows[(size_t)c], r);
    }
  // rows sharing a column with r, r itself included
  std::vector<Words> conflicts((size_t)n_rows, make_words(n_rows));
  for (int32_t r = 0; r < n_rows; ++r)
    for (int32_t c : inst.rows[(size_t)r]) or_into(conflicts[(size_t)r], col_rows[(size_t)c]);

  Words full_cols = make_words(n_cols);
  for (int32_t c = 0; c < n_cols; ++c) set_bit(full_cols, c);

  Words alive = make_words(n_rows);
  for (int32_t r = 0; r < n_rows; ++r) set_bit(alive, r);
  Words covered = make_words(n_cols);

  auto apply_row = [&](int32_t r) {
    or_into(covered, row_cols[(size_t)r]);
    andnot_into(alive, conflicts[(size_t)r]);
  };

  for (size_t i = 0; i < opts.forced_rows.size(); ++i) {
    int32_t r = opts.forced_rows[i];
    if (r < 0 || r >= n_rows) throw std::invalid_argument("exact cover: forced row out of range");
    if (intersects(row_cols[(size_t)r], covered))
      throw std::invalid_argument("exact cover: forced rows are not pairwise disjoint");
    apply_row(r);
  }

  // lowest-index column with the fewest alive rows; count 0 wins immediately
  auto choose_col = [&]() -> std::pair<int32_t, int32_t> {
    int32_t best_c = -1, best = INT32_MAX;
    for (int32_t c = 0; c < n_cols; ++c) {
      if (test_bit(covered, c)) continue;
      const Words& cr = col_rows[(size_t)c];
      int32_t cnt = 0;
      for (size_t w = 0; w < cr.size(); ++w) {
        cnt += std::popcount(cr[w] & alive[w]);
        if (cnt > best) break;
      }
      if (cnt > best) continue;
      if (cnt == 0) return {c, 0};
      if (cnt < best) {
        best = cnt;
        best_c = c;
      }
    }
    return {best_c, best};
  };

  struct Frame {
    Words alive, covered, cand;
    int32_t row;
  };
  std::vector<Frame> stack;

  SolveResult out;
  uint64_t prior = 0;

  auto current_solution = [&]() {
    CoverSolution sol;
    sol.rows = opts.forced_rows;
    for (const Frame& f : stack) sol.rows.push_back(f.row);
    std::sort(sol.rows.begin(), sol.rows.end());
    return sol;
  };

  if (opts.resume) {
    prior = opts.resume->emitted;
    std::vector<int32_t> target = opts.resume->last_solution;
    for (int32_t f : opts.forced_rows) {
      auto it = std::find(target.begin(), target.end(), f);
      if (it == target.end())
        throw std::invalid_argument("exact cover: checkpoint omits a forced row");
      target.erase(it);
    }
    while (covered != full_cols) {
      auto [c, cnt] = choose_col();
      if (cnt == 0) throw std::invalid_argument("exact cover: checkpoint does not fit instance");
      int32_t chosen = -1;
      for (int32_t r : target)
        if (test_bit(row_cols[(size_t)r], c)) {
          chosen = r;
          break;
        }
      if (chosen < 0 || !test_bit(alive, chosen))
        throw std::invalid_argument("exact cover: checkpoint does not fit instance");
      Frame f;
      f.alive = alive;
      f.covered = covered;
      f.cand = col_rows[(size_t)c];
      for (size_t w = 0; w < f.cand.size(); ++w) f.cand[w] &= alive[w];
      f.row = chosen;
      stack.push_back(std::move(f));
      apply_row(chosen);
      target.erase(std::find(target.begin(), target.end(), chosen));
    }
    if (!target.empty() || current_solution().rows != opts.resume->last_solution)
      throw std::invalid_argument("exact cover: checkpoint does not fit instance");
  }

  bool advancing = opts.resume != nullptr;  // a resumed run continues past the marker
  for (;;) {
    if (!advancing) {
      if (covered == full_cols) {
        CoverSolution sol = current_solution();
        ++out.emitted;
        out.checkpoint = {prior + out.emitted, sol.rows};
        bool keep_going = true;
        if (opts.on_solution) keep_going = opts.on_solution(sol);
        if (opts.store_solutions) out.solutions.push_back(std::move(sol));
        if (!keep_going || (opts.max_solutions && out.emitted >= opts.max_solutions)) {
          out.truncated = true;
          break;
        }
        advancing = true;
        continue;
      }
      auto [c, cnt] = choose_col();
      if (cnt == 0) {
        advancing = true;
        continue;
      }
      Frame f;
      f.alive = alive;
      f.covered = covered;
      f.cand = col_rows[(size_t)c];
      for (size_t w = 0; w < f.cand.size(); ++w) f.cand[w] &= alive[w];
      f.row = next_bit(f.cand, 0);
      ++out.nodes;
      apply_row(f.row);
      stack.push_back(std::move(f));
      continue;
    }
    if (stack.empty()) break;
    Frame& f = stack.back();
    alive = f.alive;
    covered = f.covered;
    int32_t nr = next_bit(f.cand, f.row + 1);
    if (nr < 0) {
      stack.pop_back();
      continue;
    }
    f.row = nr;
    ++out.nodes;
    apply_row(nr);
    advancing = false;
  }

  out.total_emitted = prior + out.emitted;
  return out;
}

// --------------------------------------------------- instance text format

inline void write_instance_text(std::ostream& os, const ExactCoverInstance& inst) {
  os << inst.n_cols << "\n";
  for (const auto& row : inst.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
    os << "\n";
  }
}

inline ExactCoverInstance read_instance_text(std::istream& is) {
  ExactCoverInstance inst;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("exact cover: empty instance text");
  inst.n_cols = std::stoi(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<int32_t> row;
    int32_t c;
    while (ls >> c) row.push_back(c);
    inst.rows.push_back(std::move(row));
  }
  validate_instance(inst);
  return inst;
}

// ------------------------------------------------------ spread instances

// columns are the points of W(q), one row per polar pair in U
inline ExactCoverInstance build_spread_instance(const WGeometry& w,
                                                const spreads::UCatalog& cat) {
  ExactCoverInstance inst;
  inst.n_cols = w.pts.size();
  inst.rows.reserve(cat.pairs.size());
  for (size_t i = 0; i < cat.pairs.size(); ++i) {
    const auto& u = spreads::union_points(w, cat.pairs[i]);
    inst.rows.emplace_back(u.begin(), u.end());
    inst.row_tags.push_back((int64_t)i);
  }
  return inst;
}

// The dual picture lives on a parabolic quadric in PG(4,q): its singular
// lines are the columns, and each point whose perp section is hyperbolic
// covers the 2(q+1) singular lines of that section.  Covers match the
// point-side instance one for one.
struct DualInstanceBuild {
  ExactCoverInstance inst;
  std::vector<std::vector<int>> line_points;  // per column, singular point ids
  std::vector<int32_t> row_points;            // PG(4,q) point id per row
};

inline DualInstanceBuild build_dual_instance(const Field& F) {
  using linalg::Mat;
  using linalg::Vec;
  int q = F.q();
  DualInstanceBuild b;
  geom::PointTable pts(F, 4);

  Mat upper(5, 5);
  upper.at(0, 0) = F.one();
  upper.at(1, 2) = F.one();
  upper.at(3, 4) = F.one();
  geom::QuadraticForm qf = geom::QuadraticForm::from_upper(upper);

  std::vector<int> on = geom::quadric_points(F, pts, qf);
  if ((int)on.size() != q * q * q + q * q + q + 1)
    throw std::logic_error("dual instance: quadric is not parabolic");
  std::vector<char> singular((size_t)pts.size(), 0);
  for (int id : on) singular[(size_t)id] = 1;

  Mat g = qf.bilinear_gram(F);
  auto perp = [&](int a, int bpt) {
    return linalg::dot(F, linalg::vec_mat(F, pts.point(a), g), pts.point(bpt)) == F.zero();
  };

  // a line through two singular points is singular iff the points are perp
  std::vector<char> line_seen;
  std::vector<uint64_t> keys;
  for (size_t i = 0; i < on.size(); ++i)
    for (size_t j = i + 1; j < on.size(); ++j) {
      if (!perp(on[i], on[j])) continue;
      geom::Subspace l = geom::line_through(F, pts, on[i], on[j]);
      uint64_t key = geom::subspace_key(pts, l);
      if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      keys.push_back(key);
      b.line_points.push_back(geom::points_of(F, pts, l));
    }
  if ((int)b.line_points.size() != (q + 1) * (q * q + 1))
    throw std::logic_error("dual instance: singular line count is off");

  b.inst.n_cols = (int32_t)b.line_points.size();
  for (int x = 0; x < pts.size(); ++x) {
    if (singular[(size_t)x]) continue;
    Vec gx = linalg::vec_mat(F, pts.point(x), g);
    std::vector<char> sees((size_t)pts.size(), 0);
    int sec = 0;
    for (int p : on)
      if (linalg::dot(F, gx, pts.point(p)) == F.zero()) {
        sees[(size_t)p] = 1;
        ++sec;
      }
    if (sec != (q + 1) * (q + 1)) continue;  // elliptic section, not usable
    std::vector<int32_t> row;
    for (int32_t l = 0; l < b.inst.n_cols; ++l)
      if (sees[(size_t)b.line_points[(size_t)l][0]] && sees[(size_t)b.line_points[(size_t)l][1]])
        row.push_back(l);
    if ((int)row.size() != 2 * (q + 1))
      throw std::logic_error("dual instance: hyperbolic section has wrong line count");
    b.inst.rows.push_back(std::move(row));
    b.inst.row_tags.push_back(x);
    b.row_points.push_back(x);
  }
  if ((int)b.inst.rows.size() != q * q * (q * q + 1) / 2)
    throw std::logic_error("dual instance: hyperbolic point count is off");
  return b;
}

// ------------------------------------------------------- spread census

inline spreads::SpecialSpread spread_of_solution(const WGeometry& w,
                                                 const spreads::UCatalog& cat,
                                                 const ExactCoverInstance& inst,
                                                 const CoverSolution& sol) {
  std::vector<int32_t> lines;
  for (int32_t r : sol.rows) {
    const auto& u = cat.pairs[(size_t)inst.row_tags[(size_t)r]];
    lines.push_back(u.line);
    lines.push_back(u.partner);
  }
  return spreads::spread_from_lines(w, lines);
}

enum class EnumMode { full, fix_one, fix_pair };

struct EnumerateOptions {
  EnumMode mode = EnumMode::full;
  int32_t fixed_u = 0;                                  // fix_one
  std::vector<std::pair<int32_t, int32_t>> pair_reps;   // fix_pair
  uint64_t max_solutions = 0;
  bool keep_spreads = true;
};

struct SpreadEnumeration {
  std::vector<spreads::SpecialSpread> spreads;
  uint64_t count = 0;            // solutions seen this run
  uint64_t recovered_total = 0;  // full census size implied by the run
  std::vector<uint64_t> per_rep;
  bool truncated = false;
};

inline SpreadEnumeration enumerate_special_spreads(const WGeometry& w,
                                                   const spreads::UCatalog& cat,
                                                   const EnumerateOptions& eo = {}) {
  ExactCoverInstance inst = build_spread_instance(w, cat);
  SpreadEnumeration out;
  uint64_t members = (uint64_t)(w.q * w.q + 1) / 2;

  auto run = [&](std::vector<int32_t> forced) {
    SolveOptions so;
    so.forced_rows = std::move(forced);
    so.max_solutions = eo.max_solutions;
    so.store_solutions = false;
    uint64_t n = 0;
    so.on_solution = [&](const CoverSolution& sol) {
      ++n;
      if (eo.keep_spreads) out.spreads.push_back(spread_of_solution(w, cat, inst, sol));
      return true;
    };
    SolveResult res = solve_all(inst, so);
    if (res.truncated) out.truncated = true;
    return n;
  };

  switch (eo.mode) {
    case EnumMode::full:
      out.count = run({});
      out.recovered_total = out.count;
      break;
    case EnumMode::fix_one: {
      if (eo.fixed_u < 0 || eo.fixed_u >= (int32_t)cat.pairs.size())
        throw std::invalid_argument("enumerate: fixed_u out of range");
      out.count = run({eo.fixed_u});
      uint64_t num = out.count * cat.pairs.size();
      if (num % members != 0)
        throw std::logic_error("enumerate: fix_one count fails the double count");
      out.recovered_total = num / members;
      break;
    }
    case EnumMode::fix_pair:
      for (auto [a, bb] : eo.pair_reps) {
        uint64_t n = run({a, bb});
        out.per_rep.push_back(n);
        out.count += n;
      }
      break;
  }
  return out;
}

}  // namespace spreadforge::cover
