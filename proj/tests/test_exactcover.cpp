#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "spreadforge/exactcover.hpp"

using namespace spreadforge;
using namespace spreadforge::cover;
using geom::WGeometry;
using gf::Field;

namespace {

// rows = edges of the complete graph K_n, columns = vertices, so the exact
// covers are the perfect matchings: (n-1)!! of them for even n
ExactCoverInstance matching_instance(int n) {
  ExactCoverInstance inst;
  inst.n_cols = n;
  for (int32_t a = 0; a < n; ++a)
    for (int32_t b = a + 1; b < n; ++b) inst.rows.push_back({a, b});
  return inst;
}

void check_partition(const ExactCoverInstance& inst, const CoverSolution& sol) {
  std::vector<char> seen((size_t)inst.n_cols, 0);
  for (int32_t r : sol.rows)
    for (int32_t c : inst.rows[(size_t)r]) {
      REQUIRE(!seen[(size_t)c]);
      seen[(size_t)c] = 1;
    }
  for (char s : seen) REQUIRE(s == 1);
}

}  // namespace

TEST_CASE("hand-checked covers come out exactly") {
  ExactCoverInstance inst;
  inst.n_cols = 3;
  inst.rows = {{0, 1}, {2}, {0}, {1, 2}};
  SolveResult res = solve_all(inst);
  REQUIRE(res.solutions.size() == 2);
  REQUIRE(res.solutions[0].rows == std::vector<int32_t>{0, 1});
  REQUIRE(res.solutions[1].rows == std::vector<int32_t>{2, 3});

  ExactCoverInstance bare;
  bare.n_cols = 1;
  REQUIRE(solve_all(bare).solutions.empty());
  REQUIRE(uncovered_columns(bare) == std::vector<int32_t>{0});

  ExactCoverInstance empty;
  REQUIRE(solve_all(empty).solutions.size() == 1);
  REQUIRE(solve_all(empty).solutions[0].rows.empty());
}

TEST_CASE("perfect matching counts of complete graphs") {
  struct Case {
    int n;
    uint64_t matchings;
  };
  for (Case c : {Case{4, 3}, Case{6, 15}, Case{8, 105}}) {
    ExactCoverInstance inst = matching_instance(c.n);
    SolveResult res = solve_all(inst);
    REQUIRE(res.emitted == c.matchings);
    std::set<std::vector<int32_t>> distinct;
    for (const auto& sol : res.solutions) {
      check_partition(inst, sol);
      distinct.insert(sol.rows);
    }
    REQUIRE(distinct.size() == c.matchings);
  }
}

TEST_CASE("malformed instances are rejected") {
  ExactCoverInstance inst;
  inst.n_cols = 3;

  inst.rows = {{1, 0}};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
  inst.rows = {{0, 0}};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
  inst.rows = {{0, 5}};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
  inst.rows = {{-1}};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
  inst.rows = {{}};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
  inst.rows = {{0}, {1}};
  inst.row_tags = {7};
  REQUIRE_THROWS_AS(solve_all(inst), std::invalid_argument);
}

TEST_CASE("forced rows restrict and misuse throws") {
  ExactCoverInstance k6 = matching_instance(6);
  SolveOptions so;
  so.forced_rows = {0};  // the edge {0,1}
  SolveResult res = solve_all(k6, so);
  REQUIRE(res.emitted == 3);
  for (const auto& sol : res.solutions) {
    check_partition(k6, sol);
    REQUIRE(std::find(sol.rows.begin(), sol.rows.end(), 0) != sol.rows.end());
  }

  so.forced_rows = {0, 1};  // edges {0,1} and {0,2} share vertex 0
  REQUIRE_THROWS_AS(solve_all(k6, so), std::invalid_argument);
  so.forced_rows = {99};
  REQUIRE_THROWS_AS(solve_all(k6, so), std::invalid_argument);

  ExactCoverInstance inst;
  inst.n_cols = 3;
  inst.rows = {{0, 1}, {1, 2}};
  so.forced_rows = {0};  // kills the only row through column 2
  REQUIRE(solve_all(inst, so).emitted == 0);
}

TEST_CASE("solution stream caps, checkpoints and resumes") {
  ExactCoverInstance k8 = matching_instance(8);
  SolveResult full = solve_all(k8);
  REQUIRE(full.emitted == 105);

  SolveOptions cap;
  cap.max_solutions = 40;
  SolveResult head = solve_all(k8, cap);
  REQUIRE(head.truncated);
  REQUIRE(head.emitted == 40);
  REQUIRE(head.checkpoint.emitted == 40);
  REQUIRE(head.checkpoint.last_solution == full.solutions[39].rows);

  SolveOptions rest;
  rest.resume = &head.checkpoint;
  SolveResult tail = solve_all(k8, rest);
  REQUIRE(tail.emitted == 65);
  REQUIRE(tail.total_emitted == 105);
  for (size_t i = 0; i < tail.solutions.size(); ++i)
    REQUIRE(tail.solutions[i].rows == full.solutions[40 + i].rows);

  SolveOptions done;
  done.resume = &full.checkpoint;
  REQUIRE(solve_all(k8, done).emitted == 0);

  // single stepping through K6 reassembles the run
  ExactCoverInstance k6 = matching_instance(6);
  std::vector<std::vector<int32_t>> teeth;
  Checkpoint ck;
  for (int step = 0; step < 20; ++step) {
    SolveOptions one;
    one.max_solutions = 1;
    if (step) one.resume = &ck;
    SolveResult r = solve_all(k6, one);
    if (r.emitted == 0) break;
    teeth.push_back(r.solutions[0].rows);
    ck = r.checkpoint;
  }
  SolveResult whole = solve_all(k6);
  REQUIRE(teeth.size() == whole.solutions.size());
  for (size_t i = 0; i < teeth.size(); ++i) REQUIRE(teeth[i] == whole.solutions[i].rows);

  Checkpoint bogus{1, {0, 1, 2}};
  REQUIRE_THROWS_AS(
      [&] {
        SolveOptions bad;
        bad.resume = &bogus;
        return solve_all(k8, bad);
      }(),
      std::invalid_argument);
}

TEST_CASE("callback streaming replaces storage") {
  ExactCoverInstance k8 = matching_instance(8);
  SolveOptions so;
  so.store_solutions = false;
  uint64_t seen = 0;
  so.on_solution = [&](const CoverSolution&) {
    ++seen;
    return true;
  };
  SolveResult res = solve_all(k8, so);
  REQUIRE(seen == 105);
  REQUIRE(res.solutions.empty());

  seen = 0;
  so.on_solution = [&](const CoverSolution&) { return ++seen < 10; };
  res = solve_all(k8, so);
  REQUIRE(seen == 10);
  REQUIRE(res.truncated);
}

TEST_CASE("instance text round trips") {
  ExactCoverInstance inst = matching_instance(4);
  std::stringstream ss;
  write_instance_text(ss, inst);
  ExactCoverInstance back = read_instance_text(ss);
  REQUIRE(back.n_cols == inst.n_cols);
  REQUIRE(back.rows == inst.rows);
  REQUIRE(solve_all(back).emitted == 3);

  std::stringstream bad("3\n2 1\n");
  REQUIRE_THROWS_AS(read_instance_text(bad), std::invalid_argument);
}

TEST_CASE("point partition census finds every special spread for q=3") {
  WGeometry w(3, false);
  spreads::UCatalog cat(w);
  ExactCoverInstance inst = build_spread_instance(w, cat);
  REQUIRE(inst.n_cols == 40);
  REQUIRE(inst.rows.size() == 45);
  for (const auto& row : inst.rows) REQUIRE(row.size() == 8);

  SolveResult res = solve_all(inst);
  REQUIRE(res.emitted == 27);
  std::set<std::vector<int32_t>> distinct;
  for (const auto& sol : res.solutions) {
    REQUIRE(sol.rows.size() == 5);
    distinct.insert(sol.rows);
    spreads::SpecialSpread s = spread_of_solution(w, cat, inst, sol);
    spreads::Certificate cert = spreads::verify_special_spread(w, s);
    INFO(cert.witness);
    REQUIRE(cert.ok);
  }
  REQUIRE(distinct.size() == 27);
}

TEST_CASE("dual quadric census agrees for q=3") {
  Field F = Field::of_order(3);
  DualInstanceBuild dual = build_dual_instance(F);
  REQUIRE(dual.inst.n_cols == 40);
  REQUIRE(dual.inst.rows.size() == 45);
  for (const auto& row : dual.inst.rows) REQUIRE(row.size() == 8);
  REQUIRE(solve_all(dual.inst).emitted == 27);
}

TEST_CASE("census modes agree for q=3") {
  WGeometry w(3, false);
  spreads::UCatalog cat(w);

  SpreadEnumeration full = enumerate_special_spreads(w, cat);
  REQUIRE(full.count == 27);
  REQUIRE(full.recovered_total == 27);
  REQUIRE(full.spreads.size() == 27);

  EnumerateOptions fo;
  fo.mode = EnumMode::fix_one;
  fo.fixed_u = 0;
  SpreadEnumeration fixed = enumerate_special_spreads(w, cat, fo);
  REQUIRE(fixed.count == 3);
  REQUIRE(fixed.recovered_total == 27);
  for (const auto& s : fixed.spreads) {
    bool has = false;
    for (const auto& p : s.pairs())
      if (p.line == cat.pairs[0].line && p.partner == cat.pairs[0].partner) has = true;
    REQUIRE(has);
  }

  EnumerateOptions fp;
  fp.mode = EnumMode::fix_pair;
  int32_t mate = -1;
  const auto& u0 = full.spreads[0].pairs();
  // two pairs from one known spread are disjoint by definition
  fp.pair_reps = {{cat.u_of_line[u0[0].line], cat.u_of_line[u0[1].line]}};
  SpreadEnumeration two = enumerate_special_spreads(w, cat, fp);
  REQUIRE(two.per_rep.size() == 1);
  REQUIRE(two.per_rep[0] >= 1);
  REQUIRE(two.count == two.per_rep[0]);
  (void)mate;
}

TEST_CASE("fixing one pair recovers the q=5 census size") {
  WGeometry w(5, false);
  spreads::UCatalog cat(w);
  ExactCoverInstance inst = build_spread_instance(w, cat);
  REQUIRE(inst.n_cols == 156);
  REQUIRE(inst.rows.size() == 325);
  for (const auto& row : inst.rows) REQUIRE(row.size() == 12);

  EnumerateOptions fo;
  fo.mode = EnumMode::fix_one;
  SpreadEnumeration fixed = enumerate_special_spreads(w, cat, fo);
  REQUIRE(fixed.count == 585);
  REQUIRE(fixed.recovered_total == 14625);
  for (const auto& s : fixed.spreads) {
    spreads::Certificate cert = spreads::verify_special_spread(w, s);
    INFO(cert.witness);
    REQUIRE(cert.ok);
  }
}

TEST_CASE("dual census through one point matches for q=5") {
  Field F = Field::of_order(5);
  DualInstanceBuild dual = build_dual_instance(F);
  REQUIRE(dual.inst.n_cols == 156);
  REQUIRE(dual.inst.rows.size() == 325);
  for (const auto& row : dual.inst.rows) REQUIRE(row.size() == 12);

  SolveOptions so;
  so.forced_rows = {0};
  so.store_solutions = false;
  uint64_t n = 0;
  so.on_solution = [&](const CoverSolution&) {
    ++n;
    return true;
  };
  solve_all(dual.inst, so);
  REQUIRE(n == 585);
}

TEST_CASE("full q=5 censuses on both sides") {
  WGeometry w(5, false);
  spreads::UCatalog cat(w);
  ExactCoverInstance inst = build_spread_instance(w, cat);
  SolveOptions so;
  so.store_solutions = false;
  uint64_t points = 0;
  so.on_solution = [&](const CoverSolution&) {
    ++points;
    return true;
  };
  solve_all(inst, so);
  REQUIRE(points == 14625);

  DualInstanceBuild dual = build_dual_instance(Field::of_order(5));
  uint64_t lines = 0;
  so.on_solution = [&](const CoverSolution&) {
    ++lines;
    return true;
  };
  solve_all(dual.inst, so);
  REQUIRE(lines == 14625);
}

TEST_CASE("q=7 instance has the expected shape") {
  WGeometry w(7, false);
  spreads::UCatalog cat(w);
  ExactCoverInstance inst = build_spread_instance(w, cat);
  REQUIRE(inst.n_cols == 400);
  REQUIRE(inst.rows.size() == 1225);
  for (const auto& row : inst.rows) REQUIRE(row.size() == 16);
}
