#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadforge/canonical.hpp"
#include "spreadforge/classify.hpp"
#include "spreadforge/ddg.hpp"
#include "spreadforge/exactcover.hpp"
#include "spreadforge/gf.hpp"
#include "spreadforge/graph.hpp"
#include "spreadforge/projgeom.hpp"
#include "spreadforge/spgraph.hpp"
#include "spreadforge/spreads.hpp"
#include "sha256.hpp"

using json = nlohmann::ordered_json;
using namespace spreadforge;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Ctx {
  std::vector<std::string> command;
  uint64_t seed = 20260819;
  int threads = 1;
  bool deep = false;
  std::string manifest_path;
  json meta = json::object();     // q, e, field, gram as they become known
  json outputs = json::object();  // artifact path -> sha256
};

struct Out {
  int rc = 0;
  std::string text;  // full stdout payload
};

Out report_out(const json& rep) {
  bool ok = rep.value("ok", true);
  return {ok ? 0 : 1, rep.dump(2) + "\n"};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
  if (!os.flush()) throw std::runtime_error("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void artifact(Ctx& ctx, const std::string& path, const std::string& content) {
  write_file(path, content);
  ctx.outputs[path] = sha256::hex(content);
}

void note_field(Ctx& ctx, const gf::Field& F) {
  ctx.meta["field"] = {{"p", F.p()}, {"k", F.k()}, {"modulus", F.modulus()}};
}

void note_gram(Ctx& ctx, const gf::Field& F, const linalg::Mat& gram) {
  json rows = json::array();
  for (int i = 0; i < gram.rows; ++i) {
    json r = json::array();
    for (int j = 0; j < gram.cols; ++j) r.push_back(gram.at(i, j).v);
    rows.push_back(std::move(r));
  }
  ctx.meta["gram"] = std::move(rows);
}

json params_json(const ddg::DdgParams& p) {
  return {{"v", p.v},       {"k", p.k}, {"lambda1", p.lambda1},
          {"lambda2", p.lambda2}, {"m", p.m}, {"n", p.n}};
}

json quotient_json(const ddg::QuotientMatrix& q) {
  json rows = json::array();
  for (const auto& r : q) rows.push_back(r);
  return rows;
}

// ------------------------------------------------------------- field-check

Out cmd_field_check(Ctx& ctx, int q, uint64_t samples) {
  gf::Field F = gf::Field::of_order(q);
  note_field(ctx, F);
  ctx.meta["q"] = q;

  json rep = {{"command", "field-check"}, {"q", q},       {"p", F.p()},
              {"k", F.k()},               {"modulus", F.modulus()}, {"ok", true}};

  auto fail = [&](const std::string& what, int a, int b, int c) {
    rep["ok"] = false;
    rep["witness"] = what + " fails at element indices (" + std::to_string(a) + ", " +
                     std::to_string(b) + ", " + std::to_string(c) + ")";
    return report_out(rep);
  };

  auto triple = [&](int a, int b, int c) -> const char* {
    gf::Fe x = F.el(a), y = F.el(b), z = F.el(c);
    if (F.add(F.add(x, y), z) != F.add(x, F.add(y, z))) return "additive associativity";
    if (F.mul(F.mul(x, y), z) != F.mul(x, F.mul(y, z))) return "multiplicative associativity";
    if (F.mul(x, F.add(y, z)) != F.add(F.mul(x, y), F.mul(x, z))) return "distributivity";
    if (F.add(x, y) != F.add(y, x)) return "additive commutativity";
    if (F.mul(x, y) != F.mul(y, x)) return "multiplicative commutativity";
    return nullptr;
  };

  // unary laws are always exhaustive
  for (int a = 0; a < q; ++a) {
    gf::Fe x = F.el(a);
    if (F.add(x, F.zero()) != x) return fail("additive identity", a, 0, 0);
    if (F.mul(x, F.one()) != x) return fail("multiplicative identity", a, 1, 1);
    if (F.add(x, F.neg(x)) != F.zero()) return fail("additive inverse", a, a, 0);
    if (a != 0 && F.mul(x, F.inv(x)) != F.one()) return fail("multiplicative inverse", a, a, 1);
    gf::Fe s = F.zero();
    for (int i = 0; i < F.p(); ++i) s = F.add(s, x);
    if (s != F.zero()) return fail("characteristic", a, F.p(), 0);
  }

  if (q <= 32) {
    rep["mode"] = "exhaustive";
    rep["triples"] = (long long)q * q * q;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c)
          if (const char* what = triple(a, b, c)) return fail(what, a, b, c);
  } else {
    rep["mode"] = "sampled";
    rep["triples"] = samples;
    rep["seed"] = ctx.seed;
    std::mt19937_64 rng(ctx.seed);
    for (uint64_t i = 0; i < samples; ++i) {
      int a = (int)(rng() % q), b = (int)(rng() % q), c = (int)(rng() % q);
      if (const char* what = triple(a, b, c)) return fail(what, a, b, c);
    }
  }
  return report_out(rep);
}

// ---------------------------------------------------------------- geometry

Out cmd_geometry(Ctx& ctx, int q) {
  geom::WGeometry w(q);
  note_field(ctx, w.F);
  note_gram(ctx, w.F, w.form.gram);
  ctx.meta["q"] = q;

  json rep = {{"command", "geometry"}, {"q", q}};
  rep["points"] = w.pts.size();
  rep["lines"] = w.lines.size();

  long long iso = 0;
  for (int l = 0; l < w.lines.size(); ++l) iso += w.line_isotropic[l];
  rep["isotropic_lines"] = iso;
  rep["hyperbolic_lines"] = w.lines.size() - iso;
  rep["hyperbolic_pairs"] = (long long)spreads::enumerate_U(w).size();

  auto fail = [&](const std::string& witness) {
    rep["ok"] = false;
    rep["witness"] = witness;
    return report_out(rep);
  };

  long long expect_pts = ((long long)q * q + 1) * (q + 1);
  if (w.pts.size() != expect_pts)
    return fail("point count " + std::to_string(w.pts.size()) + ", expected " +
                std::to_string(expect_pts));
  if (iso != expect_pts)
    return fail("isotropic line count " + std::to_string(iso) + ", expected " +
                std::to_string(expect_pts));

  for (int l = 0; l < w.lines.size(); ++l) {
    if (w.line_polar[w.line_polar[l]] != l)
      return fail("polarity is not an involution at line " + std::to_string(l));
    if ((w.line_polar[l] == l) != (bool)w.line_isotropic[l])
      return fail("fixed lines of the polarity differ from the isotropic lines at line " +
                  std::to_string(l));
  }
  rep["polarity_involution"] = true;

  // Plucker images: distinct lines to distinct quadric points, onto the quadric
  long long quadric = 0;
  for (int id = 0; id < w.klein.p5.size(); ++id)
    if (w.klein.quad.eval(w.F, w.klein.p5.point(id)) == w.F.zero()) ++quadric;
  rep["quadric_points"] = quadric;
  if (quadric != (long long)w.lines.size())
    return fail("quadric has " + std::to_string(quadric) + " points but the space has " +
                std::to_string(w.lines.size()) + " lines");
  if ((long long)w.klein.p5_to_line.size() != (long long)w.lines.size())
    return fail("line-to-quadric map is not injective");
  rep["klein_bijective"] = true;

  rep["ok"] = true;
  return report_out(rep);
}

// ------------------------------------------------------------------- graph

Out cmd_graph(Ctx& ctx, int q, int e, const std::string& emit) {
  gf::Field F = gf::Field::of_order(q);
  note_field(ctx, F);
  ctx.meta["q"] = q;
  ctx.meta["e"] = e;

  long long v = 0, pw = 1;
  for (int i = 0; i < 2 * e; ++i) pw *= q;
  v = (pw - 1) / (q - 1);
  if (v > 5000 && !ctx.deep)
    throw std::invalid_argument("graph on " + std::to_string(v) +
                                " vertices; pass --deep to confirm");

  graph::Graph g = spgraph::build_sp_graph(e, F);
  note_gram(ctx, F, geom::SymplecticForm::standard(F, 2 * e).gram);

  json rep = {{"command", "graph"}, {"q", q}, {"e", e}, {"vertices", g.n}};
  spgraph::SrgCheck check = spgraph::verify_srg(g);
  if (!check.ok) {
    rep["ok"] = false;
    rep["witness"] = check.witness;
    return report_out(rep);
  }
  rep["srg"] = {{"v", check.params.v},
                {"k", check.params.k},
                {"lambda", check.params.lambda},
                {"mu", check.params.mu}};
  spgraph::SpectrumReport spec = spgraph::srg_spectrum(check.params);
  rep["spectrum"] = {{"r", spec.r}, {"s", spec.s}, {"m_r", spec.m_r}, {"m_s", spec.m_s}};
  rep["ok"] = true;

  if (!emit.empty()) artifact(ctx, emit, graph::to_graph6(g) + "\n");
  return report_out(rep);
}

// ------------------------------------------------------------------ spread

json special_spread_json(const geom::WGeometry& w, const spreads::SpecialSpread& s) {
  json lines = json::array(), pts = json::array();
  for (int32_t l : s.lines) {
    lines.push_back(l);
    pts.push_back(w.lines.line_pts[l]);
  }
  return {{"kind", "special"}, {"q", s.q}, {"lines", lines}, {"line_points", pts}};
}

spreads::SpecialSpread load_special_spread(const geom::WGeometry& w, const std::string& path) {
  json doc = json::parse(read_file(path));
  if (doc.value("q", w.q) != w.q)
    throw std::invalid_argument("spread file is for q=" + std::to_string(doc.value("q", 0)));
  std::vector<int32_t> ids;
  if (doc.contains("line_points")) {
    for (const auto& pl : doc["line_points"]) {
      std::vector<int> pts = pl.get<std::vector<int>>();
      if (pts.size() < 2) throw std::invalid_argument("spread file: line with fewer than 2 points");
      for (int p : pts)
        if (p < 0 || p >= w.pts.size())
          throw std::invalid_argument("spread file: point id out of range");
      int32_t l = w.lines.line_of(pts[0], pts[1]);
      std::vector<int> sorted = pts;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != w.lines.line_pts[l])
        throw std::invalid_argument("spread file: point list is not a line of the space");
      ids.push_back(l);
    }
  } else if (doc.contains("lines")) {
    for (const auto& l : doc["lines"]) {
      int32_t id = l.get<int32_t>();
      if (id < 0 || id >= w.lines.size())
        throw std::invalid_argument("spread file: line id out of range");
      ids.push_back(id);
    }
  } else {
    throw std::invalid_argument("spread file: expected a line_points or lines array");
  }
  return spreads::spread_from_lines(w, std::move(ids));
}

Out cmd_spread_construct(Ctx& ctx, int q, bool verify, const std::string& out_path) {
  geom::WGeometry w(q);
  note_field(ctx, w.F);
  note_gram(ctx, w.F, w.form.gram);
  ctx.meta["q"] = q;

  spreads::SpecialSpread s = spreads::construct_special_spread(w).spread;
  json rep = {{"command", "spread construct"}, {"q", q}};
  rep["lines"] = s.lines;
  json pairs = json::array();
  for (const auto& pr : s.pairs()) pairs.push_back({pr.line, pr.partner});
  rep["pairs"] = pairs;

  if (verify) {
    spreads::Certificate cert = spreads::verify_special_spread(w, s);
    rep["verified"] = cert.ok;
    if (!cert.ok) {
      rep["ok"] = false;
      rep["witness"] = cert.witness;
      return report_out(rep);
    }
  }
  rep["ok"] = true;
  if (!out_path.empty()) artifact(ctx, out_path, special_spread_json(w, s).dump(2) + "\n");
  return report_out(rep);
}

Out cmd_spread_verify(Ctx& ctx, int q, const std::string& in_path) {
  geom::WGeometry w(q);
  note_field(ctx, w.F);
  ctx.meta["q"] = q;

  spreads::SpecialSpread s = load_special_spread(w, in_path);
  spreads::Certificate cert = spreads::verify_special_spread(w, s);
  json rep = {{"command", "spread verify"}, {"q", q}, {"file", in_path},
              {"lines", s.lines},           {"ok", cert.ok}};
  if (!cert.ok) rep["witness"] = cert.witness;
  return report_out(rep);
}

Out cmd_spread_symplectic(Ctx& ctx, int q, int e, const std::string& out_path) {
  gf::Field F = gf::Field::of_order(q);
  note_field(ctx, F);
  ctx.meta["q"] = q;
  ctx.meta["e"] = e;

  spreads::SymplecticSpread s = spreads::build_symplectic_spread(e, F);
  spreads::Certificate cert = spreads::verify_symplectic_spread(F, s);
  json rep = {{"command", "spread symplectic"},
              {"q", q},
              {"e", e},
              {"members", s.member_pts.size()},
              {"clique_size", s.member_pts.empty() ? 0 : s.member_pts[0].size()},
              {"ok", cert.ok}};
  if (!cert.ok) {
    rep["witness"] = cert.witness;
    return report_out(rep);
  }
  if (!out_path.empty()) {
    json doc = {{"kind", "symplectic"}, {"q", q}, {"e", e}, {"member_points", s.member_pts}};
    artifact(ctx, out_path, doc.dump(2) + "\n");
  }
  return report_out(rep);
}

// --------------------------------------------------------------- enumerate

std::string checkpoint_path(const std::string& given) {
  if (given.empty()) return given;
  const char* dir = std::getenv("SPREADFORGE_CHECKPOINT_DIR");
  if (dir && *dir && given.find('/') == std::string::npos)
    return std::string(dir) + "/" + given;
  return given;
}

Out cmd_enumerate(Ctx& ctx, int q, const std::string& mode, int fixed_u,
                  std::vector<std::string> pair_specs, uint64_t max_solutions,
                  const std::string& emit, const std::string& ckpt_arg,
                  const std::string& instance_out, const std::string& instance_in) {
  json rep = {{"command", "enumerate"}};

  // a foreign instance round-trips through the text format and is only counted
  if (!instance_in.empty()) {
    std::ifstream is(instance_in);
    if (!is) throw std::invalid_argument("cannot open " + instance_in);
    cover::ExactCoverInstance inst = cover::read_instance_text(is);
    cover::SolveOptions so;
    so.store_solutions = false;
    so.max_solutions = max_solutions;
    uint64_t n = 0;
    so.on_solution = [&](const cover::CoverSolution&) {
      ++n;
      return true;
    };
    cover::SolveResult res = cover::solve_all(inst, so);
    rep["instance"] = instance_in;
    rep["solutions"] = n;
    rep["nodes"] = res.nodes;
    rep["truncated"] = res.truncated;
    rep["ok"] = true;
    return report_out(rep);
  }

  geom::WGeometry w(q);
  note_field(ctx, w.F);
  ctx.meta["q"] = q;
  spreads::UCatalog cat(w);
  cover::ExactCoverInstance inst = cover::build_spread_instance(w, cat);

  if (!instance_out.empty()) {
    std::ostringstream ss;
    cover::write_instance_text(ss, inst);
    artifact(ctx, instance_out, ss.str());
  }

  rep["q"] = q;
  rep["mode"] = mode;
  rep["pairs"] = (long long)cat.pairs.size();
  uint64_t members = (uint64_t)(q * q + 1) / 2;

  std::vector<std::vector<int32_t>> forced_sets;
  if (mode == "full") {
    forced_sets.push_back({});
  } else if (mode == "fix_one") {
    if (fixed_u < 0 || fixed_u >= (int)cat.pairs.size())
      throw std::invalid_argument("--fixed-u out of range");
    forced_sets.push_back({fixed_u});
    rep["fixed_u"] = fixed_u;
  } else if (mode == "fix_pair") {
    if (pair_specs.empty())
      throw std::invalid_argument("fix_pair mode needs at least one --pair a,b");
    json reps = json::array();
    for (const std::string& ps : pair_specs) {
      size_t comma = ps.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("--pair expects two comma-separated indices");
      int a = std::stoi(ps.substr(0, comma)), b = std::stoi(ps.substr(comma + 1));
      if (a < 0 || b < 0 || a >= (int)cat.pairs.size() || b >= (int)cat.pairs.size() || a == b)
        throw std::invalid_argument("--pair indices out of range");
      forced_sets.push_back({a, b});
      reps.push_back({a, b});
    }
    rep["pair_reps"] = reps;
  } else {
    throw std::invalid_argument("--mode must be full, fix_one or fix_pair");
  }

  if (q >= 7 && mode != "fix_pair" && !ctx.deep)
    throw std::invalid_argument("q >= 7 in " + mode + " mode is a long run; pass --deep");

  std::string ckpt = checkpoint_path(ckpt_arg);
  if (!ckpt.empty() && forced_sets.size() != 1)
    throw std::invalid_argument("--checkpoint supports a single forced-row set");

  cover::Checkpoint resume;
  bool resuming = false;
  if (!ckpt.empty()) {
    std::ifstream is(ckpt);
    if (is) {
      json doc = json::parse(is);
      resume.emitted = doc.at("emitted").get<uint64_t>();
      resume.last_solution = doc.at("last_solution").get<std::vector<int32_t>>();
      resuming = resume.emitted > 0;
    }
  }

  std::ofstream emit_os;
  if (!emit.empty()) {
    emit_os.open(emit, resuming ? std::ios::app : std::ios::trunc);
    if (!emit_os) throw std::runtime_error("cannot open " + emit + " for writing");
  }

  auto save_ckpt = [&](const cover::Checkpoint& c) {
    if (ckpt.empty() || c.last_solution.empty()) return;
    json doc = {{"emitted", c.emitted}, {"last_solution", c.last_solution}};
    write_file(ckpt + ".tmp", doc.dump() + "\n");
    if (std::rename((ckpt + ".tmp").c_str(), ckpt.c_str()) != 0)
      throw std::runtime_error("cannot replace checkpoint " + ckpt);
  };

  uint64_t emitted_this_run = 0, total = 0, nodes = 0;
  bool truncated = false;
  json per_rep = json::array();
  for (const auto& forced : forced_sets) {
    cover::SolveOptions so;
    so.forced_rows = forced;
    so.max_solutions = max_solutions;
    so.store_solutions = false;
    if (resuming) so.resume = &resume;
    uint64_t n = 0;
    cover::Checkpoint last;
    so.on_solution = [&](const cover::CoverSolution& sol) {
      ++n;
      if (emit_os.is_open()) {
        spreads::SpecialSpread s = cover::spread_of_solution(w, cat, inst, sol);
        json line = {{"q", q}, {"lines", s.lines}};
        emit_os << line.dump() << "\n";
      }
      if (!ckpt.empty()) {
        last = {resume.emitted + n, sol.rows};
        if (n % 1000 == 0) save_ckpt(last);
      }
      return true;
    };
    cover::SolveResult res = cover::solve_all(inst, so);
    emitted_this_run += res.emitted;
    total += res.total_emitted;
    nodes += res.nodes;
    truncated = truncated || res.truncated;
    per_rep.push_back(res.emitted);
    if (!ckpt.empty() && res.total_emitted > 0) save_ckpt(res.checkpoint);
  }
  if (emit_os.is_open()) {
    emit_os.flush();
    ctx.outputs[emit] = sha256::hex(read_file(emit));
  }

  rep["emitted"] = emitted_this_run;
  rep["total_emitted"] = total;
  rep["nodes"] = nodes;
  rep["truncated"] = truncated;
  if (mode == "fix_pair") rep["per_rep"] = per_rep;
  if (!truncated && mode != "fix_pair") {
    uint64_t num = total * cat.pairs.size();
    if (mode == "full") {
      rep["recovered_total"] = total;
    } else if (num % members == 0) {
      rep["recovered_total"] = num / members;
    } else {
      rep["ok"] = false;
      rep["witness"] = "fix_one count " + std::to_string(total) +
                       " fails the double-count divisibility by " + std::to_string(members);
      return report_out(rep);
    }
  }
  if (!ckpt.empty()) rep["checkpoint"] = ckpt;
  rep["ok"] = true;
  return report_out(rep);
}

// ---------------------------------------------------------------- classify

json tuple_json(const std::vector<long long>& t) { return json(t); }

Out cmd_classify(Ctx& ctx, int q, const std::string& out_path, const std::string& reps_dir) {
  if (q != 3 && q != 5 && q != 7)
    throw std::invalid_argument("pair classification covers q in {3, 5, 7}");
  geom::WGeometry w(q);
  note_field(ctx, w.F);
  note_gram(ctx, w.F, w.form.gram);
  ctx.meta["q"] = q;
  classify::Classifier cl(w);

  cover::EnumerateOptions eo;
  std::string mode;
  if (q == 3) {
    eo.mode = cover::EnumMode::full;
    mode = "full";
  } else if (q == 5) {
    eo.mode = cover::EnumMode::fix_one;
    mode = "fix_one";
  } else {
    eo.mode = cover::EnumMode::fix_pair;
    eo.pair_reps = {{0, 385}};
    mode = "fix_pair";
  }
  cover::SpreadEnumeration en = cover::enumerate_special_spreads(w, cl.cat, eo);

  json rep = {{"command", "classify"}, {"q", q}, {"mode", mode}};
  rep["enumerated"] = en.count;
  if (q != 7) rep["recovered_total"] = en.recovered_total;

  auto classes = classify::classes_by_characteristic(cl, en.spreads);
  std::sort(classes.begin(), classes.end(),
            [](const classify::SpreadClass& a, const classify::SpreadClass& b) {
              return a.characteristic < b.characteristic;
            });

  classify::SimilitudeGroup G;
  if (q != 7) {
    G = classify::group_generators(w);
    rep["group_order"] = G.order;
  } else {
    rep["note"] = "orbit sizes are not computed at q=7; the census is per fixed pair";
  }

  bool ok = true;
  std::string witness;
  unsigned long long orbit_sum = 0;
  json cls_json = json::array();
  for (size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    json row = {{"characteristic", tuple_json(c.characteristic)}, {"sample_count", c.count}};

    spreads::Certificate cert = spreads::verify_special_spread(w, c.rep);
    if (!cert.ok) {
      ok = false;
      witness = "class representative fails verification: " + cert.witness;
    }
    auto via_lines = cl.characteristic_from_lines(c.rep);
    row["characteristic_by_lines"] = tuple_json(via_lines);
    if (via_lines != c.characteristic) {
      ok = false;
      witness = "the two characteristic routes disagree on a class representative";
    }

    if (q != 7) {
      classify::OrbitInfo oi = classify::orbit_and_stabilizer(c.rep, G);
      row["orbit_size"] = oi.orbit_size;
      row["stabilizer_order"] = oi.stabilizer_order;
      orbit_sum += oi.orbit_size;
    }

    row["rep_lines"] = c.rep.lines;
    if (!reps_dir.empty()) {
      std::filesystem::create_directories(reps_dir);
      std::string path = reps_dir + "/class-" + std::to_string(i + 1) + ".json";
      artifact(ctx, path, special_spread_json(w, c.rep).dump(2) + "\n");
      row["rep_file"] = path;
    }
    cls_json.push_back(std::move(row));
  }
  rep["classes"] = std::move(cls_json);
  rep["class_count"] = classes.size();

  if (q != 7 && ok && orbit_sum != en.recovered_total) {
    ok = false;
    witness = "orbit sizes sum to " + std::to_string(orbit_sum) + " but the census recovered " +
              std::to_string(en.recovered_total);
  }
  rep["ok"] = ok;
  if (!ok) rep["witness"] = witness;
  if (!out_path.empty()) artifact(ctx, out_path, rep.dump(2) + "\n");
  return report_out(rep);
}

// ------------------------------------------------------------------ tables

Out cmd_tables(Ctx& ctx, int q) {
  if (q != 3 && q != 5 && q != 7)
    throw std::invalid_argument("tables cover q in {3, 5, 7}");
  geom::WGeometry w(q);
  note_field(ctx, w.F);
  ctx.meta["q"] = q;
  classify::Classifier cl(w);

  cover::EnumerateOptions eo;
  if (q == 3) {
    eo.mode = cover::EnumMode::full;
  } else if (q == 5) {
    eo.mode = cover::EnumMode::fix_one;
  } else {
    eo.mode = cover::EnumMode::fix_pair;
    eo.pair_reps = {{0, 385}};
  }
  cover::SpreadEnumeration en = cover::enumerate_special_spreads(w, cl.cat, eo);
  auto classes = classify::classes_by_characteristic(cl, en.spreads);

  struct Row {
    unsigned long long stab = 0;
    std::vector<long long> characteristic;
  };
  std::vector<Row> rows;
  if (q != 7) {
    classify::SimilitudeGroup G = classify::group_generators(w);
    for (const auto& c : classes)
      rows.push_back({classify::orbit_and_stabilizer(c.rep, G).stabilizer_order,
                      c.characteristic});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.stab != b.stab ? a.stab < b.stab : a.characteristic < b.characteristic;
    });
  } else {
    for (const auto& c : classes) rows.push_back({0, c.characteristic});
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.characteristic < b.characteristic; });
  }

  std::ostringstream os;
  os << "partitions for q = " << q << "\n\n";
  os << "example  stabilizer  characteristic\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string stab = rows[i].stab ? std::to_string(rows[i].stab) : "-";
    std::string ch = "[";
    for (size_t j = 0; j < rows[i].characteristic.size(); ++j)
      ch += (j ? ", " : "") + std::to_string(rows[i].characteristic[j]);
    ch += "]";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%7zu  %10s  ", i + 1, stab.c_str());
    os << buf << ch << "\n";
  }
  if (q == 7) os << "\nstabilizer orders are not computed at q=7\n";
  return {0, os.str()};
}

// --------------------------------------------------------------------- ddg

struct BuiltDdg {
  ddg::DdgInstance inst;
  int family = 0;
  int q = 0, e = 2;
};

std::vector<int> parse_side(const std::string& bits, size_t expect, const char* what) {
  std::vector<int> side;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument(std::string(what) + " must be a string of 0s and 1s");
    side.push_back(c - '0');
  }
  if (side.size() != expect)
    throw std::invalid_argument(std::string(what) + " must have length " +
                                std::to_string(expect));
  return side;
}

BuiltDdg build_ddg(Ctx& ctx, int family, int q, int e, const std::string& side_bits,
                   const std::string& spread_file) {
  BuiltDdg out;
  out.family = family;
  out.q = q;
  out.e = e;
  if (family == 1 || family == 2) {
    geom::WGeometry w(q);
    note_field(ctx, w.F);
    note_gram(ctx, w.F, w.form.gram);
    spreads::SpecialSpread s = spread_file.empty()
                                   ? spreads::construct_special_spread(w).spread
                                   : load_special_spread(w, spread_file);
    out.e = 2;
    if (family == 1) {
      out.inst = ddg::theorem1_graph(w, s);
    } else {
      size_t pairs = s.pairs().size();
      std::vector<int> side(pairs, 0);
      if (!side_bits.empty()) side = parse_side(side_bits, pairs, "--side");
      out.inst = ddg::theorem2_graph(w, s, side);
    }
  } else if (family == 3 || family == 4) {
    if (!spread_file.empty())
      throw std::invalid_argument("--spread applies to families 1 and 2 only");
    gf::Field F = gf::Field::of_order(q);
    note_field(ctx, F);
    note_gram(ctx, F, geom::SymplecticForm::standard(F, 2 * e).gram);
    spreads::SymplecticSpread s = spreads::build_symplectic_spread(e, F);
    if (family == 3) {
      out.inst = ddg::theorem3_graph(e, F, s);
    } else {
      size_t cliques = s.member_pts.size();
      std::vector<int> side(cliques, 0);
      for (size_t i = cliques / 2; i < cliques; ++i) side[i] = 1;
      if (!side_bits.empty()) side = parse_side(side_bits, cliques, "--side");
      out.inst = ddg::theorem4_graph(e, F, s, side);
    }
  } else {
    throw std::invalid_argument("--family must be 1, 2, 3 or 4");
  }
  ctx.meta["q"] = q;
  ctx.meta["e"] = out.e;
  return out;
}

json certify_ddg(const BuiltDdg& b, bool include_quotient, bool& ok, std::string& witness) {
  json rep = {{"family", b.family}, {"q", b.q}, {"e", b.e}};
  ddg::DdgCheck check = ddg::verify_ddg(b.inst.graph, b.inst.partition);
  rep["params"] = params_json(check.params);
  rep["proper"] = check.proper;
  if (!check.ok) {
    ok = false;
    witness = check.witness;
    return rep;
  }
  if (!(check.params == b.inst.params)) {
    ok = false;
    witness = "certified parameters disagree with the family formula";
    rep["expected_params"] = params_json(b.inst.params);
    return rep;
  }
  ddg::EquitableReport eq = ddg::is_equitable(b.inst.graph, b.inst.partition);
  rep["equitable"] = eq.equitable;
  if (!eq.equitable) {
    ok = false;
    witness = eq.witness;
    return rep;
  }
  if (eq.has_theta) rep["theta"] = eq.theta;
  if (include_quotient) rep["quotient"] = quotient_json(eq.quotient);
  return rep;
}

Out cmd_ddg(Ctx& ctx, int family, int q, int e, const std::string& side_bits,
            const std::string& spread_file, const std::string& emit, bool quotient,
            bool run_reconstruct) {
  BuiltDdg b = build_ddg(ctx, family, q, e, side_bits, spread_file);
  bool ok = true;
  std::string witness;
  json rep = certify_ddg(b, quotient, ok, witness);
  rep["command"] = "ddg";

  if (ok && run_reconstruct) {
    if (family != 1) throw std::invalid_argument("--reconstruct applies to family 1 only");
    graph::Graph y = b.inst.graph.complement();
    ddg::Reconstruction rec = ddg::reconstruct(y);
    geom::WGeometry w(q);
    std::set<std::vector<int>> expect;
    for (int l = 0; l < w.lines.size(); ++l)
      if (w.line_isotropic[l]) expect.insert(w.lines.line_pts[l]);
    std::set<std::vector<int>> got(rec.symplectic_lines.begin(), rec.symplectic_lines.end());
    rep["reconstruction"] = {{"lines", rec.symplectic_lines.size()},
                             {"classes", rec.hyperbolic_lines.size()}};
    if (got != expect) {
      ok = false;
      witness = "recovered line set differs from the lines of the space";
    }
  }

  rep["ok"] = ok;
  if (!ok) rep["witness"] = witness;
  if (ok && !emit.empty()) artifact(ctx, emit, graph::to_graph6(b.inst.graph) + "\n");
  return report_out(rep);
}

// ------------------------------------------------------------------ census

Out cmd_census(Ctx& ctx, int q, int e, std::vector<int> families, const std::string& out_path,
               bool isomorphs) {
  if (families.empty()) families = {1, 2, 3, 4};
  json rep = {{"command", "census"}, {"q", q}, {"e", e}};
  json entries = json::array();
  bool ok = true;
  std::string witness;

  for (int family : families) {
    json entry;
    try {
      BuiltDdg b = build_ddg(ctx, family, q, family <= 2 ? 2 : e, "", "");
      bool entry_ok = true;
      std::string entry_witness;
      entry = certify_ddg(b, true, entry_ok, entry_witness);
      entry["graph6"] = graph::to_graph6(b.inst.graph);
      if (!entry_ok) {
        ok = false;
        witness = entry_witness;
        entry["witness"] = entry_witness;
      }
    } catch (const std::invalid_argument& ex) {
      entry = {{"family", family}, {"skipped", ex.what()}};
    } catch (const std::domain_error& ex) {
      entry = {{"family", family}, {"skipped", ex.what()}};
    }
    entries.push_back(std::move(entry));
  }
  rep["entries"] = std::move(entries);

  if (isomorphs) {
    if (q > 5)
      throw std::invalid_argument("the side-assignment census is exponential; q <= 5 only");
    if (q == 5 && !ctx.deep)
      throw std::invalid_argument("the q=5 side-assignment census is a long run; pass --deep");
    geom::WGeometry w(q);
    spreads::SpecialSpread s = spreads::construct_special_spread(w).spread;
    ddg::Theorem2Census cen = ddg::enumerate_theorem2_graphs(w, s, ctx.threads);
    json cls = json::array();
    for (const auto& c : cen.classes) {
      std::string bits;
      for (int b : c.side) bits.push_back(char('0' + b));
      cls.push_back({{"side", bits}, {"count", c.count}});
    }
    rep["isomorphs"] = {{"family", 2},
                       {"assignments", cen.assignments},
                       {"class_count", cen.classes.size()},
                       {"classes", std::move(cls)}};
  }

  rep["ok"] = ok;
  if (!ok) rep["witness"] = witness;
  if (!out_path.empty()) artifact(ctx, out_path, rep.dump(2) + "\n");
  return report_out(rep);
}

}  // namespace

int main(int argc, char** argv) {
  auto t0 = std::chrono::steady_clock::now();
  Ctx ctx;
  ctx.threads = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) ctx.command.push_back(argv[i]);

  CLI::App app{"symplectic spreads, their censuses, and divisible design graphs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_version_flag("--version", std::string("spreadforge ") + kVersion);
  app.add_option("--seed", ctx.seed, "seed for sampled checks")->capture_default_str();
  app.add_option("--threads", ctx.threads, "worker count for parallel stages")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--deep", ctx.deep, "allow resource-heavy runs");
  app.add_option("--manifest", ctx.manifest_path, "write a run manifest JSON to this path");

  std::function<Out()> action;

  {
    auto* sc = app.add_subcommand("field-check", "verify the field axioms for GF(q)");
    auto q = std::make_shared<int>(0);
    auto samples = std::make_shared<uint64_t>(200000);
    sc->add_option("--q", *q, "field order")->required()->check(CLI::Range(2, 1 << 20));
    sc->add_option("--samples", *samples, "triples to sample when q > 32")
        ->capture_default_str();
    sc->callback([&, q, samples] { action = [&, q, samples] {
      return cmd_field_check(ctx, *q, *samples); }; });
  }
  {
    auto* sc = app.add_subcommand("geometry", "build and audit the polar geometry of PG(3,q)");
    auto q = std::make_shared<int>(0);
    sc->add_option("--q", *q, "field order")->required()->check(CLI::Range(2, 64));
    sc->callback([&, q] { action = [&, q] { return cmd_geometry(ctx, *q); }; });
  }
  {
    auto* sc = app.add_subcommand("graph", "certify the symplectic graph as strongly regular");
    auto q = std::make_shared<int>(0);
    auto e = std::make_shared<int>(2);
    auto emit = std::make_shared<std::string>();
    sc->add_option("--q", *q, "field order")->required()->check(CLI::Range(2, 64));
    sc->add_option("--e", *e, "half the dimension")->check(CLI::Range(2, 6))
        ->capture_default_str();
    sc->add_option("--emit", *emit, "write the graph as graph6 to this path");
    sc->callback([&, q, e, emit] { action = [&, q, e, emit] {
      return cmd_graph(ctx, *q, *e, *emit); }; });
  }
  {
    auto* sc = app.add_subcommand("spread", "construct and verify spreads");
    sc->require_subcommand(1);
    {
      auto* c = sc->add_subcommand("construct", "build a special spread of hyperbolic lines");
      auto q = std::make_shared<int>(0);
      auto verify = std::make_shared<bool>(false);
      auto out = std::make_shared<std::string>();
      c->add_option("--q", *q, "field order, odd")->required()->check(CLI::Range(3, 32));
      c->add_flag("--verify", *verify, "run the full spread certification");
      c->add_option("--out", *out, "write the spread JSON to this path");
      c->callback([&, q, verify, out] { action = [&, q, verify, out] {
        return cmd_spread_construct(ctx, *q, *verify, *out); }; });
    }
    {
      auto* c = sc->add_subcommand("verify", "certify a spread loaded from JSON");
      auto q = std::make_shared<int>(0);
      auto in = std::make_shared<std::string>();
      c->add_option("--q", *q, "field order")->required()->check(CLI::Range(3, 32));
      c->add_option("--in", *in, "spread JSON file")->required();
      c->callback([&, q, in] { action = [&, q, in] {
        return cmd_spread_verify(ctx, *q, *in); }; });
    }
    {
      auto* c = sc->add_subcommand("symplectic", "build a spread of maximal isotropic spaces");
      auto q = std::make_shared<int>(0);
      auto e = std::make_shared<int>(2);
      auto out = std::make_shared<std::string>();
      c->add_option("--q", *q, "field order, prime")->required()->check(CLI::Range(2, 32));
      c->add_option("--e", *e, "half the dimension")->check(CLI::Range(2, 6))
          ->capture_default_str();
      c->add_option("--out", *out, "write the spread JSON to this path");
      c->callback([&, q, e, out] { action = [&, q, e, out] {
        return cmd_spread_symplectic(ctx, *q, *e, *out); }; });
    }
  }
  {
    auto* sc = app.add_subcommand("enumerate", "enumerate special spreads by exact cover");
    auto q = std::make_shared<int>(0);
    auto mode = std::make_shared<std::string>("fix_one");
    auto fixed_u = std::make_shared<int>(0);
    auto pairs = std::make_shared<std::vector<std::string>>();
    auto maxs = std::make_shared<uint64_t>(0);
    auto emit = std::make_shared<std::string>();
    auto ckpt = std::make_shared<std::string>();
    auto inst_out = std::make_shared<std::string>();
    auto inst_in = std::make_shared<std::string>();
    sc->add_option("--q", *q, "field order, odd")->check(CLI::Range(3, 32));
    sc->add_option("--mode", *mode, "full, fix_one or fix_pair")->capture_default_str();
    sc->add_option("--fixed-u", *fixed_u, "pair index forced in fix_one mode")
        ->capture_default_str();
    sc->add_option("--pair", *pairs, "forced pair a,b for fix_pair mode (repeatable)");
    sc->add_option("--max", *maxs, "stop after this many solutions (0 = none)")
        ->capture_default_str();
    sc->add_option("--emit", *emit, "stream solutions as JSONL to this path");
    sc->add_option("--checkpoint", *ckpt,
                   "checkpoint file (resumes when present; see SPREADFORGE_CHECKPOINT_DIR)");
    sc->add_option("--instance-out", *inst_out, "export the exact-cover instance as text");
    sc->add_option("--instance-in", *inst_in, "solve a text-format instance and count");
    sc->callback([&, q, mode, fixed_u, pairs, maxs, emit, ckpt, inst_out, inst_in] {
      action = [&, q, mode, fixed_u, pairs, maxs, emit, ckpt, inst_out, inst_in] {
        if (inst_in->empty() && *q == 0)
          throw CLI::ValidationError("enumerate", "--q is required without --instance-in");
        return cmd_enumerate(ctx, *q, *mode, *fixed_u, *pairs, *maxs, *emit, *ckpt,
                             *inst_out, *inst_in);
      };
    });
  }
  {
    auto* sc = app.add_subcommand("classify", "classify special spreads up to equivalence");
    auto q = std::make_shared<int>(0);
    auto out = std::make_shared<std::string>();
    auto reps = std::make_shared<std::string>();
    sc->add_option("--q", *q, "field order in {3, 5, 7}")->required();
    sc->add_option("--out", *out, "write the report JSON to this path");
    sc->add_option("--reps-dir", *reps, "write one representative spread JSON per class");
    sc->callback([&, q, out, reps] { action = [&, q, out, reps] {
      return cmd_classify(ctx, *q, *out, *reps); }; });
  }
  {
    auto* sc = app.add_subcommand("ddg", "construct and certify a divisible design graph");
    auto family = std::make_shared<int>(0);
    auto q = std::make_shared<int>(0);
    auto e = std::make_shared<int>(2);
    auto side = std::make_shared<std::string>();
    auto spread = std::make_shared<std::string>();
    auto emit = std::make_shared<std::string>();
    auto quotient = std::make_shared<bool>(false);
    auto rec = std::make_shared<bool>(false);
    sc->add_option("--family", *family, "construction family 1-4")->required()
        ->check(CLI::Range(1, 4));
    sc->add_option("--q", *q, "field order")->required()->check(CLI::Range(2, 32));
    sc->add_option("--e", *e, "half the dimension (families 3 and 4)")
        ->check(CLI::Range(2, 6))->capture_default_str();
    sc->add_option("--side", *side, "0/1 string assigning pairs or cliques to the parts");
    sc->add_option("--spread", *spread, "special spread JSON (families 1 and 2)");
    sc->add_option("--emit", *emit, "write the graph as graph6 to this path");
    sc->add_flag("--quotient", *quotient, "include the quotient matrix in the report");
    sc->add_flag("--reconstruct", *rec,
                 "family 1: recover the geometry from the adjacency and compare");
    sc->callback([&, family, q, e, side, spread, emit, quotient, rec] {
      action = [&, family, q, e, side, spread, emit, quotient, rec] {
        return cmd_ddg(ctx, *family, *q, *e, *side, *spread, *emit, *quotient, *rec);
      };
    });
  }
  {
    auto* sc = app.add_subcommand("census", "certify every construction family at one order");
    auto q = std::make_shared<int>(0);
    auto e = std::make_shared<int>(2);
    auto families = std::make_shared<std::vector<int>>();
    auto out = std::make_shared<std::string>();
    auto iso = std::make_shared<bool>(false);
    sc->add_option("--q", *q, "field order")->required()->check(CLI::Range(2, 32));
    sc->add_option("--e", *e, "half the dimension (families 3 and 4)")
        ->check(CLI::Range(2, 6))->capture_default_str();
    sc->add_option("--family", *families, "family subset (default all)")
        ->check(CLI::Range(1, 4));
    sc->add_option("--out", *out, "write the report JSON to this path");
    sc->add_flag("--isomorphs", *iso,
                 "also census the two-class side assignments up to isomorphism");
    sc->callback([&, q, e, families, out, iso] { action = [&, q, e, families, out, iso] {
      return cmd_census(ctx, *q, *e, *families, *out, *iso); }; });
  }
  {
    auto* sc = app.add_subcommand("tables", "render the classification tables");
    auto q = std::make_shared<int>(0);
    sc->add_option("--q", *q, "field order in {3, 5, 7}")->required();
    sc->callback([&, q] { action = [&, q] { return cmd_tables(ctx, *q); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Out out;
  try {
    out = action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json witness = {{"ok", false}, {"witness", e.what()}};
    out = {1, witness.dump(2) + "\n"};
  }

  std::cout << out.text;
  ctx.outputs["stdout"] = sha256::hex(out.text);

  if (!ctx.manifest_path.empty()) {
    auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count();
    json manifest = {{"tool", "spreadforge"},
                     {"version", kVersion},
                     {"command", ctx.command},
                     {"seed", ctx.seed},
                     {"threads", ctx.threads},
                     {"deep", ctx.deep},
                     {"wall_ms", wall},
                     {"exit_code", out.rc}};
    manifest.update(ctx.meta);
    manifest["outputs"] = ctx.outputs;
    write_file(ctx.manifest_path, manifest.dump(2) + "\n");
  }
  return out.rc;
}
