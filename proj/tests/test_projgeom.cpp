#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "spreadforge/projgeom.hpp"

using namespace spreadforge;
using namespace spreadforge::geom;
using gf::Field;

static QuadraticForm form_from(const Field& F, int dim,
                               std::vector<std::tuple<int, int, int>> terms) {
  linalg::Mat u(dim, dim);
  for (auto [i, j, c] : terms) u.at(i, j) = F.from_int(c);
  return QuadraticForm::from_upper(std::move(u));
}

TEST_CASE("projective point counts") {
  for (int q : {3, 4, 5, 7, 9}) {
    Field F = Field::of_order(q);
    REQUIRE(PointTable(F, 2).size() == q * q + q + 1);
    REQUIRE(PointTable(F, 3).size() == (q * q + 1) * (q + 1));
  }
  Field F3 = Field::of_order(3);
  REQUIRE(PointTable(F3, 5).size() == 364);
}

TEST_CASE("point interning is scale invariant") {
  Field F = Field::of_order(5);
  PointTable pt(F, 3);
  for (int id : {0, 7, 100, pt.size() - 1}) {
    Vec v = pt.point(id);
    for (auto& c : v) c = F.mul(c, F.el(3));
    REQUIRE(pt.id_of(F, v) == id);
  }
  Vec zero(4, F.zero());
  REQUIRE_THROWS_AS(pt.id_of(F, zero), std::invalid_argument);
}

TEST_CASE("spans are canonical and enumerate the right points") {
  Field F = Field::of_order(3);
  PointTable pt(F, 3);
  Subspace l1 = line_through(F, pt, 0, 1);
  std::vector<int> ids = points_of(F, pt, l1);
  REQUIRE((int)ids.size() == F.q() + 1);
  // same line from a different spanning pair
  Subspace l2 = line_through(F, pt, ids[1], ids[3]);
  REQUIRE(l1 == l2);
  REQUIRE_THROWS_AS(line_through(F, pt, 4, 4), std::invalid_argument);

  Subspace plane = span_of_points(F, pt, {0, 1, 5});
  if (plane.rank() == 3) {
    REQUIRE((int)points_of(F, pt, plane).size() == F.q() * F.q() + F.q() + 1);
  }
}

TEST_CASE("two planes of PG(3,q) meet in a line") {
  Field F = Field::of_order(3);
  PointTable pt(F, 3);
  Subspace p1 = span_of_points(F, pt, {0, 1, 4});
  Subspace p2 = span_of_points(F, pt, {0, 1, 13});
  REQUIRE(p1.rank() == 3);
  REQUIRE(p2.rank() == 3);
  REQUIRE(!(p1 == p2));
  Subspace meet = subspace_intersection(F, p1, p2);
  REQUIRE(meet.rank() == 2);
  for (int id : points_of(F, pt, meet)) {
    REQUIRE(subspace_contains(F, p1, pt.point(id)));
    REQUIRE(subspace_contains(F, p2, pt.point(id)));
  }
}

TEST_CASE("alternating form basics and perp duality") {
  for (int q : {3, 4, 5}) {
    Field F = Field::of_order(q);
    PointTable pt(F, 3);
    SymplecticForm J = SymplecticForm::standard(F, 4);
    for (int id : {0, 3, 11, pt.size() - 2}) {
      const Vec& x = pt.point(id);
      REQUIRE(J.eval(F, x, x) == F.zero());
    }
    const Vec& a = pt.point(1);
    const Vec& b = pt.point(10);
    REQUIRE(J.eval(F, a, b) == F.neg(J.eval(F, b, a)));

    Subspace l = line_through(F, pt, 2, 17);
    Subspace lp = perp(F, l, J.gram);
    REQUIRE(lp.rank() == 2);
    REQUIRE(perp(F, lp, J.gram) == l);

    Subspace point = span_of_points(F, pt, {5});
    REQUIRE(perp(F, point, J.gram).rank() == 3);
  }
}

TEST_CASE("line census of PG(3,q) and the symplectic split") {
  for (int q : {3, 5}) {
    WGeometry w(q, false);
    int isotropic = 0;
    for (auto f : w.line_isotropic) isotropic += f;
    REQUIRE(w.lines.size() == (q * q + 1) * (q * q + q + 1));
    REQUIRE(isotropic == (q + 1) * (q * q + 1));
    REQUIRE(w.lines.size() - isotropic == q * q * (q * q + 1));

    // polarity is an involution, fixes exactly the totally isotropic lines,
    // and moves every other line to a disjoint one
    for (int l = 0; l < w.lines.size(); ++l) {
      REQUIRE(w.line_polar[w.line_polar[l]] == l);
      if (w.line_isotropic[l]) {
        REQUIRE(w.line_polar[l] == l);
      } else {
        REQUIRE(w.line_polar[l] != l);
        const auto& p1 = w.lines.line_pts[l];
        const auto& p2 = w.lines.line_pts[w.line_polar[l]];
        std::vector<int> common;
        std::set_intersection(p1.begin(), p1.end(), p2.begin(), p2.end(),
                              std::back_inserter(common));
        REQUIRE(common.empty());
      }
    }

    // collinearity graph is q(q+1)-regular
    for (int v = 0; v < w.pts.size(); ++v) {
      int deg = 0;
      for (int u = 0; u < w.pts.size(); ++u)
        if (u != v && w.adjacent(u, v)) ++deg;
      REQUIRE(deg == q * (q + 1));
    }
  }
}

TEST_CASE("quadric classification by point count") {
  for (int q : {3, 5}) {
    Field F = Field::of_order(q);

    PointTable pg2(F, 2);
    QuadraticForm conic = form_from(F, 3, {{0, 2, 1}, {1, 1, -1}});  // x0 x2 - x1^2
    QuadricInfo ci = quadric_type(F, pg2, conic);
    REQUIRE(ci.type == QuadricType::parabolic);
    REQUIRE(ci.points == q + 1);

    PointTable pg3(F, 3);
    QuadraticForm hyp = form_from(F, 4, {{0, 1, 1}, {2, 3, 1}});  // x0 x1 + x2 x3
    QuadricInfo hi = quadric_type(F, pg3, hyp);
    REQUIRE(hi.type == QuadricType::hyperbolic);
    REQUIRE(hi.points == (q + 1) * (q + 1));

    // x0^2 - nu x1^2 + x2 x3 with nu a nonsquare is elliptic
    int nu = F.nonsquare().v;
    QuadraticForm ell = form_from(F, 4, {{0, 0, 1}, {1, 1, -nu}, {2, 3, 1}});
    QuadricInfo ei = quadric_type(F, pg3, ell);
    REQUIRE(ei.type == QuadricType::elliptic);
    REQUIRE(ei.points == q * q + 1);

    // cone x0 x1 = 0 restricted... a product of two planes is degenerate
    QuadraticForm dg = form_from(F, 4, {{0, 1, 1}});
    REQUIRE(quadric_type(F, pg3, dg).type == QuadricType::degenerate);
    REQUIRE(quadric_is_singular(F, pg3, dg, quadric_points(F, pg3, dg)));

    PointTable pg4(F, 4);
    QuadraticForm par = form_from(F, 5, {{0, 0, 1}, {1, 2, 1}, {3, 4, 1}});
    QuadricInfo pi = quadric_type(F, pg4, par);
    REQUIRE(pi.type == QuadricType::parabolic);
    REQUIRE(pi.points == q * q * q + q * q + q + 1);
  }
}

TEST_CASE("line classes against a conic and interior/exterior counts") {
  for (int q : {3, 5, 7}) {
    Field F = Field::of_order(q);
    PointTable pg2(F, 2);
    QuadraticForm conic = form_from(F, 3, {{0, 2, 1}, {1, 1, -1}});
    int interior = 0, exterior = 0, on = 0;
    for (int x = 0; x < pg2.size(); ++x) {
      switch (conic_point_class(F, pg2, conic, x)) {
        case ConicPointClass::on_conic: ++on; break;
        case ConicPointClass::interior: ++interior; break;
        case ConicPointClass::exterior: ++exterior; break;
      }
    }
    REQUIRE(on == q + 1);
    REQUIRE(interior == q * (q - 1) / 2);
    REQUIRE(exterior == q * (q + 1) / 2);
  }
}

TEST_CASE("Klein correspondence is a bijection onto the Plucker quadric") {
  for (int q : {3, 5}) {
    WGeometry w(q);
    const Field& F = w.F;
    REQUIRE((int)w.klein.p5_to_line.size() == w.lines.size());
    REQUIRE((int)quadric_points(F, w.klein.p5, w.klein.quad).size() == w.lines.size());
    QuadricInfo qi = quadric_type(F, w.klein.p5, w.klein.quad);
    REQUIRE(qi.type == QuadricType::hyperbolic);

    // the alternating form cuts the quadric in the hyperplane c0 + c5 = 0:
    // exactly the images of the totally isotropic lines land there
    for (int l = 0; l < w.lines.size(); ++l) {
      const Vec& img = w.klein.p5.point(w.klein.image(l));
      bool in_hyperplane = F.add(img[0], img[5]) == F.zero();
      REQUIRE(in_hyperplane == (w.line_isotropic[l] == 1));
      REQUIRE(w.klein.preimage(w.klein.image(l)) == l);
    }

    // off-quadric points have no preimage
    for (int id = 0; id < w.klein.p5.size(); ++id)
      if (w.klein.quad.eval(F, w.klein.p5.point(id)) != F.zero()) {
        REQUIRE_THROWS_AS(w.klein.preimage(id), std::invalid_argument);
        break;
      }
  }
}
