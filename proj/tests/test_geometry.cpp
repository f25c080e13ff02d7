#include <cmath>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "symmkit/symmkit.hpp"

using namespace symmkit;
using Catch::Matchers::WithinAbs;

namespace {

GridFunction line_function(std::vector<double> v, double h = 1.0) {
  const std::size_t n = v.size();
  return GridFunction(Grid::centered({n}, h), std::move(v));
}

}  // namespace

TEST_CASE("hyperplane reflection", "[hyperplane]") {
  const OrientedHyperplane vertical({1.0, 0.0}, 0.0);
  CHECK(reflect_point({1.0, 0.0}, vertical) == Vec{-1.0, 0.0});
  CHECK(reflect_point({0.0, 5.0}, vertical) == Vec{0.0, 5.0});

  const OrientedHyperplane h({0.0, 1.0}, 1.0);
  const Vec r = reflect_point({3.0, 2.0}, h);
  CHECK_THAT(r[0], WithinAbs(3.0, 1e-15));
  CHECK_THAT(r[1], WithinAbs(0.0, 1e-15));
}

TEST_CASE("hyperplane normal is normalized and sides are consistent", "[hyperplane]") {
  const OrientedHyperplane h({3.0, 4.0}, 2.0, Orientation::Negative);
  CHECK_THAT(norm(h.normal()), WithinAbs(1.0, 1e-12));
  sampling::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec x{sampling::uniform(rng, -5, 5), sampling::uniform(rng, -5, 5)};
    const Vec y{sampling::uniform(rng, -5, 5), sampling::uniform(rng, -5, 5)};
    CHECK((h.in_positive(x) || h.in_negative(x)));
    if (h.in_positive(x) && h.in_negative(x)) CHECK(std::abs(h.signed_distance(x)) == 0.0);
    const Vec xx = h.reflect(h.reflect(x));
    CHECK_THAT(xx[0], WithinAbs(x[0], 1e-12));
    CHECK_THAT(xx[1], WithinAbs(x[1], 1e-12));
    const Vec rx = h.reflect(x), ry = h.reflect(y);
    CHECK_THAT(std::hypot(rx[0] - ry[0], rx[1] - ry[1]), WithinAbs(std::hypot(x[0] - y[0], x[1] - y[1]), 1e-12));
  }
  CHECK(h.signed_distance({0.0, 0.0}) > 0.0);
}

TEST_CASE("hyperplane rejects bad normals", "[hyperplane]") {
  CHECK_THROWS_AS(OrientedHyperplane({0.0, 0.0}, 0.0), Error);
  CHECK_THROWS_AS(OrientedHyperplane({}, 0.0), Error);
  CHECK_THROWS_AS(OrientedHyperplane({1, 0, 0, 0}, 0.0), Error);
  CHECK_THROWS_AS(OrientedHyperplane({1.0, 0.0}, NAN), Error);
}

TEST_CASE("aligned axis and positive direction", "[hyperplane]") {
  CHECK(OrientedHyperplane({0.0, 2.0}, 0.0).aligned_axis() == 1);
  CHECK(OrientedHyperplane({1.0, 1.0}, 0.0).aligned_axis() == -1);
  CHECK(OrientedHyperplane({0.0, -1.0}, 0.0).positive_direction_sign() == -1);
  CHECK(OrientedHyperplane({0.0, -1.0}, 0.0, Orientation::Negative).positive_direction_sign() == 1);
  CHECK_THROWS_AS(OrientedHyperplane({1.0, 1.0}, 0.0).positive_direction_sign(), MisalignedHyperplane);
}

TEST_CASE("grid geometry", "[grid]") {
  const Grid g = Grid::centered({4, 6}, 0.5);
  CHECK(g.size() == 24);
  CHECK(g.cell_volume() == 0.25);
  CHECK(g.origin() == Vec{-1.0, -1.5});
  CHECK(g.center(0) == Vec{-0.75, -1.25});
  CHECK(g.flatten(g.unflatten(17)) == 17);
  CHECK(g.stride(0) == 6);
  CHECK(g.axis_midpoint(1) == 0.0);
  std::size_t columns = 0;
  g.for_each_column(1, [&](std::size_t) { ++columns; });
  CHECK(columns == 4);
  CHECK_THROWS_AS(Grid({0, 3}, {0.0, 0.0}, 1.0), Error);
  CHECK_THROWS_AS(Grid({3}, {0.0}, -1.0), Error);
}

TEST_CASE("grid function validates values", "[grid]") {
  const Grid g = Grid::centered({3}, 1.0);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0.0, NAN, 1.0}), Error);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0.0, INFINITY, 1.0}), Error);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0.0, 1.0}), Error);
  const GridFunction f(g, std::vector<double>{2.0, -1.0, 2.0});
  CHECK(f.essinf() == -1.0);
  CHECK(f.levels() == std::vector<double>{-1.0, 2.0});
}

TEST_CASE("grid set measure and indicator", "[grid]") {
  const Grid g = Grid::centered({4, 4}, 0.5);
  const GridSet a = GridSet::from_predicate(g, [](std::size_t i) { return i % 3 == 0; });
  CHECK(a.count() == 6);
  CHECK(a.measure() == 6 * 0.25);
  const GridFunction ind = a.indicator();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(ind[i] == (a[i] ? 1.0 : 0.0));
}

TEST_CASE("grid set perimeter counts boundary faces", "[grid]") {
  const Grid g = Grid::centered({8, 8}, 0.25);
  const GridSet sq = sampling::box_raster(g, {-0.5, -0.5}, {0.5, 0.5});
  CHECK(sq.count() == 16);
  CHECK(sq.boundary_faces() == 16);
  CHECK_THAT(sq.perimeter(), WithinAbs(4.0, 1e-15));
}

TEST_CASE("distribution of a constant function", "[distribution]") {
  const auto d = distribution(line_function({3, 3, 3, 3}));
  REQUIRE(d.entries().size() == 1);
  CHECK(d.entries()[0].level == 3.0);
  CHECK(d.entries()[0].count == 0);
}

TEST_CASE("distribution of an indicator", "[distribution]") {
  const auto d = distribution(line_function({0, 1, 1, 0, 1}));
  REQUIRE(d.entries().size() == 2);
  CHECK(d.entries()[0].count == 3);
  CHECK(d.entries()[1].count == 0);
}

TEST_CASE("distribution with counts 6, 3, 1", "[distribution]") {
  const auto d = distribution(line_function({0, 1, 0, 2, 0, 1, 0, 0, 1, 0}));
  REQUIRE(d.entries().size() == 3);
  CHECK(d.entries()[0].level == 0.0);
  CHECK(d.entries()[0].measure == 4.0);
  CHECK(d.entries()[1].measure == 1.0);
  CHECK(d.entries()[2].measure == 0.0);
  CHECK(d.measure_above(-1.0) == 10.0);
  CHECK(d.count_above(0.5) == 4);
  CHECK(d.count_above(1.5) == 1);
}

TEST_CASE("distribution is reflection invariant", "[distribution]") {
  const Grid g = Grid::centered({32, 32}, 1.0 / 16);
  for (std::uint64_t s = 0; s < 20; ++s) {
    sampling::Rng rng(s);
    const GridFunction f = sampling::random_blob_function(g, rng);
    const auto d = distribution(f);
    CHECK(distribution(reflect_grid_function(f, OrientedHyperplane({1.0, 0.0}, 0.0))) == d);
    CHECK(distribution(reflect_grid_function(f, OrientedHyperplane({0.0, -1.0}, 0.0))) == d);
    // The measure of {f > t} never grows with t.
    for (std::size_t i = 0; i + 1 < d.entries().size(); ++i) CHECK(d.entries()[i].count >= d.entries()[i + 1].count);
  }
}

TEST_CASE("reflect grid function", "[reflection]") {
  const GridFunction f = line_function({1, 1, 0, 0, 0, 0, 0, 0}, 0.25);  // 1 on [-1, -0.5]
  const GridFunction r = reflect_grid_function(f, OrientedHyperplane({1.0}, 0.0));
  CHECK(std::vector<double>(r.values().begin(), r.values().end()) == std::vector<double>{0, 0, 0, 0, 0, 0, 1, 1});

  const GridFunction sym = line_function({0, 2, 5, 5, 2, 0});
  CHECK(reflect_grid_function(sym, OrientedHyperplane({1.0}, 0.0)) == sym);
  const GridFunction c(Grid::centered({5, 5}, 0.5), 3.0);
  CHECK(reflect_grid_function(c, OrientedHyperplane({0.0, 1.0}, 0.0)) == c);
}

TEST_CASE("off-grid mirror images read the infimum", "[reflection]") {
  const GridFunction f = line_function({4, 1, 2, 3});
  const GridFunction r = reflect_grid_function(f, OrientedHyperplane({1.0}, 1.0));
  CHECK(std::vector<double>(r.values().begin(), r.values().end()) == std::vector<double>{1, 1, 3, 2});
}

TEST_CASE("misaligned hyperplanes are rejected", "[reflection]") {
  const Grid g = Grid::centered({8, 8}, 0.25);
  CHECK_THROWS_AS(plan_reflection(g, OrientedHyperplane({0.0, 1.0}, 0.1)), MisalignedHyperplane);
  CHECK_THROWS_AS(plan_reflection(g, OrientedHyperplane({1.0, 2.0}, 0.0)), MisalignedHyperplane);
  CHECK_NOTHROW(plan_reflection(g, OrientedHyperplane({1.0, 1.0}, 0.0)));
  CHECK_NOTHROW(plan_reflection(g, OrientedHyperplane({0.0, 1.0}, 0.125)));
}

TEST_CASE("polygon construction and measures", "[polygon]") {
  const ConvexPolygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(sq.area() == 1.0);
  CHECK(sq.perimeter() == 4.0);
  CHECK(sq.contains({0.5, 1.0}));
  CHECK_FALSE(sq.contains({1.5, 0.5}));
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), DegenerateBody);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);  // clockwise
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), DegenerateBody);
  const ConvexPolygon h = ConvexPolygon::hull({{0, 0}, {1, 1}, {1, 0}, {0.5, 0.5}, {0, 1}});
  CHECK(h.size() == 4);
  CHECK(h.area() == 1.0);
}

TEST_CASE("chords of polygons", "[polygon]") {
  const ConvexPolygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto c = chord(sq, {0.0, 1.0}, 0.5);
  REQUIRE(c);
  CHECK(c->lo == 0.0);
  CHECK(c->hi == 1.0);
  CHECK(c->midpoint() == 0.5);
  CHECK_FALSE(chord(sq, {0.0, 1.0}, 1.5));

  const ConvexPolygon tri({{0, 0}, {2, 0}, {0, 2}});
  const auto t = chord(tri, {0.0, 1.0}, 1.0);
  REQUIRE(t);
  CHECK_THAT(t->lo, WithinAbs(0.0, 1e-15));
  CHECK_THAT(t->hi, WithinAbs(1.0, 1e-15));
  CHECK_THAT(t->midpoint(), WithinAbs(0.5, 1e-15));
}

TEST_CASE("chord extents vary continuously", "[polygon]") {
  sampling::Rng rng(11);
  for (int k = 0; k < 30; ++k) {
    const ConvexPolygon p = sampling::random_convex_polygon(rng, {0, 0}, 0.3, 1.5);
    double lip = 0.0;
    const auto v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2 e = v[(i + 1) % v.size()] - v[i];
      if (std::abs(e.x) > 1e-9) lip = std::max(lip, std::abs(e.y / e.x));
    }
    const auto [lo, hi] = p.projection(ChordFrame({0.0, 1.0}));
    for (int j = 0; j < 50; ++j) {
      const double x = sampling::uniform(rng, lo + 1e-3, hi - 1e-3);
      const double y = std::clamp(x + sampling::uniform(rng, -1e-2, 1e-2), lo + 1e-3, hi - 1e-3);
      const auto a = chord(p, {0.0, 1.0}, x), b = chord(p, {0.0, 1.0}, y);
      REQUIRE(a);
      REQUIRE(b);
      CHECK(std::abs(a->hi - b->hi) <= lip * std::abs(x - y) + 1e-9);
      CHECK(std::abs(a->lo - b->lo) <= lip * std::abs(x - y) + 1e-9);
    }
  }
}

TEST_CASE("rasterize by cell centres", "[polygon]") {
  const Grid g = Grid::centered({64, 64}, 1.0 / 32);
  const GridSet a = rasterize(ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), g);
  CHECK(a.count() == 32 * 32);
}

TEST_CASE("contractions", "[contraction]") {
  CHECK(canonical_contraction("id")(3.0) == 3.0);
  CHECK(canonical_contraction("abs")(-0.75) == 0.75);
  CHECK(canonical_contraction("neg")(0.25) == -0.25);
  CHECK(canonical_contraction("negabs")(-2.0) == -2.0);
  CHECK_THROWS_AS(canonical_contraction("square"), UnknownName);

  const PLContraction saw = sawtooth_contraction(1.0);
  CHECK_THAT(saw(0.75), WithinAbs(0.25, 1e-15));
  CHECK(saw(0.5) == 0.5);
  CHECK(saw(2.0) == 0.0);
  CHECK(saw(-1.25) == 0.25);
  CHECK(saw.eikonal());

  CHECK_THROWS_AS(PLContraction({{0, 0}, {1, 2}}), Error);
  CHECK_THROWS_AS(PLContraction({{0, 0}}), Error);
  CHECK_THROWS_AS(PLContraction({{1, 0}, {0, 0}}), Error);

  const PLContraction half({{0, 0}, {2, 1}});
  CHECK(half(4.0) == 2.0);  // terminal slope continues
  CHECK(half(-2.0) == -1.0);
  CHECK_FALSE(half.eikonal());
  CHECK(canonical_contraction("abs").affine_on(0.0, 5.0));
  CHECK_FALSE(canonical_contraction("abs").affine_on(-1.0, 1.0));
}

TEST_CASE("contractions are 1-Lipschitz", "[contraction]") {
  sampling::Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const PLContraction phi = sampling::random_contraction(rng, -3, 3, k % 2 == 0);
    for (int j = 0; j < 10000 / 20; ++j) {
      const double s = sampling::uniform(rng, -5, 5), t = sampling::uniform(rng, -5, 5);
      CHECK(std::abs(phi(s) - phi(t)) <= std::abs(s - t) * (1 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("monotone maps", "[contraction]") {
  const MonotoneMap step({{0.5, 0.0}, {0.5, 1.0}});
  CHECK(step(0.0) == 0.0);
  CHECK(step(0.5) == 1.0);  // right-continuous
  CHECK(step(2.0) == 1.0);
  CHECK_THROWS_AS(MonotoneMap({{0, 1}, {1, 0}}), NonMonotoneMap);
  CHECK_THROWS_AS(MonotoneMap({{1, 0}, {0, 1}}), NonMonotoneMap);
  const MonotoneMap aff = MonotoneMap::affine(2.0, -1.0);
  CHECK(aff(3.0) == 5.0);
  CHECK(aff(-1.0) == -3.0);
}

TEST_CASE("GRD1 round trip", "[io]") {
  sampling::Rng rng(1);
  const GridFunction f = sampling::random_blob_function(Grid::centered({16, 8}, 0.125), rng);
  std::stringstream ss;
  io::write_grd1(ss, f);
  CHECK(io::read_grd1(ss) == f);

  std::stringstream bad("GRD2\n{}\n");
  CHECK_THROWS_AS(io::read_grd1(bad), FormatError);
  std::stringstream trunc;
  io::write_grd1(trunc, f);
  std::string s = trunc.str();
  s.pop_back();
  std::stringstream cut(s);
  CHECK_THROWS_AS(io::read_grd1(cut), FormatError);
  CHECK_THROWS_AS(io::to_set(f), FormatError);
}

TEST_CASE("JSON round trips", "[io]") {
  const ConvexPolygon tri({{0, 0}, {2, 0}, {0, 2}});
  CHECK(io::polygon_from_json(io::to_json(tri)).area() == tri.area());
  const PLContraction saw = sawtooth_contraction(1.0);
  CHECK(io::contraction_from_json(io::to_json(saw)) == saw);
  const OrientedHyperplane h({0.0, 1.0}, 0.25, Orientation::Negative);
  CHECK(io::hyperplane_from_json(io::to_json(h)) == h);
  const auto r = chord_move_polygon(tri, canonical_contraction("abs"), {0.0, 1.0});
  const auto back = io::region_from_json(io::to_json(r));
  CHECK(back.gplus == r.gplus);
  CHECK(back.gminus == r.gminus);
  CHECK_THROWS_AS(io::polygon_from_json(nlohmann::json{{"vertices", 3}}), FormatError);
}
