#include <algorithm>
#include <vector>

#include "catch_amalgamated.hpp"
#include "symmkit/symmkit.hpp"

using namespace symmkit;

namespace {

std::vector<double> values_of(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

GridFunction line_function(std::vector<double> v, double h = 1.0) {
  const std::size_t n = v.size();
  return GridFunction(Grid::centered({n}, h), std::move(v));
}

const OrientedHyperplane kH({0.0, 1.0}, 0.0);

Grid planar(std::size_t n = 32) { return Grid::centered({n, n}, 2.0 / static_cast<double>(n)); }

GridFunction random_f(std::uint64_t seed, std::size_t n = 32) {
  sampling::Rng rng(seed);
  return sampling::random_blob_function(planar(n), rng);
}

}  // namespace

TEST_CASE("polarize a one-dimensional indicator", "[polarize]") {
  const GridFunction f = line_function({1, 1, 0, 0, 0, 0, 0, 0}, 0.25);
  const GridFunction p = polarize(f, OrientedHyperplane({1.0}, 0.0));
  CHECK(values_of(p) == std::vector<double>{0, 0, 0, 0, 0, 0, 1, 1});
}

TEST_CASE("polarize fixes symmetric and constant functions", "[polarize]") {
  const GridFunction sym = line_function({0, 2, 5, 5, 2, 0});
  CHECK(polarize(sym, OrientedHyperplane({1.0}, 0.0)) == sym);
  const GridFunction c(planar(), 3.0);
  CHECK(polarize(c, kH) == c);
}

TEST_CASE("polarize is equimeasurable, idempotent and monotonic", "[polarize][property]") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const GridFunction f = random_f(s);
    const GridFunction p = polarize(f, kH);
    CHECK(distribution(p) == distribution(f));
    CHECK(polarize(p, kH) == p);

    sampling::Rng rng(1000 + s);
    const GridFunction extra = sampling::random_blob_function(f.grid(), rng);
    std::vector<double> g = values_of(f);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += extra[i];
    const GridFunction pg = polarize(GridFunction(f.grid(), g), kH);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(p[i] <= pg[i]);
  }
}

TEST_CASE("polarize with a shifted hyperplane", "[polarize]") {
  const GridFunction f = line_function({5, 0, 0, 0, 0, 0});
  // H at x = 1 with H^+ below it: the value at the far right moves left.
  const GridFunction p = polarize(f, OrientedHyperplane({-1.0}, -1.0));
  CHECK(values_of(p) == values_of(f));
  const GridFunction g = line_function({0, 0, 0, 0, 0, 5});
  CHECK(values_of(polarize(g, OrientedHyperplane({-1.0}, -1.0))) == std::vector<double>{0, 0, 5, 0, 0, 0});
}

TEST_CASE("polarize set", "[polarize]") {
  const Grid g = planar(64);
  const GridSet up = sampling::disk_raster(g, {0.1, 0.5}, 0.3);
  CHECK(polarize_set(up, kH) == up);
  const GridSet sym = sampling::box_raster(g, {-0.3, -0.4}, {0.2, 0.4});
  CHECK(polarize_set(sym, kH) == sym);
  const GridSet down = sampling::disk_raster(g, {0.1, -0.5}, 0.3);
  CHECK(polarize_set(down, kH) == reflect_grid_set(down, kH));
  CHECK(polarize_set(down, kH) == up);
}

TEST_CASE("Steiner fill order", "[steiner]") {
  CHECK(centered_fill_order(4) == std::vector<std::size_t>{2, 1, 3, 0});
  CHECK(centered_fill_order(5) == std::vector<std::size_t>{2, 3, 1, 4, 0});
  CHECK(centered_fill_order(1) == std::vector<std::size_t>{0});
}

TEST_CASE("Steiner symmetrization of a column", "[steiner]") {
  const GridFunction f = line_function({0, 3, 1, 2});
  CHECK(values_of(steiner_symmetrize_function(f, 0)) == std::vector<double>{0, 2, 3, 1});
}

TEST_CASE("Steiner symmetrization of sets", "[steiner]") {
  const Grid g = planar(64);
  const GridSet centred = sampling::box_raster(g, {-0.5, -0.5}, {0.5, 0.5});
  CHECK(steiner_symmetrize_set(centred, 1) == centred);

  const GridSet unit = sampling::box_raster(g, {0.0, 0.0}, {1.0, 1.0});
  CHECK(steiner_symmetrize_set(unit, 1) == sampling::box_raster(g, {0.0, -0.5}, {1.0, 0.5}));

  // One column with scattered cells.
  const Grid line = Grid::centered({1, 9}, 1.0);
  GridSet col(line);
  for (std::size_t j : {0u, 3u, 8u}) col.set(j, true);
  const GridSet s = steiner_symmetrize_set(col, 1);
  CHECK(s.count() == 3);
  CHECK(s[3]);
  CHECK(s[4]);
  CHECK(s[5]);
}

TEST_CASE("Steiner symmetrization preserves columns and is symmetric decreasing", "[steiner][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GridFunction f = random_f(seed);
    const GridFunction s = steiner_symmetrize_function(f, 1);
    CHECK(steiner_symmetrize_function(s, 1) == s);
    const Grid& g = f.grid();
    const std::size_t len = g.dim(1);
    g.for_each_column(1, [&](std::size_t first) {
      std::vector<double> a, b;
      for (std::size_t j = 0; j < len; ++j) {
        a.push_back(f[first + j]);
        b.push_back(s[first + j]);
      }
      std::vector<double> sa = a, sb = b;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      REQUIRE(sa == sb);
      // Non-increasing away from the centre on each side.
      for (std::size_t j = len / 2; j + 1 < len; ++j) REQUIRE(b[j] >= b[j + 1]);
      for (std::size_t j = len / 2; j-- > 1;) REQUIRE(b[j] >= b[j - 1]);
    });
    CHECK(steiner_symmetrize_function(level_set(f, 2.0).indicator(), 1) ==
          steiner_symmetrize_set(level_set(f, 2.0), 1).indicator());
  }
}

TEST_CASE("Schwarz symmetrization", "[schwarz]") {
  const Grid g = Grid::centered({4, 9, 9}, 1.0);
  GridSet a(g);
  CHECK(schwarz_symmetrize_set(a, 0).empty());

  sampling::Rng rng(2);
  std::vector<std::size_t> plane;
  for (std::size_t j = 0; j < 81; ++j) plane.push_back(j);
  std::shuffle(plane.begin(), plane.end(), rng);
  for (std::size_t k = 0; k < 21; ++k) a.set(81 + plane[k], true);
  const GridSet s = schwarz_symmetrize_set(a, 0);
  CHECK(s.count() == 21);
  // All 21 cells in plane 1, inside the disk of radius sqrt(5) + margin about the plane centre.
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i]) continue;
    const Index idx = g.unflatten(i);
    CHECK(idx[0] == 1);
    const double dy = static_cast<double>(idx[1]) - 4.0, dz = static_cast<double>(idx[2]) - 4.0;
    CHECK(dy * dy + dz * dz <= 9.0);
  }
  CHECK(schwarz_symmetrize_set(s, 0) == s);

  GridSet full(g);
  for (std::size_t j = 0; j < 81; ++j) full.set(2 * 81 + j, true);
  CHECK(schwarz_symmetrize_set(full, 0) == full);
}

TEST_CASE("pointwise maps from associated pairs", "[pairs]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const GridFunction f = random_f(s);
    CHECK(build_pointwise_map(pairs::polarization(), kH)(f) == polarize(f, kH));
    CHECK(build_pointwise_map(pairs::first_projection(), kH)(f) == f);
    CHECK(build_pointwise_map(pairs::second_projection(), kH)(f) == reflect_grid_function(f, kH));
  }
  CHECK_THROWS_AS(associated_pair("harmonic-mean"), UnknownName);
  CHECK(associated_pair("max-max").name == "max-max");
}

TEST_CASE("associated value check", "[pairs]") {
  const std::vector<std::pair<double, double>> samples{{0, 2}, {1, 1}, {3, -1}, {2, 0}};
  CHECK(check_fvalues(pairs::polarization(), samples).holds);
  CHECK(check_fvalues(pairs::first_projection(), samples).holds);
  CHECK(check_fvalues(pairs::threshold_switch(4.5), samples).holds);
  const FValuesCheck mean = check_fvalues(pairs::arithmetic_mean(), samples);
  CHECK_FALSE(mean.holds);
  REQUIRE(mean.violation);
  CHECK(*mean.violation == std::make_pair(0.0, 2.0));
}

TEST_CASE("value check agrees with equimeasurability", "[pairs][property]") {
  for (const auto& fp : pair_catalog()) {
    const FunctionTransformer t = build_pointwise_map(fp, kH);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const GridFunction f = random_f(s);
      const bool values_ok = check_fvalues(fp, value_pairs(f)).holds;
      const bool equi = distribution(t(f)) == distribution(f);
      INFO(fp.name << " seed " << s);
      CHECK(values_ok == equi);
      if (fp.name == "arithmetic-mean" || fp.name == "max-max") CHECK_FALSE(values_ok);
    }
  }
}

TEST_CASE("induced set maps", "[induced]") {
  const Grid g = planar(64);
  sampling::Rng rng(9);
  for (int k = 0; k < 10; ++k) {
    const GridSet a = sampling::random_blob_set(g, rng, 0.6);
    CHECK(induced_set_map(identity_transformer())(a) == a);
    CHECK(induced_set_map(polarization_transformer(kH))(a) == polarize_set(a, kH));
    CHECK(induced_set_map(reflection_transformer(kH))(a) == reflect_grid_set(a, kH));
  }
}

TEST_CASE("layer-cake reconstruction", "[layer-cake]") {
  const GridFunction small = line_function({0, 2, 1, 0, 0, 1, 0, 0});
  const OrientedHyperplane h1({1.0}, 0.0);
  CHECK(layer_cake_rearrangement(polarization_set_map(h1), small) == polarize(small, h1));

  for (std::uint64_t s = 0; s < 30; ++s) {
    const GridFunction f = random_f(s);
    for (LevelSets kind : {LevelSets::Closed, LevelSets::Open}) {
      CHECK(layer_cake_rearrangement(identity_set_map(), f, kind) == f);
      CHECK(layer_cake_rearrangement(polarization_set_map(kH), f, kind) == polarize(f, kH));
      CHECK(layer_cake_rearrangement(induced_set_map(polarization_transformer(kH)), f, kind) == polarize(f, kH));
      CHECK(layer_cake_rearrangement(reflection_set_map(kH), f, kind) == reflect_grid_function(f, kH));
    }
  }
}

TEST_CASE("monotone composition", "[compose]") {
  const GridFunction f = line_function({0, 1, 2, 1});
  CHECK(compose_monotone(f, MonotoneMap::affine(1.0, 0.0)) == f);
  CHECK(values_of(compose_monotone(f, MonotoneMap::affine(2.0, 1.0))) == std::vector<double>{1, 3, 5, 3});
  const MonotoneMap step({{0.5, 0.0}, {0.5, 1.0}});
  CHECK(values_of(compose_monotone(f, step)) == std::vector<double>{0, 1, 1, 1});
}

TEST_CASE("polarization commutes with increasing maps", "[compose][property]") {
  sampling::Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const MonotoneMap phi = sampling::random_monotone_map(rng, -1.0, 20.0);
    const GridFunction f = random_f(100 + k);
    CHECK(compose_monotone(polarize(f, kH), phi) == polarize(compose_monotone(f, phi), kH));
  }
}
