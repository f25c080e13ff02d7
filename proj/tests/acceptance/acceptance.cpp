// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "symmkit/symmkit.hpp"

using namespace symmkit;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const OrientedHyperplane kH({0.0, 1.0}, 0.0);
const Point2 kU{0.0, 1.0};

Grid planar(std::size_t n) { return Grid::centered({n, n}, 2.0 / static_cast<double>(n)); }

GridFunction blob(std::uint64_t seed, std::size_t n) {
  sampling::Rng rng(seed);
  return sampling::random_blob_function(planar(n), rng);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

/// Runs a criterion, then fails it if it took longer than `limit` seconds (0 = no limit).
bool report(int id, const char* name, double limit, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit > 0.0 && secs >= limit) {
    o.pass = false;
    o.detail += fmt(" over the %.0f s limit", limit);
  }
  std::printf("[%s] %2d %-28s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

// -- exact chord oracles for the canonical maps ------------------------------

std::optional<Chord> merged(std::vector<Chord> pieces) {
  std::erase_if(pieces, [](const Chord& c) { return !(c.hi > c.lo); });
  if (pieces.empty()) return std::nullopt;
  std::sort(pieces.begin(), pieces.end(), [](const Chord& a, const Chord& b) { return a.lo < b.lo; });
  Chord out = pieces.front();
  for (const Chord& c : pieces) {
    if (c.lo > out.hi + 1e-12) return std::nullopt;  // not a single interval
    out.hi = std::max(out.hi, c.hi);
  }
  return out;
}

/// Polarization of the chord I: (I u I^dagger) on s >= 0, (I n I^dagger) on s <= 0.
std::optional<Chord> polarized_chord(const Chord& i) {
  const Chord m{-i.hi, -i.lo};
  const Chord both{std::max(i.lo, m.lo), std::min(i.hi, m.hi)};
  return merged({{std::max(i.lo, 0.0), i.hi}, {std::max(m.lo, 0.0), m.hi}, {both.lo, std::min(both.hi, 0.0)}});
}

double chord_gap(const ChordMovedRegion& r, const std::function<std::optional<Chord>(double)>& expected) {
  double worst = 0.0;
  const int samples = 100;
  for (int j = 1; j < samples; ++j) {
    const double x = r.omega_lo + (r.omega_hi - r.omega_lo) * j / samples;
    const auto a = r.chord_at(x);
    const auto b = expected(x);
    if (!a || !b) return INFINITY;
    worst = std::max({worst, std::abs(a->lo - b->lo), std::abs(a->hi - b->hi)});
  }
  return worst;
}

ConvexPolygon random_polygon(sampling::Rng& rng) {
  return sampling::random_convex_polygon(rng, {sampling::uniform(rng, -1, 1), sampling::uniform(rng, -1, 1)}, 0.2, 1.5);
}

// -- criteria ------------------------------------------------------------------

Outcome equimeasurability() {
  std::vector<std::pair<GridFunction, OrientedHyperplane>> cases;
  for (std::uint64_t s = 0; s < 200; ++s) cases.emplace_back(blob(s, 64), kH);
  const OrientedHyperplane h1({1.0}, 0.0);
  const Grid line = Grid::centered({8}, 0.25);
  cases.emplace_back(GridFunction(line, std::vector<double>{1, 1, 0, 0, 0, 0, 0, 0}), h1);
  cases.emplace_back(GridFunction(Grid::centered({6}, 1.0), std::vector<double>{0, 0, 0, 0, 0, 5}),
                     OrientedHyperplane({-1.0}, -1.0));
  cases.emplace_back(GridFunction(Grid::centered({4}, 1.0), std::vector<double>{0, 3, 1, 2}), h1);
  const harness::ProbeSpace s = harness::ProbeSpace::planar();
  const auto cone = experiments::gallery::cone_fixture(s.grid);
  for (const GridSet& a : {cone.cone, cone.double_cone, experiments::gallery::straddling_square(s.grid),
                           experiments::gallery::mirrored_disks(s)})
    cases.emplace_back(a.indicator(), s.plane);
  for (const auto& [f, h] : cases)
    if (!(distribution(polarize(f, h)) == distribution(f))) return {false, "distribution changed"};
  return {true, std::to_string(cases.size()) + " functions"};
}

Outcome lp_contraction() {
  double worst = -INFINITY;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const GridFunction f = blob(10'000 + 2 * k, 64);
    const GridFunction g = blob(10'001 + 2 * k, 64);
    const GridFunction pf = polarize(f, kH), pg = polarize(g, kH);
    for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
      const double gap = harness::lp_distance(pf, pg, p) - harness::lp_distance(f, g, p);
      worst = std::max(worst, gap);
      if (gap > 1e-12) return {false, fmt("pair %.0f: excess %.3g", static_cast<double>(k), gap)};
    }
  }
  return {true, fmt("200 pairs x 3 norms, max excess %.3g", worst)};
}

Outcome modulus() {
  for (std::uint64_t k = 0; k < 50; ++k) {
    const GridFunction f = blob(20'000 + k, 32);
    const auto a = harness::modulus_profile(f);
    const auto b = harness::modulus_profile(polarize(f, kH));
    if (a.size() != b.size()) return {false, "profile sizes differ"};
    for (std::size_t i = 0; i < a.size(); ++i)
      if (b[i].second > a[i].second + 1e-12)
        return {false, fmt("function %.0f at d^2 = %.0f", static_cast<double>(k), static_cast<double>(a[i].first))};
  }
  return {true, "50 functions, all distances"};
}

Outcome layer_cake() {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const GridFunction f = blob(30'000 + k, 64);
    if (distribution(f).entries().size() > 32) return {false, "fixture has more than 32 levels"};
    if (!(layer_cake_rearrangement(polarization_set_map(kH), f) == polarize(f, kH))) return {false, "P_H mismatch"};
    if (!(layer_cake_rearrangement(identity_set_map(), f) == f)) return {false, "Id mismatch"};
    if (!(layer_cake_rearrangement(reflection_set_map(kH), f) == reflect_grid_function(f, kH)))
      return {false, "reflection mismatch"};
  }
  return {true, "100 functions x {P_H, Id, reflection}"};
}

Outcome commutation() {
  sampling::Rng rng(40'000);
  for (int i = 0; i < 20; ++i) {
    const MonotoneMap phi = sampling::random_monotone_map(rng, -1.0, 40.0);
    for (std::uint64_t j = 0; j < 20; ++j) {
      const GridFunction f = blob(40'100 + j, 64);
      if (!(compose_monotone(polarize(f, kH), phi) == polarize(compose_monotone(f, phi), kH)))
        return {false, fmt("map %.0f, function %.0f", i, static_cast<double>(j))};
    }
  }
  return {true, "20 maps x 20 functions"};
}

Outcome canonical_correspondence() {
  sampling::Rng rng(50'000);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ConvexPolygon p = random_polygon(rng);
    auto base = [&](double x) { return chord(p, kU, x); };
    auto refl = [&](const std::optional<Chord>& c) { return c ? std::optional<Chord>(Chord{-c->hi, -c->lo}) : c; };
    auto pol = [&](double x) { const auto c = base(x); return c ? polarized_chord(*c) : c; };
    worst = std::max({worst, chord_gap(chord_move_polygon(p, canonical_contraction("id"), kU), base),
                      chord_gap(chord_move_polygon(p, canonical_contraction("neg"), kU), [&](double x) { return refl(base(x)); }),
                      chord_gap(chord_move_polygon(p, canonical_contraction("abs"), kU), pol),
                      chord_gap(chord_move_polygon(p, canonical_contraction("negabs"), kU), [&](double x) { return refl(pol(x)); })});
  }
  return {worst <= 1e-9, fmt("50 polygons x 4 maps, max chord error %.3g", worst)};
}

Outcome eikonal_perimeter() {
  sampling::Rng rng(60'000);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ConvexPolygon p = random_polygon(rng);
    for (const PLContraction& phi : {sawtooth_contraction(1.0), sampling::random_contraction(rng, -4, 4, true)})
      worst = std::max(worst, std::abs(perimeter_region(chord_move_polygon(p, phi, kU)) - p.perimeter()));
  }
  const double t = 1.0, r = 0.5;
  const ConvexPolygon wedge({{t - r, 0.0}, {t + r, 0.0}, {t + r, 2.0 * (t + r)}, {t - r, 2.0 * (t - r)}});
  const double half = graph_length(chord_move_polygon(wedge, PLContraction({{-10.0, -5.0}, {10.0, 5.0}}), kU));
  const double ident = graph_length(chord_move_polygon(wedge, canonical_contraction("id"), kU));
  const double e_half = std::abs(half - (std::sqrt(3.25) + std::sqrt(1.25)) * 2 * r);
  const double e_id = std::abs(ident - (std::sqrt(5.0) + 1.0) * 2 * r);
  const bool ok = worst <= 1e-9 && e_half <= 1e-9 && e_id <= 1e-9 && half < ident;
  return {ok, fmt("perimeter error %.3g, wedge graph error %.3g", worst, std::max(e_half, e_id))};
}

Outcome translate_law() {
  sampling::Rng rng(70'000);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ConvexPolygon sym = sampling::random_h_symmetric_polygon(rng, sampling::uniform(rng, -1, 1), 0.2, 1.2);
    const PLContraction phi = sampling::random_contraction(rng, -3, 3, k % 2 == 0);
    for (int j = 0; j < 20; ++j) {
      const double t = -2.0 + 4.0 * j / 19.0;
      const ChordMovedRegion r = chord_move_polygon(sym.translated(kU * t), phi, kU);
      const ConvexPolygon expect = sym.translated(kU * phi(t));
      worst = std::max(worst, chord_gap(r, [&](double x) { return chord(expect, kU, x); }));
    }
  }
  return {worst <= 1e-9, fmt("50 polygons x 20 offsets, max chord error %.3g", worst)};
}

Outcome union_oracle() {
  sampling::Rng rng(80'000);
  const std::size_t samples = 10'000;
  double worst_ratio = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ConvexPolygon tri = sampling::random_triangle(rng, 1.5);
    const PLContraction phi = sampling::random_contraction(rng, -3, 3, k % 2 == 0);
    const SampledUnion un = union_of_translates(tri, phi, kU, samples);
    const double bound = 2.0 * (un.t_hi - un.t_lo) / static_cast<double>(samples);
    const double d = chordwise_hausdorff(un, chord_move_polygon(tri, phi, kU), 200);
    worst_ratio = std::max(worst_ratio, d / bound);
  }
  return {worst_ratio <= 1.0, fmt("10 triangles, worst distance / bound %.3g", worst_ratio)};
}

Outcome gallery() {
  experiments::ExperimentConfig cfg;
  cfg.name = "gallery";
  cfg.seed = 42;
  cfg.trials = 40;
  try {
    const auto r = experiments::run_gallery(cfg);
    return {true, std::to_string(r.rows.size()) + " examples match"};
  } catch (const experiments::GalleryFailure& e) {
    std::string bad;
    for (const auto& row : e.result.rows)
      for (const auto& c : row.cells)
        if (!c.matches()) bad += " " + row.example + "/" + c.property;
    return {false, "mismatch:" + bad};
  }
}

Outcome convergence() {
  experiments::ExperimentConfig cfg;
  cfg.name = "iterated-polarization";
  cfg.iterations = 2000;
  cfg.seed = 42;
  const GridFunction f0 = experiments::convergence_blob(42);
  // run_convergence throws if any iterate changes the distribution.
  const auto t = experiments::run_convergence(f0, cfg);
  const double ratio = t.initial_l1 > 0.0 ? t.final_l1() / t.initial_l1 : 0.0;
  const bool ok = t.records.size() == 2000 && t.initial_l1 > 0.0 && ratio <= 0.1;
  return {ok, fmt("L1 %.4g -> %.4g", t.initial_l1, t.final_l1()) + fmt(", ratio %.3g, %.0f L1 increases", ratio,
                                                                        static_cast<double>(t.l1_increases.size()))};
}

}  // namespace

int main() {
  bool ok = true;
  ok &= report(1, "equimeasurability", 5.0, equimeasurability);
  ok &= report(2, "lp-contraction", 5.0, lp_contraction);
  ok &= report(3, "modulus-reduction", 30.0, modulus);
  ok &= report(4, "layer-cake", 0.0, layer_cake);
  ok &= report(5, "commutation", 0.0, commutation);
  ok &= report(6, "canonical-correspondence", 0.0, canonical_correspondence);
  ok &= report(7, "eikonal-perimeter", 0.0, eikonal_perimeter);
  ok &= report(8, "symmetric-translate-law", 0.0, translate_law);
  ok &= report(9, "union-of-translates", 0.0, union_oracle);
  ok &= report(10, "counterexample-gallery", 10.0, gallery);
  ok &= report(11, "convergence", 60.0, convergence);
  std::printf("%s\n", ok ? "ALL PASS" : "SOME CRITERIA FAILED");
  return ok ? 0 : 1;
}
