#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "symmkit/chord_maps.hpp"
#include "symmkit/harness.hpp"
#include "symmkit/io.hpp"
#include "symmkit/rearrangements.hpp"
#include "symmkit/sampling.hpp"

namespace symmkit::experiments {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Fan-out with deterministic merge order

/// Worker count: SYMMKIT_THREADS when set to a positive integer, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("SYMMKIT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every task and returns the results in task order. The first exception
/// (by task index) is rethrown after all workers finish.
template <class R>
std::vector<R> parallel_map(const std::vector<std::function<R()>>& tasks, std::size_t workers = worker_count()) {
  std::vector<std::optional<R>> slots(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < tasks.size(); i += workers) {
      try {
        slots[i].emplace(tasks[i]());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, tasks.size()));
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(tasks.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

enum class Strategy { RandomSeeded, FixedList };

struct ExperimentConfig {
  std::string name;
  std::vector<std::string> inputs;
  Strategy strategy = Strategy::RandomSeeded;
  std::vector<OrientedHyperplane> hyperplanes;  // used by FixedList, cycled
  std::size_t iterations = 1;
  std::uint64_t seed = 0;
  std::size_t axis = 1;
  std::size_t trials = 20;
  std::string trace_path;
  std::string report_path;

  void validate() const {
    if (iterations < 1) throw ConfigError("iteration count must be at least 1");
    if (strategy == Strategy::FixedList && hyperplanes.empty())
      throw ConfigError("fixed hyperplane strategy needs at least one hyperplane");
    for (const auto& p : inputs)
      if (!std::filesystem::exists(p)) throw ConfigError("input not found: " + p);
  }
};

// ---------------------------------------------------------------------------
// Iterated polarization toward the Steiner symmetral

struct TraceRecord {
  std::size_t k = 0;
  double l1 = 0.0;
  double linf = 0.0;
  OrientedHyperplane plane{{1.0}, 0.0};
};

struct ConvergenceTrace {
  double initial_l1 = 0.0;
  double initial_linf = 0.0;
  std::vector<TraceRecord> records;
  std::vector<std::size_t> l1_increases;  // steps whose L1 distance went up
  std::size_t redraws = 0;                // hyperplanes rejected as misaligned

  double final_l1() const { return records.empty() ? initial_l1 : records.back().l1; }
  bool flagged() const { return !l1_increases.empty(); }
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_trace_csv(std::ostream& os, const ConvergenceTrace& t) {
  os << "k,l1,linf,normal,offset\n";
  for (const auto& r : t.records)
    os << r.k << ',' << format_double(r.l1) << ',' << format_double(r.linf) << ',' << describe(r.plane) << ','
       << format_double(r.plane.offset()) << '\n';
}

inline json to_json(const ConvergenceTrace& t) {
  return json{{"iterations", t.records.size()},
              {"initial_l1", t.initial_l1},
              {"initial_linf", t.initial_linf},
              {"final_l1", t.final_l1()},
              {"final_linf", t.records.empty() ? t.initial_linf : t.records.back().linf},
              {"ratio", t.initial_l1 > 0.0 ? t.final_l1() / t.initial_l1 : 0.0},
              {"l1_increases", t.l1_increases},
              {"redraws", t.redraws}};
}

/// Random lattice hyperplane orthogonal to `axis`, with H^+ holding the grid mid-plane.
///
/// The plane passes through a cell boundary or a cell center. Its normal points
/// into H^+, so the orientation is always Positive. Mid-plane ties put H^+ on
/// the increasing side, matching the Steiner tie convention.
inline OrientedHyperplane draw_toward_mid(const Grid& g, std::size_t axis, sampling::Rng& rng) {
  const auto len = static_cast<int>(g.dim(axis));
  // Half-cell positions 1 .. 2 len - 1 from the grid's low edge.
  const int k2 = sampling::uniform_int(rng, 1, 2 * len - 1);
  const double c = g.origin()[axis] + 0.5 * k2 * g.spacing();
  Vec n(g.dimension(), 0.0);
  if (k2 <= len) {
    n[axis] = 1.0;
    return OrientedHyperplane(n, c);
  }
  n[axis] = -1.0;
  return OrientedHyperplane(n, -c);
}

/// Polarizes f_0 repeatedly, f_(k+1) = P_(H_k) f_k, recording the distance to S_H f_0.
///
/// Every iterate is checked to have the distribution of f_0; a mismatch throws.
/// L1 increases are recorded, not treated as errors.
inline ConvergenceTrace run_convergence(const GridFunction& f0, const ExperimentConfig& cfg) {
  if (cfg.iterations < 1) throw ConfigError("iteration count must be at least 1");
  if (cfg.axis >= f0.grid().dimension()) throw ConfigError("target axis out of range");
  if (cfg.strategy == Strategy::FixedList && cfg.hyperplanes.empty())
    throw ConfigError("fixed hyperplane strategy needs at least one hyperplane");

  const GridFunction target = steiner_symmetrize_function(f0, cfg.axis);
  const DistributionProfile profile = distribution(f0);
  ConvergenceTrace trace;
  trace.initial_l1 = harness::lp_distance(f0, target, 1.0);
  trace.initial_linf = harness::lp_distance(f0, target, INFINITY);

  sampling::Rng rng(cfg.seed);
  GridFunction f = f0;
  double prev = trace.initial_l1;
  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    std::optional<OrientedHyperplane> plane;
    std::optional<GridFunction> next;
    for (std::size_t attempt = 0; !next; ++attempt) {
      if (attempt > 64) throw ConfigError("no admissible hyperplane after 64 draws");
      plane = cfg.strategy == Strategy::FixedList ? cfg.hyperplanes[(k - 1) % cfg.hyperplanes.size()]
                                                  : draw_toward_mid(f.grid(), cfg.axis, rng);
      try {
        next = polarize(f, *plane);
      } catch (const MisalignedHyperplane&) {
        ++trace.redraws;
        if (cfg.strategy == Strategy::FixedList) throw;
      }
    }
    f = std::move(*next);
    if (!(distribution(f) == profile)) throw Error("polarization step " + std::to_string(k) + " changed the distribution");
    const double l1 = harness::lp_distance(f, target, 1.0);
    if (l1 > prev + 1e-12) trace.l1_increases.push_back(k);
    prev = l1;
    trace.records.push_back({k, l1, harness::lp_distance(f, target, INFINITY), *plane});
  }
  return trace;
}

/// Writes the trace CSV and summary JSON to the paths set in `cfg`, if any.
inline void write_outputs(const ConvergenceTrace& t, const ExperimentConfig& cfg) {
  if (!cfg.trace_path.empty()) {
    std::ofstream os(cfg.trace_path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + cfg.trace_path + " for writing");
    write_trace_csv(os, t);
  }
  if (!cfg.report_path.empty()) {
    json j = to_json(t);
    j["experiment"] = cfg.name;
    j["seed"] = cfg.seed;
    j["axis"] = cfg.axis;
    io::save_json(cfg.report_path, j);
  }
}

/// Loads the first input as a GRD1 function, runs, and writes the outputs.
inline ConvergenceTrace run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.inputs.empty()) throw ConfigError("convergence needs an input grid function");
  const ConvergenceTrace t = run_convergence(io::load_grd1(cfg.inputs.front()), cfg);
  write_outputs(t, cfg);
  return t;
}

/// The 64x64 random blob used by the standard convergence run.
inline GridFunction convergence_blob(std::uint64_t seed, std::size_t cells = 64) {
  sampling::Rng rng(seed);
  return sampling::random_blob_function(Grid::centered({cells, cells}, 2.0 / static_cast<double>(cells)), rng, 0.8);
}

// ---------------------------------------------------------------------------
// Counterexample gallery

enum class Expect { Holds, Fails, Unasserted, NotRepresentable };

inline const char* to_string(Expect e) {
  switch (e) {
    case Expect::Holds: return "holds";
    case Expect::Fails: return "fails";
    case Expect::Unasserted: return "unasserted";
    case Expect::NotRepresentable: return "not-representable";
  }
  return "?";
}

struct GalleryCell {
  std::string property;
  Expect expected = Expect::Unasserted;
  harness::Verdict observed = harness::Verdict::NotApplicable;
  json evidence;

  bool matches() const {
    switch (expected) {
      case Expect::Holds: return observed == harness::Verdict::Holds;
      case Expect::Fails: return observed == harness::Verdict::Fails;
      default: return true;
    }
  }
};

struct GalleryRow {
  std::string example;
  std::string map;
  std::string note;
  std::vector<GalleryCell> cells;

  bool matches() const {
    return std::all_of(cells.begin(), cells.end(), [](const GalleryCell& c) { return c.matches(); });
  }
};

struct GalleryResult {
  std::vector<GalleryRow> rows;
  bool all_match() const {
    return std::all_of(rows.begin(), rows.end(), [](const GalleryRow& r) { return r.matches(); });
  }
};

inline json to_json(const GalleryRow& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json j{{"property", c.property}, {"expected", to_string(c.expected)}, {"observed", harness::to_string(c.observed)},
           {"match", c.matches()}};
    if (!c.evidence.is_null()) j["evidence"] = c.evidence;
    cells.push_back(std::move(j));
  }
  json j{{"example", r.example}, {"map", r.map}, {"match", r.matches()}, {"verdicts", cells}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const GalleryResult& g) {
  json rows = json::array();
  for (const auto& r : g.rows) rows.push_back(to_json(r));
  return json{{"all_match", g.all_match()}, {"rows", rows}};
}

/// Carries the full gallery summary so callers can still write the report.
class GalleryFailure : public GalleryMismatch {
 public:
  explicit GalleryFailure(GalleryResult r) : GalleryMismatch("gallery verdicts differ from the expected matrix"), result(std::move(r)) {}
  GalleryResult result;
};

namespace gallery {

inline GalleryCell from_report(const harness::PropertyReport& r, Expect e) {
  GalleryCell c{r.property, e, r.verdict, json()};
  c.evidence = harness::to_json(r);
  return c;
}

inline GalleryCell from_check(const std::string& property, Expect e, const std::optional<json>& violation, json inputs) {
  GalleryCell c{property, e, violation ? harness::Verdict::Fails : harness::Verdict::Holds, json()};
  c.evidence = json{{"inputs", std::move(inputs)}};
  if (violation) c.evidence["violation"] = *violation;
  return c;
}

inline void add_bundle(GalleryRow& row, const harness::SetMapReport& bundle,
                       const std::vector<std::pair<std::string, Expect>>& expected) {
  for (const auto& [prop, e] : expected) row.cells.push_back(from_report(bundle.at(prop), e));
}

/// Sawtooth chord movement: every set property holds, yet it is none of the four canonical maps.
inline GalleryRow sawtooth_row(const harness::ProbeSpace& s, std::size_t trials, std::uint64_t seed) {
  const SetMap d = chord_move_map(sawtooth_contraction(1.0), s.axis(), "sawtooth-chord-move");
  GalleryRow row{"sawtooth-chord-movement", d.name, "", {}};
  const auto bundle = harness::check_setmap_properties(d, s, trials, seed);
  for (const auto& p : harness::seven_set_properties()) row.cells.push_back(from_report(bundle.at(p), Expect::Holds));
  row.cells.push_back(from_report(bundle.at(harness::props::two_balls), Expect::Unasserted));

  const harness::Classification c =
      harness::classify_rearrangement(layer_cake_transformer(d), s, std::max<std::size_t>(trials / 4, 2), seed + 100);
  GalleryCell canon{"equals-a-canonical-map", Expect::Fails,
                    c.label == "other" ? harness::Verdict::Fails : harness::Verdict::Holds, harness::to_json(c)};
  row.cells.push_back(std::move(canon));
  return row;
}

/// Two mirrored disks, each clear of H.
inline GridSet mirrored_disks(const harness::ProbeSpace& s) {
  const Grid& g = s.grid;
  const std::size_t ax = s.axis();
  Vec up(g.dimension()), down(g.dimension());
  for (std::size_t k = 0; k < g.dimension(); ++k) up[k] = down[k] = g.axis_midpoint(k);
  up[ax] += 0.5 * sampling::half_extent(g, ax);
  down[ax] -= 0.5 * sampling::half_extent(g, ax);
  const double r = 0.15 * sampling::half_extent(g, ax);
  return sampling::disk_raster(g, up, r).united(sampling::disk_raster(g, down, r));
}

/// Shaking after polarization: agrees with polarization on convex bodies, not on two-disk unions.
inline GalleryRow shake_row(const harness::ProbeSpace& s, std::size_t trials, std::uint64_t seed) {
  const SetMap d = shake_polarization_map(s.plane);
  GalleryRow row{"shaken-polarization", d.name, "", {}};
  const auto bundle = harness::check_setmap_properties(d, s, trials, seed);
  add_bundle(row, bundle,
             {{harness::props::monotonic, Expect::Holds},
              {harness::props::measure, Expect::Holds},
              {harness::props::cylinders, Expect::Holds},
              {harness::props::balls, Expect::Holds},
              {harness::props::symmetric, Expect::Unasserted},
              {harness::props::respects, Expect::Unasserted},
              {harness::props::perimeter, Expect::Unasserted},
              {harness::props::two_balls, Expect::Fails}});

  std::optional<json> differs;
  for (std::size_t k = 0; k < 20 && !differs; ++k) {
    sampling::Rng rng(sampling::trial_seed(seed + 50, k));
    const GridSet a = rasterize(sampling::random_grid_polygon(s.grid, rng, 0.8), s.grid);
    if (!(d(a) == polarize_set(a, s.plane))) differs = json{{"trial", k}, {"A", io::to_json(a.indicator())}};
  }
  row.cells.push_back(from_check("equals-polarization-on-convex-rasters", Expect::Holds, differs, json{{"rasters", 20}}));

  // Polarization keeps the pair, shaking moves the lower disk up to H.
  const GridSet pair = mirrored_disks(s);
  const GridSet shaken = d(pair);
  const bool equal = shaken == polarize_set(pair, s.plane);
  GalleryCell two{"equals-polarization-on-two-disk-union", Expect::Fails,
                  equal ? harness::Verdict::Holds : harness::Verdict::Fails,
                  json{{"A", io::to_json(pair.indicator())}, {"cells_moved", pair.count() - shaken.intersected(pair).count()}}};
  row.cells.push_back(std::move(two));
  return row;
}

/// Cone inside a double cone, the double cone symmetric about the grid mid-plane.
struct ConeFixture {
  GridSet cone;
  GridSet double_cone;
};

inline ConeFixture cone_fixture(const Grid& g) {
  const double big = 0.6 * sampling::half_extent(g, 0);
  const double mx = g.axis_midpoint(0), my = g.axis_midpoint(1);
  const ConvexPolygon diamond({{mx, my - big}, {mx + big, my}, {mx, my + big}, {mx - big, my}});
  const ConvexPolygon upper({{mx - big, my}, {mx + big, my}, {mx, my + big}});
  return {rasterize(upper, g), rasterize(diamond, g)};
}

/// Reflection through the center of gravity: fails monotonicity on the cone pair.
inline GalleryRow cog_row(const harness::ProbeSpace& s, std::size_t trials, std::uint64_t seed) {
  const SetMap d = cog_reflect_map(s.axis());
  GalleryRow row{"center-of-gravity-reflection", d.name, "", {}};
  const ConeFixture cf = cone_fixture(s.grid);
  row.cells.push_back(from_check(harness::props::monotonic, Expect::Fails,
                                 harness::set_monotonic_violation(d, cf.cone, cf.double_cone),
                                 json{{"A", io::to_json(cf.cone.indicator())}, {"B", io::to_json(cf.double_cone.indicator())}}));
  const auto bundle = harness::check_setmap_properties(d, s, trials, seed);
  add_bundle(row, bundle,
             {{harness::props::measure, Expect::Holds},
              {harness::props::symmetric, Expect::Holds},
              {harness::props::perimeter, Expect::Holds},
              {harness::props::two_balls, Expect::Holds}});
  return row;
}

/// Closure of the interior: identical to the identity on grids.
inline GalleryRow closure_row() {
  GalleryRow row{"closure-of-interior", "identity", "not representable at grid scale: every grid set equals the closure of its interior", {}};
  row.cells.push_back({"all", Expect::NotRepresentable, harness::Verdict::NotApplicable, json()});
  return row;
}

/// Axis-aligned square straddling H, lattice-aligned so its raster perimeter is exact.
inline GridSet straddling_square(const Grid& g) {
  const double e = sampling::half_extent(g, 0);
  const double mx = g.axis_midpoint(0), my = g.axis_midpoint(1);
  return sampling::box_raster(g, {mx - 0.5 * e, my - 0.25 * e}, {mx + 0.5 * e, my + 0.75 * e});
}

/// Swapping cells near H: keeps most properties, breaks perimeter on a straddling square.
inline GalleryRow near_swap_row(const harness::ProbeSpace& s, std::size_t trials, std::uint64_t seed) {
  const double width = 0.5 * sampling::half_extent(s.grid, s.axis());
  const SetMap d = near_swap_map(s.plane, width);
  GalleryRow row{"near-hyperplane-swap", d.name, "", {}};
  const auto bundle = harness::check_setmap_properties(d, s, trials, seed);
  add_bundle(row, bundle,
             {{harness::props::monotonic, Expect::Holds},
              {harness::props::measure, Expect::Holds},
              {harness::props::symmetric, Expect::Holds},
              {harness::props::two_balls, Expect::Holds}});
  const GridSet sq = straddling_square(s.grid);
  row.cells.push_back(from_check(harness::props::perimeter, Expect::Fails, harness::grid_perimeter_violation(d, sq),
                                 json{{"A", io::to_json(sq.indicator())}, {"width", width}}));
  return row;
}

}  // namespace gallery

/// Runs every gallery example and compares the verdicts with the expected matrix.
/// Throws GalleryFailure (carrying the result) on any deviation.
inline GalleryResult run_gallery(const ExperimentConfig& cfg) {
  const harness::ProbeSpace s = harness::ProbeSpace::planar();
  const std::size_t n = std::max<std::size_t>(cfg.trials, 1);
  const std::uint64_t seed = cfg.seed;
  const std::vector<std::function<GalleryRow()>> tasks{
      [&] { return gallery::sawtooth_row(s, n, seed); },
      [&] { return gallery::shake_row(s, n, seed + 1000); },
      [&] { return gallery::cog_row(s, n, seed + 2000); },
      [] { return gallery::closure_row(); },
      [&] { return gallery::near_swap_row(s, n, seed + 3000); },
  };
  GalleryResult result{parallel_map(tasks)};
  if (!cfg.report_path.empty()) io::save_json(cfg.report_path, to_json(result));
  if (!result.all_match()) throw GalleryFailure(std::move(result));
  return result;
}

}  // namespace symmkit::experiments
