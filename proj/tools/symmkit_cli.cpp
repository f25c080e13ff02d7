// symmkit command-line front end.
//
// Exit status: 0 success, 1 a property or gallery verdict failed, 2 usage or I/O error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symmkit/symmkit.hpp"

namespace {

using namespace symmkit;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string in;
  std::string out;
  std::vector<double> normal;
  double offset = 0.0;
  std::string positive = "+";
  std::size_t axis = 1;
  std::string contraction;
  std::size_t iters = 2000;
  std::uint64_t seed = 42;
  std::string report;
  std::size_t trials = 200;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

OrientedHyperplane plane_from(const Options& o, std::size_t dimension) {
  Vec n = o.normal;
  if (n.empty()) {
    n.assign(dimension, 0.0);
    n.back() = 1.0;
  }
  if (n.size() != dimension) throw UsageError("--normal needs " + std::to_string(dimension) + " components");
  if (o.positive != "+" && o.positive != "-") throw UsageError("--positive must be + or -");
  return OrientedHyperplane(n, o.offset, o.positive == "+" ? Orientation::Positive : Orientation::Negative);
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

int cmd_polarize(const Options& o) {
  require(o.in, "--in");
  require(o.out, "--out");
  const GridFunction f = io::load_grd1(o.in);
  io::save_grd1(o.out, polarize(f, plane_from(o, f.grid().dimension())));
  return kOk;
}

int cmd_steiner(const Options& o) {
  require(o.in, "--in");
  require(o.out, "--out");
  const GridFunction f = io::load_grd1(o.in);
  if (o.axis >= f.grid().dimension()) throw UsageError("--axis out of range");
  io::save_grd1(o.out, steiner_symmetrize_function(f, o.axis));
  return kOk;
}

int cmd_schwarz(const Options& o) {
  require(o.in, "--in");
  require(o.out, "--out");
  const GridFunction f = io::load_grd1(o.in);
  if (f.grid().dimension() != 3) throw UsageError("schwarz needs a three-dimensional grid");
  if (o.axis >= 3) throw UsageError("--axis out of range");
  io::save_grd1(o.out, schwarz_symmetrize_function(f, o.axis));
  return kOk;
}

bool is_grd1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::string magic;
  return is && std::getline(is, magic) && magic == "GRD1";
}

int cmd_chordmap(const Options& o) {
  require(o.in, "--in");
  require(o.out, "--out");
  require(o.contraction, "--contraction");
  const PLContraction phi = io::contraction_from_json(io::load_json(o.contraction));
  if (is_grd1(o.in)) {
    const GridSet a = io::to_set(io::load_grd1(o.in));
    if (o.axis >= a.grid().dimension()) throw UsageError("--axis out of range");
    io::save_grd1(o.out, chord_move_gridset(a, phi, o.axis));
    return kOk;
  }
  const ConvexPolygon k = io::polygon_from_json(io::load_json(o.in));
  if (o.axis > 1) throw UsageError("--axis must be 0 or 1 for polygons");
  const Point2 u = o.axis == 0 ? Point2{1.0, 0.0} : Point2{0.0, 1.0};
  io::save_json(o.out, io::to_json(chord_move_polygon(k, phi, u)));
  return kOk;
}

int cmd_verify(const Options& o) {
  if (o.trials < 1) throw UsageError("--trials must be positive");
  harness::ProbeSpace space = harness::ProbeSpace::planar();
  space.plane = plane_from(o, 2);
  if (space.plane.aligned_axis() < 0) throw UsageError("verify needs an axis-aligned --normal");
  harness::ProbeSpace small = harness::ProbeSpace::planar(32);
  small.plane = space.plane;

  const FunctionTransformer t = polarization_transformer(space.plane);
  const SetMap d = polarization_set_map(space.plane);
  const std::size_t n = o.trials;
  const std::uint64_t s = o.seed;
  using Task = std::function<json()>;
  const std::vector<Task> tasks{
      [&] { return harness::to_json(harness::check_equimeasurable(t, space, n, s)); },
      [&] { return harness::to_json(harness::check_monotonic(t, space, n, s + 1)); },
      [&] { return harness::to_json(harness::check_lp_contracting(t, 1.0, space, n, s + 2)); },
      [&] { return harness::to_json(harness::check_lp_contracting(t, 2.0, space, n, s + 3)); },
      [&] { return harness::to_json(harness::check_lp_contracting(t, INFINITY, space, n, s + 4)); },
      [&] { return harness::to_json(harness::check_modulus_reducing(t, small, std::max<std::size_t>(n / 4, 1), s + 5)); },
      [&] { return harness::to_json(harness::check_setmap_properties(d, space, n, s + 10)); },
  };
  const std::vector<json> parts = experiments::parallel_map(tasks);

  bool ok = true;
  json functions = json::array();
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    ok = ok && parts[i].at("verdict") != "fails";
    functions.push_back(parts[i]);
  }
  for (const auto& p : parts.back().at("properties")) ok = ok && p.at("verdict") != "fails";
  const json report{{"transformer", t.name},
                    {"hyperplane", io::to_json(space.plane)},
                    {"seed", o.seed},
                    {"trials", o.trials},
                    {"function_properties", functions},
                    {"set_properties", parts.back()},
                    {"all_hold", ok}};
  if (!o.report.empty()) {
    io::save_json(o.report, report);
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return ok ? kOk : kPropertyFailure;
}

int cmd_converge(const Options& o) {
  experiments::ExperimentConfig cfg;
  cfg.name = "iterated-polarization";
  if (!o.in.empty()) cfg.inputs.push_back(o.in);
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  cfg.axis = o.axis;
  cfg.trace_path = o.out;
  cfg.report_path = o.report;
  cfg.validate();
  experiments::ConvergenceTrace trace;
  if (cfg.inputs.empty()) {
    // No input: the standard 64x64 random blob for this seed.
    trace = experiments::run_convergence(experiments::convergence_blob(o.seed), cfg);
    experiments::write_outputs(trace, cfg);
  } else {
    trace = experiments::run_convergence(cfg);
  }
  std::cout << experiments::to_json(trace).dump() << "\n";
  return kOk;
}

int cmd_gallery(const Options& o) {
  experiments::ExperimentConfig cfg;
  cfg.name = "gallery";
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.report_path = o.report;
  try {
    const auto result = experiments::run_gallery(cfg);
    if (o.report.empty()) std::cout << experiments::to_json(result).dump(2) << "\n";
    return kOk;
  } catch (const experiments::GalleryFailure& e) {
    std::cerr << "symmkit: " << e.what() << "\n";
    if (o.report.empty()) std::cout << experiments::to_json(e.result).dump(2) << "\n";
    return kPropertyFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization, symmetrization and chord-movement tools"};
  app.require_subcommand(1);
  Options o;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--in", o.in, "input file");
    sub->add_option("--out", o.out, "output file");
  };
  auto add_plane = [&](CLI::App* sub) {
    sub->add_option("--normal", o.normal, "hyperplane normal x,y[,z]")->delimiter(',')->expected(1, 3);
    sub->add_option("--offset", o.offset, "hyperplane offset");
    sub->add_option("--positive", o.positive, "side of H^+: + or -");
  };

  auto* polarize_cmd = app.add_subcommand("polarize", "polarize a grid function");
  add_io(polarize_cmd);
  add_plane(polarize_cmd);

  auto* steiner_cmd = app.add_subcommand("steiner", "Steiner symmetrize along an axis");
  add_io(steiner_cmd);
  steiner_cmd->add_option("--axis", o.axis, "axis index, 0-based");

  auto* schwarz_cmd = app.add_subcommand("schwarz", "Schwarz symmetrize a 3-D grid about an axis");
  add_io(schwarz_cmd);
  schwarz_cmd->add_option("--axis", o.axis, "axis index, 0-based");

  auto* chord_cmd = app.add_subcommand("chordmap", "move chords by a contraction (polygon JSON or GRD1 set)");
  add_io(chord_cmd);
  chord_cmd->add_option("--contraction", o.contraction, "contraction JSON");
  chord_cmd->add_option("--axis", o.axis, "direction u as an axis index, 0-based");

  auto* verify_cmd = app.add_subcommand("verify", "check polarization properties on random inputs");
  add_plane(verify_cmd);
  verify_cmd->add_option("--trials", o.trials, "trials per property");
  verify_cmd->add_option("--seed", o.seed, "seed");
  verify_cmd->add_option("--report", o.report, "report JSON path");

  auto* converge_cmd = app.add_subcommand("converge", "iterate polarizations toward the Steiner symmetral");
  add_io(converge_cmd);
  converge_cmd->add_option("--axis", o.axis, "symmetrization axis, 0-based");
  converge_cmd->add_option("--iters", o.iters, "number of polarizations");
  converge_cmd->add_option("--seed", o.seed, "seed");
  converge_cmd->add_option("--report", o.report, "summary JSON path");

  auto* gallery_cmd = app.add_subcommand("gallery", "run the counterexample gallery");
  gallery_cmd->add_option("--trials", o.trials, "trials per randomized property")->default_val(40);
  gallery_cmd->add_option("--seed", o.seed, "seed");
  gallery_cmd->add_option("--report", o.report, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*polarize_cmd) return cmd_polarize(o);
    if (*steiner_cmd) return cmd_steiner(o);
    if (*schwarz_cmd) return cmd_schwarz(o);
    if (*chord_cmd) return cmd_chordmap(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*converge_cmd) return cmd_converge(o);
    if (*gallery_cmd) return cmd_gallery(o);
  } catch (const UsageError& e) {
    std::cerr << "symmkit: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "symmkit: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
