#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "symmkit/chord_maps.hpp"
#include "symmkit/contraction.hpp"
#include "symmkit/errors.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/polygon.hpp"

namespace symmkit::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// GRD1: magic line, one-line JSON header, then little-endian float64 values.

inline void write_grd1(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid();
  json header;
  header["dims"] = g.dims();
  header["origin"] = g.origin();
  header["spacing"] = g.spacing();
  os << "GRD1\n" << header.dump() << "\n";
  for (double v : f.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
    os.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!os) throw FormatError("failed writing GRD1 data");
}

inline GridFunction read_grd1(std::istream& is) {
  std::string magic;
  std::string header_line;
  if (!std::getline(is, magic) || magic != "GRD1") throw FormatError("missing GRD1 magic");
  if (!std::getline(is, header_line)) throw FormatError("missing GRD1 header");
  json header;
  try {
    header = json::parse(header_line);
    Grid g(header.at("dims").get<std::vector<std::size_t>>(), header.at("origin").get<Vec>(),
           header.at("spacing").get<double>());
    std::vector<double> values(g.size());
    for (double& v : values) {
      unsigned char bytes[8];
      if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("truncated GRD1 data");
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
      v = std::bit_cast<double>(bits);
    }
    if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after GRD1 data");
    return GridFunction(std::move(g), std::move(values));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad GRD1 header: ") + e.what());
  }
}

inline GridSet to_set(const GridFunction& f) {
  return GridSet::from_predicate(f.grid(), [&](std::size_t i) {
    if (f[i] != 0.0 && f[i] != 1.0) throw FormatError("grid set values must be 0 or 1");
    return f[i] == 1.0;
  });
}

inline void save_grd1(const std::string& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  write_grd1(os, f);
}

inline GridFunction load_grd1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  return read_grd1(is);
}

inline void save_grd1(const std::string& path, const GridSet& a) { save_grd1(path, a.indicator()); }

// ---------------------------------------------------------------------------
// JSON documents

inline json point_array(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const Point2& p : pts) a.push_back({p.x, p.y});
  return a;
}

inline std::vector<Point2> parse_points(const json& a) {
  std::vector<Point2> pts;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw FormatError("expected [x, y] pairs");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

inline json to_json(const ConvexPolygon& k) {
  return json{{"vertices", point_array({k.vertices().begin(), k.vertices().end()})}};
}

inline ConvexPolygon polygon_from_json(const json& j) {
  try {
    return ConvexPolygon(parse_points(j.at("vertices")));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad polygon JSON: ") + e.what());
  }
}

inline json to_json(const PLContraction& phi) {
  json a = json::array();
  for (const Breakpoint& b : phi.breakpoints()) a.push_back({b.t, b.value});
  return json{{"breakpoints", a}};
}

inline std::vector<Breakpoint> parse_breakpoints(const json& j) {
  std::vector<Breakpoint> bp;
  try {
    for (const auto& p : j.at("breakpoints")) {
      if (!p.is_array() || p.size() != 2) throw FormatError("expected [t, phi] pairs");
      bp.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad breakpoints JSON: ") + e.what());
  }
  return bp;
}

inline PLContraction contraction_from_json(const json& j) { return PLContraction(parse_breakpoints(j)); }
inline MonotoneMap monotone_map_from_json(const json& j) { return MonotoneMap(parse_breakpoints(j)); }

inline json to_json(const ChordMovedRegion& r) {
  return json{{"u", {r.u.x, r.u.y}},
              {"omega", {r.omega_lo, r.omega_hi}},
              {"gplus", point_array(r.gplus)},
              {"gminus", point_array(r.gminus)}};
}

inline ChordMovedRegion region_from_json(const json& j) {
  try {
    ChordMovedRegion r;
    r.u = {j.at("u").at(0).get<double>(), j.at("u").at(1).get<double>()};
    r.omega_lo = j.at("omega").at(0).get<double>();
    r.omega_hi = j.at("omega").at(1).get<double>();
    r.gplus = parse_points(j.at("gplus"));
    r.gminus = parse_points(j.at("gminus"));
    if (r.gplus.size() != r.gminus.size()) throw FormatError("region graphs differ in length");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad region JSON: ") + e.what());
  }
}

inline json to_json(const GridFunction& f) {
  return json{{"dims", f.grid().dims()},
              {"origin", f.grid().origin()},
              {"spacing", f.grid().spacing()},
              {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline GridFunction grid_function_from_json(const json& j) {
  try {
    Grid g(j.at("dims").get<std::vector<std::size_t>>(), j.at("origin").get<Vec>(), j.at("spacing").get<double>());
    return GridFunction(std::move(g), j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad grid function JSON: ") + e.what());
  }
}

/// Reads a whole JSON file.
inline json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw FormatError("bad JSON in " + path + ": " + e.what());
  }
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
}

/// `{"map":"polarize","normal":[...],"offset":0,"positive":"+"}` hyperplane fields.
inline OrientedHyperplane hyperplane_from_json(const json& j) {
  try {
    const std::string pos = j.value("positive", std::string("+"));
    if (pos != "+" && pos != "-") throw FormatError("positive must be \"+\" or \"-\"");
    return OrientedHyperplane(j.at("normal").get<Vec>(), j.value("offset", 0.0),
                              pos == "+" ? Orientation::Positive : Orientation::Negative);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad hyperplane JSON: ") + e.what());
  }
}

inline json to_json(const OrientedHyperplane& h) {
  return json{{"normal", h.normal()},
              {"offset", h.offset()},
              {"positive", h.orientation() == Orientation::Positive ? "+" : "-"}};
}

}  // namespace symmkit::io
