#pragma once

// JSON and CSV serialization of regions, reports and trajectories.
// Needs nlohmann/json on the include path.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "regionkit/errors.hpp"
#include "regionkit/region.hpp"
#include "regionkit/verifier.hpp"

namespace regionkit::io {

using nlohmann::json;

/// Shortest-exact is not required; 17 significant digits round-trip any double.
inline std::string decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json to_json(State s) { return json::array({s.x1, s.x2}); }

inline State state_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::Io, "expected a point [x1, x2], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Polyline& line) {
  json out = json::array();
  for (State s : line) out.push_back(to_json(s));
  return out;
}

inline Polyline polyline_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::Io, "expected an array of points");
  Polyline out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(state_from_json(item));
  return out;
}

inline json to_json(const Parameters& p) {
  return {{"alpha", p.alpha()}, {"nu", p.nu()}, {"e", p.e()}, {"d", p.d()}};
}

template <class Enum, std::size_t N>
Enum enum_from_string(const std::string& name, const Enum (&all)[N]) {
  for (Enum value : all)
    if (to_string(value) == name) return value;
  throw Error(ErrorCode::Io, "unknown enumerator '" + name + "'");
}

inline constexpr PieceKind kAllKinds[] = {PieceKind::NullclineArc,      PieceKind::Aux1Orbit,
                                          PieceKind::HorizontalSegment, PieceKind::CircleArc,
                                          PieceKind::VerticalSegment,   PieceKind::SeparatrixArc};
inline constexpr Crossing kAllCrossings[] = {Crossing::LeftToRight, Crossing::RightToLeft,
                                             Crossing::TopToBottom};

inline json to_json(const InvariantRegion& region) {
  json vertices = json::object();
  for (const auto& [name, s] : region.vertices.named()) vertices[name] = to_json(s);
  json pieces = json::array();
  for (const auto& piece : region.pieces)
    pieces.push_back({{"name", piece.name},
                      {"kind", std::string(to_string(piece.kind))},
                      {"expected_crossing", std::string(to_string(piece.expected_crossing))},
                      {"start", to_json(piece.start)},
                      {"end", to_json(piece.end)},
                      {"polyline", to_json(piece.polyline)}});
  const auto& c = region.conditions;
  return {{"format", "regionkit.region/1"},
          {"params", to_json(region.params)},
          {"case_eight_pieces", region.case_eight_pieces},
          {"conditions",
           {{"e1_lower", c.e1_lower},
            {"e1_upper", c.e1_upper},
            {"e2", c.e2},
            {"e2_lower_bound", c.e2_lower_bound}}},
          {"vertices", vertices},
          {"pieces", pieces},
          {"polygon", to_json(region.polygon)}};
}

inline InvariantRegion region_from_json(const json& j) {
  try {
    const auto& jp = j.at("params");
    InvariantRegion region{Parameters::make(jp.at("alpha").get<double>(), jp.at("nu").get<double>(),
                                            jp.at("e").get<double>(), jp.at("d").get<double>()),
                           {}, {}, {}, false, {}};
    region.case_eight_pieces = j.at("case_eight_pieces").get<bool>();
    if (j.contains("conditions")) {
      const auto& c = j.at("conditions");
      region.conditions.e1_lower = c.at("e1_lower").get<bool>();
      region.conditions.e1_upper = c.at("e1_upper").get<bool>();
      region.conditions.e2 = c.at("e2").get<bool>();
      region.conditions.e2_lower_bound =
          c.at("e2_lower_bound").is_number() ? c.at("e2_lower_bound").get<double>() : 0.0;
    }
    const auto& jv = j.at("vertices");
    Vertices& v = region.vertices;
    v.P2 = state_from_json(jv.at("P2"));
    v.A = state_from_json(jv.at("A"));
    v.B = state_from_json(jv.at("B"));
    if (jv.contains("B1")) v.B1 = state_from_json(jv.at("B1"));
    v.C = state_from_json(jv.at("C"));
    v.D = state_from_json(jv.at("D"));
    v.E = state_from_json(jv.at("E"));
    v.F = state_from_json(jv.at("F"));
    for (const auto& jpiece : j.at("pieces")) {
      CurvePiece piece{jpiece.at("name").get<std::string>(),
                       enum_from_string(jpiece.at("kind").get<std::string>(), kAllKinds),
                       state_from_json(jpiece.at("start")),
                       state_from_json(jpiece.at("end")),
                       polyline_from_json(jpiece.at("polyline")),
                       enum_from_string(jpiece.at("expected_crossing").get<std::string>(), kAllCrossings)};
      if (piece.polyline.size() < 2) throw Error(ErrorCode::Io, "piece " + piece.name + " has < 2 points");
      region.pieces.push_back(std::move(piece));
    }
    region.polygon = j.contains("polygon") ? polyline_from_json(j.at("polygon"))
                                           : assemble_ring(region.pieces);
    if (region.polygon.size() < 3) throw Error(ErrorCode::Io, "polygon has fewer than 3 vertices");
    return region;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Io, std::string("malformed region file: ") + ex.what());
  }
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Io, path + ": " + ex.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline InvariantRegion read_region(const std::string& path) { return region_from_json(read_json(path)); }

/// Closed polygon, header "x1,x2", first vertex repeated at the end.
inline std::string polygon_csv(const Polyline& ring) {
  std::string out = "x1,x2\n";
  auto row = [&](State s) { out += decimal(s.x1) + "," + decimal(s.x2) + "\n"; };
  for (State s : ring) row(s);
  if (!ring.empty()) row(ring.front());
  return out;
}

/// Header "t,x1,x2", one row per accepted step.
inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x1,x2\n";
  for (const auto& s : traj.samples())
    out += decimal(s.t) + "," + decimal(s.state.x1) + "," + decimal(s.state.x2) + "\n";
  return out;
}

/// Reads the x1,x2 columns of a CSV whose header names them.
inline Polyline read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, path + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  }
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::Io, path + ": missing column " + name);
  };
  const std::size_t ix = column("x1"), iy = column("x2");
  Polyline out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() <= std::max(ix, iy)) throw Error(ErrorCode::Io, path + ": short row");
    try {
      out.push_back({std::stod(cells[ix]), std::stod(cells[iy])});
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, path + ": bad number in row '" + line + "'");
    }
  }
  return out;
}

inline json to_json(const InvarianceReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"piece", v.piece}, {"at", to_json(v.at)}, {"outward", v.outward}});
  json exempt = json::array();
  for (State s : r.exempt_points) exempt.push_back(to_json(s));
  json max_out = std::isfinite(r.max_outward_component) ? json(r.max_outward_component) : json(nullptr);
  return {{"samples_checked", r.samples_checked},
          {"max_outward_component", max_out},
          {"violations", violations},
          {"exempt_points", exempt}};
}

inline json to_json(const CrossingReport& r) {
  json margin = std::isfinite(r.min_margin) ? json(r.min_margin) : json(nullptr);
  return {{"piece", r.piece},
          {"expected", std::string(to_string(r.expected))},
          {"samples", r.samples},
          {"exempt", r.exempt},
          {"wrong_sign", r.wrong_sign},
          {"min_margin", margin},
          {"ok", r.ok()}};
}

inline json to_json(const PeriodicOrbit& orbit) {
  return {{"period", orbit.period},
          {"section_point", to_json(orbit.section_point)},
          {"returns_used", orbit.returns_used},
          {"last_return_difference", orbit.last_return_difference},
          {"closure_error", orbit.closure_error},
          {"winding_number", orbit.winding_number},
          {"polyline", to_json(orbit.polyline)}};
}

}  // namespace regionkit::io
