#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "shearlab/asymptotics.hpp"
#include "shearlab/error.hpp"
#include "shearlab/fenchel_nielsen.hpp"
#include "shearlab/foliation.hpp"
#include "shearlab/shear.hpp"
#include "shearlab/triangulation.hpp"

namespace shearlab::io {

using json = nlohmann::ordered_json;

/// Parses a decimal number independently of the C locale.
inline double parse_number(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v)) {
    throw ValidationError("not a finite number: '" + text + "'");
  }
  return v;
}

inline long long parse_integer(const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("not an integer: '" + text + "'");
  }
  return v;
}

/// Comma-separated list of numbers.
inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf.data(), ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("malformed " + what + ": " + e.what());
  }
}

template <class T>
T get_field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(what + " is missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(what + " has a malformed field '" + key + "'");
  }
}

inline IdealTriangulation surface_from_json(const json& j) {
  if (j.is_string()) return builtin_surface(j.get<std::string>());
  const std::string what = "surface spec";
  const int genus = get_field<int>(j, "genus", what);
  const int punctures = get_field<int>(j, "punctures", what);
  if (!j.contains("triangles")) throw ValidationError("surface spec is missing field 'triangles'");
  const json& t = j.at("triangles");
  int faces = 0;
  if (t.is_number_integer()) {
    faces = t.get<int>();
  } else if (t.is_array()) {
    faces = static_cast<int>(t.size());
  } else {
    throw ValidationError("surface spec has a malformed field 'triangles'");
  }
  const auto gluing = get_field<std::vector<std::array<std::array<int, 2>, 2>>>(j, "gluing", what);
  std::vector<std::pair<Side, Side>> edges;
  for (const auto& g : gluing) edges.push_back({{g[0][0], g[0][1]}, {g[1][0], g[1][1]}});
  return IdealTriangulation(genus, punctures, faces, edges);
}

inline json surface_to_json(const IdealTriangulation& tri) {
  json j;
  j["genus"] = tri.genus();
  j["punctures"] = tri.punctures();
  json faces = json::array();
  for (int t = 0; t < tri.num_triangles(); ++t) faces.push_back(t);
  j["triangles"] = faces;
  json gluing = json::array();
  for (const auto& [a, b] : tri.gluing_table()) {
    gluing.push_back({{a.triangle, a.index}, {b.triangle, b.index}});
  }
  j["gluing"] = gluing;
  return j;
}

/// A built-in name or the path of a SurfaceSpec file.
inline IdealTriangulation load_surface(const std::string& name_or_path) {
  for (const auto& n : builtin_names()) {
    if (n == name_or_path) return builtin_surface(n);
  }
  return surface_from_json(parse_json(read_file(name_or_path), "surface spec"));
}

/// Writes the surface by name when it is a built-in, by spec otherwise.
inline json surface_reference(const IdealTriangulation& tri) {
  for (const auto& n : builtin_names()) {
    if (builtin_surface(n).gluing_table() == tri.gluing_table() &&
        builtin_surface(n).num_triangles() == tri.num_triangles()) {
      return n;
    }
  }
  return surface_to_json(tri);
}

inline json shear_to_json(const ShearVector& s) {
  json j;
  j["surface"] = surface_reference(s.triangulation());
  json values = json::object();
  for (int e = 0; e < s.size(); ++e) values[std::to_string(e)] = s[e];
  j["shears"] = values;
  return j;
}

inline ShearVector shear_from_json(const json& j) {
  if (!j.is_object() || !j.contains("surface")) throw ValidationError("shear file is missing field 'surface'");
  auto tri = std::make_shared<const IdealTriangulation>(surface_from_json(j.at("surface")));
  const auto values = get_field<std::map<std::string, double>>(j, "shears", "shear file");
  std::vector<double> s(tri->num_edges(), 0.0);
  std::vector<char> seen(s.size(), 0);
  for (const auto& [key, v] : values) {
    const long long e = parse_integer(key);
    if (e < 0 || e >= static_cast<long long>(s.size())) {
      throw ValidationError("shear file names unknown edge " + key);
    }
    s[e] = v;
    seen[e] = 1;
  }
  for (std::size_t e = 0; e < s.size(); ++e) {
    if (!seen[e]) throw ValidationError("shear file has no value for edge " + std::to_string(e));
  }
  return ShearVector(tri, s);
}

inline json fn_to_json(const std::string& surface, const FNPoint& p) {
  json j;
  j["surface"] = surface;
  j["lengths"] = p.lengths;
  j["twists"] = p.twists;
  return j;
}

inline std::pair<std::string, FNPoint> fn_from_json(const json& j) {
  const std::string what = "FN file";
  FNPoint p;
  const auto surface = get_field<std::string>(j, "surface", what);
  p.lengths = get_field<std::vector<double>>(j, "lengths", what);
  p.twists = get_field<std::vector<double>>(j, "twists", what);
  p.pants_curves.assign(p.lengths.size(), "");
  if (surface == "s_1_1" && p.lengths.size() == 1) p.pants_curves = {"a"};
  if (surface == "s_0_4" && p.lengths.size() == 1) p.pants_curves = {"m"};
  return {surface, p};
}

inline json volume_to_json(const json& surface, Norm norm, double radius,
                           const VolumeEstimate& v) {
  json j;
  j["surface"] = surface;
  j["norm"] = to_string(norm);
  j["radius"] = radius;
  j["dim"] = v.dim;
  j["estimate"] = v.estimate;
  j["stderr"] = v.std_error;
  j["samples"] = v.samples;
  j["seed"] = v.seed;
  j["scale"] = "up to a global constant";
  return j;
}

inline const char* kOrbitCsvHeader = "L,count_raw,count_adjusted,nodes_expanded,certified";

/// One row per grid radius.
inline std::string orbit_csv_rows(const OrbitCount& oc) {
  std::string out = std::string(kOrbitCsvHeader) + "\n";
  for (std::size_t i = 0; i < oc.grid.size(); ++i) {
    out += format_number(oc.grid[i]) + "," + std::to_string(oc.counts_raw[i]) + "," +
           std::to_string(oc.counts_adjusted[i]) + "," + std::to_string(oc.nodes_expanded) + "," +
           (oc.certified ? "1" : "0") + "\n";
  }
  return out;
}

inline json fit_to_json(const PowerFit& f, double lo, double hi, int expected) {
  json j;
  j["exponent"] = f.exponent;
  j["log_coefficient"] = f.log_coefficient;
  j["r2"] = f.r2;
  j["points"] = f.points;
  j["window"] = {lo, hi};
  j["expected_exponent"] = expected;
  return j;
}

}  // namespace shearlab::io
