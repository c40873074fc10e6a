#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bos/cli.hpp"
#include "bos/error.hpp"

namespace bos::cli {

double parse_length(std::string_view text) {
  const std::string s(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) {
    throw InvalidArgument("malformed length '" + s + "'");
  }
  std::string unit(end);
  unit.erase(0, unit.find_first_not_of(' '));
  unit.erase(unit.find_last_not_of(' ') + 1);
  double factor = 1.0;
  if (unit.empty() || unit == "m") {
    factor = 1.0;
  } else if (unit == "cm") {
    factor = 1e-2;
  } else if (unit == "mm") {
    factor = 1e-3;
  } else if (unit == "um") {
    factor = 1e-6;
  } else {
    throw InvalidArgument("unknown length unit '" + unit + "' in '" + s +
                          "' (expected m, cm, mm or um)");
  }
  return value * factor;
}

namespace {

double length_value(const nlohmann::json& j, const std::string& key) {
  const nlohmann::json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_length(v.get<std::string>());
  throw InvalidArgument("geometry key '" + key + "' must be a number or a length string");
}

}  // namespace

GeometryFile load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open geometry file " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error&) {
    throw InvalidArgument("geometry file " + path.string() + " is not valid JSON");
  }
  if (!j.is_object()) {
    throw InvalidArgument("geometry file " + path.string() + " must hold a JSON object");
  }
  for (const char* key : {"d1_m", "d2_m", "f_m", "pixel_pitch_m", "bg_scale_m_per_px", "thickness_z_m"}) {
    if (!j.contains(key)) {
      throw InvalidArgument("geometry file " + path.string() + " is missing required key '" +
                            key + "'");
    }
  }
  const auto number = [&](const char* key) {
    if (!j.at(key).is_number()) {
      throw InvalidArgument("geometry key '" + std::string(key) + "' must be a number");
    }
    return j.at(key).get<double>();
  };
  GeometryFile g;
  g.geometry.d1 = length_value(j, "d1_m");
  g.geometry.d2 = length_value(j, "d2_m");
  g.geometry.f = length_value(j, "f_m");
  g.geometry.pixel_pitch = length_value(j, "pixel_pitch_m");
  g.geometry.bg_scale = length_value(j, "bg_scale_m_per_px");
  g.thickness_z = length_value(j, "thickness_z_m");
  if (j.contains("n0")) g.constants.n0 = number("n0");
  if (j.contains("gladstone_dale_m3_per_kg")) {
    g.constants.gladstone_dale = number("gladstone_dale_m3_per_kg");
  }
  g.geometry.validate();
  g.constants.validate();
  if (!(g.thickness_z > 0.0)) {
    throw InvalidArgument("geometry key 'thickness_z_m' must be > 0");
  }
  return g;
}

}  // namespace bos::cli
