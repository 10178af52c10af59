#include "finsler/norm_field.hpp"

namespace finsler {

std::string to_string(Family f) {
  switch (f) {
    case Family::riemannian: return "riemannian";
    case Family::randers: return "randers";
    case Family::smoothed_p: return "smoothed_p";
    case Family::custom: return "custom";
  }
  return "?";
}

std::string to_string(ChartKind c) {
  switch (c) {
    case ChartKind::plane: return "plane";
    case ChartKind::torus: return "torus";
    case ChartKind::interval: return "interval";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "riemannian") return Family::riemannian;
  if (s == "randers") return Family::randers;
  if (s == "smoothed_p") return Family::smoothed_p;
  if (s == "custom") return Family::custom;
  throw ConfigError("unknown metric family: " + s);
}

ChartKind chart_from_string(const std::string& s) {
  if (s == "plane") return ChartKind::plane;
  if (s == "torus") return ChartKind::torus;
  if (s == "interval") return ChartKind::interval;
  throw ConfigError("unknown chart: " + s);
}

}  // namespace finsler
