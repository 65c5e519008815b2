#pragma once

#include <string>
#include <vector>

#include "twhe/bundle.hpp"
#include "twhe/geometry.hpp"
#include "twhe/metric.hpp"

namespace twhe {

// Named builders addressable from configs and the command line.
struct PresetInfo {
  std::string kind;     // geometry, twist, bundle, seed
  std::string name;     // lookup key, e.g. "theta"
  std::string pattern;  // e.g. "theta:<d>"
  std::string summary;
  std::string details;
};

const std::vector<PresetInfo>& preset_registry();
// Throws ConfigError naming the preset when it is unknown.
const PresetInfo& find_preset(const std::string& name);
std::string list_presets_text();
std::string describe_preset_text(const std::string& name);

// "conformal:<expr>" or "flat".
TorusGeometry build_geometry(const std::string& preset, const GridPtr& grid);

// Real axes the cover must band for the twist and bundle presets, ascending.
std::vector<int> required_banded_axes(const std::string& twist, const std::string& bundle);

// "trivial", "global-b:<c>", "clock-shift:<r>", "container:<path>".
TwistPtr build_twist(const std::string& preset, const CoverPtr& cover, const TorusGeometry& geom);

// "trivial:<r>", "clock-shift:<r>", "theta:<d>", "line:<d1>,<d2>",
// "sum:[<p1>;<p2>;...]".
TwistedBundle build_bundle(const std::string& preset, const TwistPtr& twist);

// "identity", "reference", "reference*scalar:<expr>", "diag:<e1>,...,<er>",
// "herm:<diag exprs>,<re/im pairs>", "container:<path>".
MetricField build_metric(const std::string& preset, const TwistedBundle& E);

}  // namespace twhe
