#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace twhe {

struct CheckResult {
  std::string name;   // e.g. "dbeta", "cocycle"
  std::string where;  // overlap label
  double defect = 0;
  double tol = 0;
  bool pass() const { return defect <= tol; }
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  // Largest defect among checks with the given name (0 if none).
  double defect(const std::string& name) const {
    double m = 0;
    for (const auto& c : checks)
      if (c.name == name) m = std::max(m, c.defect);
    return m;
  }
  bool passed(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name && !c.pass()) return false;
    return true;
  }
  std::vector<std::string> failed_names() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass() && std::find(out.begin(), out.end(), c.name) == out.end()) out.push_back(c.name);
    return out;
  }
  void add(std::string name, std::string where, double defect, double tol) {
    checks.push_back({std::move(name), std::move(where), defect, tol});
  }
};

}  // namespace twhe
