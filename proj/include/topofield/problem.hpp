#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topofield/grid.hpp"

namespace topofield {

// Full statement of one topology-optimization problem.
struct ProblemSpec {
  std::string name;
  GridDomain grid;
  BoundarySpec bc;
  PassiveMask passive;
  double volume_fraction = 0.3;
  MaterialModel material;

  // Throws ParameterError on structural problems; drops loads on fixed DOFs
  // with a warning. Returns the cleaned spec.
  ProblemSpec validated() const;
};

// JSON schema (see README and configs/):
//   {
//     "name": "beam",
//     "grid": {"nelx": 40, "nely": 20},
//     "supports": [{"x": 0, "y": "all", "dofs": "xy"}, ...],
//     "loads": [{"x": 40, "y": 10, "dof": "y", "value": -1.0}, ...],
//     "passive": [{"x0": 10, "y0": 5, "x1": 20, "y1": 15}, ...],
//     "volume_fraction": 0.3,
//     "material": {"E0": 1.0, "Emin": 1e-9, "nu": 0.3, "p": 3.0}
//   }
// "x"/"y" in supports take an integer, "all", or [lo, hi] (inclusive, node
// coordinates). Passive rectangles are inclusive element-index ranges.
ProblemSpec problem_from_json(const nlohmann::json& j);
ProblemSpec load_problem(const std::string& path);

// Named presets: "beam" (40x20 left edge fixed, downward tip load at the
// right-edge center), "case1".."case4" (60x60, cases 2-4 with obstacle
// regions), "case1_120", "case1_180" (resolution rescales of case 1).
// The case geometries are approximate reconstructions.
ProblemSpec preset_problem(const std::string& name);
std::vector<std::string> preset_names();

// Loads a problem config from a file path or, failing that, a preset name.
ProblemSpec resolve_problem(const std::string& path_or_preset);

nlohmann::json problem_to_json(const ProblemSpec& spec);

}  // namespace topofield
