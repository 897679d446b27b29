#include "topofield/problem.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "topofield/errors.hpp"

namespace topofield {

namespace {

using nlohmann::json;

// "x"/"y" selector: integer, "all", or [lo, hi] inclusive.
std::pair<int, int> node_range(const json& sel, int max_coord, const char* what) {
  if (sel.is_number_integer()) {
    const int v = sel.get<int>();
    if (v < 0 || v > max_coord) throw ParameterError(std::string(what) + ": node index out of range");
    return {v, v};
  }
  if (sel.is_string() && sel.get<std::string>() == "all") return {0, max_coord};
  if (sel.is_array() && sel.size() == 2) {
    const int lo = sel[0].get<int>(), hi = sel[1].get<int>();
    if (lo < 0 || hi > max_coord || lo > hi)
      throw ParameterError(std::string(what) + ": bad node range");
    return {lo, hi};
  }
  throw ParameterError(std::string(what) + ": expected integer, \"all\" or [lo, hi]");
}

int dof_axis(const std::string& s, const char* what) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  throw ParameterError(std::string(what) + ": dof must be \"x\" or \"y\"");
}

void parse_supports(const json& supports, const GridDomain& grid, BoundarySpec& bc) {
  for (const auto& s : supports) {
    const auto [x_lo, x_hi] = node_range(s.at("x"), grid.nelx, "supports");
    const auto [y_lo, y_hi] = node_range(s.at("y"), grid.nely, "supports");
    const std::string dofs = s.value("dofs", "xy");
    if (dofs != "x" && dofs != "y" && dofs != "xy")
      throw ParameterError("supports: dofs must be \"x\", \"y\" or \"xy\"");
    for (int x = x_lo; x <= x_hi; ++x) {
      for (int y = y_lo; y <= y_hi; ++y) {
        const int nid = grid.node_index(x, y);
        if (dofs != "y") bc.fixed_dofs.push_back(2 * nid);
        if (dofs != "x") bc.fixed_dofs.push_back(2 * nid + 1);
      }
    }
  }
}

void parse_loads(const json& loads, const GridDomain& grid, BoundarySpec& bc) {
  for (const auto& l : loads) {
    if (l.contains("dof") && l.at("dof").is_number_integer()) {
      // raw form: {"dof": <global index>, "value": v}
      bc.loads[l.at("dof").get<int>()] += l.at("value").get<double>();
      continue;
    }
    const int x = l.at("x").get<int>(), y = l.at("y").get<int>();
    if (x < 0 || x > grid.nelx || y < 0 || y > grid.nely)
      throw ParameterError("loads: node out of range");
    const int axis = dof_axis(l.at("dof").get<std::string>(), "loads");
    bc.loads[2 * grid.node_index(x, y) + axis] += l.at("value").get<double>();
  }
}

void parse_passive(const json& passive, const GridDomain& grid, PassiveMask& mask) {
  if (passive.empty()) return;
  mask.passive.assign(static_cast<std::size_t>(grid.num_elements()), 0);
  for (const auto& r : passive) {
    if (r.is_number_integer()) {  // raw form: element index
      const int e = r.get<int>();
      if (e < 0 || e >= grid.num_elements()) throw ParameterError("passive: element out of range");
      mask.passive[static_cast<std::size_t>(e)] = 1;
      continue;
    }
    const int x0 = r.at("x0").get<int>(), y0 = r.at("y0").get<int>();
    const int x1 = r.at("x1").get<int>(), y1 = r.at("y1").get<int>();
    if (x0 < 0 || y0 < 0 || x1 >= grid.nelx || y1 >= grid.nely || x0 > x1 || y0 > y1)
      throw ParameterError("passive: bad element rectangle");
    for (int x = x0; x <= x1; ++x)
      for (int y = y0; y <= y1; ++y)
        mask.passive[static_cast<std::size_t>(grid.element_index(x, y))] = 1;
  }
}

}  // namespace

ProblemSpec ProblemSpec::validated() const {
  ProblemSpec out = *this;
  out.grid.validate();
  out.material.validate();
  if (!(out.volume_fraction > 0.0 && out.volume_fraction <= 1.0))
    throw ParameterError("problem: volume fraction must be in (0, 1]");
  out.bc = bc.validated(out.grid);
  out.passive.validate(out.grid);
  return out;
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec spec;
  spec.name = j.value("name", "");
  const auto& grid = j.at("grid");
  spec.grid.nelx = grid.at("nelx").get<int>();
  spec.grid.nely = grid.at("nely").get<int>();
  spec.grid.validate();

  if (j.contains("fixed_dofs")) {  // raw resolved form
    spec.bc.fixed_dofs = j.at("fixed_dofs").get<std::vector<int>>();
  } else {
    parse_supports(j.at("supports"), spec.grid, spec.bc);
  }
  parse_loads(j.at("loads"), spec.grid, spec.bc);
  if (j.contains("passive")) parse_passive(j.at("passive"), spec.grid, spec.passive);
  spec.volume_fraction = j.value("volume_fraction", 0.3);
  if (j.contains("material")) {
    const auto& m = j.at("material");
    spec.material.E0 = m.value("E0", spec.material.E0);
    spec.material.Emin = m.value("Emin", spec.material.Emin);
    spec.material.nu = m.value("nu", spec.material.nu);
    spec.material.p = m.value("p", spec.material.p);
  }
  return spec.validated();
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open problem config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("bad JSON in " + path + ": " + e.what());
  }
  try {
    // A run manifest embeds the resolved problem under "problem".
    return problem_from_json(j.contains("problem") ? j.at("problem") : j);
  } catch (const json::exception& e) {
    throw ParameterError("bad problem config " + path + ": " + e.what());
  }
}

nlohmann::json problem_to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["grid"] = {{"nelx", spec.grid.nelx}, {"nely", spec.grid.nely}};
  j["fixed_dofs"] = spec.bc.fixed_dofs;
  json loads = json::array();
  for (const auto& [dof, value] : spec.bc.loads) loads.push_back({{"dof", dof}, {"value", value}});
  j["loads"] = loads;
  if (!spec.passive.empty()) {
    json passive = json::array();
    for (std::size_t e = 0; e < spec.passive.passive.size(); ++e)
      if (spec.passive.passive[e]) passive.push_back(static_cast<int>(e));
    j["passive"] = passive;
  }
  j["volume_fraction"] = spec.volume_fraction;
  j["material"] = {{"E0", spec.material.E0},
                   {"Emin", spec.material.Emin},
                   {"nu", spec.material.nu},
                   {"p", spec.material.p}};
  return j;
}

namespace {

json beam_json() {
  return json{{"name", "beam"},
              {"grid", {{"nelx", 40}, {"nely", 20}}},
              {"supports", json::array({{{"x", 0}, {"y", "all"}, {"dofs", "xy"}}})},
              {"loads", json::array({{{"x", 40}, {"y", 10}, {"dof", "y"}, {"value", -1.0}}})},
              {"volume_fraction", 0.3}};
}

// Approximate reconstructions of the four 60x60 showcase cases; cases 2-4
// carry obstacle regions.
json case_json(int which, int scale) {
  const int n = 60 * scale;
  json j{{"name", "case" + std::to_string(which) + (scale > 1 ? "_" + std::to_string(n) : "")},
         {"grid", {{"nelx", n}, {"nely", n}}},
         {"volume_fraction", 0.2}};
  auto node = [scale](int v) { return v * scale; };
  switch (which) {
    case 1:  // bridge: pinned bottom corners, downward load at the top center
      j["supports"] = json::array({{{"x", 0}, {"y", 0}, {"dofs", "xy"}},
                                   {{"x", node(60)}, {"y", 0}, {"dofs", "xy"}}});
      j["loads"] = json::array({{{"x", node(30)}, {"y", node(60)}, {"dof", "y"}, {"value", -1.0}}});
      break;
    case 2:  // cantilever around a central obstacle
      j["supports"] = json::array({{{"x", 0}, {"y", "all"}, {"dofs", "xy"}}});
      j["loads"] = json::array({{{"x", node(60)}, {"y", node(30)}, {"dof", "y"}, {"value", -1.0}}});
      j["passive"] = json::array({{{"x0", node(20)},
                                   {"y0", node(20)},
                                   {"x1", node(40) - 1},
                                   {"y1", node(40) - 1}}});
      break;
    case 3:  // bridge deck over a void band
      j["supports"] = json::array({{{"x", 0}, {"y", 0}, {"dofs", "xy"}},
                                   {{"x", node(60)}, {"y", 0}, {"dofs", "y"}}});
      j["loads"] = json::array({{{"x", node(30)}, {"y", node(40)}, {"dof", "y"}, {"value", -1.0}}});
      j["passive"] = json::array(
          {{{"x0", node(15)}, {"y0", node(45)}, {"x1", node(45) - 1}, {"y1", node(60) - 1}}});
      break;
    case 4:  // L-bracket: top edge clamped left of the cut-out, side load
      j["supports"] = json::array({{{"x", json::array({0, node(24)})}, {"y", node(60)}, {"dofs", "xy"}}});
      j["loads"] = json::array({{{"x", node(60)}, {"y", node(24)}, {"dof", "y"}, {"value", -1.0}}});
      j["passive"] = json::array(
          {{{"x0", node(24)}, {"y0", node(24)}, {"x1", node(60) - 1}, {"y1", node(60) - 1}}});
      break;
    default: throw ParameterError("unknown case preset");
  }
  return j;
}

}  // namespace

ProblemSpec preset_problem(const std::string& name) {
  if (name == "beam") return problem_from_json(beam_json());
  if (name == "case1") return problem_from_json(case_json(1, 1));
  if (name == "case2") return problem_from_json(case_json(2, 1));
  if (name == "case3") return problem_from_json(case_json(3, 1));
  if (name == "case4") return problem_from_json(case_json(4, 1));
  if (name == "case1_120") return problem_from_json(case_json(1, 2));
  if (name == "case1_180") return problem_from_json(case_json(1, 3));
  throw ParameterError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"beam", "case1", "case2", "case3", "case4", "case1_120", "case1_180"};
}

ProblemSpec resolve_problem(const std::string& path_or_preset) {
  if (std::ifstream probe(path_or_preset); probe.good()) return load_problem(path_or_preset);
  return preset_problem(path_or_preset);
}

}  // namespace topofield
