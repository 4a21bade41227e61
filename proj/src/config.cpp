#include "movefem/config.hpp"

#include <fstream>
#include <sstream>

namespace movefem {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: invalid boolean '" + v + "'");
}

// strip an optional section prefix so both "study.order" and "order" work
std::string bare(const std::string& key) {
  const auto dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

}  // namespace

void config_set(StudyConfig& cfg, const std::string& full_key, const std::string& value) {
  const std::string key = bare(full_key);
  if (key == "dimension")
    cfg.dimension = std::stoi(value);
  else if (key == "order")
    cfg.order = std::stoi(value);
  else if (key == "bdf_order")
    cfg.bdf_order = std::stoi(value);
  else if (key == "final_time")
    cfg.final_time = std::stod(value);
  else if (key == "levels")
    cfg.levels = std::stoi(value);
  else if (key == "h0")
    cfg.h0 = std::stod(value);
  else if (key == "tau0")
    cfg.tau0 = std::stod(value);
  else if (key == "geometry")
    cfg.geometry = value;
  else if (key == "flow_mode")
    cfg.flow_mode = value;
  else if (key == "data_mode")
    cfg.data_mode = value;
  else if (key == "lifted_error_eval")
    cfg.lifted_error_eval = parse_bool(value);
  else if (key == "factor_time_dependent")
    cfg.factor_time_dependent = parse_bool(value);
  else if (key == "method")
    cfg.solver_method = value;
  else if (key == "rel_tol")
    cfg.solver_rel_tol = std::stod(value);
  else if (key == "max_iter")
    cfg.solver_max_iter = std::stoi(value);
  else if (key == "quad_degree")
    cfg.quad_degree = std::stoi(value);
  else if (key == "csv")
    cfg.csv_path = value;
  else if (key == "plot_prefix")
    cfg.plot_prefix = value;
  else if (key == "mesh_in")
    cfg.mesh_in = value;
  else if (key == "mesh_out")
    cfg.mesh_out = value;
  else if (key == "report_out")
    cfg.report_out = value;
  else if (key == "level_parallel")
    cfg.level_parallel = parse_bool(value);
  else if (key == "random_seed")
    cfg.random_seed = static_cast<unsigned>(std::stoul(value));
  else
    throw Error("config: unknown key '" + full_key + "'");
}

void StudyConfig::validate() const {
  if (dimension != 2 && dimension != 3) throw Error("config: dimension must be 2 or 3");
  if (order < 1 || order > 3) throw Error("config: order must be in [1,3]");
  if (q() < 1 || q() > 4) throw Error("config: bdf_order must be in [1,4]");
  if (levels < 1) throw Error("config: levels must be >= 1");
  if (h0 <= 0 || tau0 <= 0 || final_time <= 0) throw Error("config: sizes must be positive");
  if (data_mode != "interpolated" && data_mode != "lifted")
    throw Error("config: data_mode must be interpolated or lifted");
}

StudyConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  StudyConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    config_set(cfg, section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

}  // namespace movefem
