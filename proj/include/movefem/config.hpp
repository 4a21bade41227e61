// Run configuration: flat key = value text with [section] headers, mirrored
// by CLI flags. Unknown keys are errors so typos fail fast.
#pragma once

#include "movefem/common.hpp"

#include <string>

namespace movefem {

struct StudyConfig {
  int dimension = 2;
  int order = 1;      // isoparametric / FE order k
  int bdf_order = 0;  // 0: default k+1
  double final_time = 1.0;
  int levels = 4;
  double h0 = 0.4;     // target mesh size of the first level
  double tau0 = 0.25;  // time step of the first level; halves per level
  std::string geometry = "ellipse";
  std::string flow_mode = "fallback";      // or paper-strict, stationary
  std::string data_mode = "interpolated";  // or lifted
  bool lifted_error_eval = false;
  bool factor_time_dependent = true;  // time argument of the solution's flow factor
  std::string solver_method = "direct-lu";
  double solver_rel_tol = 1e-12;
  int solver_max_iter = 0;
  int quad_degree = 0;  // 0: default 2k+2
  std::string csv_path = "study.csv";
  std::string plot_prefix;  // empty: csv path without extension
  std::string mesh_in;      // import (.msh or native) instead of generating
  std::string mesh_out;     // where cmd_mesh writes the native dump
  std::string report_out;   // where cmd_mesh writes the validation report
  bool level_parallel = false;
  unsigned random_seed = 12345;

  int q() const { return bdf_order > 0 ? bdf_order : order + 1; }
  void validate() const;
};

// Apply one key = value setting; key uses the "section.key" form for
// sectioned files and the bare key for flags.
void config_set(StudyConfig& cfg, const std::string& key, const std::string& value);

StudyConfig parse_config_file(const std::string& path);

}  // namespace movefem
