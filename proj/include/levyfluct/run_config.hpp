#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyfluct/levy_model.hpp"

namespace levyfluct {

// Batch-run description parsed from a JSON config file. Unknown keys are
// rejected everywhere so a typo cannot silently fall back to a default.

enum class Command { Scale, Law, Gs, Simulate, Validate };
enum class OutFormat { Csv, Json };

struct ScaleCmd {
  double q = 0.0;
  double x_lo = 0.0;
  double x_hi = 5.0;
  double x_step = 0.1;
  std::string backend = "auto";  // auto | closed_form | inversion
};

// pointwise law evaluation over an x grid. Transforms use only (q, beta);
// the joint densities additionally read the point coordinates below
struct LawCmd {
  std::string name;  // first_passage | recovery | last_passage | duration
                     // | ruin_extrema | recovery_joint | last_passage_joint
  double q = 0.0;
  double beta = 0.0;
  double x_lo = 0.0;
  double x_hi = 5.0;
  double x_step = 0.1;
  double y = 0.0, z = 0.0;  // surplus prior / deficit coordinates
  double a = 0.0, b = 0.0;  // supremum cap / infimum floor levels
};

struct PenaltyCfg {
  std::string kind = "unit";  // unit | deficit_power | band | exp_deficit
  double k = 1.0;             // deficit_power exponent
  double s = 1.0;             // exp_deficit rate
  double y_lo = 0.0, y_hi = 0.0, z_lo = 0.0, z_hi = 0.0;  // band edges
};

struct GsCmd {
  double q = 0.0;
  std::vector<double> x;
  PenaltyCfg penalty;
  double rel_tol = 1e-6;
};

struct SimulateCmd {
  std::string weight = "ruin";  // ruin | recovery | last_passage | duration
  double q = 0.0;
  double beta = 0.0;
  double x = 0.0;
  std::size_t n_paths = 100000;
  double step = 1e-3;
  double t_max = 0.0;
  double level_bound = 1e-4;
  // event box; infinities mean unconstrained
  double y_lo = 0.0, y_hi = 0.0, z_lo = 0.0, z_hi = 0.0;  // 0,0 = open
  double sup_cap = 0.0;                                   // 0 = open
  double inf_floor = 0.0;                                 // 0 = open
};

struct ValidateCmd {
  std::size_t n_paths = 200000;
  double step = 1e-2;
};

struct RunConfig {
  LevyModel model;
  Command command = Command::Scale;
  OutFormat format = OutFormat::Csv;
  std::string out;  // empty = stdout
  std::uint64_t seed = 1;
  unsigned threads = 1;

  ScaleCmd scale;
  LawCmd law;
  GsCmd gs;
  SimulateCmd simulate;
  ValidateCmd validate;
};

// Parses and validates a config document. Throws std::runtime_error with
// the offending key or value named on any problem, including keys the
// schema does not know.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace levyfluct
