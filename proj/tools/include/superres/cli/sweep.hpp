#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "superres/gaussian_qfi.hpp"
#include "superres/scene.hpp"

namespace superres::cli {

enum class Output { QfiClosed, QfiSolver, Asymptotics, Cfi, Ratio };

/// One swept parameter. Names: s, sigma, eta, n_s, eta_n_s, n_n, dark.
struct Axis {
  std::string name;
  std::vector<double> values;
};

Axis linear_axis(const std::string& name, double lo, double hi, int points);
Axis log_axis(const std::string& name, double lo, double hi, int points);

struct SweepSpec {
  std::vector<Axis> axes;  ///< first axis varies slowest
  SceneParams fixed;
  std::set<Output> outputs{Output::QfiClosed, Output::Asymptotics};
  int mode_count = 15;
  std::optional<Regime> regime;  ///< empty: picked per point
  std::string output_path;       ///< empty: standard output

  void validate() const;
  std::vector<SceneParams> grid() const;

  /// Replaces any axis called `name` by the single value `v`.
  void pin(const std::string& name, double v);
};

void set_param(SceneParams& p, const std::string& name, double v);

/// {"axes": [{"name", "min", "max", "points", "scale"} | {"name", "values"}],
///  "fixed": {...}, "outputs": [...], "mode_count", "regime", "output"}
SweepSpec parse_sweep_spec(const nlohmann::json& j);

SweepSpec load_sweep_spec(const std::string& path);

nlohmann::json read_json_file(const std::string& path);

}  // namespace superres::cli
