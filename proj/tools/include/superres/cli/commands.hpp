#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "superres/cli/sweep.hpp"
#include "superres/fock_oracle.hpp"
#include "superres/montecarlo.hpp"

namespace superres::cli {

inline constexpr int kSchemaVersion = 1;

/// Shortest text with 17 significant digits; "" for an empty optional.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

/// Regime whose asymptotic form is expected to apply at p.
Regime auto_regime(const SceneParams& p);

void cmd_qfi_sweep(const SweepSpec& spec, std::ostream& out);
void cmd_cfi_sweep(const SweepSpec& spec, std::ostream& out);
void cmd_ratio_map(const SweepSpec& spec, std::ostream& out);

struct OracleCheckResult {
  nlohmann::ordered_json report;
  bool pass = false;
};

std::vector<SceneParams> default_oracle_panel();

OracleCheckResult cmd_oracle_check(const std::vector<SceneParams>& points, const OracleOptions& opt);

struct McValidateOptions {
  /// Test hook: perturbs the analytic C at (q, r) so the check must fail.
  std::optional<std::pair<int, int>> corrupt_entry;
  unsigned workers = 0;
};

struct McValidateResult {
  nlohmann::ordered_json report;
  bool pass = false;
};

McValidateResult cmd_mc_validate(const McConfig& cfg, const McValidateOptions& opt = {});

/// Sweep specs that regenerate the data behind each figure: 1a, 1b, 1c, 1d, 2.
SweepSpec figure_spec(const std::string& name);

/// Whether a figure preset is a ratio map (otherwise a QFI sweep).
bool figure_is_ratio_map(const std::string& name);

}  // namespace superres::cli
