#include "superres/cli/app.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "superres/cli/commands.hpp"
#include "superres/cli/sweep.hpp"
#include "superres/error.hpp"

namespace superres::cli {

namespace {

struct ParamFlags {
  std::optional<double> s, sigma, eta, n_s, eta_n_s, n_n, dark;

  void attach(CLI::App* cmd) {
    cmd->add_option("--s", s, "source separation");
    cmd->add_option("--sigma", sigma, "PSF width");
    cmd->add_option("--eta", eta, "attenuation, in (0, 1/2]");
    cmd->add_option("--n-s", n_s, "photons per source before attenuation");
    cmd->add_option("--eta-n-s", eta_n_s, "detected signal photons eta * N_s");
    cmd->add_option("--n-n", n_n, "thermal-noise photons per mode");
    cmd->add_option("--dark", dark, "dark counts per mode (SPADE only)");
  }

  // eta first, so that --eta-n-s is resolved against the final eta.
  void apply(const std::function<void(const std::string&, double)>& set) const {
    const std::pair<const char*, const std::optional<double>*> order[] = {
        {"eta", &eta}, {"sigma", &sigma}, {"n_s", &n_s}, {"eta_n_s", &eta_n_s},
        {"n_n", &n_n}, {"dark", &dark},   {"s", &s}};
    for (const auto& [name, v] : order)
      if (*v) set(name, **v);
  }
};

struct SweepFlags {
  std::string config;
  std::string output;
  std::optional<int> modes;
  std::string regime;
  bool solver = false;
  ParamFlags params;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON sweep spec");
    cmd->add_option("--output,-o", output, "CSV path (default: standard output)");
    cmd->add_option("--modes", modes, "number of Hermite-Gaussian modes Q");
    cmd->add_option("--regime", regime, "asymptotic regime, or 'auto'");
    cmd->add_flag("--solver", solver, "add the general Gaussian solver column");
    params.attach(cmd);
  }

  SweepSpec build() const {
    SweepSpec spec = config.empty() ? SweepSpec{} : load_sweep_spec(config);
    params.apply([&](const std::string& n, double v) { spec.pin(n, v); });
    if (modes) spec.mode_count = *modes;
    if (!regime.empty() && regime != "auto") {
      spec.regime = parse_regime(regime);
      if (!spec.regime) throw ValidationError("unknown regime '" + regime + "'");
    }
    if (solver) spec.outputs.insert(Output::QfiSolver);
    if (!output.empty()) spec.output_path = output;
    return spec;
  }
};

void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  // Render fully before touching the file so a failed run leaves no partial output.
  std::ostringstream buf;
  body(buf);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << buf.str();
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::vector<SceneParams> parse_points(const nlohmann::json& j) {
  std::vector<SceneParams> out;
  try {
    for (const auto& pt : j.at("points")) {
      SceneParams p;
      p.eta = 0.25;
      if (pt.contains("eta")) set_param(p, "eta", pt.at("eta").get<double>());
      for (const auto& [k, v] : pt.items())
        if (k != "eta") set_param(p, k, v.get<double>());
      out.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed point list: ") + e.what());
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher-information limits for resolving two incoherent thermal sources", "superres"};
  app.require_subcommand(1);
  std::function<int()> action;

  SweepFlags qfi_flags;
  auto* qfi = app.add_subcommand("qfi-sweep", "quantum Fisher information over a parameter grid");
  qfi_flags.attach(qfi);
  qfi->callback([&] {
    action = [&] {
      const SweepSpec spec = qfi_flags.build();
      emit(spec.output_path, out, [&](std::ostream& o) { cmd_qfi_sweep(spec, o); });
      return kOk;
    };
  });

  SweepFlags cfi_flags;
  auto* cfi = app.add_subcommand("cfi-sweep", "fin-SPADE classical Fisher-information bound over a grid");
  cfi_flags.attach(cfi);
  cfi->callback([&] {
    action = [&] {
      const SweepSpec spec = cfi_flags.build();
      emit(spec.output_path, out, [&](std::ostream& o) { cmd_cfi_sweep(spec, o); });
      return kOk;
    };
  });

  SweepFlags ratio_flags;
  auto* ratio = app.add_subcommand("ratio-map", "F/H over a grid");
  ratio_flags.attach(ratio);
  ratio->callback([&] {
    action = [&] {
      const SweepSpec spec = ratio_flags.build();
      emit(spec.output_path, out, [&](std::ostream& o) { cmd_ratio_map(spec, o); });
      return kOk;
    };
  });

  std::string fig_name;
  std::string fig_output;
  auto* fig = app.add_subcommand("figure", "data for one figure panel");
  fig->add_option("name", fig_name, "1a, 1b, 1c, 1d or 2")->required();
  fig->add_option("--output,-o", fig_output, "CSV path (default: standard output)");
  fig->callback([&] {
    action = [&] {
      const SweepSpec spec = figure_spec(fig_name);
      emit(fig_output, out, [&](std::ostream& o) {
        if (figure_is_ratio_map(fig_name)) cmd_ratio_map(spec, o);
        else cmd_qfi_sweep(spec, o);
      });
      return kOk;
    };
  });

  std::string oracle_config;
  std::string oracle_output;
  OracleOptions oracle_opt;
  oracle_opt.cutoff = 30;
  oracle_opt.tail_bound = 1e-8;
  auto* oracle = app.add_subcommand("oracle-check", "Fock-space oracle against the closed form");
  oracle->add_option("--config", oracle_config, "JSON with a \"points\" list (default: built-in panel)");
  oracle->add_option("--cutoff", oracle_opt.cutoff, "Fock cutoff per mode");
  oracle->add_option("--fd-step", oracle_opt.fd_step, "finite-difference step (default 1e-4 sigma)");
  oracle->add_option("--tail-bound", oracle_opt.tail_bound, "largest tolerated thermal tail mass");
  oracle->add_option("--eigen-floor", oracle_opt.eigen_floor, "spectral floor on p_i + p_j");
  oracle->add_option("--output,-o", oracle_output, "JSON path (default: standard output)");
  oracle->callback([&] {
    action = [&] {
      std::vector<SceneParams> points = default_oracle_panel();
      if (!oracle_config.empty()) {
        const nlohmann::json j = read_json_file(oracle_config);
        points = parse_points(j);
        oracle_opt.cutoff = j.value("cutoff", oracle_opt.cutoff);
        oracle_opt.fd_step = j.value("fd_step", oracle_opt.fd_step);
        oracle_opt.tail_bound = j.value("tail_bound", oracle_opt.tail_bound);
      }
      const OracleCheckResult res = cmd_oracle_check(points, oracle_opt);
      emit(oracle_output, out, [&](std::ostream& o) { o << res.report.dump(2) << '\n'; });
      return res.pass ? kOk : kNumerical;
    };
  });

  McConfig mc;
  mc.params.s = 2.0;
  mc.params.eta = 0.5;
  mc.params.n_s = 1.0;
  mc.params.n_n = 0.05;
  ParamFlags mc_params;
  std::string mc_output;
  std::vector<int> corrupt;
  unsigned mc_workers = 0;
  auto* mcv = app.add_subcommand("mc-validate", "Monte-Carlo photocounts against the analytic moments");
  mcv->add_option("--seed", mc.seed, "RNG seed");
  mcv->add_option("--samples", mc.samples, "number of samples");
  mcv->add_option("--modes", mc.mode_count, "number of modes Q");
  mcv->add_option("--workers", mc_workers, "worker threads (default: SUPERRES_WORKERS or all cores)");
  mcv->add_option("--corrupt", corrupt, "test hook: perturb analytic C at q r")->expected(2);
  mcv->add_option("--output,-o", mc_output, "JSON path (default: standard output)");
  mc_params.attach(mcv);
  mcv->callback([&] {
    action = [&] {
      mc_params.apply([&](const std::string& n, double v) { set_param(mc.params, n, v); });
      McValidateOptions opt;
      opt.workers = mc_workers;
      if (corrupt.size() == 2) opt.corrupt_entry = std::pair{corrupt[0], corrupt[1]};
      const McValidateResult res = cmd_mc_validate(mc, opt);
      emit(mc_output, out, [&](std::ostream& o) { o << res.report.dump(2) << '\n'; });
      return res.pass ? kOk : kNumerical;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "superres: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Validation: return kValidation;
      case ErrorKind::Numerical: return kNumerical;
      case ErrorKind::Io: return kIo;
    }
    return kNumerical;
  }
}

}  // namespace superres::cli
