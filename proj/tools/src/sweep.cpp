#include "superres/cli/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "superres/error.hpp"

namespace superres::cli {

namespace {

const std::vector<std::string> kParamNames{"s", "sigma", "eta", "n_s", "eta_n_s", "n_n", "dark"};

Output parse_output(const std::string& name) {
  if (name == "qfi-closed") return Output::QfiClosed;
  if (name == "qfi-solver") return Output::QfiSolver;
  if (name == "asymptotics") return Output::Asymptotics;
  if (name == "cfi") return Output::Cfi;
  if (name == "ratio") return Output::Ratio;
  throw ValidationError("unknown output '" + name + "'");
}

void require_param_name(const std::string& name) {
  if (std::find(kParamNames.begin(), kParamNames.end(), name) == kParamNames.end())
    throw ValidationError("unknown parameter '" + name + "'");
}

}  // namespace

Axis linear_axis(const std::string& name, double lo, double hi, int points) {
  require_param_name(name);
  if (points < 2) throw ValidationError("axis '" + name + "' needs at least 2 points");
  Axis a{name, {}};
  for (int i = 0; i < points; ++i) a.values.push_back(lo + (hi - lo) * i / (points - 1));
  a.values.back() = hi;
  return a;
}

Axis log_axis(const std::string& name, double lo, double hi, int points) {
  require_param_name(name);
  if (points < 2) throw ValidationError("axis '" + name + "' needs at least 2 points");
  if (!(lo > 0.0 && hi > 0.0)) throw ValidationError("log axis '" + name + "' needs positive bounds");
  Axis a{name, {}};
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  for (int i = 0; i < points; ++i) a.values.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (points - 1)));
  a.values.front() = lo;
  a.values.back() = hi;
  return a;
}

void set_param(SceneParams& p, const std::string& name, double v) {
  if (name == "s") p.s = v;
  else if (name == "sigma") p.sigma = v;
  else if (name == "eta") p.eta = v;
  else if (name == "n_s") p.n_s = v;
  else if (name == "eta_n_s") p = p.with_signal(v);
  else if (name == "n_n") p.n_n = v;
  else if (name == "dark") p.dark = v;
  else throw ValidationError("unknown parameter '" + name + "'");
}

void SweepSpec::validate() const {
  for (const auto& a : axes) {
    require_param_name(a.name);
    if (a.values.empty()) throw ValidationError("axis '" + a.name + "' has no values");
  }
  if (mode_count < 1) throw ValidationError("mode_count must be >= 1");
  for (const auto& p : grid()) p.validate();
}

std::vector<SceneParams> SweepSpec::grid() const {
  std::vector<SceneParams> out{fixed};
  for (const auto& a : axes) {
    std::vector<SceneParams> next;
    next.reserve(out.size() * a.values.size());
    for (const auto& base : out)
      for (double v : a.values) {
        SceneParams p = base;
        set_param(p, a.name, v);
        next.push_back(p);
      }
    out = std::move(next);
  }
  return out;
}

void SweepSpec::pin(const std::string& name, double v) {
  require_param_name(name);
  std::erase_if(axes, [&](const Axis& a) { return a.name == name; });
  set_param(fixed, name, v);
}

SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("sweep spec must be a JSON object");
  SweepSpec spec;
  try {
    if (j.contains("fixed")) {
      const auto& f = j.at("fixed");
      // eta first so that eta_n_s resolves against the final eta
      if (f.contains("eta")) set_param(spec.fixed, "eta", f.at("eta").get<double>());
      for (const auto& [k, v] : f.items())
        if (k != "eta") set_param(spec.fixed, k, v.get<double>());
    }
    if (j.contains("axes")) {
      for (const auto& a : j.at("axes")) {
        const std::string name = a.at("name").get<std::string>();
        if (a.contains("values")) {
          require_param_name(name);
          spec.axes.push_back({name, a.at("values").get<std::vector<double>>()});
          continue;
        }
        const double lo = a.at("min").get<double>();
        const double hi = a.at("max").get<double>();
        const int n = a.at("points").get<int>();
        const std::string scale = a.value("scale", std::string("linear"));
        if (scale == "log") spec.axes.push_back(log_axis(name, lo, hi, n));
        else if (scale == "linear") spec.axes.push_back(linear_axis(name, lo, hi, n));
        else throw ValidationError("axis scale must be 'linear' or 'log'");
      }
    }
    if (j.contains("outputs")) {
      spec.outputs.clear();
      for (const auto& o : j.at("outputs")) spec.outputs.insert(parse_output(o.get<std::string>()));
    }
    spec.mode_count = j.value("mode_count", spec.mode_count);
    if (j.contains("regime")) {
      const std::string r = j.at("regime").get<std::string>();
      if (r != "auto") {
        spec.regime = parse_regime(r);
        if (!spec.regime) throw ValidationError("unknown regime '" + r + "'");
      }
    }
    spec.output_path = j.value("output", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sweep spec: ") + e.what());
  }
  return spec;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

SweepSpec load_sweep_spec(const std::string& path) { return parse_sweep_spec(read_json_file(path)); }

}  // namespace superres::cli
