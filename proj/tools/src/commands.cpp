#include "superres/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "superres/error.hpp"
#include "superres/gaussian_qfi.hpp"
#include "superres/overlap.hpp"
#include "superres/parallel.hpp"
#include "superres/spade.hpp"

namespace superres::cli {

namespace {

using Row = std::vector<std::string>;

void write_csv(std::ostream& out, const Row& header, const std::vector<Row>& rows) {
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << r[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw IoError("failed writing CSV output");
}

// Computes every row in parallel, then returns them in grid order.
template <class F>
std::vector<Row> evaluate_rows(const std::vector<SceneParams>& grid, F&& make_row) {
  std::vector<Row> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { rows[i] = make_row(grid[i]); });
  return rows;
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::optional<SStar> try_s_star(const SceneParams& p) {
  if (!(p.n_n > 0.0) || !(p.signal() > 0.0)) return std::nullopt;
  return s_star(p);
}

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

nlohmann::ordered_json params_json(const SceneParams& p) {
  return {{"s", p.s}, {"sigma", p.sigma}, {"eta", p.eta}, {"n_s", p.n_s}, {"eta_n_s", p.signal()},
          {"n_n", p.n_n}, {"dark", p.dark}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

Regime auto_regime(const SceneParams& p) {
  if (p.s >= 5.0 * p.sigma) return Regime::LargeS;
  const double snr = p.snr().value_or(std::numeric_limits<double>::infinity());
  if (snr >= 10.0) {
    if (const auto st = try_s_star(p); st && p.s <= st->s_star / 3.0) return Regime::SubSStar;
    return Regime::LargeSnrSmallS;
  }
  if (snr <= 0.1) return Regime::SmallSnr;
  return Regime::LargeSnrSmallS;
}

void cmd_qfi_sweep(const SweepSpec& spec, std::ostream& out) {
  spec.validate();
  const bool asym = spec.outputs.count(Output::Asymptotics) > 0;
  const bool solver = spec.outputs.count(Output::QfiSolver) > 0;
  const bool cfi = spec.outputs.count(Output::Cfi) > 0 || spec.outputs.count(Output::Ratio) > 0;

  Row header{"s", "sigma", "eta", "n_s", "n_n", "h_plus", "h_minus", "h_total", "h_over_eta_n_s"};
  if (asym) header.insert(header.end(), {"h_asymptotic", "regime", "regime_valid"});
  header.insert(header.end(), {"s_star", "h_at_s_star"});
  if (solver) header.push_back("h_solver");
  if (cfi) header.insert(header.end(), {"cfi", "ratio"});

  const auto rows = evaluate_rows(spec.grid(), [&](const SceneParams& p) {
    p.validate(true);
    const double sg = p.sigma;
    const double sg2 = sg * sg;
    const PsfSpec psf = PsfSpec::gaussian(sg);
    const OverlapCalculus oc = calculus_at(psf, p.s, p.eta);
    const GaussianQfiResult h = qfi_closed_form(p, oc);
    const double e = p.signal();

    Row r{format_number(p.s / sg), format_number(sg), format_number(p.eta), format_number(p.n_s),
          format_number(p.n_n), format_number(h.h_plus * sg2), format_number(h.h_minus * sg2),
          format_number(h.h_total * sg2),
          e > 0.0 ? format_number(h.h_total * sg2 / e) : std::string()};
    if (asym) {
      const Regime reg = spec.regime.value_or(auto_regime(p));
      std::optional<double> value;
      bool valid = false;
      try {
        const AsymptoticValue a = qfi_asymptotic(p, psf, reg);
        value = a.value * sg2;
        valid = a.valid;
      } catch (const ValidationError&) {
      }
      r.insert(r.end(), {format_number(value), std::string(regime_name(reg)), flag(valid)});
    }
    const auto st = try_s_star(p);
    r.push_back(st ? format_number(st->s_star / sg) : std::string());
    r.push_back(st ? format_number(st->h_at_s_star * sg2) : std::string());
    if (solver) r.push_back(format_number(qfi_general(p, oc).h_total * sg2));
    if (cfi) {
      const double f = spade_cfi_bound(p, spec.mode_count);
      r.push_back(format_number(f * sg2));
      r.push_back(h.h_total > 0.0 ? format_number(f / h.h_total) : std::string());
    }
    return r;
  });
  write_csv(out, header, rows);
}

void cmd_cfi_sweep(const SweepSpec& spec, std::ostream& out) {
  spec.validate();
  const Row header{"s", "sigma", "eta", "n_s", "n_n", "dark", "q_modes", "cfi", "condition", "flag"};
  const auto rows = evaluate_rows(spec.grid(), [&](const SceneParams& p) {
    const double sg = p.sigma;
    Row r{format_number(p.s / sg), format_number(sg), format_number(p.eta), format_number(p.n_s),
          format_number(p.n_n), format_number(p.dark), std::to_string(spec.mode_count)};
    try {
      const SpadeStats st = spade_stats(p, spec.mode_count);
      r.insert(r.end(), {format_number(st.fisher_bound * sg * sg), format_number(st.condition), "ok"});
    } catch (const NumericalError&) {
      r.insert(r.end(), {"", "", "numerical-error"});
    }
    return r;
  });
  write_csv(out, header, rows);
}

void cmd_ratio_map(const SweepSpec& spec, std::ostream& out) {
  spec.validate();
  const Row header{"s", "eta_n_s", "n_n", "q_modes", "cfi", "qfi", "ratio", "flag"};
  const auto rows = evaluate_rows(spec.grid(), [&](const SceneParams& p) {
    p.validate(true);
    const double sg2 = p.sigma * p.sigma;
    Row r{format_number(p.s / p.sigma), format_number(p.signal()), format_number(p.n_n),
          std::to_string(spec.mode_count)};
    const OverlapCalculus oc = calculus_at(PsfSpec::gaussian(p.sigma), p.s, p.eta);
    const double h = qfi_closed_form(p, oc).h_total;
    double f = 0.0;
    try {
      f = spade_cfi_bound(p, spec.mode_count);
    } catch (const NumericalError&) {
      r.insert(r.end(), {"", format_number(h * sg2), "", "numerical-error"});
      return r;
    }
    r.insert(r.end(), {format_number(f * sg2), format_number(h * sg2)});
    if (h > 0.0) {
      r.insert(r.end(), {format_number(f / h), "ok"});
    } else {
      r.insert(r.end(), {"", "undefined"});
    }
    return r;
  });
  write_csv(out, header, rows);
}

std::vector<SceneParams> default_oracle_panel() {
  std::vector<SceneParams> out;
  for (double s : {0.05, 0.8})
    for (const auto& [e, nn] : {std::pair{0.2, 0.05}, std::pair{0.5, 0.05}, std::pair{0.2, 0.2}}) {
      SceneParams p;
      p.eta = 0.25;
      p.s = s;
      p.n_n = nn;
      out.push_back(p.with_signal(e));
    }
  return out;
}

OracleCheckResult cmd_oracle_check(const std::vector<SceneParams>& points, const OracleOptions& opt) {
  for (const auto& p : points) p.validate(true);
  struct Entry {
    nlohmann::ordered_json j;
    double rel = 0.0;
    bool ok = false;
  };
  std::vector<Entry> entries(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const SceneParams& p = points[i];
    Entry& en = entries[i];
    en.j = params_json(p);
    try {
      const PsfSpec psf = PsfSpec::gaussian(p.sigma);
      const OverlapCalculus oc = calculus_at(psf, p.s, p.eta);
      const double hc = qfi_closed_form(p, oc).h_total;
      const OracleResult o = oracle_qfi(p, psf, oc, opt);
      const double diff = std::abs(o.h_total - hc);
      en.rel = hc > 0.0 ? diff / std::abs(hc) : diff;
      en.ok = en.rel <= 1e-3;
      en.j["status"] = "ok";
      en.j["h_closed"] = hc;
      en.j["h_oracle"] = o.h_total;
      en.j["h_oracle_plus"] = o.h_plus;
      en.j["h_oracle_minus"] = o.h_minus;
      en.j["relative_error"] = en.rel;
      en.j["cutoff"] = o.cutoff;
      en.j["tail_mass"] = o.tail_mass;
      en.j["richardson_residual"] = o.richardson_residual;
      en.j["sld_residual"] = o.sld_residual;
    } catch (const NumericalError& e) {
      en.j["status"] = "error";
      en.j["error"] = e.what();
      en.j["diagnostic"] = json_number(e.diagnostic());
    } catch (const ValidationError& e) {
      en.j["status"] = "error";
      en.j["error"] = e.what();
    }
  });

  OracleCheckResult res;
  res.pass = true;
  double worst = 0.0;
  auto arr = nlohmann::ordered_json::array();
  for (auto& en : entries) {
    res.pass = res.pass && en.ok;
    worst = std::max(worst, en.rel);
    arr.push_back(std::move(en.j));
  }
  res.report = {{"schema_version", kSchemaVersion},
                {"command", "oracle-check"},
                {"cutoff", opt.cutoff},
                {"fd_step", opt.fd_step},
                {"tail_bound", opt.tail_bound},
                {"eigen_floor", opt.eigen_floor},
                {"max_relative_error", worst},
                {"pass", res.pass},
                {"points", std::move(arr)}};
  return res;
}

McValidateResult cmd_mc_validate(const McConfig& cfg, const McValidateOptions& opt) {
  cfg.validate();
  const int q = cfg.mode_count;
  const SpadeStats an = spade_stats(cfg.params, q);
  Eigen::MatrixXd c_an = an.c;
  if (opt.corrupt_entry) {
    const auto [a, b] = *opt.corrupt_entry;
    if (a < 0 || b < 0 || a >= q || b >= q) throw ValidationError("corrupted entry outside the mode range");
    c_an(a, b) += 0.5;
    if (a != b) c_an(b, a) += 0.5;
  }
  const McEstimate est = estimate_moments(cfg, opt.workers);

  auto zscore = [](double diff, double se) {
    if (diff == 0.0) return 0.0;
    return se > 0.0 ? diff / se : std::copysign(std::numeric_limits<double>::infinity(), diff);
  };

  McValidateResult res;
  res.pass = true;
  double worst = 0.0;
  auto mu = nlohmann::ordered_json::array();
  auto cov = nlohmann::ordered_json::array();
  auto failures = nlohmann::ordered_json::array();
  for (int i = 0; i < q; ++i) {
    const double z = zscore(est.mu_hat(i) - an.mu(i), est.mu_se(i));
    worst = std::max(worst, std::abs(z));
    mu.push_back({{"q", i}, {"empirical", est.mu_hat(i)}, {"analytic", an.mu(i)}, {"se", est.mu_se(i)},
                  {"z", json_number(z)}});
    if (!(std::abs(z) <= 5.0)) failures.push_back({{"kind", "mu"}, {"q", i}, {"z", json_number(z)}});
  }
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      const double z = zscore(est.c_hat(i, j) - c_an(i, j), est.c_se(i, j));
      worst = std::max(worst, std::abs(z));
      cov.push_back({{"q", i}, {"r", j}, {"empirical", est.c_hat(i, j)}, {"analytic", c_an(i, j)},
                     {"se", est.c_se(i, j)}, {"z", json_number(z)}});
      if (!(std::abs(z) <= 5.0))
        failures.push_back({{"kind", "c"}, {"q", i}, {"r", j}, {"z", json_number(z)}});
    }
  res.pass = failures.empty();
  res.report = {{"schema_version", kSchemaVersion},
                {"command", "mc-validate"},
                {"seed", cfg.seed},
                {"samples", cfg.samples},
                {"mode_count", q},
                {"params", params_json(cfg.params)},
                {"rng", "mt19937_64 per 4096-sample chunk, seed_seq{seed, chunk}"},
                {"max_abs_z", json_number(worst)},
                {"pass", res.pass},
                {"failures", std::move(failures)},
                {"mu", std::move(mu)},
                {"c", std::move(cov)}};
  return res;
}

SweepSpec figure_spec(const std::string& name) {
  SweepSpec spec;
  spec.fixed.sigma = 1.0;
  spec.fixed.eta = 0.5;
  if (name == "1a" || name == "1b") {
    spec.fixed.n_n = name == "1a" ? 0.0 : 0.01;
    spec.axes = {log_axis("eta_n_s", 1e-1, 1e3, 81), log_axis("s", 1e-2, 10.0, 121)};
  } else if (name == "1c") {
    spec.fixed.n_n = 0.01;
    spec.axes = {{"eta_n_s", {1e4, 1e3, 1e2, 10.0, 1.0}}, log_axis("s", 1e-3, 10.0, 241)};
  } else if (name == "1d") {
    spec.fixed.n_n = 1.0;
    spec.axes = {{"eta_n_s", {1e-4, 1e-3, 1e-2, 1e-1}}, log_axis("s", 1e-2, 10.0, 181)};
  } else if (name == "2") {
    spec.fixed.n_n = 0.01;
    spec.mode_count = 15;
    spec.outputs = {Output::Ratio};
    spec.axes = {log_axis("eta_n_s", 1e-2, 1e4, 61), log_axis("s", 1e-3, 1.0, 61)};
  } else {
    throw ValidationError("unknown figure '" + name + "' (expected 1a, 1b, 1c, 1d or 2)");
  }
  return spec;
}

bool figure_is_ratio_map(const std::string& name) { return name == "2"; }

}  // namespace superres::cli
