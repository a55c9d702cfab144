// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "superres/cli/app.hpp"
#include "superres/fock_oracle.hpp"
#include "superres/gaussian_qfi.hpp"
#include "superres/montecarlo.hpp"
#include "superres/spade.hpp"

using namespace superres;
using superres::oracle::rel_diff;

namespace {

const PsfSpec kGauss = PsfSpec::gaussian(1.0);

SceneParams scene(double s, double signal, double n_n, double dark = 0.0, double eta = 0.5) {
  SceneParams p;
  p.s = s;
  p.eta = eta;
  p.n_n = n_n;
  p.dark = dark;
  return p.with_signal(signal);
}

double qfi(const SceneParams& p) { return qfi_closed_form(p, calculus_at(kGauss, p.s, p.eta)).h_total; }

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return v;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// max/min - 1 of a positive sequence.
double spread(const std::vector<double>& v) {
  double lo = v.front();
  double hi = v.front();
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo - 1.0;
}

Outcome reference_values() {
  const double h0 = qfi(scene(0.01, 1.0, 0.0));
  const double h1 = qfi(scene(0.01, 1.0, 0.01));
  Outcome o;
  o.pass = std::abs(h0 - 0.5) <= 0.02 * 0.5 && std::abs(h1 - 6e-4) <= 0.2 * 6e-4;
  o.detail = "H(N_n=0)=" + fmt("%.6g", h0) + " H(N_n=0.01)=" + fmt("%.6g", h1);
  return o;
}

Outcome solver_equivalence() {
  double worst = 0.0;
  for (double s : logspace(1e-3, 5.0, 20))
    for (double e : logspace(1e-4, 1e4, 20))
      for (double nn : {0.0, 0.01, 1.0}) {
        const auto p = scene(s, e, nn);
        const auto oc = calculus_at(kGauss, s, p.eta);
        worst = std::max(worst, rel_diff(qfi_closed_form(p, oc).h_total, qfi_general(p, oc).h_total));
      }
  return {worst <= 1e-9, "max relative gap " + fmt("%.3g", worst) + " over 1200 points"};
}

Outcome oracle_equivalence() {
  OracleOptions opt;
  opt.cutoff = 30;
  opt.tail_bound = 1e-8;
  double worst = 0.0;
  double tail = 0.0;
  for (double s : {0.05, 0.8})
    for (const auto& [e, nn] : {std::pair{0.2, 0.05}, std::pair{0.5, 0.05}, std::pair{0.2, 0.2}}) {
      const auto p = scene(s, e, nn, 0.0, 0.25);
      const auto oc = calculus_at(kGauss, s, p.eta);
      const auto r = oracle_qfi(p, kGauss, oc, opt);
      worst = std::max(worst, rel_diff(r.h_total, qfi_closed_form(p, oc).h_total));
      tail = std::max(tail, r.tail_mass);
    }
  return {worst <= 1e-4, "max relative gap " + fmt("%.3g", worst) + ", cutoff 30, max tail " + fmt("%.2g", tail)};
}

Outcome qfi_quadratic_law() {
  Outcome o;
  double worst_flat = 0.0;
  double worst_formula = 0.0;
  for (double nn : {0.01, 0.1, 1.0})
    for (double e : {0.01, 1.0, 100.0}) {
      std::vector<double> ratio;
      for (double s : logspace(1e-4, 1e-3, 10)) ratio.push_back(qfi(scene(s, e, nn)) / (s * s));
      worst_flat = std::max(worst_flat, spread(ratio));
      if (e / nn >= 100.0) {
        const double law = e * e / 16.0 / (nn * (nn + 1.0));
        for (double r : ratio) worst_formula = std::max(worst_formula, std::abs(r / law - 1.0));
      }
    }
  double worst_plateau = 0.0;
  for (double e : {0.01, 1.0, 100.0})
    worst_plateau = std::max(worst_plateau, rel_diff(qfi(scene(1e-3, e, 0.0)), qfi(scene(1e-2, e, 0.0))));
  o.pass = worst_flat <= 0.01 && worst_formula <= 0.02 && worst_plateau <= 0.01;
  o.detail = "H/s^2 spread " + fmt("%.2g", worst_flat) + ", vs law " + fmt("%.2g", worst_formula) +
             ", noiseless plateau " + fmt("%.2g", worst_plateau);
  return o;
}

Outcome local_maximum() {
  double worst_s = 0.0;
  double worst_h = 0.0;
  bool found_all = true;
  for (double e : {10.0, 100.0, 1000.0}) {
    const auto st = s_star(scene(1.0, e, 0.01));
    const auto grid = logspace(st.s_star / 100.0, 10.0, 20000);
    double prev = qfi(scene(grid[0], e, 0.01));
    bool found = false;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double h = qfi(scene(grid[i], e, 0.01));
      const double next = qfi(scene(grid[i + 1], e, 0.01));
      if (h >= prev && h > next) {
        worst_s = std::max(worst_s, std::abs(grid[i] / st.s_star - 1.0));
        worst_h = std::max(worst_h, std::abs(h / st.h_at_s_star - 1.0));
        found = true;
        break;
      }
      prev = h;
    }
    found_all = found_all && found;
  }
  return {found_all && worst_s <= 0.1 && worst_h <= 0.05,
          "argmax vs s* " + fmt("%.3g", worst_s) + ", max vs H(s*) " + fmt("%.3g", worst_h)};
}

Outcome large_separation() {
  double worst = 0.0;
  for (double e : {1.0, 100.0})
    for (double nn : {0.01, 1.0}) {
      const auto p = scene(10.0, e, nn);
      worst = std::max(worst, rel_diff(qfi(p), qfi_asymptotic(p, kGauss, Regime::LargeS).value));
    }
  return {worst <= 0.02, "max relative gap " + fmt("%.3g", worst)};
}

Outcome spade_quadratic_law() {
  std::vector<double> ratio;
  for (double s : logspace(1e-4, 1e-3, 10)) ratio.push_back(spade_cfi_bound(scene(s, 1.0, 0.0, 0.01)) / (s * s));
  const double flat = spread(ratio);
  const double plateau = rel_diff(spade_cfi_bound(scene(1e-3, 1.0, 0.0)), spade_cfi_bound(scene(1e-2, 1.0, 0.0)));
  return {flat <= 0.01 && plateau <= 0.05,
          "F/s^2 spread " + fmt("%.2g", flat) + " (D=0.01), noiseless plateau " + fmt("%.2g", plateau)};
}

Outcome fig2() {
  const auto ss = logspace(1e-3, 1.0, 50);
  const auto es = logspace(1e-2, 1e4, 50);
  double min_ratio = 2.0;
  double max_excess = -1.0;
  bool trend = true;
  for (double s : ss) {
    double lo_e = 0.0;
    double hi_e = 0.0;
    for (double e : es) {
      const auto p = scene(s, e, 0.01);
      const double f = spade_cfi_bound(p, 15);
      const double h = qfi(p);
      min_ratio = std::min(min_ratio, f / h);
      max_excess = std::max(max_excess, f / h - 1.0);
      if (e == es.front()) lo_e = f / h;
      if (e == es.back()) hi_e = f / h;
    }
    trend = trend && hi_e > lo_e;
  }
  return {min_ratio >= 0.65 && max_excess <= 1e-9 && trend,
          "min F/H " + fmt("%.4f", min_ratio) + ", max F/H-1 " + fmt("%.2g", max_excess) +
              (trend ? ", ratio rises with signal at every s" : ", trend violated")};
}

Outcome mode_convergence() {
  double worst = 0.0;
  for (double s : logspace(1e-3, 1.0, 50))
    for (double e : {1e-2, 1.0, 100.0, 1e4}) worst = std::max(worst, spade_mode_convergence(scene(s, e, 0.01), 15, 20));
  return {worst <= 1e-3, "max |F(20)-F(15)|/F(15) " + fmt("%.3g", worst)};
}

Outcome monte_carlo() {
  struct Point {
    double s, e, nn, dark;
    int q;
  };
  const Point pts[] = {{2.0, 0.5, 0.05, 0.0, 8}, {4.0, 1.0, 0.1, 0.0, 8}, {0.5, 2.0, 0.2, 0.05, 6}};
  double worst = 0.0;
  double worst_odd = 0.0;
  for (const auto& pt : pts) {
    McConfig cfg;
    cfg.params = scene(pt.s, pt.e, pt.nn, pt.dark);
    cfg.mode_count = pt.q;
    cfg.samples = 1'000'000;
    cfg.seed = 42;
    const McEstimate est = estimate_moments(cfg);
    const SpadeStats an = spade_stats(cfg.params, pt.q);
    for (int i = 0; i < pt.q; ++i) {
      worst = std::max(worst, std::abs(est.mu_hat(i) - an.mu(i)) / est.mu_se(i));
      for (int j = 0; j < pt.q; ++j) {
        const double z = std::abs(est.c_hat(i, j) - an.c(i, j)) / est.c_se(i, j);
        worst = std::max(worst, z);
        if ((i - j) % 2) worst_odd = std::max(worst_odd, z);
      }
    }
  }
  return {worst <= 5.0, "max |z| " + fmt("%.3g", worst) + " (odd-difference entries " + fmt("%.3g", worst_odd) +
                            ") at 3 points x 1e6 samples"};
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv{"superres"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "superres_acceptance_1b_a.csv";
  const auto b = dir / "superres_acceptance_1b_b.csv";
  int c1 = 0;
  int c2 = 0;
  run_cli({"figure", "1b", "-o", a.string()}, c1);
  run_cli({"figure", "1b", "-o", b.string()}, c2);
  const std::string fa = slurp(a);
  const bool fig_same = c1 == 0 && c2 == 0 && !fa.empty() && fa == slurp(b);
  std::filesystem::remove(a);
  std::filesystem::remove(b);

  int m1 = 0;
  int m2 = 0;
  const std::string ja = run_cli({"mc-validate", "--seed", "42"}, m1);
  const std::string jb = run_cli({"mc-validate", "--seed", "42", "--workers", "3"}, m2);
  const bool mc_same = m1 == 0 && m2 == 0 && !ja.empty() && ja == jb;
  return {fig_same && mc_same, std::string("figure 1b ") + (fig_same ? "identical" : "DIFFERS") + " (" +
                                   std::to_string(fa.size()) + " bytes), mc-validate --seed 42 " +
                                   (mc_same ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"reference QFI values", reference_values},
      {"solver equivalence", solver_equivalence},
      {"oracle equivalence", oracle_equivalence},
      {"quadratic law of the QFI", qfi_quadratic_law},
      {"local-maximum formulas", local_maximum},
      {"large-separation regime", large_separation},
      {"quadratic law of the SPADE bound", spade_quadratic_law},
      {"F/H map", fig2},
      {"mode-count convergence", mode_convergence},
      {"Monte-Carlo moments", monte_carlo},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %-34s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
