#include <benchmark/benchmark.h>

#include "superres/fock_oracle.hpp"
#include "superres/gaussian_qfi.hpp"
#include "superres/montecarlo.hpp"
#include "superres/spade.hpp"

using namespace superres;

namespace {

SceneParams point(double s, double signal, double n_n) {
  SceneParams p;
  p.s = s;
  p.eta = 0.25;
  p.n_n = n_n;
  return p.with_signal(signal);
}

const PsfSpec kGauss = PsfSpec::gaussian(1.0);

}  // namespace

static void BM_CalculusGaussian(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(calculus_at(kGauss, 0.7, 0.25));
}
BENCHMARK(BM_CalculusGaussian);

static void BM_CalculusSampled(benchmark::State& state) {
  const PsfSpec psf = PsfSpec::sampled(1.0, [](double x) { return 0.6316187777460647 * std::exp(-x * x / 4.0); });
  for (auto _ : state) benchmark::DoNotOptimize(calculus_at(psf, 0.7, 0.25));
}
BENCHMARK(BM_CalculusSampled);

static void BM_QfiClosedForm(benchmark::State& state) {
  const auto p = point(0.7, 1.0, 0.01);
  const auto oc = calculus_at(kGauss, p.s, p.eta);
  for (auto _ : state) benchmark::DoNotOptimize(qfi_closed_form(p, oc));
}
BENCHMARK(BM_QfiClosedForm);

static void BM_QfiGeneralQuad(benchmark::State& state) {
  const auto p = point(0.7, 1.0, 0.01);
  const auto oc = calculus_at(kGauss, p.s, p.eta);
  for (auto _ : state) benchmark::DoNotOptimize(qfi_general(p, oc));
}
BENCHMARK(BM_QfiGeneralQuad)->Unit(benchmark::kMicrosecond);

static void BM_FockOracle(benchmark::State& state) {
  const auto p = point(0.8, 0.5, 0.05);
  const auto oc = calculus_at(kGauss, p.s, p.eta);
  OracleOptions opt;
  opt.cutoff = static_cast<int>(state.range(0));
  opt.tail_bound = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(oracle_qfi(p, kGauss, oc, opt));
}
BENCHMARK(BM_FockOracle)->Arg(15)->Arg(25)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_SpadeBound(benchmark::State& state) {
  const auto p = point(0.3, 100.0, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(spade_cfi_bound(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SpadeBound)->Arg(15)->Arg(20);

static void BM_MonteCarlo(benchmark::State& state) {
  McConfig cfg;
  cfg.params = point(2.0, 0.5, 0.05);
  cfg.mode_count = 8;
  cfg.samples = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_moments(cfg, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.samples));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
