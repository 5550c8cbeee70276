#include <benchmark/benchmark.h>

#include "scg/fluct.hpp"
#include "scg/geodesy.hpp"
#include "scg/modes.hpp"
#include "scg/runcomb.hpp"
#include "scg/sceq.hpp"

#include <cmath>

namespace {

void BM_AtomicPoly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scg::runcomb::atomic_poly(n));
}
BENCHMARK(BM_AtomicPoly)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LinearPoly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scg::runcomb::linear_poly(n));
}
BENCHMARK(BM_LinearPoly)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SigmaCoefficients(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  auto jet = scg::geodesy::MetricJet::flrw_conformal(1.1, {0.3, -0.1, 0.05, 0.02}, order);
  for (auto _ : state) benchmark::DoNotOptimize(scg::geodesy::sigma_coeffs(jet, order));
}
BENCHMARK(BM_SigmaCoefficients)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Mode(benchmark::State& state) {
  auto bg = scg::modes::CosmoBackground::power_law(1.0, 2.0, 1.0, 1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 64; ++i) grid.push_back(1.0 + i / 64.0);
  const double k = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scg::modes::mode(bg, k, grid));
}
BENCHMARK(BM_Mode)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_WickSquare(benchmark::State& state) {
  auto bg = scg::modes::CosmoBackground::de_sitter(1.0, 1.0, -2.0);
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(-2.0 + i / 16.0);
  scg::modes::WickOptions opt;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(scg::modes::wick_square(bg, grid, opt));
}
BENCHMARK(BM_WickSquare)->Unit(benchmark::kMillisecond);

void BM_SolveMassiveWindow(benchmark::State& state) {
  scg::sceq::SolverParams p;
  p.m = 1.0;
  p.grid_n = static_cast<int>(state.range(0));
  p.wick.threads = 1;
  p.Lambda = scg::sceq::constraint_check(0.0, 1.0, 1.0, p);
  for (auto _ : state) benchmark::DoNotOptimize(scg::sceq::solve_local(0.0, 1.0, 1.0, 0.5, p));
}
BENCHMARK(BM_SolveMassiveWindow)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_AuxA(benchmark::State& state) {
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scg::fluct::auxA(-3.0, 0.577, p));
    p += 1e-3;
  }
}
BENCHMARK(BM_AuxA);

void BM_PowerSpectrum(benchmark::State& state) {
  const double kt = -std::pow(10.0, static_cast<double>(state.range(0)));
  scg::fluct::FluctParams prm;
  for (auto _ : state) benchmark::DoNotOptimize(scg::fluct::power_spectrum_P0(kt, 1.0, prm));
}
BENCHMARK(BM_PowerSpectrum)->DenseRange(-2, 2)->Unit(benchmark::kMicrosecond);

void BM_BispectrumCoarse(benchmark::State& state) {
  scg::fluct::FluctParams prm;
  prm.grid = {16, 8, 24};
  prm.threads = 1;
  const double s3 = std::sqrt(3.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        scg::fluct::bispectrum_B0(-1.0, {1, 0, 0}, {-0.5, s3 / 2, 0}, {-0.5, -s3 / 2, 0}, prm));
}
BENCHMARK(BM_BispectrumCoarse)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
