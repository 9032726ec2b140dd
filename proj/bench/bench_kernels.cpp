// Serial reference vs OpenMP kernels.

#include "tauforge/geometry.hpp"
#include "tauforge/operator.hpp"
#include "tauforge/oracle.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace tauforge;

namespace {

const RootSystem& e7() {
  static const RootSystem sys = build_system(SystemKind::E7);
  return sys;
}

template <bool Parallel>
void BM_flag_matrix(benchmark::State& state) {
  AlgebraicOperator op = e7_operator();
  FlagBasis basis = enumerate_flag_basis(e7(), op.charvec(), state.range(0));
  for (auto _ : state) {
    RationalMatrix m = Parallel ? flag_matrix(op, basis, Rational(1, 2)) : serial::flag_matrix(op, basis, Rational(1, 2));
    benchmark::DoNotOptimize(m.data.data());
  }
  state.counters["dim"] = double(basis.dim());
}

template <bool Parallel>
void BM_numeric_frames(benchmark::State& state) {
  const OrbitKernel& kern = orbit_kernel(SystemKind::E7);
  auto pts = draw_samples(e7(), std::size_t(state.range(0)), 42, 1.0);
  for (auto _ : state) {
    auto f = Parallel ? numeric_frames<double>(kern, pts) : serial::numeric_frames<double>(kern, pts);
    benchmark::DoNotOptimize(f.data());
  }
  state.counters["points"] = double(pts.size());
}

template <bool Parallel>
void BM_riemann(benchmark::State& state) {
  AlgebraicOperator op = e7_operator_adjudicated();
  auto p = draw_alcove_samples(e7(), 1, 11, 1.0, 0.05)[0];
  auto tau = tau_numeric(e7(), p);
  MetricFrame<double> f0 = metric_at<double>(op, tau);
  std::vector<double> scales;
  for (std::size_t i = 0; i < 7; ++i) scales.push_back(std::sqrt(std::abs(f0.a[i * 7 + i])));
  MetricFrame<double> f = metric_at<double>(op, tau, scales);
  for (auto _ : state) {
    auto r = Parallel ? riemann_at(f) : serial::riemann_at(f);
    benchmark::DoNotOptimize(r.riemann_max);
  }
}

}  // namespace

BENCHMARK(BM_flag_matrix<false>)->Arg(4)->Arg(6)->Name("flag_matrix/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_flag_matrix<true>)->Arg(4)->Arg(6)->Name("flag_matrix/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_numeric_frames<false>)->Arg(64)->Name("numeric_frames/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_numeric_frames<true>)->Arg(64)->Name("numeric_frames/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_riemann<false>)->Name("riemann_at/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_riemann<true>)->Name("riemann_at/openmp")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
