#include <benchmark/benchmark.h>

#include "cellpool/analytic.hpp"
#include "cellpool/mc_oracle.hpp"
#include "cellpool/scheduler.hpp"
#include "support/problems.hpp"

using namespace cellpool;

namespace {

const OperatorParams kOp{4e-8, 10e6, 4e-6};

}  // namespace

static void BM_InterferenceIntegral(benchmark::State& state) {
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interference_integral(t, 3.76));
    t = t < 8.0 ? t + 0.25 : 0.5;
  }
}
BENCHMARK(BM_InterferenceIntegral);

static void BM_RateNoCoop(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rate_nocoop(kOp.bandwidth, kOp.bs_density, default_radio()));
}
BENCHMARK(BM_RateNoCoop)->Unit(benchmark::kMillisecond);

static void BM_RateFlexRoam(benchmark::State& state) {
  const OperatorParams op2{8e-8, 5e6, 8e-6};
  for (auto _ : state) benchmark::DoNotOptimize(rate_flexroam(kOp, op2, default_radio()));
}
BENCHMARK(BM_RateFlexRoam)->Unit(benchmark::kMillisecond);

static void BM_OracleSamples(benchmark::State& state) {
  mc::RateOptions opt;
  opt.threads = 1;
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(mc::estimate_rate(Strategy::NoCoop, kOp, kOp, default_radio(), state.range(0), ++seed, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OracleSamples)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

// One frame with B BSs of 20 users, 16 subchannels, 10 slots.
static void BM_AllocateFrameBs(benchmark::State& state) {
  const SchedulingProblem p = oracle::random_problem(state.range(0), 20, 16, 10, 7);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_frame(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllocateFrameBs)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMillisecond)->Complexity();

// Users per BS at B = 8.
static void BM_AllocateFrameUsers(benchmark::State& state) {
  const SchedulingProblem p = oracle::random_problem(8, state.range(0), 16, 10, 7);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_frame(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllocateFrameUsers)->RangeMultiplier(2)->Range(10, 160)->Unit(benchmark::kMillisecond)->Complexity();

// A merged 29-BS band with 100 users per cell, 64 subchannels, 60 slots.
static void BM_AllocateFrameMergedBand(benchmark::State& state) {
  const SchedulingProblem p = oracle::random_problem(29, 100, 64, 60, 3);
  for (auto _ : state) benchmark::DoNotOptimize(allocate_frame(p));
}
BENCHMARK(BM_AllocateFrameMergedBand)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
