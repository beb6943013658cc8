#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "voxenc/folds.hpp"
#include "voxenc/kernels.hpp"
#include "voxenc/ridge.hpp"

using namespace voxenc;

namespace {

struct Problem {
  Eigen::MatrixXd X, Y, gram;
  std::vector<double> penalties;
  std::vector<Fold> folds;
};

Problem make(Eigen::Index rows, Eigen::Index features, Eigen::Index voxels) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  Problem p;
  p.X.resize(rows, features);
  p.Y.resize(rows, voxels);
  for (auto& v : p.X.reshaped()) v = nd(rng);
  for (auto& v : p.Y.reshaped()) v = nd(rng);
  p.X.rowwise() -= p.X.colwise().mean();
  p.Y.rowwise() -= p.Y.colwise().mean();
  p.gram = p.X.transpose() * p.X;
  p.penalties = ridge::PenaltyGrid::defaults().values;
  p.folds = contiguous_folds(rows, 5);
  return p;
}

// args: rows, features, voxels
void cv_parallel(benchmark::State& st) {
  const auto p = make(st.range(0), st.range(1), st.range(2));
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::parallel::ridge_cv_errors(p.X, p.Y, p.gram, p.penalties, p.folds, 0));
}

void cv_serial(benchmark::State& st) {
  const auto p = make(st.range(0), st.range(1), st.range(2));
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::serial::ridge_cv_errors(p.X, p.Y, p.gram, p.penalties, p.folds));
}

void refit_parallel(benchmark::State& st) {
  const auto p = make(st.range(0), st.range(1), st.range(2));
  const std::vector<double> lambda(static_cast<std::size_t>(p.Y.cols()), 10.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::ridge_refit(p.X, p.Y, p.gram, lambda, 0));
}

void refit_serial(benchmark::State& st) {
  const auto p = make(st.range(0), st.range(1), st.range(2));
  const std::vector<double> lambda(static_cast<std::size_t>(p.Y.cols()), 10.0);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::ridge_refit(p.X, p.Y, p.gram, lambda));
}

void corr_parallel(benchmark::State& st) {
  const auto p = make(st.range(0), 4, st.range(2));
  const Eigen::MatrixXd B = p.Y.reverse();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::column_correlations(p.Y, B, 0));
}

void corr_serial(benchmark::State& st) {
  const auto p = make(st.range(0), 4, st.range(2));
  const Eigen::MatrixXd B = p.Y.reverse();
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::column_correlations(p.Y, B));
}

}  // namespace

BENCHMARK(cv_parallel)->Args({400, 64, 1000})->Args({950, 256, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(cv_serial)->Args({400, 64, 1000})->Args({950, 256, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(refit_parallel)->Args({950, 256, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(refit_serial)->Args({950, 256, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(corr_parallel)->Args({1000, 0, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(corr_serial)->Args({1000, 0, 10000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
