#include <benchmark/benchmark.h>

#include <random>

#include "rnncert/dynamics.hpp"

namespace {

using rnncert::Matrix;
using rnncert::Vector;

rnncert::SynapticModel random_model(int n, rnncert::Arch arch, rnncert::TimeDomain domain) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd(0.0, 0.5 / std::sqrt(double(n)));
  rnncert::SynapticModel m;
  m.arch = arch;
  m.domain = domain;
  m.W = Matrix(n, n);
  for (Eigen::Index i = 0; i < m.W.size(); ++i) m.W.data()[i] = nd(gen);
  m.B = Matrix::Identity(n, 1);
  m.C = Matrix::Identity(1, n);
  m.D = Matrix::Zero(1, 1);
  m.act = rnncert::Activation::parse("tanh");
  return m;
}

void BM_SimulateRk4(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = random_model(n, rnncert::Arch::FiringRate, rnncert::TimeDomain::Continuous);
  const auto u = rnncert::constant_input(Vector::Ones(1));
  const Vector x0 = Vector::Constant(n, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(rnncert::simulate(model, u, x0, 1.0, 1e-3, 100));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateRk4)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SimulateDiscrete(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = random_model(n, rnncert::Arch::Hopfield, rnncert::TimeDomain::Discrete);
  const auto u = rnncert::constant_input(Vector::Ones(1));
  const Vector x0 = Vector::Constant(n, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(rnncert::simulate(model, u, x0, 1000.0, 1.0, 100));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateDiscrete)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Equilibrium(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = random_model(n, rnncert::Arch::FiringRate, rnncert::TimeDomain::Continuous);
  const Vector u = Vector::Ones(1);
  for (auto _ : state) benchmark::DoNotOptimize(rnncert::equilibrium(model, u));
}
BENCHMARK(BM_Equilibrium)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
