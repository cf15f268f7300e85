#include <benchmark/benchmark.h>

#include <random>

#include "rnncert/certificates.hpp"
#include "rnncert/param_deq.hpp"

namespace {

using rnncert::Matrix;

Matrix random_weights(int n, double scale, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(double(n)));
  Matrix w(n, n);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(gen);
  return w;
}

void BM_CertifyCts(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix w = random_weights(n, 0.5, 11);
  rnncert::CertificateSpec spec;
  spec.rate = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(rnncert::certify(w, spec));
}
BENCHMARK(BM_CertifyCts)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CertifyDisc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix w = random_weights(n, 0.3, 12);
  rnncert::CertificateSpec spec;
  spec.domain = rnncert::TimeDomain::Discrete;
  spec.nonlin = rnncert::ActivationClass::cone();
  spec.rate = 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(rnncert::certify(w, spec));
}
BENCHMARK(BM_CertifyDisc)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_MaxRate(benchmark::State& state) {
  const Matrix w = random_weights(static_cast<int>(state.range(0)), 0.5, 13);
  rnncert::CertificateSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(rnncert::max_rate(w, spec));
}
BENCHMARK(BM_MaxRate)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Parameterize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rnncert::FreeWeights f{random_weights(n, 1.0, 14), random_weights(n, 1.0, 15),
                         rnncert::Vector::Zero(n), 1e-3};
  for (auto _ : state)
    benchmark::DoNotOptimize(rnncert::parameterize_weight(rnncert::free_to_constrained(f, 0.3)));
}
BENCHMARK(BM_Parameterize)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace
