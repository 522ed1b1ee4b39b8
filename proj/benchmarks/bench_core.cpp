#include <benchmark/benchmark.h>

#include <random>

#include "ebrus/integrate.hpp"
#include "ebrus/tangent.hpp"

namespace {

ebrus::ModalState smooth_state(const ebrus::SineBasis& basis) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  ebrus::ModalState g(basis.mode_count());
  for (std::size_t i = 0; i < g.coef.size(); ++i) {
    const double k = static_cast<double>(i % basis.mode_count()) + 1.0;
    g.coef[i] = nd(rng) / (k * k);
  }
  return g;
}

ebrus::DomainSpec domain(int dim) {
  ebrus::DomainSpec d;
  d.dim = dim;
  return d;
}

void BM_ToGrid(benchmark::State& st) {
  const ebrus::SineBasis basis(domain(static_cast<int>(st.range(0))), static_cast<int>(st.range(1)));
  const auto g = smooth_state(basis);
  std::vector<double> out;
  for (auto _ : st) {
    basis.to_grid(g.block(0), basis.dealias_grid(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ToGrid)->Args({1, 32})->Args({1, 128})->Args({2, 16})->Args({3, 8});

void BM_Nonlinear(benchmark::State& st) {
  const ebrus::SineBasis basis(domain(static_cast<int>(st.range(0))), static_cast<int>(st.range(1)));
  const ebrus::Parameters prm;
  ebrus::Galerkin gal(basis, prm);
  const auto g = smooth_state(basis);
  std::vector<double> out(g.coef.size());
  for (auto _ : st) benchmark::DoNotOptimize(gal.nonlinear(g.coef, out));
}
BENCHMARK(BM_Nonlinear)->Args({1, 32})->Args({1, 128})->Args({2, 16});

void BM_Step(benchmark::State& st) {
  const ebrus::SineBasis basis(domain(1), static_cast<int>(st.range(0)));
  const ebrus::Parameters prm;
  ebrus::IntegratorConfig cfg;
  cfg.scheme = static_cast<ebrus::Scheme>(st.range(1));
  ebrus::Stepper stepper(basis, prm, cfg);
  auto g = smooth_state(basis);
  for (auto _ : st) stepper.step(g);
}
BENCHMARK(BM_Step)->Args({32, 1})->Args({32, 2})->Args({128, 1});

void BM_TangentStep(benchmark::State& st) {
  const ebrus::SineBasis basis(domain(1), 32);
  const ebrus::Parameters prm;
  ebrus::IntegratorConfig cfg;
  ebrus::TangentStepper ts(basis, prm, cfg);
  auto g = smooth_state(basis);
  std::vector<ebrus::ModalState> frame(static_cast<std::size_t>(st.range(0)),
                                       ebrus::ModalState(basis.mode_count()));
  for (std::size_t j = 0; j < frame.size(); ++j) frame[j].coef[j] = 1.0;
  for (auto _ : st) ts.step(g, frame, cfg.dt);
}
BENCHMARK(BM_TangentStep)->Arg(8)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
