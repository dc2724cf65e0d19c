#include <benchmark/benchmark.h>

#include "algred/pipeline.hpp"

using namespace algred;

namespace {

ModelFile corpus(const char* name) {
  return load_model(std::string(ALGRED_SOURCE_DIR) + "/corpus/pass/" + name + ".alg");
}

void BM_JetEval(benchmark::State& state) {
  const auto chart = make_chart({"x", "y", "z"});
  const auto e = parse_expression("sin(x*y) * exp(z) + log(2 + cos(x)) / (1 + y^2)", chart);
  const Point p{0.3, -0.2, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(eval_jet2(e, p));
}
BENCHMARK(BM_JetEval);

void BM_ImResiduals(benchmark::State& state) {
  const auto m = corpus("lie_poisson_so3");
  const auto samples = sample_points(m.samples.box, static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(im_residuals(m.algebroid, m.form, samples, 1e-9));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImResiduals)->Arg(16)->Arg(64);

void BM_KernelReducibility(benchmark::State& state) {
  const auto m = corpus("volume_r4");
  const auto samples = sample_points(m.samples.box, static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_reducibility_report(m.algebroid, m.form, samples, 1e-9));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KernelReducibility)->Arg(16)->Arg(64);

void BM_FullCheck(benchmark::State& state) {
  const auto m = corpus("libermann_r4");
  for (auto _ : state) benchmark::DoNotOptimize(run_check(m));
}
BENCHMARK(BM_FullCheck);

}  // namespace

BENCHMARK_MAIN();
