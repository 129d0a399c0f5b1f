#include <benchmark/benchmark.h>

#include "lipgan/constraints.hpp"
#include "lipgan/ot.hpp"
#include "lipgan/train.hpp"

using namespace lipgan;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, CounterRng& rng) {
  Tensor t(r, c);
  for (double& v : t.values()) v = rng.normal();
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(1);
  const Tensor a = random_tensor(n, n, rng), b = random_tensor(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_EmdExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(2);
  const Tensor a = random_tensor(n, 2, rng), b = random_tensor(n, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exact_w1(a, b));
}
BENCHMARK(BM_EmdExact)->Arg(100)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Bjorck(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(3);
  const Tensor w = random_tensor(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bjorck_orthonormalize(w, 5, 2));
}
BENCHMARK(BM_Bjorck)->Arg(30)->Arg(64)->Arg(256);

void BM_TrainIteration(benchmark::State& state) {
  TrainConfig c = TrainConfig::swiss_roll_groupsort(static_cast<std::size_t>(state.range(0)), 2, 30, 2);
  const RealData data = swiss_roll_data(c);
  CounterRng rng(4);
  MlpParams g = init_params(c.generator, rng);
  MlpParams d = init_params(c.discriminator, rng);
  apply_constraint(d);
  Optimizer gopt(c.generator_optimizer), dopt(c.discriminator_optimizer);
  Tensor real(c.batch_size, 2);
  for (std::size_t i = 0; i < c.batch_size; ++i)
    for (std::size_t k = 0; k < 2; ++k) real(i, k) = data.train.values(i, k);
  for (auto _ : state) {
    for (int k = 0; k < c.critic_steps; ++k) critic_step(d, g, real, random_tensor(c.batch_size, 2, rng), dopt);
    generator_step(g, d, random_tensor(c.batch_size, 2, rng), gopt);
  }
}
BENCHMARK(BM_TrainIteration)->Arg(30)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
