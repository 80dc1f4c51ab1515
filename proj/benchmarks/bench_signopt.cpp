#include <benchmark/benchmark.h>

#include "signopt/confidence.hpp"
#include "signopt/dataset.hpp"
#include "signopt/mlp.hpp"
#include "signopt/optimizers.hpp"
#include "signopt/rng.hpp"

namespace {

using namespace signopt;

Vec random_grad(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    Vec g(dim);
    for (double& v : g) {
        v = rng.uniform(-1.0, 1.0);
    }
    return g;
}

void BM_OptimizerStep(benchmark::State& state, const std::string& name) {
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    HyperParams hp;
    hp.weight_decay = 0.0;
    if (name == "signadampp" || name == "framework") {
        hp.confidence = ConfidenceSpec{ConfidenceKind::fixed, 0.1, false, 0.9, 0.9, 0.999};
    }
    auto opt = make_optimizer(name, hp, dim, {});
    Vec theta(dim, 0.1);
    const GradEstimate g{random_grad(dim, 7), 1, false};
    for (auto _ : state) {
        opt->apply(theta, g);
        benchmark::DoNotOptimize(theta.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dim));
}

void BM_HardThresholdSign(benchmark::State& state) {
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    const Vec g = random_grad(dim, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hard_threshold_sign(g, 0.1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dim));
}

void BM_MlpTrainStep(benchmark::State& state) {
    Rng rng(3);
    Rng data_rng = rng.split(1);
    const Dataset ds = synth_blobs(data_rng, 512, 784, 10, 0.4);
    const Mlp net({784, 128, 10}, Activation::relu, &ds);
    Rng init = rng.split(2);
    Vec theta = net.init_params(init);
    HyperParams hp;
    hp.confidence = ConfidenceSpec{ConfidenceKind::fixed, 0.0, true, 0.9, 0.9, 0.999};
    hp.confidence.calibrate = false;
    hp.confidence.alpha = 0.01;
    auto opt = make_optimizer("signadampp", hp, net.dim(), net.groups());
    const std::size_t batch_size = static_cast<std::size_t>(state.range(0));
    std::vector<std::int32_t> batch(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        batch[i] = static_cast<std::int32_t>(i);
    }
    for (auto _ : state) {
        const EvalResult res = net.eval(theta, batch, nullptr);
        opt->apply(theta, res.grad);
        benchmark::DoNotOptimize(theta.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}

} // namespace

BENCHMARK_CAPTURE(BM_OptimizerStep, adam, "adam")->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_OptimizerStep, signadam, "signadam")->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_OptimizerStep, signadampp, "signadampp")->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_OptimizerStep, signsgd, "signsgd")->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_HardThresholdSign)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_MlpTrainStep)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
