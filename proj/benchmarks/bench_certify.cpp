#include <benchmark/benchmark.h>

#include <random>

#include "recert/certifier.hpp"
#include "recert/trainer.hpp"

using namespace recert;

namespace {

struct Instance {
    Model<double> model;
    Sample sample;
};

Instance make_instance(CellKind kind, std::size_t hidden, std::size_t frames) {
    std::mt19937_64 rng(7);
    Instance inst{make_model(kind, 4, hidden, 2), {}};
    randomize(inst.model, rng, 0.5);
    std::normal_distribution<double> n(0.0, 1.0);
    inst.sample.frames.assign(frames, Vector<double>(4));
    for (auto& f : inst.sample.frames)
        for (auto& v : f) v = n(rng);
    inst.sample.label = predict(inst.model, inst.sample.frames);
    return inst;
}

// Per-sample certification; args: cell kind, hidden size, frames, domain.
void BM_CertifySample(benchmark::State& state) {
    const auto kind = static_cast<CellKind>(state.range(0));
    const auto domain = state.range(3) != 0 ? DomainKind::interzono : DomainKind::zonotope;
    const Instance inst = make_instance(kind, static_cast<std::size_t>(state.range(1)),
                                        static_cast<std::size_t>(state.range(2)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(certify(inst.model, inst.sample, PerturbationSpec::all_frame(0.01), domain));
    }
    state.SetLabel(std::string(to_string(kind)) + "/" + std::string(to_string(domain)));
}
BENCHMARK(BM_CertifySample)
    ->ArgsProduct({{static_cast<long>(CellKind::vanilla), static_cast<long>(CellKind::lstm),
                    static_cast<long>(CellKind::gru)},
                   {8},
                   {4},
                   {0, 1}})
    ->Unit(benchmark::kMicrosecond);

void BM_RobustLossGradient(benchmark::State& state) {
    const Instance inst = make_instance(CellKind::lstm, static_cast<std::size_t>(state.range(0)), 4);
    std::size_t nodes = 0;
    for (auto _ : state) {
        const auto g = loss_and_gradient(inst.model, inst.sample, Schedule{0.1, 0.5}, RobustTerm{});
        nodes = g.tape_nodes;
        benchmark::DoNotOptimize(g.gradient.data());
    }
    state.counters["tape_nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_RobustLossGradient)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
