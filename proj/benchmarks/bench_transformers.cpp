#include <benchmark/benchmark.h>

#include <random>

#include "recert/interzono.hpp"

using namespace recert;

namespace {

Zonotope<double> make_zono(std::size_t dim, std::size_t symbols, NoisePool& pool, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.5);
    Vector<double> c(dim);
    for (auto& v : c) v = n(rng);
    std::vector<Vector<double>> rows(symbols, Vector<double>(dim));
    for (auto& r : rows)
        for (auto& v : r) v = n(rng);
    return Zonotope<double>::from_rows(c, rows, pool);
}

void BM_ChordRelaxation(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    IntervalBounds<double> b{Vector<double>(n), Vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        b.lower[j] = -1.0 + 0.01 * j;
        b.upper[j] = b.lower[j] + 0.7;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(chord_relaxation(b, Activation::tanh));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_ChordRelaxation)->Arg(8)->Arg(64);

void BM_Affine(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    NoisePool pool;
    const auto z = make_zono(n, 4 * n, pool, 1);
    Matrix<double> w(n, n, 0.1);
    const Vector<double> b(n, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(affine(z, w, b));
    }
}
BENCHMARK(BM_Affine)->Arg(8)->Arg(32);

void BM_Elementwise(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const bool inter = state.range(1) != 0;
    NoisePool pool;
    const auto z = make_zono(n, 4 * n, pool, 2);
    const InterZono<double> d = inter ? lift_to_interzono(z, pool) : InterZono<double>{z, std::nullopt};
    for (auto _ : state) {
        NoisePool local = pool;
        benchmark::DoNotOptimize(elementwise_interzono(d, Activation::sigmoid, local));
    }
    state.SetLabel(inter ? "interzono" : "zonotope");
}
BENCHMARK(BM_Elementwise)->Args({8, 0})->Args({8, 1})->Args({32, 0})->Args({32, 1});

void BM_SigmaTanhPlanes(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    IntervalBounds<double> bx{Vector<double>(n, -1.0), Vector<double>(n, 0.5)};
    IntervalBounds<double> by{Vector<double>(n, -0.3), Vector<double>(n, 1.2)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_tanh_planes(bx, by));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_SigmaTanhPlanes)->Arg(8);

void BM_SigmaTanhProduct(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const bool inter = state.range(1) != 0;
    NoisePool pool;
    const auto zx = make_zono(n, 4 * n, pool, 3);
    const auto zy = make_zono(n, 4 * n, pool, 4);
    const InterZono<double> dx = inter ? lift_to_interzono(zx, pool) : InterZono<double>{zx, std::nullopt};
    const InterZono<double> dy = inter ? lift_to_interzono(zy, pool) : InterZono<double>{zy, std::nullopt};
    for (auto _ : state) {
        NoisePool local = pool;
        benchmark::DoNotOptimize(sigma_tanh_product_interzono(dx, dy, local));
    }
    state.SetLabel(inter ? "interzono" : "zonotope");
}
BENCHMARK(BM_SigmaTanhProduct)->Args({8, 0})->Args({8, 1});

void BM_Hadamard(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    NoisePool pool;
    const auto zx = make_zono(n, 4 * n, pool, 5);
    const auto zy = make_zono(n, 4 * n, pool, 6);
    for (auto _ : state) {
        NoisePool local = pool;
        benchmark::DoNotOptimize(hadamard_zono(zx, zy, local));
    }
}
BENCHMARK(BM_Hadamard)->Arg(8)->Arg(32);

}  // namespace
