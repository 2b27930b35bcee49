#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recert/zonotope.hpp"

using namespace recert;

namespace {

Zonotope<double> random_zonotope(std::size_t dim, std::size_t symbols, NoisePool& pool, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vector<double> c(dim);
    for (auto& v : c) v = n(rng);
    std::vector<Vector<double>> rows(symbols, Vector<double>(dim));
    for (auto& r : rows)
        for (auto& v : r) v = n(rng);
    return Zonotope<double>::from_rows(c, rows, pool);
}

}  // namespace

TEST_SUITE("zonotope") {
    TEST_CASE("concretization is center plus or minus the absolute generator sum") {
        NoisePool pool;
        const auto z = Zonotope<double>::from_rows({1.0, -2.0}, {{0.5, -1.0}, {-0.25, 0.0}}, pool);
        const auto b = concretize(z);
        CHECK(b.lower[0] == doctest::Approx(0.25));
        CHECK(b.upper[0] == doctest::Approx(1.75));
        CHECK(b.lower[1] == doctest::Approx(-3.0));
        CHECK(b.upper[1] == doctest::Approx(-1.0));
    }

    TEST_CASE("symbols are never reused") {
        NoisePool pool;
        const SymbolId a = pool.fresh();
        const SymbolId b = pool.fresh_block(3);
        const SymbolId c = pool.fresh();
        CHECK(a == 0);
        CHECK(b == 1);
        CHECK(c == 4);
        CHECK(pool.issued() == 5);
    }

    TEST_CASE("affine map is exact on sampled points") {
        std::mt19937_64 rng(11);
        NoisePool pool;
        const auto z = random_zonotope(3, 4, pool, rng);
        Matrix<double> w(2, 3);
        w(0, 0) = 1.0;
        w(0, 2) = -2.0;
        w(1, 1) = 0.5;
        const Vector<double> b{0.1, -0.3};
        const auto out = affine(z, w, b);
        for (int k = 0; k < 100; ++k) {
            const auto e = oracle::sample_symbols(pool.issued(), rng);
            const auto x = z.evaluate(e);
            const auto y = out.evaluate(e);
            CHECK(y[0] == doctest::Approx(x[0] - 2.0 * x[2] + 0.1));
            CHECK(y[1] == doctest::Approx(0.5 * x[1] - 0.3));
        }
    }

    TEST_CASE("add merges shared symbols") {
        NoisePool pool;
        const SymbolId s = pool.fresh();
        const Zonotope<double> a({1.0}, {{s, {1.0}}});
        const Zonotope<double> b({2.0}, {{s, {-1.0}}});
        const auto sum = add(a, b);
        const auto bounds = concretize(sum);
        CHECK(bounds.lower[0] == doctest::Approx(3.0));
        CHECK(bounds.upper[0] == doctest::Approx(3.0));
    }

    TEST_CASE("box zonotope reproduces its bounds") {
        NoisePool pool;
        const IntervalBounds<double> in{{-1.0, 2.0}, {3.0, 2.0}};
        const auto z = box_zonotope(in, pool);
        const auto out = concretize(z);
        CHECK(out.lower[0] == doctest::Approx(-1.0));
        CHECK(out.upper[0] == doctest::Approx(3.0));
        CHECK(out.lower[1] == doctest::Approx(2.0));
        CHECK(out.upper[1] == doctest::Approx(2.0));
    }

    TEST_CASE("consolidation caps generators and stays sound") {
        std::mt19937_64 rng(5);
        NoisePool pool;
        const auto z = random_zonotope(3, 12, pool, rng);
        const auto c = consolidate(z, 4, pool);
        CHECK(c.noise_count() <= 4 + 3);
        const auto bz = concretize(z);
        const auto bc = concretize(c);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(bc.lower[j] <= bz.lower[j] + 1e-12);
            CHECK(bc.upper[j] >= bz.upper[j] - 1e-12);
        }
    }

    TEST_CASE("constructor rejects ragged generators") {
        CHECK_THROWS_AS(Zonotope<double>({0.0, 0.0}, {{0, {1.0}}}), ShapeError);
    }
}
