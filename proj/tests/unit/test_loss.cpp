#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recert/loss.hpp"

using namespace recert;

TEST_SUITE("loss") {
    TEST_CASE("cross-entropy closed form") {
        CHECK(cross_entropy<double>({0.0, 2.0}, 0) == doctest::Approx(std::log(1.0 + std::exp(2.0))));
        CHECK(cross_entropy<double>({1000.0, 0.0}, 0) == doctest::Approx(0.0));
        CHECK(std::isfinite(cross_entropy<double>({0.0, 1000.0}, 0)));
        CHECK_THROWS_AS(cross_entropy<double>({0.0, 1.0}, 2), std::out_of_range);
    }

    TEST_CASE("worst corner maximizes cross-entropy over the box") {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t classes = 2; classes <= 4; ++classes) {
            for (int k = 0; k < 10; ++k) {
                IntervalBounds<double> b{Vector<double>(classes), Vector<double>(classes)};
                for (std::size_t j = 0; j < classes; ++j) {
                    b.lower[j] = n(rng);
                    b.upper[j] = b.lower[j] + std::fabs(n(rng));
                }
                NoisePool pool;
                const InterZono<double> logits{box_zonotope(b, pool), std::nullopt};
                const std::size_t label = k % classes;
                const double robust = robustness_loss(logits, label);
                double best = -INFINITY;
                for (std::size_t mask = 0; mask < (1u << classes); ++mask) {
                    Vector<double> y(classes);
                    for (std::size_t j = 0; j < classes; ++j) y[j] = (mask >> j) & 1 ? b.upper[j] : b.lower[j];
                    best = std::max(best, cross_entropy(y, label));
                }
                for (int s = 0; s < 10000; ++s) {
                    Vector<double> y(classes);
                    for (std::size_t j = 0; j < classes; ++j) y[j] = b.lower[j] + u(rng) * (b.upper[j] - b.lower[j]);
                    const double ce = cross_entropy(y, label);
                    REQUIRE(ce <= robust + 1e-9);
                }
                CHECK(robust == doctest::Approx(best).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("combined loss interpolates and validates lambda") {
        CHECK(combined_loss(1.0, 3.0, 0.25) == doctest::Approx(1.5));
        CHECK_THROWS_AS(combined_loss(1.0, 3.0, 1.5), std::invalid_argument);
    }
}
