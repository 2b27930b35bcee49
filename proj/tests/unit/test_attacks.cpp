#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "recert/attacks.hpp"
#include "recert/loss.hpp"

using namespace recert;

namespace {

double ce(const Model<double>& m, const Sequence<double>& xs, std::size_t label) {
    return cross_entropy(oracle::logits(m, xs), label);
}

}  // namespace

TEST_SUITE("attacks") {
    TEST_CASE("input gradient matches finite differences") {
        std::mt19937_64 rng(41);
        for (CellKind kind : {CellKind::vanilla, CellKind::lstm, CellKind::gru}) {
            const auto m = oracle::random_model(kind, 3, 3, 3, rng);
            const auto xs = oracle::random_sequence(3, 3, rng);
            const auto g = input_gradient(m, xs, 1);
            CHECK(g.loss == doctest::Approx(ce(m, xs, 1)));
            for (std::size_t t = 0; t < xs.size(); ++t) {
                for (std::size_t j = 0; j < 3; ++j) {
                    auto hi = xs, lo = xs;
                    hi[t][j] += 1e-6;
                    lo[t][j] -= 1e-6;
                    const double numeric = (ce(m, hi, 1) - ce(m, lo, 1)) / 2e-6;
                    CHECK(g.grad[t][j] == doctest::Approx(numeric).epsilon(1e-6).scale(1.0));
                }
            }
        }
    }

    TEST_CASE("fgsm leaves the input alone when the gradient vanishes") {
        const auto m = make_model(CellKind::lstm, 2, 2, 2);
        const Sample s{{{0.3, -0.2}, {1.0, 0.5}}, 0};
        AttackConfig cfg;
        cfg.epsilon = 0.5;
        CHECK(fgsm(m, s, cfg) == s.frames);
    }

    TEST_CASE("fgsm reaches the worst corner of a monotone one-frame model") {
        // h = tanh(w.x), logits (a h, -a h): the loss is monotone in w.x, so the
        // worst case in the ball is the corner x - eps sign(a) sign(w).
        auto m = make_model(CellKind::vanilla, 3, 1, 2);
        m.cell.gates[0].wx(0, 0) = 0.7;
        m.cell.gates[0].wx(0, 1) = -1.2;
        m.cell.gates[0].wx(0, 2) = 0.4;
        m.output.w(0, 0) = 1.5;
        m.output.w(1, 0) = -1.5;
        const Sample s{{{0.2, 0.1, -0.3}}, 0};
        AttackConfig cfg;
        cfg.epsilon = 0.25;
        const auto adv = fgsm(m, s, cfg);
        CHECK(adv[0][0] == doctest::Approx(0.2 - 0.25));
        CHECK(adv[0][1] == doctest::Approx(0.1 + 0.25));
        CHECK(adv[0][2] == doctest::Approx(-0.3 - 0.25));
        std::mt19937_64 rng(42);
        const double worst = ce(m, adv, 0);
        for (int k = 0; k < 1000; ++k) {
            CHECK(ce(m, oracle::sample_ball(s.frames, PerturbationSpec::all_frame(0.25), rng), 0) <= worst + 1e-12);
        }
    }

    TEST_CASE("attacks stay inside the ball and respect one-frame strategies") {
        std::mt19937_64 rng(43);
        const auto m = oracle::random_model(CellKind::gru, 2, 3, 2, rng);
        Sample s{oracle::random_sequence(3, 2, rng), 0};
        s.label = predict(m, s.frames);
        AttackConfig cfg;
        cfg.epsilon = 0.3;
        cfg.strategy = Strategy::one_frame;
        cfg.frame = 1;
        cfg.restarts = 3;
        const auto r = pgd(m, s, cfg);
        CHECK(max_frame_distance(r.adversarial, s.frames) <= cfg.epsilon + 1e-12);
        CHECK(r.adversarial[0] == s.frames[0]);
        CHECK(r.adversarial[2] == s.frames[2]);
        const auto f = fgsm(m, s, cfg);
        CHECK(max_frame_distance(f, s.frames) <= cfg.epsilon + 1e-12);
        CHECK(f[0] == s.frames[0]);
    }

    TEST_CASE("zero radius returns the clean sample") {
        std::mt19937_64 rng(44);
        const auto m = oracle::random_model(CellKind::lstm, 2, 3, 2, rng);
        Sample s{oracle::random_sequence(2, 2, rng), 0};
        s.label = predict(m, s.frames);
        AttackConfig cfg;
        const auto r = pgd(m, s, cfg);
        CHECK_FALSE(r.success);
        CHECK(r.adversarial == s.frames);
    }

    TEST_CASE("zero radius empirical accuracy equals clean accuracy") {
        std::mt19937_64 rng(45);
        const auto m = oracle::random_model(CellKind::vanilla, 2, 3, 2, rng);
        Dataset data;
        for (int i = 0; i < 20; ++i) {
            data.push_back(Sample{oracle::random_sequence(2, 2, rng), static_cast<std::size_t>(i % 2)});
        }
        AttackConfig cfg;
        const auto r = empirical_robust_accuracy(m, data, cfg, 1);
        CHECK(r.robust_accuracy == r.clean_accuracy);
    }

    TEST_CASE("pgd never breaks a certified sample") {
        std::mt19937_64 rng(46);
        int certified = 0;
        for (int k = 0; k < 30; ++k) {
            const auto m = oracle::random_model(k % 2 ? CellKind::lstm : CellKind::gru, 2, 2, 2, rng);
            Sample s{oracle::random_sequence(2, 2, rng), 0};
            s.label = predict(m, s.frames);
            const auto spec = PerturbationSpec::all_frame(0.1);
            if (!certify(m, s, spec, DomainKind::interzono).certified) continue;
            ++certified;
            AttackConfig cfg;
            cfg.epsilon = 0.1;
            cfg.restarts = 50;
            cfg.seed = static_cast<std::uint64_t>(k);
            CHECK_FALSE(pgd(m, s, cfg).success);
        }
        CHECK(certified > 0);
    }

    TEST_CASE("one-frame attacks are no stronger than all-frame attacks") {
        std::mt19937_64 rng(47);
        const auto m = oracle::random_model(CellKind::lstm, 2, 4, 2, rng, 1.5);
        Dataset data;
        for (int i = 0; i < 30; ++i) {
            Sample s{oracle::random_sequence(3, 2, rng), 0};
            s.label = predict(m, s.frames);
            data.push_back(std::move(s));
        }
        AttackConfig all;
        all.epsilon = 0.3;
        all.restarts = 20;
        AttackConfig one = all;
        one.strategy = Strategy::one_frame;
        one.frame = 2;
        const auto ra = empirical_robust_accuracy(m, data, all, 1);
        const auto ro = empirical_robust_accuracy(m, data, one, 1);
        CHECK(ro.robust_accuracy >= ra.robust_accuracy);
    }

    TEST_CASE("frame-gap witness search finds a re-verifiable instance") {
        WitnessSearchConfig cfg;
        cfg.seed = 1;
        cfg.models = 100;
        const auto w = find_frame_gap_witness(cfg);
        REQUIRE(w.has_value());
        CHECK(w->epsilon > 0.0);
        CHECK(verify_witness(*w, cfg.domain));
        CHECK(max_frame_distance(w->adversarial, w->sample.frames) <= w->epsilon + 1e-12);
    }

    TEST_CASE("attack parameters are validated") {
        const auto m = make_model(CellKind::vanilla, 1, 1, 2);
        AttackConfig cfg;
        cfg.epsilon = 0.1;
        cfg.steps = 0;
        CHECK_THROWS_AS(pgd(m, Sample{{{0.0}}, 0}, cfg), std::invalid_argument);
    }
}
