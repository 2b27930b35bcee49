#include "recert/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "recert/loss.hpp"
#include "recert/parallel.hpp"

namespace recert {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Differentiates the loss w.r.t. the inputs of a fixed model.
class InputGradientOracle {
public:
    explicit InputGradientOracle(const Model<double>& model) : model_(cast_model<ad::Var>(model)) {}

    InputGradient operator()(const Sequence<double>& frames, std::size_t label) {
        tape_.clear();
        ad::TapeScope scope(tape_);
        Sequence<ad::Var> x(frames.size());
        for (std::size_t t = 0; t < frames.size(); ++t) {
            x[t].reserve(frames[t].size());
            for (double v : frames[t]) {
                x[t].push_back(ad::Var::leaf(v));
            }
        }
        const ad::Var loss = cross_entropy(forward_concrete(model_, x), label);
        const std::vector<double> adj = tape_.adjoints(loss.index());
        InputGradient out{loss.value(), Sequence<double>(frames.size())};
        for (std::size_t t = 0; t < frames.size(); ++t) {
            out.grad[t].resize(frames[t].size());
            for (std::size_t j = 0; j < frames[t].size(); ++j) {
                out.grad[t][j] = adj[static_cast<std::size_t>(x[t][j].index())];
            }
        }
        return out;
    }

private:
    Model<ad::Var> model_;
    ad::Tape tape_;
};

void signed_step(Sequence<double>& x, const Sequence<double>& grad, double step, const AttackConfig& cfg) {
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!cfg.perturbs(t)) {
            continue;
        }
        for (std::size_t j = 0; j < x[t].size(); ++j) {
            x[t][j] += step * sign(grad[t][j]);
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

InputGradient input_gradient(const Model<double>& model, const Sequence<double>& frames, std::size_t label) {
    InputGradientOracle oracle(model);
    return oracle(frames, label);
}

void project_to_ball(Sequence<double>& frames, const Sequence<double>& clean, const AttackConfig& cfg) {
    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (std::size_t j = 0; j < frames[t].size(); ++j) {
            if (!cfg.perturbs(t)) {
                frames[t][j] = clean[t][j];
            } else {
                frames[t][j] = std::clamp(frames[t][j], clean[t][j] - cfg.epsilon, clean[t][j] + cfg.epsilon);
            }
        }
    }
}

double max_frame_distance(const Sequence<double>& a, const Sequence<double>& b) {
    double m = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        for (std::size_t j = 0; j < a[t].size(); ++j) {
            m = std::max(m, std::fabs(a[t][j] - b[t][j]));
        }
    }
    return m;
}

Sequence<double> fgsm(const Model<double>& model, const Sample& sample, const AttackConfig& cfg) {
    const InputGradient g = input_gradient(model, sample.frames, sample.label);
    Sequence<double> x = sample.frames;
    signed_step(x, g.grad, cfg.epsilon, cfg);
    project_to_ball(x, sample.frames, cfg);
    return x;
}

AttackResult pgd(const Model<double>& model, const Sample& sample, const AttackConfig& cfg) {
    if (cfg.steps < 1 || cfg.restarts < 1) {
        throw std::invalid_argument("pgd: steps and restarts must be at least 1");
    }
    InputGradientOracle oracle(model);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double step = cfg.effective_step();
    AttackResult result{sample.frames, false};
    if (predict(model, sample.frames) != sample.label) {
        result.success = true;
        return result;
    }
    if (cfg.epsilon <= 0.0) {
        return result;
    }
    for (int r = 0; r < cfg.restarts; ++r) {
        Sequence<double> x = sample.frames;
        for (std::size_t t = 0; t < x.size(); ++t) {
            if (!cfg.perturbs(t)) {
                continue;
            }
            for (auto& v : x[t]) {
                v += cfg.epsilon * unit(rng);
            }
        }
        project_to_ball(x, sample.frames, cfg);
        if (predict(model, x) != sample.label) {
            return AttackResult{std::move(x), true};
        }
        for (int s = 0; s < cfg.steps; ++s) {
            const InputGradient g = oracle(x, sample.label);
            signed_step(x, g.grad, step, cfg);
            project_to_ball(x, sample.frames, cfg);
            if (predict(model, x) != sample.label) {
                return AttackResult{std::move(x), true};
            }
        }
        result.adversarial = std::move(x);
    }
    return result;
}

EmpiricalRobustness empirical_robust_accuracy(const Model<double>& model, const Dataset& data,
                                              const AttackConfig& cfg, std::size_t threads) {
    if (data.empty()) {
        throw std::invalid_argument("empirical_robust_accuracy: empty dataset");
    }
    std::vector<char> robust(data.size(), 0);
    std::vector<char> correct(data.size(), 0);
    parallel_for(
        data.size(),
        [&](std::size_t i) {
            correct[i] = predict(model, data[i].frames) == data[i].label;
            if (!correct[i]) {
                return;
            }
            AttackConfig c = cfg;
            c.seed = mix_seed(cfg.seed, i);
            robust[i] = !pgd(model, data[i], c).success;
        },
        threads);
    EmpiricalRobustness out;
    std::size_t nr = 0;
    std::size_t nc = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.robust.push_back(robust[i] != 0);
        nr += robust[i] ? 1 : 0;
        nc += correct[i] ? 1 : 0;
    }
    out.robust_accuracy = static_cast<double>(nr) / static_cast<double>(data.size());
    out.clean_accuracy = static_cast<double>(nc) / static_cast<double>(data.size());
    return out;
}

std::optional<FrameGapWitness> find_frame_gap_witness(const WitnessSearchConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int m = 0; m < cfg.models; ++m) {
        Model<double> model = make_model(cfg.kind, cfg.input_size, cfg.hidden_size, 2);
        randomize(model, rng, 1.0);
        Sample sample;
        sample.frames.assign(cfg.frames, Vector<double>(cfg.input_size));
        for (auto& frame : sample.frames) {
            for (auto& v : frame) {
                v = normal(rng);
            }
        }
        sample.label = predict(model, sample.frames);
        for (double eps : cfg.epsilons) {
            if (eps <= 0.0) {
                continue;
            }
            bool one_frame_certified = true;
            for (std::size_t t = 0; t < cfg.frames && one_frame_certified; ++t) {
                one_frame_certified = certify(model, sample, PerturbationSpec::one_frame(eps, t), cfg.domain).certified;
            }
            if (!one_frame_certified) {
                break;
            }
            AttackConfig attack;
            attack.epsilon = eps;
            attack.restarts = cfg.attack_restarts;
            attack.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(m));
            const AttackResult r = pgd(model, sample, attack);
            if (r.success) {
                return FrameGapWitness{std::move(model), std::move(sample), eps, r.adversarial};
            }
        }
    }
    return std::nullopt;
}

bool verify_witness(const FrameGapWitness& w, DomainKind domain) {
    if (w.epsilon <= 0.0) {
        return false;
    }
    for (std::size_t t = 0; t < w.sample.frames.size(); ++t) {
        if (!certify(w.model, w.sample, PerturbationSpec::one_frame(w.epsilon, t), domain).certified) {
            return false;
        }
    }
    return max_frame_distance(w.adversarial, w.sample.frames) <= w.epsilon + 1e-12 &&
           predict(w.model, w.adversarial) != w.sample.label;
}

}  // namespace recert
