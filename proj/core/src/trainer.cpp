#include "recert/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "recert/attacks.hpp"
#include "recert/loss.hpp"
#include "recert/parallel.hpp"

namespace recert {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <class S>
struct SampleLoss {
    S standard;
    S robust;
    S combined;
};

template <class S>
Sequence<S> cast_sequence(const Sequence<double>& frames) {
    Sequence<S> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        out.push_back(cast_vector<S>(f));
    }
    return out;
}

template <class S>
SampleLoss<S> sample_loss(const Model<S>& model, const Sample& sample, const Schedule& sched,
                          const RobustTerm& robust) {
    const S standard = cross_entropy(forward_concrete(model, cast_sequence<S>(sample.frames)), sample.label);
    S robust_value(0.0);
    if (sched.lambda > 0.0) {
        switch (robust.mode) {
            case TrainMode::certified: {
                NoisePool pool;
                const auto inputs = build_input_domain<S>(sample.frames, PerturbationSpec::all_frame(sched.epsilon),
                                                          robust.domain, pool);
                robust_value = robustness_loss(forward_abstract(model, inputs, pool), sample.label);
                break;
            }
            case TrainMode::at_fgsm:
            case TrainMode::at_pgd: {
                if (robust.adversarial == nullptr) {
                    throw std::invalid_argument("adversarial training needs an adversarial example");
                }
                robust_value =
                    cross_entropy(forward_concrete(model, cast_sequence<S>(*robust.adversarial)), sample.label);
                break;
            }
            case TrainMode::regular:
                break;
        }
    }
    const S combined = sched.lambda > 0.0 ? combined_loss(standard, robust_value, sched.lambda) : standard;
    return SampleLoss<S>{standard, robust_value, combined};
}

LossBreakdown breakdown(double standard, double robust, double combined, const Schedule& sched) {
    return LossBreakdown{standard, robust, combined, sched.epsilon, sched.lambda};
}

bool finite(const LossBreakdown& l) {
    return std::isfinite(l.standard_loss) && std::isfinite(l.robust_loss) && std::isfinite(l.combined_loss);
}

}  // namespace

std::string_view to_string(TrainMode mode) {
    switch (mode) {
        case TrainMode::regular:
            return "regular";
        case TrainMode::at_fgsm:
            return "at-fgsm";
        case TrainMode::at_pgd:
            return "at-pgd";
        case TrainMode::certified:
            return "certified";
    }
    return "unknown";
}

TrainMode parse_train_mode(std::string_view text) {
    if (text == "regular") return TrainMode::regular;
    if (text == "at-fgsm" || text == "at_fgsm") return TrainMode::at_fgsm;
    if (text == "at-pgd" || text == "at_pgd") return TrainMode::at_pgd;
    if (text == "certified") return TrainMode::certified;
    throw std::invalid_argument("unknown training mode '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("train config: momentum must lie in [0, 1)");
    if (epsilon_train < 0.0) throw std::invalid_argument("train config: epsilon_train must be non-negative");
    if (lambda_max < 0.0 || lambda_max > 1.0) throw std::invalid_argument("train config: lambda_max must lie in [0, 1]");
    if (!(ramp_fraction > 0.0) || ramp_fraction > 1.0) {
        throw std::invalid_argument("train config: ramp_fraction must lie in (0, 1]");
    }
    if (attack_steps < 1) throw std::invalid_argument("train config: attack_steps must be >= 1");
}

Schedule schedule(int epoch, const TrainConfig& cfg) {
    if (epoch < 0 || epoch >= cfg.epochs) {
        throw std::out_of_range("schedule: epoch " + std::to_string(epoch) + " outside [0, " +
                                std::to_string(cfg.epochs) + ")");
    }
    const double ramp_epochs = cfg.ramp_fraction * cfg.epochs;
    const double progress = std::min(1.0, static_cast<double>(epoch) / ramp_epochs);
    Schedule s{progress * cfg.epsilon_train, progress * cfg.lambda_max};
    if (cfg.mode == TrainMode::regular) {
        s.lambda = 0.0;
    }
    return s;
}

LossBreakdown evaluate_loss(const Model<double>& model, const Sample& sample, const Schedule& sched,
                            const RobustTerm& robust) {
    const SampleLoss<double> l = sample_loss(model, sample, sched, robust);
    return breakdown(l.standard, l.robust, l.combined, sched);
}

LossGradient loss_and_gradient(const Model<double>& model, const Sample& sample, const Schedule& sched,
                               const RobustTerm& robust) {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    Model<ad::Var> params = cast_model<ad::Var>(model);
    std::vector<std::int64_t> leaves;
    leaves.reserve(parameter_count(model));
    for_each_parameter(params, [&](ad::Var& p) {
        p = ad::Var::leaf(p.value());
        leaves.push_back(p.index());
    });
    const SampleLoss<ad::Var> l = sample_loss(params, sample, sched, robust);
    const std::vector<double> adj = tape.adjoints(l.combined.index());
    LossGradient out;
    out.loss = breakdown(l.standard.value(), l.robust.value(), l.combined.value(), sched);
    out.gradient.resize(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        out.gradient[i] = adj[static_cast<std::size_t>(leaves[i])];
    }
    out.tape_nodes = tape.size();
    return out;
}

GradCheckReport grad_check(const Model<double>& model, const Sample& sample, const Schedule& sched,
                           const RobustTerm& robust, double tol, double step) {
    const LossGradient analytic = loss_and_gradient(model, sample, sched, robust);
    std::vector<double> params = flatten_parameters(model);
    Model<double> probe = model;
    GradCheckReport report;
    std::vector<GradCheckEntry> entries;
    entries.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + step;
        assign_parameters(probe, params);
        const double up = evaluate_loss(probe, sample, sched, robust).combined_loss;
        params[i] = saved - step;
        assign_parameters(probe, params);
        const double down = evaluate_loss(probe, sample, sched, robust).combined_loss;
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double a = analytic.gradient[i];
        const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
        entries.push_back(GradCheckEntry{i, a, numeric, std::fabs(a - numeric) / denom});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const GradCheckEntry& x, const GradCheckEntry& y) { return x.relative_error > y.relative_error; });
    report.max_relative_error = entries.empty() ? 0.0 : entries.front().relative_error;
    report.passed = report.max_relative_error <= tol;
    entries.resize(std::min<std::size_t>(entries.size(), 5));
    report.worst = std::move(entries);
    return report;
}

Trainer::Trainer(Model<double> model, TrainConfig cfg, std::size_t threads)
    : model_(std::move(model)), cfg_(cfg), velocity_(parameter_count(model_), 0.0), threads_(threads) {
    cfg_.validate();
    validate(model_);
}

EpochMetrics Trainer::train_epoch(const Dataset& train_set, int epoch) {
    if (train_set.empty()) {
        throw std::invalid_argument("train_epoch: empty dataset");
    }
    const Schedule sched = schedule(epoch, cfg_);
    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.epsilon = sched.epsilon;
    metrics.lambda = sched.lambda;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> params = flatten_parameters(model_);
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg_.batch_size) {
        const std::size_t end = std::min(order.size(), begin + cfg_.batch_size);
        const std::size_t count = end - begin;
        std::vector<LossGradient> grads(count);
        parallel_for(
            count,
            [&](std::size_t k) {
                const std::size_t idx = order[begin + k];
                const Sample& sample = train_set[idx];
                RobustTerm robust{cfg_.mode, cfg_.domain, nullptr};
                Sequence<double> adversarial;
                if (sched.lambda > 0.0 && (cfg_.mode == TrainMode::at_fgsm || cfg_.mode == TrainMode::at_pgd)) {
                    AttackConfig attack;
                    attack.epsilon = sched.epsilon;
                    attack.steps = cfg_.attack_steps;
                    attack.restarts = 1;
                    attack.seed = mix_seed(cfg_.seed, static_cast<std::uint64_t>(epoch) * train_set.size() + idx);
                    adversarial = cfg_.mode == TrainMode::at_fgsm ? fgsm(model_, sample, attack)
                                                                  : pgd(model_, sample, attack).adversarial;
                    robust.adversarial = &adversarial;
                }
                grads[k] = loss_and_gradient(model_, sample, sched, robust);
            },
            threads_);

        std::vector<double> total(params.size(), 0.0);
        bool ok = true;
        for (const auto& g : grads) {
            if (!finite(g.loss)) {
                ok = false;
                break;
            }
            for (std::size_t i = 0; i < total.size(); ++i) {
                total[i] += g.gradient[i];
            }
            metrics.standard_loss += g.loss.standard_loss;
            metrics.robust_loss += g.loss.robust_loss;
            metrics.combined_loss += g.loss.combined_loss;
        }
        if (!ok || !std::all_of(total.begin(), total.end(), [](double v) { return std::isfinite(v); })) {
            metrics.aborted = true;
            break;
        }
        seen += count;
        const double scale = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < params.size(); ++i) {
            velocity_[i] = cfg_.momentum * velocity_[i] + total[i] * scale;
            params[i] -= cfg_.learning_rate * velocity_[i];
        }
        if (!std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); })) {
            metrics.aborted = true;
            break;
        }
        assign_parameters(model_, params);
    }
    if (seen > 0) {
        metrics.standard_loss /= static_cast<double>(seen);
        metrics.robust_loss /= static_cast<double>(seen);
        metrics.combined_loss /= static_cast<double>(seen);
    }
    std::size_t correct = 0;
    for (const auto& s : train_set) {
        correct += predict(model_, s.frames) == s.label ? 1 : 0;
    }
    metrics.clean_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    return metrics;
}

Model<double> train(const Model<double>& init, const Dataset& train_set, const TrainConfig& cfg,
                    const std::function<void(const EpochMetrics&)>& on_epoch, const Dataset* eval,
                    std::size_t threads) {
    Trainer trainer(init, cfg, threads);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochMetrics m = trainer.train_epoch(train_set, epoch);
        if (eval != nullptr && !eval->empty()) {
            m.certified_accuracy = certified_accuracy(trainer.model(), *eval,
                                                      PerturbationSpec::all_frame(cfg.epsilon_train), cfg.domain,
                                                      threads)
                                       .certified_accuracy;
        }
        if (on_epoch) {
            on_epoch(m);
        }
        if (m.aborted) {
            break;
        }
    }
    return trainer.model();
}

}  // namespace recert
