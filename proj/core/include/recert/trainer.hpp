#pragma once

// Certified training: gradient descent on a mix of the standard cross-entropy
// and the worst-case cross-entropy over the abstract output, plus regular and
// adversarial-training baselines.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "recert/certifier.hpp"

namespace recert {

enum class TrainMode { regular, at_fgsm, at_pgd, certified };

std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view text);

struct TrainConfig {
    int epochs = 20;
    std::size_t batch_size = 16;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double epsilon_train = 0.1;
    double lambda_max = 0.5;
    double ramp_fraction = 0.5;
    std::uint64_t seed = 0;
    TrainMode mode = TrainMode::regular;
    DomainKind domain = DomainKind::interzono;
    /// PGD iterations used to generate examples in at_pgd mode.
    int attack_steps = 10;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct Schedule {
    double epsilon = 0.0;
    double lambda = 0.0;
};

/// Linear ramp of (epsilon, lambda) from 0 to (epsilon_train, lambda_max) over
/// ramp_fraction * epochs epochs, then constant. Regular mode always has lambda 0.
Schedule schedule(int epoch, const TrainConfig& cfg);

struct LossBreakdown {
    double standard_loss = 0.0;
    double robust_loss = 0.0;
    double combined_loss = 0.0;
    double epsilon_used = 0.0;
    double lambda_used = 0.0;
};

/// The robust term: abstract worst case (certified) or CE on a given adversarial input (AT modes).
struct RobustTerm {
    TrainMode mode = TrainMode::certified;
    DomainKind domain = DomainKind::interzono;
    /// Used in at_fgsm / at_pgd modes.
    const Sequence<double>* adversarial = nullptr;
};

/// Loss of one sample without derivatives.
LossBreakdown evaluate_loss(const Model<double>& model, const Sample& sample, const Schedule& sched,
                            const RobustTerm& robust);

struct LossGradient {
    LossBreakdown loss;
    /// d combined_loss / d parameter, in for_each_parameter order.
    std::vector<double> gradient;
    std::size_t tape_nodes = 0;
};

/// Records the forward pass on a tape (the value graph) and runs reverse mode.
LossGradient loss_and_gradient(const Model<double>& model, const Sample& sample, const Schedule& sched,
                               const RobustTerm& robust);

struct GradCheckEntry {
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double relative_error = 0.0;
};

struct GradCheckReport {
    double max_relative_error = 0.0;
    bool passed = false;
    /// Worst entries first.
    std::vector<GradCheckEntry> worst;
};

/// Central finite differences with the given step against reverse mode, for
/// every parameter. Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradCheckReport grad_check(const Model<double>& model, const Sample& sample, const Schedule& sched,
                           const RobustTerm& robust, double tol = 1e-4, double step = 1e-5);

struct EpochMetrics {
    int epoch = 0;
    double standard_loss = 0.0;
    double robust_loss = 0.0;
    double combined_loss = 0.0;
    double epsilon = 0.0;
    double lambda = 0.0;
    double clean_accuracy = 0.0;
    std::optional<double> certified_accuracy;
    bool aborted = false;
};

/// SGD with momentum over a fixed model. Deterministic for a given seed:
/// per-sample gradients are reduced in sample order regardless of threading.
class Trainer {
public:
    Trainer(Model<double> model, TrainConfig cfg, std::size_t threads = 0);

    /// One pass over `train` under schedule(epoch). On a non-finite loss the
    /// epoch stops early (parameters keep their last finite values) and the
    /// metrics are flagged aborted; the same happens if an update overflows.
    EpochMetrics train_epoch(const Dataset& train, int epoch);

    const Model<double>& model() const { return model_; }
    const TrainConfig& config() const { return cfg_; }

private:
    Model<double> model_;
    TrainConfig cfg_;
    std::vector<double> velocity_;
    std::size_t threads_;
};

/// Runs every epoch; `on_epoch` sees each epoch's metrics (after optional
/// certification on `eval` at epsilon_train when provided).
Model<double> train(const Model<double>& init, const Dataset& train_set, const TrainConfig& cfg,
                    const std::function<void(const EpochMetrics&)>& on_epoch = {},
                    const Dataset* eval = nullptr, std::size_t threads = 0);

}  // namespace recert
