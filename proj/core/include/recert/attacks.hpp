#pragma once

// Gradient-sign attacks on frame embeddings inside per-frame l-infinity balls.

#include <cstdint>
#include <optional>
#include <vector>

#include "recert/certifier.hpp"

namespace recert {

struct AttackConfig {
    double epsilon = 0.0;
    int steps = 40;
    /// Step size; <= 0 means 2.5 * epsilon / steps.
    double step_size = 0.0;
    int restarts = 10;
    Strategy strategy = Strategy::all_frame;
    std::size_t frame = 0;
    std::uint64_t seed = 0;

    double effective_step() const { return step_size > 0.0 ? step_size : 2.5 * epsilon / steps; }
    bool perturbs(std::size_t t) const { return strategy == Strategy::all_frame || frame == t; }
};

/// Cross-entropy and its gradient with respect to the input frames.
struct InputGradient {
    double loss = 0.0;
    Sequence<double> grad;
};

InputGradient input_gradient(const Model<double>& model, const Sequence<double>& frames, std::size_t label);

/// Projects every perturbed frame back into its ball around `clean`; unperturbed frames are reset.
void project_to_ball(Sequence<double>& frames, const Sequence<double>& clean, const AttackConfig& cfg);

/// Largest per-frame l-infinity distance between two sequences.
double max_frame_distance(const Sequence<double>& a, const Sequence<double>& b);

/// x' = clip(x + eps * sign(grad CE)), sign(0) = 0.
Sequence<double> fgsm(const Model<double>& model, const Sample& sample, const AttackConfig& cfg);

struct AttackResult {
    Sequence<double> adversarial;
    bool success = false;
};

/// Random start per restart, then `steps` signed-gradient steps with projection.
/// Returns the first example whose prediction differs from the label, or the
/// last iterate when none does.
AttackResult pgd(const Model<double>& model, const Sample& sample, const AttackConfig& cfg);

struct EmpiricalRobustness {
    double robust_accuracy = 0.0;
    double clean_accuracy = 0.0;
    std::vector<bool> robust;
};

/// Fraction of samples that are correctly classified and survive PGD.
EmpiricalRobustness empirical_robust_accuracy(const Model<double>& model, const Dataset& data,
                                              const AttackConfig& cfg, std::size_t threads = 0);

struct WitnessSearchConfig {
    std::uint64_t seed = 0;
    int models = 200;
    CellKind kind = CellKind::vanilla;
    std::size_t hidden_size = 2;
    std::size_t input_size = 2;
    std::size_t frames = 3;
    std::vector<double> epsilons{0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
    DomainKind domain = DomainKind::interzono;
    int attack_restarts = 20;
};

/// An instance certified against every one-frame adversary but broken by an
/// all-frame attack at the same radius.
struct FrameGapWitness {
    Model<double> model;
    Sample sample;
    double epsilon = 0.0;
    Sequence<double> adversarial;
};

std::optional<FrameGapWitness> find_frame_gap_witness(const WitnessSearchConfig& cfg);

/// Re-checks a witness: one-frame certified for every t, the adversarial
/// example lies in the all-frame ball, and it is misclassified.
bool verify_witness(const FrameGapWitness& w, DomainKind domain);

}  // namespace recert
