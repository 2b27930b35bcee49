#pragma once

// Perturbation spaces, certified margins and dataset-level certification.

#include <optional>
#include <string>
#include <vector>

#include "recert/propagation.hpp"

namespace recert {

enum class Strategy { all_frame, one_frame };

/// l-infinity ball of radius epsilon around every frame (all_frame) or around
/// frame `frame` only (one_frame).
struct PerturbationSpec {
    double epsilon = 0.0;
    Strategy strategy = Strategy::all_frame;
    std::size_t frame = 0;

    static PerturbationSpec all_frame(double eps) { return {eps, Strategy::all_frame, 0}; }
    static PerturbationSpec one_frame(double eps, std::size_t t) { return {eps, Strategy::one_frame, t}; }
};

/// "all-frame" or "one-frame:<t>".
PerturbationSpec parse_strategy(const std::string& text, double epsilon);
std::string to_string(const PerturbationSpec& spec);

struct Sample {
    Sequence<double> frames;
    std::size_t label = 0;
};

using Dataset = std::vector<Sample>;

/// One abstract domain per frame. all_frame: every coordinate of every frame
/// gets its own fresh symbol of magnitude epsilon (T*d symbols). one_frame(t):
/// only frame t is a ball; the rest are points.
template <class S>
std::vector<InterZono<S>> build_input_domain(const Sequence<double>& frames, const PerturbationSpec& spec,
                                             DomainKind kind, NoisePool& pool);

struct ClassMargin {
    std::size_t other_class;
    double lower;
};

/// Lower bounds of y_t - y_f for every f != t, computed through the exact
/// affine map e_t - e_f inside the domain.
struct MarginBounds {
    std::size_t true_class = 0;
    std::vector<ClassMargin> margins;

    double min_lower() const;
};

template <class S>
std::vector<S> margin_lower_bounds_raw(const InterZono<S>& logits, std::size_t true_class);

MarginBounds margin_lower_bounds(const InterZono<double>& logits, std::size_t true_class);

struct CertificationResult {
    bool certified = false;
    bool clean_correct = false;
    MarginBounds margins;
    double elapsed_seconds = 0.0;
    /// Set when propagation hit an invariant violation (e.g. inverted bounds).
    std::optional<std::string> diagnostic;
};

std::size_t predict(const Model<double>& model, const Sequence<double>& frames);

/// certified = clean prediction correct and every margin lower bound > 0.
/// generator_cap > 0 enables generator consolidation (sound, looser).
CertificationResult certify(const Model<double>& model, const Sample& sample, const PerturbationSpec& spec,
                            DomainKind domain, std::size_t generator_cap = 0);

InterZono<double> abstract_logits(const Model<double>& model, const Sequence<double>& frames,
                                  const PerturbationSpec& spec, DomainKind domain, std::size_t generator_cap = 0);

struct DatasetCertification {
    double certified_accuracy = 0.0;
    double clean_accuracy = 0.0;
    std::size_t invariant_violations = 0;
    double total_seconds = 0.0;
    std::vector<CertificationResult> samples;
};

/// threads = 0 uses thread_count(). Per-sample results are ordered by index.
DatasetCertification certified_accuracy(const Model<double>& model, const Dataset& data, const PerturbationSpec& spec,
                                        DomainKind domain, std::size_t threads = 0);

struct RadiusResult {
    double radius = 0.0;
    /// False when the sample is not certifiable even at the lower end (misclassified).
    bool certified_at_lower = false;
};

/// Bisection for the largest epsilon in [0, hi] that still certifies, to within tol.
RadiusResult max_certified_radius(const Model<double>& model, const Sample& sample, double hi, double tol,
                                  DomainKind domain, Strategy strategy = Strategy::all_frame, std::size_t frame = 0);

struct DomainComparisonRow {
    std::size_t sample_id = 0;
    bool zonotope_certified = false;
    bool interzono_certified = false;
    double zonotope_ms = 0.0;
    double interzono_ms = 0.0;
};

struct DomainComparison {
    double zonotope_accuracy = 0.0;
    double interzono_accuracy = 0.0;
    double zonotope_seconds = 0.0;
    double interzono_seconds = 0.0;
    std::size_t invariant_violations = 0;
    std::vector<DomainComparisonRow> rows;
};

DomainComparison compare_domains(const Model<double>& model, const Dataset& data, const PerturbationSpec& spec,
                                 std::size_t threads = 0);

}  // namespace recert
