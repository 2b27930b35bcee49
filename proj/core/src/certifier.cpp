#include "recert/certifier.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "recert/parallel.hpp"

namespace recert {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

PerturbationSpec parse_strategy(const std::string& text, double epsilon) {
    if (text == "all-frame" || text == "all_frame") {
        return PerturbationSpec::all_frame(epsilon);
    }
    const std::string prefix = "one-frame:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string index = text.substr(prefix.size());
        std::size_t used = 0;
        unsigned long t = 0;
        try {
            t = std::stoul(index, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != index.size()) {
            throw std::invalid_argument("bad frame index in strategy '" + text + "'");
        }
        return PerturbationSpec::one_frame(epsilon, t);
    }
    throw std::invalid_argument("unknown strategy '" + text + "' (expected all-frame or one-frame:<t>)");
}

std::string to_string(const PerturbationSpec& spec) {
    if (spec.strategy == Strategy::all_frame) {
        return "all-frame";
    }
    return "one-frame:" + std::to_string(spec.frame);
}

template <class S>
std::vector<InterZono<S>> build_input_domain(const Sequence<double>& frames, const PerturbationSpec& spec,
                                             DomainKind kind, NoisePool& pool) {
    if (spec.epsilon < 0.0) {
        throw std::invalid_argument("build_input_domain: epsilon must be non-negative");
    }
    if (spec.strategy == Strategy::one_frame && spec.frame >= frames.size()) {
        throw std::out_of_range("build_input_domain: one-frame index " + std::to_string(spec.frame) +
                                " out of range for sequence of length " + std::to_string(frames.size()));
    }
    std::vector<InterZono<S>> out;
    out.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
        Vector<S> center = cast_vector<S>(frames[t]);
        const bool perturbed =
            spec.epsilon > 0.0 && (spec.strategy == Strategy::all_frame || spec.frame == t);
        if (!perturbed) {
            out.push_back(point_domain(std::move(center), kind));
            continue;
        }
        const std::size_t d = center.size();
        std::vector<Vector<S>> rows(d, Vector<S>(d, S(0.0)));
        for (std::size_t j = 0; j < d; ++j) {
            rows[j][j] = S(spec.epsilon);
        }
        Zonotope<S> z = Zonotope<S>::from_rows(std::move(center), rows, pool);
        if (kind == DomainKind::interzono) {
            out.push_back(lift_to_interzono(z, pool));
        } else {
            out.push_back(InterZono<S>{std::move(z), std::nullopt});
        }
    }
    return out;
}

double MarginBounds::min_lower() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : margins) {
        m = std::min(m, c.lower);
    }
    return m;
}

template <class S>
std::vector<S> margin_lower_bounds_raw(const InterZono<S>& logits, std::size_t true_class) {
    const std::size_t classes = logits.dim();
    if (true_class >= classes) {
        throw std::out_of_range("margin_lower_bounds: class " + std::to_string(true_class) + " out of range");
    }
    std::vector<S> out;
    out.reserve(classes - 1);
    for (std::size_t f = 0; f < classes; ++f) {
        if (f == true_class) {
            continue;
        }
        Matrix<S> diff(1, classes);
        diff(0, true_class) = S(1.0);
        diff(0, f) = S(-1.0);
        const InterZono<S> margin = interzono_affine(logits, diff, Vector<S>(1, S(0.0)));
        out.push_back(interzono_concretize(margin).lower[0]);
    }
    return out;
}

MarginBounds margin_lower_bounds(const InterZono<double>& logits, std::size_t true_class) {
    const std::vector<double> raw = margin_lower_bounds_raw(logits, true_class);
    MarginBounds out{true_class, {}};
    std::size_t k = 0;
    for (std::size_t f = 0; f < logits.dim(); ++f) {
        if (f != true_class) {
            out.margins.push_back(ClassMargin{f, raw[k++]});
        }
    }
    return out;
}

std::size_t predict(const Model<double>& model, const Sequence<double>& frames) {
    const Vector<double> logits = forward_concrete(model, frames);
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

InterZono<double> abstract_logits(const Model<double>& model, const Sequence<double>& frames,
                                  const PerturbationSpec& spec, DomainKind domain, std::size_t generator_cap) {
    NoisePool pool;
    const auto inputs = build_input_domain<double>(frames, spec, domain, pool);
    return forward_abstract(model, inputs, pool, generator_cap);
}

CertificationResult certify(const Model<double>& model, const Sample& sample, const PerturbationSpec& spec,
                            DomainKind domain, std::size_t generator_cap) {
    CertificationResult result;
    const auto start = Clock::now();
    result.clean_correct = predict(model, sample.frames) == sample.label;
    try {
        const InterZono<double> logits = abstract_logits(model, sample.frames, spec, domain, generator_cap);
        result.margins = margin_lower_bounds(logits, sample.label);
        result.certified = result.clean_correct && result.margins.min_lower() > 0.0;
    } catch (const InvertedBoundsError& e) {
        result.certified = false;
        result.diagnostic = e.what();
    }
    result.elapsed_seconds = seconds_since(start);
    return result;
}

DatasetCertification certified_accuracy(const Model<double>& model, const Dataset& data, const PerturbationSpec& spec,
                                        DomainKind domain, std::size_t threads) {
    if (data.empty()) {
        throw std::invalid_argument("certified_accuracy: empty dataset");
    }
    DatasetCertification out;
    out.samples.resize(data.size());
    parallel_for(
        data.size(), [&](std::size_t i) { out.samples[i] = certify(model, data[i], spec, domain); }, threads);
    std::size_t certified = 0;
    std::size_t correct = 0;
    for (const auto& r : out.samples) {
        certified += r.certified ? 1 : 0;
        correct += r.clean_correct ? 1 : 0;
        out.invariant_violations += r.diagnostic ? 1 : 0;
        out.total_seconds += r.elapsed_seconds;
    }
    out.certified_accuracy = static_cast<double>(certified) / static_cast<double>(data.size());
    out.clean_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return out;
}

RadiusResult max_certified_radius(const Model<double>& model, const Sample& sample, double hi, double tol,
                                  DomainKind domain, Strategy strategy, std::size_t frame) {
    if (tol <= 0.0) {
        throw std::invalid_argument("max_certified_radius: tol must be positive");
    }
    auto certifies = [&](double eps) {
        const PerturbationSpec spec{eps, strategy, frame};
        return certify(model, sample, spec, domain).certified;
    };
    RadiusResult out;
    out.certified_at_lower = certifies(0.0);
    if (!out.certified_at_lower || hi <= 0.0) {
        return out;
    }
    if (certifies(hi)) {
        out.radius = hi;
        return out;
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (certifies(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.radius = lo;
    return out;
}

DomainComparison compare_domains(const Model<double>& model, const Dataset& data, const PerturbationSpec& spec,
                                 std::size_t threads) {
    if (data.empty()) {
        throw std::invalid_argument("compare_domains: empty dataset");
    }
    DomainComparison out;
    out.rows.resize(data.size());
    std::vector<std::size_t> violations(data.size(), 0);
    parallel_for(
        data.size(),
        [&](std::size_t i) {
            const CertificationResult z = certify(model, data[i], spec, DomainKind::zonotope);
            const CertificationResult d = certify(model, data[i], spec, DomainKind::interzono);
            out.rows[i] = DomainComparisonRow{i, z.certified, d.certified, z.elapsed_seconds * 1e3,
                                              d.elapsed_seconds * 1e3};
            violations[i] = (z.diagnostic ? 1 : 0) + (d.diagnostic ? 1 : 0);
        },
        threads);
    std::size_t zc = 0;
    std::size_t dc = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& r = out.rows[i];
        zc += r.zonotope_certified ? 1 : 0;
        dc += r.interzono_certified ? 1 : 0;
        out.zonotope_seconds += r.zonotope_ms * 1e-3;
        out.interzono_seconds += r.interzono_ms * 1e-3;
        out.invariant_violations += violations[i];
    }
    out.zonotope_accuracy = static_cast<double>(zc) / static_cast<double>(data.size());
    out.interzono_accuracy = static_cast<double>(dc) / static_cast<double>(data.size());
    return out;
}

template std::vector<InterZono<double>> build_input_domain(const Sequence<double>&, const PerturbationSpec&,
                                                           DomainKind, NoisePool&);
template std::vector<InterZono<ad::Var>> build_input_domain(const Sequence<double>&, const PerturbationSpec&,
                                                            DomainKind, NoisePool&);
template std::vector<double> margin_lower_bounds_raw(const InterZono<double>&, std::size_t);
template std::vector<ad::Var> margin_lower_bounds_raw(const InterZono<ad::Var>&, std::size_t);

}  // namespace recert
