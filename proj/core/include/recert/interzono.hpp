#pragma once

// InterZono: the intersection of a main zonotope, which carries correlations
// between variables, and a support zonotope, which only refines bounds.
//
// An InterZono without a support is the plain Zonotope pipeline: every
// transformer then uses the main domain's own bounds and skips the support
// work, so both pipelines share one implementation.

#include <optional>
#include <stdexcept>

#include "recert/relaxation.hpp"
#include "recert/zonotope.hpp"

namespace recert {

enum class DomainKind { zonotope, interzono };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view text);

/// Raised when refined bounds invert by more than kInvertedTolerance, which
/// means some transformer was unsound.
class InvertedBoundsError : public std::runtime_error {
public:
    InvertedBoundsError(std::size_t coordinate, double lower, double upper);
    std::size_t coordinate() const { return coordinate_; }

private:
    std::size_t coordinate_;
};

inline constexpr double kInvertedTolerance = 1e-9;

template <class S>
struct InterZono {
    Zonotope<S> main;
    std::optional<Zonotope<S>> support;

    std::size_t dim() const { return main.dim(); }
    DomainKind kind() const { return support ? DomainKind::interzono : DomainKind::zonotope; }
};

/// A point in the requested domain kind.
template <class S>
InterZono<S> point_domain(Vector<S> value, DomainKind kind);

/// main = z; support = interval hull of z (InterZono kind only).
template <class S>
InterZono<S> lift_to_interzono(const Zonotope<S>& z, NoisePool& pool);

/// Elementwise max of lower bounds and min of upper bounds. Inversions within
/// kInvertedTolerance are clamped to the midpoint; larger ones throw.
template <class S>
IntervalBounds<S> interzono_concretize(const InterZono<S>& d);

template <class S>
InterZono<S> interzono_affine(const InterZono<S>& d, const Matrix<S>& w, const Vector<S>& b);

/// wx * dx + wh * dh + b, exact on both components.
template <class S>
InterZono<S> interzono_affine2(const InterZono<S>& dx, const Matrix<S>& wx, const InterZono<S>& dh,
                               const Matrix<S>& wh, const Vector<S>& b);

/// Sum over the shared pool; the support is re-boxed at the interval sum of refined bounds.
template <class S>
InterZono<S> interzono_add(const InterZono<S>& a, const InterZono<S>& b, NoisePool& pool);

template <class S>
InterZono<S> elementwise_interzono(const InterZono<S>& d, Activation f, NoisePool& pool);

/// sigmoid(dx) * tanh(dy), elementwise, from pre-activations.
template <class S>
InterZono<S> sigma_tanh_product_interzono(const InterZono<S>& dx, const InterZono<S>& dy, NoisePool& pool);

/// dx * dy, elementwise, for already-transformed operands.
template <class S>
InterZono<S> hadamard_generic(const InterZono<S>& dx, const InterZono<S>& dy, NoisePool& pool);

}  // namespace recert
