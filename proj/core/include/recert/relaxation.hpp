#pragma once

// Sound linear relaxations of the recurrent-cell non-linearities and the
// zonotope transformers built from them.

#include <string_view>

#include "recert/zonotope.hpp"

namespace recert {

enum class Activation { identity, tanh, sigmoid };

std::string_view to_string(Activation f);

template <class S>
S activate(Activation f, const S& x);

template <class S>
S activate_derivative(Activation f, const S& x);

/// Two parallel lines y = k x + c (upper) and y = k x + d (lower) enclosing f on [l, u].
template <class S>
struct ChordRelaxation {
    Vector<S> slope;
    Vector<S> upper_offset;
    Vector<S> lower_offset;
};

/// Chord slope k = (f(u) - f(l)) / (u - l), offsets from the max/min of f(x) - k x
/// over the endpoints and the interior points where f'(x) = k.
/// Intervals narrower than 1e-12 fall back to the tangent at the midpoint.
template <class S>
ChordRelaxation<S> chord_relaxation(const IntervalBounds<S>& bounds, Activation f);

/// Parallelogram transformer: center*k + (c+d)/2, generators scaled by k, plus
/// one fresh axis-aligned generator (c-d)/2 per coordinate. `bounds` must
/// enclose every coordinate of the concrete values `z` stands for.
template <class S>
Zonotope<S> elementwise_zono(const Zonotope<S>& z, const IntervalBounds<S>& bounds, Activation f, NoisePool& pool);

/// Image interval [f(l), f(u)] of a monotone activation as an axis-aligned box.
template <class S>
Zonotope<S> box_transform(const IntervalBounds<S>& bounds, Activation f, NoisePool& pool);

/// Bounding planes a x + b y + {lower, upper} of sigmoid(x) * tanh(y) on a box.
template <class S>
struct PlaneRelaxation {
    Vector<S> slope_x;
    Vector<S> slope_y;
    Vector<S> upper_offset;
    Vector<S> lower_offset;
};

/// Grid resolution (per axis) used to bound sigmoid(x)*tanh(y) - a x - b y.
inline constexpr int kPlaneGrid = 64;

/// Slopes are the mean corner partial derivatives. Offsets come from a
/// kPlaneGrid x kPlaneGrid vertex scan plus a second-order Taylor remainder
/// bound over each grid cell, so the planes enclose the function on the whole box.
template <class S>
PlaneRelaxation<S> sigma_tanh_planes(const IntervalBounds<S>& x_bounds, const IntervalBounds<S>& y_bounds);

/// Zonotope transformer for sigmoid(x) * tanh(y) with externally supplied bounds.
template <class S>
Zonotope<S> sigma_tanh_zono(const Zonotope<S>& zx, const Zonotope<S>& zy, const IntervalBounds<S>& x_bounds,
                            const IntervalBounds<S>& y_bounds, NoisePool& pool);

/// Elementwise product of two zonotopes over a shared symbol pool: exact
/// bilinear part, eps_i^2 terms centered on [0, 1], remainder on one fresh
/// symbol per coordinate.
template <class S>
Zonotope<S> hadamard_zono(const Zonotope<S>& zx, const Zonotope<S>& zy, NoisePool& pool);

}  // namespace recert
