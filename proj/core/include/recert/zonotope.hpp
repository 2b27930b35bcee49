#pragma once

// Zonotope abstract domain over a shared, growing pool of noise symbols.
//
// A zonotope over n variables is center + sum_i g_i * eps_i with eps_i in
// [-1, 1]. Generators are stored sparsely by noise-symbol id, sorted
// ascending, so two zonotopes built in the same run correlate exactly on the
// symbols they share.

#include <cstdint>
#include <vector>

#include "recert/linalg.hpp"

namespace recert {

using SymbolId = std::uint64_t;

/// Hands out fresh noise-symbol ids for one certification (or training) run.
/// Ids are never reused.
class NoisePool {
public:
    SymbolId fresh() { return next_++; }

    /// Reserves `count` consecutive ids and returns the first one.
    SymbolId fresh_block(std::size_t count) {
        const SymbolId first = next_;
        next_ += count;
        return first;
    }

    std::uint64_t issued() const { return next_; }

private:
    SymbolId next_ = 0;
};

template <class S>
struct IntervalBounds {
    Vector<S> lower;
    Vector<S> upper;

    std::size_t size() const { return lower.size(); }
};

template <class S>
struct Generator {
    SymbolId symbol;
    Vector<S> coeffs;
};

template <class S>
class Zonotope {
public:
    Zonotope() = default;
    explicit Zonotope(Vector<S> center) : center_(std::move(center)) {}
    /// Generators must be sorted by symbol with unique ids and match the center length.
    Zonotope(Vector<S> center, std::vector<Generator<S>> generators);

    /// Builds a zonotope whose generator rows get consecutive fresh symbols from `pool`.
    static Zonotope from_rows(Vector<S> center, const std::vector<Vector<S>>& rows, NoisePool& pool);

    std::size_t dim() const { return center_.size(); }
    std::size_t noise_count() const { return generators_.size(); }

    const Vector<S>& center() const { return center_; }
    const std::vector<Generator<S>>& generators() const { return generators_; }
    Vector<S>& mutable_center() { return center_; }
    std::vector<Generator<S>>& mutable_generators() { return generators_; }

    bool is_point() const { return generators_.empty(); }

    /// Evaluates the affine form at a noise assignment. Symbols absent from
    /// `assignment` (or beyond its length) are taken as 0.
    Vector<double> evaluate(const std::vector<double>& assignment) const;

private:
    Vector<S> center_;
    std::vector<Generator<S>> generators_;
};

/// lower = c - sum |g_i|, upper = c + sum |g_i|.
template <class S>
IntervalBounds<S> concretize(const Zonotope<S>& z);

/// W z + b, exact. Noise count unchanged.
template <class S>
Zonotope<S> affine(const Zonotope<S>& z, const Matrix<S>& w, const Vector<S>& b);

/// Sum of two zonotopes over the shared symbol pool (generators merged by id).
template <class S>
Zonotope<S> add(const Zonotope<S>& a, const Zonotope<S>& b);

/// Axis-aligned box with one fresh symbol per coordinate.
template <class S>
Zonotope<S> box_zonotope(const IntervalBounds<S>& bounds, NoisePool& pool);

/// If the generator count exceeds `cap`, replaces the smallest-norm rows by one
/// axis-aligned box term per coordinate (fresh symbols). Sound, looser.
template <class S>
Zonotope<S> consolidate(const Zonotope<S>& z, std::size_t cap, NoisePool& pool);

}  // namespace recert
