#include "recert/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace recert {

template <class S>
Zonotope<S>::Zonotope(Vector<S> center, std::vector<Generator<S>> generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        if (generators_[i].coeffs.size() != center_.size()) {
            throw ShapeError("Zonotope: generator row length " + std::to_string(generators_[i].coeffs.size()) +
                             " does not match center length " + std::to_string(center_.size()));
        }
        if (i > 0 && generators_[i - 1].symbol >= generators_[i].symbol) {
            throw std::invalid_argument("Zonotope: generator symbols must be strictly increasing");
        }
    }
}

template <class S>
Zonotope<S> Zonotope<S>::from_rows(Vector<S> center, const std::vector<Vector<S>>& rows, NoisePool& pool) {
    std::vector<Generator<S>> gens;
    gens.reserve(rows.size());
    const SymbolId first = pool.fresh_block(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        gens.push_back(Generator<S>{first + i, rows[i]});
    }
    return Zonotope(std::move(center), std::move(gens));
}

template <class S>
Vector<double> Zonotope<S>::evaluate(const std::vector<double>& assignment) const {
    Vector<double> out(center_.size());
    for (std::size_t j = 0; j < center_.size(); ++j) {
        out[j] = value_of(center_[j]);
    }
    for (const auto& g : generators_) {
        if (g.symbol >= assignment.size()) {
            continue;
        }
        const double e = assignment[g.symbol];
        if (e == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] += value_of(g.coeffs[j]) * e;
        }
    }
    return out;
}

template <class S>
IntervalBounds<S> concretize(const Zonotope<S>& z) {
    const std::size_t n = z.dim();
    Vector<S> radius(n, S(0.0));
    for (const auto& g : z.generators()) {
        for (std::size_t j = 0; j < n; ++j) {
            radius[j] += abs_of(g.coeffs[j]);
        }
    }
    IntervalBounds<S> out{Vector<S>(n), Vector<S>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.lower[j] = z.center()[j] - radius[j];
        out.upper[j] = z.center()[j] + radius[j];
    }
    return out;
}

template <class S>
Zonotope<S> affine(const Zonotope<S>& z, const Matrix<S>& w, const Vector<S>& b) {
    if (w.cols() != z.dim() || w.rows() != b.size()) {
        throw ShapeError("affine: W is " + shape_string(w.rows(), w.cols()) + ", zonotope dim " +
                         std::to_string(z.dim()) + ", bias length " + std::to_string(b.size()));
    }
    Vector<S> center = add(matvec(w, z.center()), b);
    std::vector<Generator<S>> gens;
    gens.reserve(z.noise_count());
    for (const auto& g : z.generators()) {
        gens.push_back(Generator<S>{g.symbol, matvec(w, g.coeffs)});
    }
    Zonotope<S> out;
    out.mutable_center() = std::move(center);
    out.mutable_generators() = std::move(gens);
    return out;
}

template <class S>
Zonotope<S> add(const Zonotope<S>& a, const Zonotope<S>& b) {
    if (a.dim() != b.dim()) {
        throw ShapeError("zonotope add: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
    }
    Zonotope<S> out;
    out.mutable_center() = add(a.center(), b.center());
    auto& gens = out.mutable_generators();
    gens.reserve(a.noise_count() + b.noise_count());
    const auto& ga = a.generators();
    const auto& gb = b.generators();
    std::size_t i = 0;
    std::size_t k = 0;
    while (i < ga.size() || k < gb.size()) {
        if (k == gb.size() || (i < ga.size() && ga[i].symbol < gb[k].symbol)) {
            gens.push_back(ga[i++]);
        } else if (i == ga.size() || gb[k].symbol < ga[i].symbol) {
            gens.push_back(gb[k++]);
        } else {
            gens.push_back(Generator<S>{ga[i].symbol, add(ga[i].coeffs, gb[k].coeffs)});
            ++i;
            ++k;
        }
    }
    return out;
}

template <class S>
Zonotope<S> box_zonotope(const IntervalBounds<S>& bounds, NoisePool& pool) {
    const std::size_t n = bounds.size();
    Vector<S> center(n);
    std::vector<Generator<S>> gens;
    gens.reserve(n);
    const SymbolId first = pool.fresh_block(n);
    for (std::size_t j = 0; j < n; ++j) {
        center[j] = (bounds.upper[j] + bounds.lower[j]) * S(0.5);
        Vector<S> row(n, S(0.0));
        row[j] = (bounds.upper[j] - bounds.lower[j]) * S(0.5);
        gens.push_back(Generator<S>{first + j, std::move(row)});
    }
    return Zonotope<S>(std::move(center), std::move(gens));
}

template <class S>
Zonotope<S> consolidate(const Zonotope<S>& z, std::size_t cap, NoisePool& pool) {
    const std::size_t n = z.dim();
    if (cap == 0 || z.noise_count() <= cap || z.noise_count() <= n) {
        return z;
    }
    // Keep the (cap - n) largest rows; fold the rest into n fresh box terms.
    const std::size_t keep = cap > n ? cap - n : 0;
    std::vector<double> norms(z.noise_count());
    for (std::size_t i = 0; i < z.noise_count(); ++i) {
        double s = 0.0;
        for (const auto& c : z.generators()[i].coeffs) {
            s += std::fabs(value_of(c));
        }
        norms[i] = s;
    }
    std::vector<std::size_t> order(z.noise_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    std::vector<bool> kept(z.noise_count(), false);
    for (std::size_t r = 0; r < keep; ++r) {
        kept[order[r]] = true;
    }
    std::vector<Generator<S>> gens;
    Vector<S> folded(n, S(0.0));
    for (std::size_t i = 0; i < z.noise_count(); ++i) {
        if (kept[i]) {
            gens.push_back(z.generators()[i]);
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                folded[j] += abs_of(z.generators()[i].coeffs[j]);
            }
        }
    }
    const SymbolId first = pool.fresh_block(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector<S> row(n, S(0.0));
        row[j] = folded[j];
        gens.push_back(Generator<S>{first + j, std::move(row)});
    }
    return Zonotope<S>(z.center(), std::move(gens));
}

#define RECERT_INSTANTIATE_ZONOTOPE(S)                                                          \
    template class Zonotope<S>;                                                                 \
    template IntervalBounds<S> concretize(const Zonotope<S>&);                                  \
    template Zonotope<S> affine(const Zonotope<S>&, const Matrix<S>&, const Vector<S>&);        \
    template Zonotope<S> add(const Zonotope<S>&, const Zonotope<S>&);                           \
    template Zonotope<S> box_zonotope(const IntervalBounds<S>&, NoisePool&);                    \
    template Zonotope<S> consolidate(const Zonotope<S>&, std::size_t, NoisePool&);

RECERT_INSTANTIATE_ZONOTOPE(double)
RECERT_INSTANTIATE_ZONOTOPE(ad::Var)

}  // namespace recert
