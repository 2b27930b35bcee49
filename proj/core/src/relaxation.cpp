#include "recert/relaxation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace recert {

namespace {

constexpr double kDegenerateWidth = 1e-12;

// Bounds on the second partials of sigmoid(x)*tanh(y) over R^2:
// |sigmoid''| <= 1/(6 sqrt 3), |tanh''| <= 4/(3 sqrt 3), sigmoid' * tanh' <= 1/4.
constexpr double kHessXX = 0.0963;
constexpr double kHessYY = 0.7699;
constexpr double kHessXY = 0.25;

/// Merges two generator lists scaled coordinatewise by `ka` and `kb`.
template <class S>
std::vector<Generator<S>> merge_scaled(const std::vector<Generator<S>>& ga, const Vector<S>& ka,
                                       const std::vector<Generator<S>>& gb, const Vector<S>& kb) {
    const std::size_t n = ka.size();
    auto scaled = [n](const Vector<S>& coeffs, const Vector<S>& k) {
        Vector<S> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = coeffs[j] * k[j];
        }
        return row;
    };
    std::vector<Generator<S>> out;
    out.reserve(ga.size() + gb.size());
    std::size_t i = 0;
    std::size_t m = 0;
    while (i < ga.size() || m < gb.size()) {
        if (m == gb.size() || (i < ga.size() && ga[i].symbol < gb[m].symbol)) {
            out.push_back(Generator<S>{ga[i].symbol, scaled(ga[i].coeffs, ka)});
            ++i;
        } else if (i == ga.size() || gb[m].symbol < ga[i].symbol) {
            out.push_back(Generator<S>{gb[m].symbol, scaled(gb[m].coeffs, kb)});
            ++m;
        } else {
            Vector<S> row(n);
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = ga[i].coeffs[j] * ka[j] + gb[m].coeffs[j] * kb[j];
            }
            out.push_back(Generator<S>{ga[i].symbol, std::move(row)});
            ++i;
            ++m;
        }
    }
    return out;
}

/// Appends one fresh axis-aligned generator per coordinate with the given half-widths.
template <class S>
void append_fresh_diagonal(std::vector<Generator<S>>& gens, const Vector<S>& half_width, NoisePool& pool) {
    const std::size_t n = half_width.size();
    const SymbolId first = pool.fresh_block(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector<S> row(n, S(0.0));
        row[j] = half_width[j];
        gens.push_back(Generator<S>{first + j, std::move(row)});
    }
}

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string(what) + ": dimension mismatch " + std::to_string(a) + " vs " +
                         std::to_string(b));
    }
}

}  // namespace

std::string_view to_string(Activation f) {
    switch (f) {
        case Activation::identity:
            return "identity";
        case Activation::tanh:
            return "tanh";
        case Activation::sigmoid:
            return "sigmoid";
    }
    return "unknown";
}

template <class S>
S activate(Activation f, const S& x) {
    using std::tanh;
    switch (f) {
        case Activation::identity:
            return x;
        case Activation::tanh:
            return tanh(x);
        case Activation::sigmoid:
            return sigmoid(x);
    }
    return x;
}

template <class S>
S activate_derivative(Activation f, const S& x) {
    switch (f) {
        case Activation::identity:
            return S(1.0);
        case Activation::tanh: {
            using std::tanh;
            const S t = tanh(x);
            return S(1.0) - t * t;
        }
        case Activation::sigmoid: {
            const S s = sigmoid(x);
            return s * (S(1.0) - s);
        }
    }
    return S(1.0);
}

template <class S>
ChordRelaxation<S> chord_relaxation(const IntervalBounds<S>& bounds, Activation f) {
    using std::atanh;
    using std::log;
    using std::sqrt;
    const std::size_t n = bounds.size();
    ChordRelaxation<S> out{Vector<S>(n), Vector<S>(n), Vector<S>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const S& l = bounds.lower[j];
        const S& u = bounds.upper[j];
        const double lv = value_of(l);
        const double uv = value_of(u);
        if (uv - lv < kDegenerateWidth) {
            const S mid = (l + u) * S(0.5);
            const S k = activate_derivative(f, mid);
            const S off = activate(f, mid) - k * mid;
            out.slope[j] = k;
            out.upper_offset[j] = off;
            out.lower_offset[j] = off;
            continue;
        }
        const S fl = activate(f, l);
        const S fu = activate(f, u);
        const S k = (fu - fl) / (u - l);
        const double kv = value_of(k);

        S hi = fl - k * l;
        S lo = hi;
        auto consider = [&](const S& x) {
            const double xv = value_of(x);
            if (!(xv > lv && xv < uv)) {
                return;
            }
            const S g = activate(f, x) - k * x;
            hi = select_max(hi, g);
            lo = select_min(lo, g);
        };
        {
            const S g = fu - k * u;
            hi = select_max(hi, g);
            lo = select_min(lo, g);
        }
        if (f == Activation::tanh && kv > 0.0 && kv < 1.0) {
            const S x_star = atanh(sqrt(S(1.0) - k));
            consider(x_star);
            consider(-x_star);
        } else if (f == Activation::sigmoid && kv > 0.0 && kv < 0.25) {
            const S root = sqrt(S(1.0) - S(4.0) * k);
            const S s_hi = (S(1.0) + root) * S(0.5);
            const S s_lo = (S(1.0) - root) * S(0.5);
            consider(log(s_hi / (S(1.0) - s_hi)));
            consider(log(s_lo / (S(1.0) - s_lo)));
        }
        out.slope[j] = k;
        out.upper_offset[j] = hi;
        out.lower_offset[j] = lo;
    }
    return out;
}

template <class S>
Zonotope<S> elementwise_zono(const Zonotope<S>& z, const IntervalBounds<S>& bounds, Activation f, NoisePool& pool) {
    check_same_dim(z.dim(), bounds.size(), "elementwise_zono");
    const std::size_t n = z.dim();
    const ChordRelaxation<S> r = chord_relaxation(bounds, f);
    Vector<S> center(n);
    Vector<S> half(n);
    for (std::size_t j = 0; j < n; ++j) {
        center[j] = z.center()[j] * r.slope[j] + (r.upper_offset[j] + r.lower_offset[j]) * S(0.5);
        half[j] = (r.upper_offset[j] - r.lower_offset[j]) * S(0.5);
    }
    std::vector<Generator<S>> gens;
    gens.reserve(z.noise_count() + n);
    for (const auto& g : z.generators()) {
        Vector<S> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = g.coeffs[j] * r.slope[j];
        }
        gens.push_back(Generator<S>{g.symbol, std::move(row)});
    }
    append_fresh_diagonal(gens, half, pool);
    return Zonotope<S>(std::move(center), std::move(gens));
}

template <class S>
Zonotope<S> box_transform(const IntervalBounds<S>& bounds, Activation f, NoisePool& pool) {
    const std::size_t n = bounds.size();
    IntervalBounds<S> image{Vector<S>(n), Vector<S>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        image.lower[j] = activate(f, bounds.lower[j]);
        image.upper[j] = activate(f, bounds.upper[j]);
    }
    return box_zonotope(image, pool);
}

template <class S>
PlaneRelaxation<S> sigma_tanh_planes(const IntervalBounds<S>& xb, const IntervalBounds<S>& yb) {
    using std::tanh;
    check_same_dim(xb.size(), yb.size(), "sigma_tanh_planes");
    const std::size_t n = xb.size();
    PlaneRelaxation<S> out{Vector<S>(n), Vector<S>(n), Vector<S>(n), Vector<S>(n)};
    constexpr int G = kPlaneGrid;

    std::array<double, G> xs{}, sx{}, dsx{}, ys{}, ty{}, dty{};
    for (std::size_t j = 0; j < n; ++j) {
        const S& lx = xb.lower[j];
        const S& ux = xb.upper[j];
        const S& ly = yb.lower[j];
        const S& uy = yb.upper[j];

        // Mean corner partials.
        const std::array<const S*, 2> cx{&lx, &ux};
        const std::array<const S*, 2> cy{&ly, &uy};
        S a(0.0);
        S b(0.0);
        for (const S* px : cx) {
            for (const S* py : cy) {
                const S s = sigmoid(*px);
                const S t = tanh(*py);
                a += s * (S(1.0) - s) * t;
                b += s * (S(1.0) - t * t);
            }
        }
        a = a * S(0.25);
        b = b * S(0.25);

        const S hx = (ux - lx) / S(G - 1);
        const S hy = (uy - ly) / S(G - 1);
        const double av = value_of(a);
        const double bv = value_of(b);
        const double hxv = std::max(0.0, value_of(hx));
        const double hyv = std::max(0.0, value_of(hy));
        for (int i = 0; i < G; ++i) {
            xs[i] = value_of(lx) + hxv * i;
            sx[i] = sigmoid(xs[i]);
            dsx[i] = sx[i] * (1.0 - sx[i]);
            ys[i] = value_of(ly) + hyv * i;
            ty[i] = std::tanh(ys[i]);
            dty[i] = 1.0 - ty[i] * ty[i];
        }

        // Scan vertices with a first-order slack toward the cell interior.
        double best_hi = -std::numeric_limits<double>::infinity();
        double best_lo = std::numeric_limits<double>::infinity();
        int hi_i = 0, hi_m = 0, lo_i = 0, lo_m = 0;
        for (int i = 0; i < G; ++i) {
            for (int m = 0; m < G; ++m) {
                const double g = sx[i] * ty[m] - av * xs[i] - bv * ys[m];
                const double slack =
                    0.5 * (std::fabs(dsx[i] * ty[m] - av) * hxv + std::fabs(sx[i] * dty[m] - bv) * hyv);
                if (g + slack > best_hi) {
                    best_hi = g + slack;
                    hi_i = i;
                    hi_m = m;
                }
                if (g - slack < best_lo) {
                    best_lo = g - slack;
                    lo_i = i;
                    lo_m = m;
                }
            }
        }

        // Re-evaluate the selected vertices in S so derivatives flow through them.
        auto vertex_terms = [&](int i, int m) {
            const S x = lx + hx * S(static_cast<double>(i));
            const S y = ly + hy * S(static_cast<double>(m));
            const S s = sigmoid(x);
            const S t = tanh(y);
            const S g = s * t - a * x - b * y;
            const S slack = (abs_of(s * (S(1.0) - s) * t - a) * hx + abs_of(s * (S(1.0) - t * t) - b) * hy) * S(0.5);
            return std::pair<S, S>{g, slack};
        };
        const S qx = hx * S(0.5);
        const S qy = hy * S(0.5);
        const S remainder = (S(kHessXX) * qx * qx + S(2.0 * kHessXY) * qx * qy + S(kHessYY) * qy * qy) * S(0.5);
        const auto [g_hi, s_hi] = vertex_terms(hi_i, hi_m);
        const auto [g_lo, s_lo] = vertex_terms(lo_i, lo_m);
        out.slope_x[j] = a;
        out.slope_y[j] = b;
        out.upper_offset[j] = g_hi + s_hi + remainder;
        out.lower_offset[j] = g_lo - s_lo - remainder;
    }
    return out;
}

template <class S>
Zonotope<S> sigma_tanh_zono(const Zonotope<S>& zx, const Zonotope<S>& zy, const IntervalBounds<S>& xb,
                            const IntervalBounds<S>& yb, NoisePool& pool) {
    check_same_dim(zx.dim(), zy.dim(), "sigma_tanh_zono");
    check_same_dim(zx.dim(), xb.size(), "sigma_tanh_zono");
    const std::size_t n = zx.dim();
    const PlaneRelaxation<S> p = sigma_tanh_planes(xb, yb);
    Vector<S> center(n);
    Vector<S> half(n);
    for (std::size_t j = 0; j < n; ++j) {
        center[j] = p.slope_x[j] * zx.center()[j] + p.slope_y[j] * zy.center()[j] +
                    (p.upper_offset[j] + p.lower_offset[j]) * S(0.5);
        half[j] = (p.upper_offset[j] - p.lower_offset[j]) * S(0.5);
    }
    auto gens = merge_scaled(zx.generators(), p.slope_x, zy.generators(), p.slope_y);
    append_fresh_diagonal(gens, half, pool);
    return Zonotope<S>(std::move(center), std::move(gens));
}

template <class S>
Zonotope<S> hadamard_zono(const Zonotope<S>& zx, const Zonotope<S>& zy, NoisePool& pool) {
    check_same_dim(zx.dim(), zy.dim(), "hadamard_zono");
    const std::size_t n = zx.dim();
    const auto& gx = zx.generators();
    const auto& gy = zy.generators();

    Vector<S> center(n);
    Vector<S> sum_abs_x(n, S(0.0));
    Vector<S> sum_abs_y(n, S(0.0));
    Vector<S> diag_signed(n, S(0.0));
    Vector<S> diag_abs(n, S(0.0));

    // Linear part: x0 * y_i + y0 * x_i on each symbol.
    auto gens = merge_scaled(gx, zy.center(), gy, zx.center());

    for (const auto& g : gx) {
        for (std::size_t j = 0; j < n; ++j) {
            sum_abs_x[j] += abs_of(g.coeffs[j]);
        }
    }
    for (const auto& g : gy) {
        for (std::size_t j = 0; j < n; ++j) {
            sum_abs_y[j] += abs_of(g.coeffs[j]);
        }
    }
    std::size_t i = 0;
    std::size_t m = 0;
    while (i < gx.size() && m < gy.size()) {
        if (gx[i].symbol < gy[m].symbol) {
            ++i;
        } else if (gy[m].symbol < gx[i].symbol) {
            ++m;
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                const S prod = gx[i].coeffs[j] * gy[m].coeffs[j];
                diag_signed[j] += prod;
                diag_abs[j] += abs_of(prod);
            }
            ++i;
            ++m;
        }
    }

    Vector<S> half(n);
    for (std::size_t j = 0; j < n; ++j) {
        center[j] = zx.center()[j] * zy.center()[j] + diag_signed[j] * S(0.5);
        // (sum_i |x_i|)(sum_k |y_k|) minus the shared diagonal leaves the i != k cross terms.
        half[j] = diag_abs[j] * S(0.5) + (sum_abs_x[j] * sum_abs_y[j] - diag_abs[j]);
    }
    append_fresh_diagonal(gens, half, pool);
    return Zonotope<S>(std::move(center), std::move(gens));
}

#define RECERT_INSTANTIATE_RELAXATION(S)                                                                      \
    template S activate(Activation, const S&);                                                                \
    template S activate_derivative(Activation, const S&);                                                     \
    template ChordRelaxation<S> chord_relaxation(const IntervalBounds<S>&, Activation);                       \
    template Zonotope<S> elementwise_zono(const Zonotope<S>&, const IntervalBounds<S>&, Activation, NoisePool&); \
    template Zonotope<S> box_transform(const IntervalBounds<S>&, Activation, NoisePool&);                     \
    template PlaneRelaxation<S> sigma_tanh_planes(const IntervalBounds<S>&, const IntervalBounds<S>&);        \
    template Zonotope<S> sigma_tanh_zono(const Zonotope<S>&, const Zonotope<S>&, const IntervalBounds<S>&,    \
                                         const IntervalBounds<S>&, NoisePool&);                               \
    template Zonotope<S> hadamard_zono(const Zonotope<S>&, const Zonotope<S>&, NoisePool&);

RECERT_INSTANTIATE_RELAXATION(double)
RECERT_INSTANTIATE_RELAXATION(ad::Var)

}  // namespace recert
