#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the abstract domains: cells are re-evaluated from
// their textbook equations and sets are sampled directly.

#include <cmath>
#include <random>
#include <vector>

#include "recert/certifier.hpp"
#include "recert/model.hpp"

namespace oracle {

using recert::CellKind;
using recert::Model;
using recert::Sequence;
using Vec = std::vector<double>;

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec affine_row(const recert::Matrix<double>& w, const Vec& x) {
    Vec out(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) {
            out[r] += w(r, c) * x[c];
        }
    }
    return out;
}

/// Straight-line forward pass written directly from the cell equations.
inline Vec logits(const Model<double>& m, const Sequence<double>& xs) {
    const std::size_t h = m.hidden_size();
    Vec hs(h, 0.0);
    Vec cs(h, 0.0);
    auto pre = [&](std::size_t g, const Vec& x, const Vec& hp) {
        const auto& gate = m.cell.gates[g];
        Vec a = affine_row(gate.wx, x);
        Vec b = affine_row(gate.wh, hp);
        for (std::size_t j = 0; j < h; ++j) {
            a[j] += gate.bx[j] + b[j] + gate.bh[j];
        }
        return a;
    };
    for (const auto& x : xs) {
        Vec next(h);
        switch (m.cell.kind) {
            case CellKind::vanilla: {
                const Vec a = pre(0, x, hs);
                for (std::size_t j = 0; j < h; ++j) next[j] = std::tanh(a[j]);
                break;
            }
            case CellKind::lstm: {
                const Vec i = pre(0, x, hs), f = pre(1, x, hs), g = pre(2, x, hs), o = pre(3, x, hs);
                for (std::size_t j = 0; j < h; ++j) {
                    cs[j] = sig(f[j]) * cs[j] + sig(i[j]) * std::tanh(g[j]);
                    next[j] = sig(o[j]) * std::tanh(cs[j]);
                }
                break;
            }
            case CellKind::gru: {
                const auto& gn = m.cell.gates[2];
                const Vec r = pre(0, x, hs), z = pre(1, x, hs);
                const Vec nx = affine_row(gn.wx, x);
                const Vec nh = affine_row(gn.wh, hs);
                for (std::size_t j = 0; j < h; ++j) {
                    const double rr = sig(r[j]);
                    const double zz = sig(z[j]);
                    const double n = std::tanh(nx[j] + gn.bx[j] + rr * (nh[j] + gn.bh[j]));
                    next[j] = (1.0 - zz) * n + zz * hs[j];
                }
                break;
            }
        }
        hs = next;
    }
    Vec y = affine_row(m.output.w, hs);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += m.output.b[k];
    return y;
}

inline Model<double> random_model(CellKind kind, std::size_t d, std::size_t h, std::size_t classes,
                                  std::mt19937_64& rng, double scale = 1.0) {
    Model<double> m = recert::make_model(kind, d, h, classes);
    recert::randomize(m, rng, scale);
    return m;
}

inline Sequence<double> random_sequence(std::size_t frames, std::size_t d, std::mt19937_64& rng,
                                        double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Sequence<double> xs(frames, Vec(d));
    for (auto& f : xs)
        for (auto& v : f) v = n(rng);
    return xs;
}

/// A point of the perturbation ball. A quarter of the coordinates are pushed
/// to a face so extreme inputs get exercised, not only the interior.
inline Sequence<double> sample_ball(const Sequence<double>& clean, const recert::PerturbationSpec& spec,
                                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> face(0, 7);
    Sequence<double> x = clean;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (spec.strategy == recert::Strategy::one_frame && t != spec.frame) continue;
        for (auto& v : x[t]) {
            const int f = face(rng);
            const double e = f == 0 ? -1.0 : (f == 1 ? 1.0 : u(rng));
            v += spec.epsilon * e;
        }
    }
    return x;
}

/// Uniform draw of the noise symbols [0, count).
inline Vec sample_symbols(std::size_t count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec e(count);
    for (auto& v : e) v = u(rng) < -0.8 ? -1.0 : (u(rng) > 0.8 ? 1.0 : u(rng));
    return e;
}

}  // namespace oracle
