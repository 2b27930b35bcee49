#include "recert/propagation.hpp"

#include <cmath>

namespace recert {

namespace {

template <class S>
Vector<S> preactivation(const GateWeights<S>& g, const Vector<S>& x, const Vector<S>& h) {
    Vector<S> out = matvec(g.wx, x);
    const Vector<S> rec = matvec(g.wh, h);
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = out[j] + g.bx[j] + rec[j] + g.bh[j];
    }
    return out;
}

template <class S>
Vector<S> map(const Vector<S>& v, Activation f) {
    Vector<S> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        out[j] = activate(f, v[j]);
    }
    return out;
}

template <class S>
InterZono<S> abstract_preactivation(const GateWeights<S>& g, const InterZono<S>& dx, const InterZono<S>& dh) {
    return interzono_affine2(dx, g.wx, dh, g.wh, add(g.bx, g.bh));
}

}  // namespace

template <class S>
CellState<S> zero_state(const CellWeights<S>& cell) {
    CellState<S> s{Vector<S>(cell.hidden_size, S(0.0)), {}};
    if (cell.kind == CellKind::lstm) {
        s.c.assign(cell.hidden_size, S(0.0));
    }
    return s;
}

template <class S>
CellState<S> cell_concrete(const CellWeights<S>& cell, const Vector<S>& x, const CellState<S>& state) {
    using std::tanh;
    if (x.size() != cell.input_size) {
        throw ShapeError("cell_concrete: frame length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(cell.input_size));
    }
    if (state.h.size() != cell.hidden_size) {
        throw ShapeError("cell_concrete: hidden state length mismatch");
    }
    const std::size_t n = cell.hidden_size;
    CellState<S> next;
    switch (cell.kind) {
        case CellKind::vanilla: {
            next.h = map(preactivation(cell.gates[0], x, state.h), Activation::tanh);
            break;
        }
        case CellKind::lstm: {
            if (state.c.size() != n) {
                throw ShapeError("cell_concrete: LSTM cell state length mismatch");
            }
            const Vector<S> i = map(preactivation(cell.gates[kGateI], x, state.h), Activation::sigmoid);
            const Vector<S> f = map(preactivation(cell.gates[kGateF], x, state.h), Activation::sigmoid);
            const Vector<S> g = map(preactivation(cell.gates[kGateG], x, state.h), Activation::tanh);
            const Vector<S> o = map(preactivation(cell.gates[kGateO], x, state.h), Activation::sigmoid);
            next.c.resize(n);
            next.h.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                next.c[j] = f[j] * state.c[j] + i[j] * g[j];
                next.h[j] = o[j] * tanh(next.c[j]);
            }
            break;
        }
        case CellKind::gru: {
            const Vector<S> r = map(preactivation(cell.gates[kGateR], x, state.h), Activation::sigmoid);
            const Vector<S> z = map(preactivation(cell.gates[kGateZ], x, state.h), Activation::sigmoid);
            const GateWeights<S>& gn = cell.gates[kGateN];
            const Vector<S> xn = matvec(gn.wx, x);
            const Vector<S> hn = matvec(gn.wh, state.h);
            next.h.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                const S nj = tanh(xn[j] + gn.bx[j] + r[j] * (hn[j] + gn.bh[j]));
                next.h[j] = (S(1.0) - z[j]) * nj + z[j] * state.h[j];
            }
            break;
        }
    }
    return next;
}

template <class S>
Vector<S> forward_concrete(const Model<S>& model, const Sequence<S>& frames) {
    if (frames.empty()) {
        throw ShapeError("forward_concrete: empty sequence");
    }
    CellState<S> state = zero_state(model.cell);
    for (const auto& x : frames) {
        state = cell_concrete(model.cell, x, state);
    }
    return add(matvec(model.output.w, state.h), model.output.b);
}

template <class S>
AbstractState<S> zero_abstract_state(const CellWeights<S>& cell, DomainKind kind) {
    AbstractState<S> s{point_domain(Vector<S>(cell.hidden_size, S(0.0)), kind), std::nullopt};
    if (cell.kind == CellKind::lstm) {
        s.c = point_domain(Vector<S>(cell.hidden_size, S(0.0)), kind);
    }
    return s;
}

template <class S>
AbstractState<S> cell_abstract(const CellWeights<S>& cell, const InterZono<S>& dx, const AbstractState<S>& state,
                               NoisePool& pool) {
    if (dx.dim() != cell.input_size) {
        throw ShapeError("cell_abstract: frame domain length " + std::to_string(dx.dim()) + ", expected " +
                         std::to_string(cell.input_size));
    }
    AbstractState<S> next{state.h, std::nullopt};
    switch (cell.kind) {
        case CellKind::vanilla: {
            next.h = elementwise_interzono(abstract_preactivation(cell.gates[0], dx, state.h), Activation::tanh, pool);
            break;
        }
        case CellKind::lstm: {
            if (!state.c) {
                throw std::invalid_argument("cell_abstract: LSTM state without cell domain");
            }
            const InterZono<S> pre_i = abstract_preactivation(cell.gates[kGateI], dx, state.h);
            const InterZono<S> pre_f = abstract_preactivation(cell.gates[kGateF], dx, state.h);
            const InterZono<S> pre_g = abstract_preactivation(cell.gates[kGateG], dx, state.h);
            const InterZono<S> pre_o = abstract_preactivation(cell.gates[kGateO], dx, state.h);
            const InterZono<S> ig = sigma_tanh_product_interzono(pre_i, pre_g, pool);
            const InterZono<S> f = elementwise_interzono(pre_f, Activation::sigmoid, pool);
            const InterZono<S> fc = hadamard_generic(f, *state.c, pool);
            InterZono<S> c = interzono_add(fc, ig, pool);
            next.h = sigma_tanh_product_interzono(pre_o, c, pool);
            next.c = std::move(c);
            break;
        }
        case CellKind::gru: {
            const std::size_t n = cell.hidden_size;
            const InterZono<S> r =
                elementwise_interzono(abstract_preactivation(cell.gates[kGateR], dx, state.h), Activation::sigmoid, pool);
            const InterZono<S> z =
                elementwise_interzono(abstract_preactivation(cell.gates[kGateZ], dx, state.h), Activation::sigmoid, pool);
            const GateWeights<S>& gn = cell.gates[kGateN];
            const InterZono<S> hn = interzono_affine(state.h, gn.wh, gn.bh);
            const InterZono<S> rhn = hadamard_generic(r, hn, pool);
            const InterZono<S> pre_n = interzono_add(interzono_affine(dx, gn.wx, gn.bx), rhn, pool);
            const InterZono<S> nn = elementwise_interzono(pre_n, Activation::tanh, pool);
            Matrix<S> neg(n, n);
            for (std::size_t j = 0; j < n; ++j) {
                neg(j, j) = S(-1.0);
            }
            const InterZono<S> one_minus_z = interzono_affine(z, neg, Vector<S>(n, S(1.0)));
            next.h = interzono_add(hadamard_generic(one_minus_z, nn, pool), hadamard_generic(z, state.h, pool), pool);
            break;
        }
    }
    return next;
}

template <class S>
InterZono<S> forward_abstract(const Model<S>& model, const std::vector<InterZono<S>>& frames, NoisePool& pool,
                              std::size_t generator_cap) {
    if (frames.empty()) {
        throw ShapeError("forward_abstract: empty sequence");
    }
    AbstractState<S> state = zero_abstract_state(model.cell, frames.front().kind());
    for (const auto& dx : frames) {
        state = cell_abstract(model.cell, dx, state, pool);
        if (generator_cap > 0) {
            state.h.main = consolidate(state.h.main, generator_cap, pool);
            if (state.c) {
                state.c->main = consolidate(state.c->main, generator_cap, pool);
            }
        }
    }
    return interzono_affine(state.h, model.output.w, model.output.b);
}

#define RECERT_INSTANTIATE_PROPAGATION(S)                                                                      \
    template CellState<S> zero_state(const CellWeights<S>&);                                                   \
    template CellState<S> cell_concrete(const CellWeights<S>&, const Vector<S>&, const CellState<S>&);         \
    template Vector<S> forward_concrete(const Model<S>&, const Sequence<S>&);                                  \
    template AbstractState<S> zero_abstract_state(const CellWeights<S>&, DomainKind);                          \
    template AbstractState<S> cell_abstract(const CellWeights<S>&, const InterZono<S>&, const AbstractState<S>&, \
                                            NoisePool&);                                                       \
    template InterZono<S> forward_abstract(const Model<S>&, const std::vector<InterZono<S>>&, NoisePool&, std::size_t);

RECERT_INSTANTIATE_PROPAGATION(double)
RECERT_INSTANTIATE_PROPAGATION(ad::Var)

}  // namespace recert
