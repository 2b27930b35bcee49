#pragma once

// Recurrent classifier weights: one vanilla/LSTM/GRU cell plus a linear
// readout of the final hidden state.

#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "recert/linalg.hpp"

namespace recert {

enum class CellKind { vanilla, lstm, gru };

std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view text);

/// Gate suffixes in storage order: vanilla {""}, LSTM {i, f, g, o}, GRU {r, z, n}.
const std::vector<std::string>& gate_names(CellKind kind);

/// Pre-activation W_x x + b_x + W_h h + b_h of one gate.
template <class S>
struct GateWeights {
    Matrix<S> wx;
    Vector<S> bx;
    Matrix<S> wh;
    Vector<S> bh;
};

template <class S>
struct CellWeights {
    CellKind kind = CellKind::vanilla;
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<GateWeights<S>> gates;
};

template <class S>
struct OutputLayer {
    Matrix<S> w;
    Vector<S> b;

    std::size_t classes() const { return b.size(); }
};

template <class S>
struct Model {
    CellWeights<S> cell;
    OutputLayer<S> output;

    std::size_t input_size() const { return cell.input_size; }
    std::size_t hidden_size() const { return cell.hidden_size; }
    std::size_t classes() const { return output.classes(); }
};

/// LSTM gate indices.
inline constexpr std::size_t kGateI = 0, kGateF = 1, kGateG = 2, kGateO = 3;
/// GRU gate indices.
inline constexpr std::size_t kGateR = 0, kGateZ = 1, kGateN = 2;

/// All-zero model of the given shape.
Model<double> make_model(CellKind kind, std::size_t input_size, std::size_t hidden_size, std::size_t classes);

/// Uniform(-scale, scale) initialization; scale defaults to 1/sqrt(hidden_size).
void randomize(Model<double>& model, std::mt19937_64& rng, double scale = 0.0);

/// Throws ShapeError when any weight does not conform to the declared sizes.
template <class S>
void validate(const Model<S>& model);

/// Visits every scalar parameter in a fixed order: gates in storage order
/// (wx, bx, wh, bh), then the readout (w, b).
template <class S, class F>
void for_each_parameter(Model<S>& model, F&& fn) {
    for (auto& gate : model.cell.gates) {
        for (auto& x : gate.wx.data()) fn(x);
        for (auto& x : gate.bx) fn(x);
        for (auto& x : gate.wh.data()) fn(x);
        for (auto& x : gate.bh) fn(x);
    }
    for (auto& x : model.output.w.data()) fn(x);
    for (auto& x : model.output.b) fn(x);
}

template <class S, class F>
void for_each_parameter(const Model<S>& model, F&& fn) {
    for_each_parameter(const_cast<Model<S>&>(model), [&](S& x) { fn(static_cast<const S&>(x)); });
}

template <class S>
std::size_t parameter_count(const Model<S>& model) {
    std::size_t n = 0;
    for_each_parameter(model, [&](const S&) { ++n; });
    return n;
}

std::vector<double> flatten_parameters(const Model<double>& model);
void assign_parameters(Model<double>& model, const std::vector<double>& values);

template <class To, class From>
Model<To> cast_model(const Model<From>& m) {
    Model<To> out;
    out.cell.kind = m.cell.kind;
    out.cell.input_size = m.cell.input_size;
    out.cell.hidden_size = m.cell.hidden_size;
    for (const auto& g : m.cell.gates) {
        out.cell.gates.push_back(GateWeights<To>{cast_matrix<To>(g.wx), cast_vector<To>(g.bx), cast_matrix<To>(g.wh),
                                                 cast_vector<To>(g.bh)});
    }
    out.output.w = cast_matrix<To>(m.output.w);
    out.output.b = cast_vector<To>(m.output.b);
    return out;
}

}  // namespace recert
