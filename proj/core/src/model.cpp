#include "recert/model.hpp"

#include <cmath>
#include <stdexcept>

namespace recert {

std::string_view to_string(CellKind kind) {
    switch (kind) {
        case CellKind::vanilla:
            return "vanilla";
        case CellKind::lstm:
            return "lstm";
        case CellKind::gru:
            return "gru";
    }
    return "unknown";
}

CellKind parse_cell_kind(std::string_view text) {
    if (text == "vanilla" || text == "rnn") {
        return CellKind::vanilla;
    }
    if (text == "lstm") {
        return CellKind::lstm;
    }
    if (text == "gru") {
        return CellKind::gru;
    }
    throw std::invalid_argument("unknown cell kind '" + std::string(text) + "'");
}

const std::vector<std::string>& gate_names(CellKind kind) {
    static const std::vector<std::string> vanilla{""};
    static const std::vector<std::string> lstm{"i", "f", "g", "o"};
    static const std::vector<std::string> gru{"r", "z", "n"};
    switch (kind) {
        case CellKind::lstm:
            return lstm;
        case CellKind::gru:
            return gru;
        case CellKind::vanilla:
            break;
    }
    return vanilla;
}

Model<double> make_model(CellKind kind, std::size_t input_size, std::size_t hidden_size, std::size_t classes) {
    if (input_size == 0 || hidden_size == 0) {
        throw ShapeError("make_model: input_size and hidden_size must be positive");
    }
    if (classes < 2) {
        throw ShapeError("make_model: need at least 2 classes");
    }
    Model<double> m;
    m.cell.kind = kind;
    m.cell.input_size = input_size;
    m.cell.hidden_size = hidden_size;
    for (std::size_t g = 0; g < gate_names(kind).size(); ++g) {
        m.cell.gates.push_back(GateWeights<double>{Matrix<double>(hidden_size, input_size),
                                                   Vector<double>(hidden_size, 0.0),
                                                   Matrix<double>(hidden_size, hidden_size),
                                                   Vector<double>(hidden_size, 0.0)});
    }
    m.output.w = Matrix<double>(classes, hidden_size);
    m.output.b = Vector<double>(classes, 0.0);
    return m;
}

void randomize(Model<double>& model, std::mt19937_64& rng, double scale) {
    if (scale <= 0.0) {
        scale = 1.0 / std::sqrt(static_cast<double>(model.hidden_size()));
    }
    std::uniform_real_distribution<double> dist(-scale, scale);
    for_each_parameter(model, [&](double& x) { x = dist(rng); });
}

template <class S>
void validate(const Model<S>& model) {
    const auto& cell = model.cell;
    const std::size_t h = cell.hidden_size;
    const std::size_t d = cell.input_size;
    if (h == 0 || d == 0) {
        throw ShapeError("model: hidden_size and input_size must be positive");
    }
    if (cell.gates.size() != gate_names(cell.kind).size()) {
        throw ShapeError("model: " + std::string(to_string(cell.kind)) + " cell needs " +
                         std::to_string(gate_names(cell.kind).size()) + " gates, got " +
                         std::to_string(cell.gates.size()));
    }
    for (std::size_t g = 0; g < cell.gates.size(); ++g) {
        const auto& gate = cell.gates[g];
        const std::string name = "gate '" + gate_names(cell.kind)[g] + "'";
        if (gate.wx.rows() != h || gate.wx.cols() != d) {
            throw ShapeError("model: " + name + " W_x is " + shape_string(gate.wx.rows(), gate.wx.cols()) +
                             ", expected " + shape_string(h, d));
        }
        if (gate.wh.rows() != h || gate.wh.cols() != h) {
            throw ShapeError("model: " + name + " W_h is " + shape_string(gate.wh.rows(), gate.wh.cols()) +
                             ", expected " + shape_string(h, h));
        }
        if (gate.bx.size() != h || gate.bh.size() != h) {
            throw ShapeError("model: " + name + " bias length must be " + std::to_string(h));
        }
    }
    if (model.output.b.size() < 2) {
        throw ShapeError("model: output layer needs at least 2 classes");
    }
    if (model.output.w.rows() != model.output.b.size() || model.output.w.cols() != h) {
        throw ShapeError("model: W_o is " + shape_string(model.output.w.rows(), model.output.w.cols()) +
                         ", expected " + shape_string(model.output.b.size(), h));
    }
}

std::vector<double> flatten_parameters(const Model<double>& model) {
    std::vector<double> out;
    out.reserve(parameter_count(model));
    for_each_parameter(model, [&](const double& x) { out.push_back(x); });
    return out;
}

void assign_parameters(Model<double>& model, const std::vector<double>& values) {
    if (values.size() != parameter_count(model)) {
        throw ShapeError("assign_parameters: expected " + std::to_string(parameter_count(model)) + " values, got " +
                         std::to_string(values.size()));
    }
    std::size_t i = 0;
    for_each_parameter(model, [&](double& x) { x = values[i++]; });
}

template void validate(const Model<double>&);
template void validate(const Model<ad::Var>&);

}  // namespace recert
