#pragma once

// Concrete and abstract forward passes through a recurrent classifier.

#include <optional>
#include <vector>

#include "recert/interzono.hpp"
#include "recert/model.hpp"

namespace recert {

/// T frames, each of length input_size.
template <class S>
using Sequence = std::vector<Vector<S>>;

template <class S>
struct CellState {
    Vector<S> h;
    Vector<S> c;  // LSTM only; empty otherwise
};

template <class S>
CellState<S> zero_state(const CellWeights<S>& cell);

/// One step of the cell update.
template <class S>
CellState<S> cell_concrete(const CellWeights<S>& cell, const Vector<S>& x, const CellState<S>& state);

/// Logits W_o h_T + b_o after running the cell from the zero state.
template <class S>
Vector<S> forward_concrete(const Model<S>& model, const Sequence<S>& frames);

template <class S>
struct AbstractState {
    InterZono<S> h;
    std::optional<InterZono<S>> c;  // present iff the cell is an LSTM
};

/// Exact zero point, in the given domain kind.
template <class S>
AbstractState<S> zero_abstract_state(const CellWeights<S>& cell, DomainKind kind);

template <class S>
AbstractState<S> cell_abstract(const CellWeights<S>& cell, const InterZono<S>& dx, const AbstractState<S>& state,
                               NoisePool& pool);

/// Abstract logits. The pipeline kind (zonotope or interzono) follows the input
/// domains. A non-zero generator_cap consolidates the recurrent state's main
/// domain after every step.
template <class S>
InterZono<S> forward_abstract(const Model<S>& model, const std::vector<InterZono<S>>& frames, NoisePool& pool,
                              std::size_t generator_cap = 0);

}  // namespace recert
