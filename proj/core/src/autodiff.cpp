#include "recert/autodiff.hpp"

namespace recert::ad {

namespace detail {
Tape*& active_tape() {
    thread_local Tape* tape = nullptr;
    return tape;
}
}  // namespace detail

std::vector<double> Tape::adjoints(std::int64_t output) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    if (output < 0) {
        return adj;
    }
    adj[static_cast<std::size_t>(output)] = 1.0;
    for (std::int64_t i = output; i >= 0; --i) {
        const double a = adj[static_cast<std::size_t>(i)];
        if (a == 0.0) {
            continue;
        }
        const Node& node = nodes_[static_cast<std::size_t>(i)];
        for (int k = 0; k < 2; ++k) {
            if (node.parent[k] >= 0) {
                adj[static_cast<std::size_t>(node.parent[k])] += a * node.partial[k];
            }
        }
    }
    return adj;
}

}  // namespace recert::ad
