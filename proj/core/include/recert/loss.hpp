#pragma once

#include <cmath>
#include <stdexcept>

#include "recert/interzono.hpp"

namespace recert {

/// Softmax cross-entropy log(sum_k exp(y_k)) - y_label, shifted by the max logit.
template <class S>
S cross_entropy(const Vector<S>& logits, std::size_t label) {
    using std::exp;
    using std::log;
    if (label >= logits.size()) {
        throw std::out_of_range("cross_entropy: label out of range");
    }
    std::size_t top = 0;
    for (std::size_t k = 1; k < logits.size(); ++k) {
        if (value_of(logits[k]) > value_of(logits[top])) {
            top = k;
        }
    }
    const S shift = logits[top];
    S sum(0.0);
    for (const auto& y : logits) {
        sum += exp(y - shift);
    }
    return log(sum) + shift - logits[label];
}

/// Worst-case cross-entropy over the interval hull of an abstract logit
/// vector: the true-class logit at its lower bound, every other at its upper.
template <class S>
S robustness_loss(const InterZono<S>& logits, std::size_t label) {
    const IntervalBounds<S> b = interzono_concretize(logits);
    Vector<S> worst(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
        worst[k] = k == label ? b.lower[k] : b.upper[k];
    }
    return cross_entropy(worst, label);
}

/// (1 - lambda) * standard + lambda * robust.
template <class S>
S combined_loss(const S& standard, const S& robust, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) {
        throw std::invalid_argument("combined_loss: lambda must lie in [0, 1]");
    }
    return S(1.0 - lambda) * standard + S(lambda) * robust;
}

}  // namespace recert
