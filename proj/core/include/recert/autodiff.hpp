#pragma once

// Reverse-mode automatic differentiation over a flat tape of scalar nodes.
//
// Every arithmetic operation on a `Var` that involves at least one recorded
// operand appends one node to the active tape. Constants (Vars created from a
// plain double) never touch the tape, so weight-free subexpressions cost
// nothing. The tape is thread-local: install one with `TapeScope`.

#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <stdexcept>
#include <vector>

namespace recert::ad {

class Tape;

namespace detail {
Tape*& active_tape();
}

/// One recorded scalar operation: up to two parents with local partials.
struct Node {
    std::int64_t parent[2];
    double partial[2];
};

class Tape {
public:
    Tape() { nodes_.reserve(1 << 16); }

    std::int64_t push_leaf() { return push(-1, 0.0, -1, 0.0); }

    std::int64_t push(std::int64_t p0, double d0, std::int64_t p1, double d1) {
        nodes_.push_back(Node{{p0, p1}, {d0, d1}});
        return static_cast<std::int64_t>(nodes_.size()) - 1;
    }

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    /// Adjoints of every node with respect to `output`.
    std::vector<double> adjoints(std::int64_t output) const;

private:
    std::vector<Node> nodes_;
};

/// Installs a tape as the thread's active tape for the lifetime of the scope.
class TapeScope {
public:
    explicit TapeScope(Tape& tape) : previous_(detail::active_tape()) { detail::active_tape() = &tape; }
    ~TapeScope() { detail::active_tape() = previous_; }
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape* previous_;
};

class Var {
public:
    Var() = default;
    Var(double v) : value_(v) {}  // NOLINT: implicit constants are intended
    Var(double v, std::int64_t index) : value_(v), index_(index) {}

    /// A fresh leaf on the active tape.
    static Var leaf(double v) {
        Tape* tape = detail::active_tape();
        if (tape == nullptr) {
            throw std::logic_error("ad::Var::leaf: no active tape");
        }
        return Var(v, tape->push_leaf());
    }

    double value() const { return value_; }
    std::int64_t index() const { return index_; }
    bool recorded() const { return index_ >= 0; }

    Var& operator+=(const Var& o) { return *this = *this + o; }
    Var& operator-=(const Var& o) { return *this = *this - o; }
    Var& operator*=(const Var& o) { return *this = *this * o; }
    Var& operator/=(const Var& o) { return *this = *this / o; }

    friend Var operator+(const Var& a, const Var& b) { return binary(a.value_ + b.value_, a, 1.0, b, 1.0); }
    friend Var operator-(const Var& a, const Var& b) { return binary(a.value_ - b.value_, a, 1.0, b, -1.0); }
    friend Var operator*(const Var& a, const Var& b) { return binary(a.value_ * b.value_, a, b.value_, b, a.value_); }
    friend Var operator/(const Var& a, const Var& b) {
        const double q = a.value_ / b.value_;
        return binary(q, a, 1.0 / b.value_, b, -q / b.value_);
    }
    friend Var operator-(const Var& a) { return unary(-a.value_, a, -1.0); }

    /// Records `value` with partial `d` w.r.t. `a`.
    static Var unary(double value, const Var& a, double d) {
        if (!a.recorded()) {
            return Var(value);
        }
        return Var(value, detail::active_tape()->push(a.index_, d, -1, 0.0));
    }

    static Var binary(double value, const Var& a, double da, const Var& b, double db) {
        if (!a.recorded() && !b.recorded()) {
            return Var(value);
        }
        return Var(value, detail::active_tape()->push(a.recorded() ? a.index_ : -1, da,
                                                      b.recorded() ? b.index_ : -1, db));
    }

private:
    double value_ = 0.0;
    std::int64_t index_ = -1;
};

inline Var tanh(const Var& a) {
    const double t = std::tanh(a.value());
    return Var::unary(t, a, 1.0 - t * t);
}

inline Var exp(const Var& a) {
    const double e = std::exp(a.value());
    return Var::unary(e, a, e);
}

inline Var log(const Var& a) { return Var::unary(std::log(a.value()), a, 1.0 / a.value()); }

inline Var log1p(const Var& a) { return Var::unary(std::log1p(a.value()), a, 1.0 / (1.0 + a.value())); }

inline Var sqrt(const Var& a) {
    const double s = std::sqrt(a.value());
    return Var::unary(s, a, 0.5 / s);
}

inline Var atanh(const Var& a) { return Var::unary(std::atanh(a.value()), a, 1.0 / (1.0 - a.value() * a.value())); }

/// Subgradient convention: d|x|/dx = sign(x) with sign(0) = 0.
inline Var abs(const Var& a) {
    const double v = a.value();
    return Var::unary(std::fabs(v), a, v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
}

}  // namespace recert::ad

namespace recert {

// Scalar helpers shared by the double and Var instantiations.

inline double value_of(double x) { return x; }
inline double value_of(const ad::Var& x) { return x.value(); }

template <class S>
inline S sigmoid(const S& x) {
    using std::exp;
    if (value_of(x) >= 0.0) {
        return S(1.0) / (S(1.0) + exp(-x));
    }
    const S e = exp(x);
    return e / (S(1.0) + e);
}

inline ad::Var sigmoid(const ad::Var& x) {
    const double s = sigmoid(x.value());
    return ad::Var::unary(s, x, s * (1.0 - s));
}

/// max/min with first-argument tie-break, so the selected branch carries the derivative.
template <class S>
inline const S& select_max(const S& a, const S& b) {
    return value_of(b) > value_of(a) ? b : a;
}

template <class S>
inline const S& select_min(const S& a, const S& b) {
    return value_of(b) < value_of(a) ? b : a;
}

template <class S>
inline S abs_of(const S& x) {
    using std::fabs;
    if constexpr (std::is_same_v<S, double>) {
        return fabs(x);
    } else {
        return ad::abs(x);
    }
}

}  // namespace recert
