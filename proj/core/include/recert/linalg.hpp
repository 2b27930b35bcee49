#pragma once

// Minimal dense row-major matrix and vector helpers, generic over the scalar
// type so the same code runs on doubles and on tape-recorded Vars.

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recert/autodiff.hpp"

namespace recert {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class S>
using Vector = std::vector<S>;

template <class S>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, S fill = S(0.0)) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<S> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ShapeError("Matrix: data size does not match shape");
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = S(1.0);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    S& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const S& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<S>& data() { return data_; }
    const std::vector<S>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> data_;
};

inline std::string shape_string(std::size_t r, std::size_t c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

template <class S>
Vector<S> matvec(const Matrix<S>& w, const Vector<S>& x) {
    if (w.cols() != x.size()) {
        throw ShapeError("matvec: matrix " + shape_string(w.rows(), w.cols()) + " vs vector of length " +
                         std::to_string(x.size()));
    }
    Vector<S> y(w.rows(), S(0.0));
    for (std::size_t r = 0; r < w.rows(); ++r) {
        S acc(0.0);
        for (std::size_t c = 0; c < w.cols(); ++c) {
            acc += w(r, c) * x[c];
        }
        y[r] = acc;
    }
    return y;
}

template <class S>
Vector<S> add(const Vector<S>& a, const Vector<S>& b) {
    if (a.size() != b.size()) {
        throw ShapeError("vector add: length mismatch");
    }
    Vector<S> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

/// Converts between scalar types (double -> Var constants, Var -> double values).
template <class To, class From>
Vector<To> cast_vector(const Vector<From>& v) {
    Vector<To> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if constexpr (std::is_same_v<To, double>) {
            out.push_back(value_of(x));
        } else {
            out.push_back(To(value_of(x)));
        }
    }
    return out;
}

template <class To, class From>
Matrix<To> cast_matrix(const Matrix<From>& m) {
    return Matrix<To>(m.rows(), m.cols(), cast_vector<To>(m.data()));
}

}  // namespace recert
