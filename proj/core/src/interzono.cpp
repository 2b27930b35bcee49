#include "recert/interzono.hpp"

#include <cmath>
#include <sstream>

namespace recert {

namespace {

template <class S>
void require_same_kind(const InterZono<S>& a, const InterZono<S>& b, const char* what) {
    if (a.kind() != b.kind()) {
        throw std::invalid_argument(std::string(what) + ": mixing zonotope and interzono operands");
    }
    if (a.dim() != b.dim()) {
        throw ShapeError(std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
    }
}

std::string inverted_message(std::size_t coordinate, double lower, double upper) {
    std::ostringstream os;
    os.precision(17);
    os << "inverted bounds at coordinate " << coordinate << ": lower " << lower << " > upper " << upper;
    return os.str();
}

}  // namespace

std::string_view to_string(DomainKind kind) { return kind == DomainKind::zonotope ? "zonotope" : "interzono"; }

DomainKind parse_domain_kind(std::string_view text) {
    if (text == "zonotope") {
        return DomainKind::zonotope;
    }
    if (text == "interzono") {
        return DomainKind::interzono;
    }
    throw std::invalid_argument("unknown domain '" + std::string(text) + "' (expected zonotope or interzono)");
}

InvertedBoundsError::InvertedBoundsError(std::size_t coordinate, double lower, double upper)
    : std::runtime_error(inverted_message(coordinate, lower, upper)), coordinate_(coordinate) {}

template <class S>
InterZono<S> point_domain(Vector<S> value, DomainKind kind) {
    InterZono<S> d{Zonotope<S>(value), std::nullopt};
    if (kind == DomainKind::interzono) {
        d.support = Zonotope<S>(std::move(value));
    }
    return d;
}

template <class S>
InterZono<S> lift_to_interzono(const Zonotope<S>& z, NoisePool& pool) {
    return InterZono<S>{z, box_zonotope(concretize(z), pool)};
}

template <class S>
IntervalBounds<S> interzono_concretize(const InterZono<S>& d) {
    IntervalBounds<S> main = concretize(d.main);
    if (!d.support) {
        return main;
    }
    if (d.support->dim() != d.main.dim()) {
        throw ShapeError("interzono_concretize: main and support dimensions differ");
    }
    const IntervalBounds<S> support = concretize(*d.support);
    const std::size_t n = main.size();
    IntervalBounds<S> out{Vector<S>(n), Vector<S>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.lower[j] = select_max(main.lower[j], support.lower[j]);
        out.upper[j] = select_min(main.upper[j], support.upper[j]);
        const double lo = value_of(out.lower[j]);
        const double hi = value_of(out.upper[j]);
        if (lo > hi) {
            if (lo > hi + kInvertedTolerance) {
                throw InvertedBoundsError(j, lo, hi);
            }
            const S mid = (out.lower[j] + out.upper[j]) * S(0.5);
            out.lower[j] = mid;
            out.upper[j] = mid;
        }
    }
    return out;
}

template <class S>
InterZono<S> interzono_affine(const InterZono<S>& d, const Matrix<S>& w, const Vector<S>& b) {
    InterZono<S> out{affine(d.main, w, b), std::nullopt};
    if (d.support) {
        out.support = affine(*d.support, w, b);
    }
    return out;
}

template <class S>
InterZono<S> interzono_affine2(const InterZono<S>& dx, const Matrix<S>& wx, const InterZono<S>& dh,
                               const Matrix<S>& wh, const Vector<S>& b) {
    if (dx.kind() != dh.kind()) {
        throw std::invalid_argument("interzono_affine2: mixing zonotope and interzono operands");
    }
    const Vector<S> zero(b.size(), S(0.0));
    InterZono<S> out{add(affine(dx.main, wx, b), affine(dh.main, wh, zero)), std::nullopt};
    if (dx.support) {
        out.support = add(affine(*dx.support, wx, b), affine(*dh.support, wh, zero));
    }
    return out;
}

template <class S>
InterZono<S> interzono_add(const InterZono<S>& a, const InterZono<S>& b, NoisePool& pool) {
    require_same_kind(a, b, "interzono_add");
    InterZono<S> out{add(a.main, b.main), std::nullopt};
    if (a.support) {
        const IntervalBounds<S> ba = interzono_concretize(a);
        const IntervalBounds<S> bb = interzono_concretize(b);
        out.support = box_zonotope(IntervalBounds<S>{add(ba.lower, bb.lower), add(ba.upper, bb.upper)}, pool);
    }
    return out;
}

template <class S>
InterZono<S> elementwise_interzono(const InterZono<S>& d, Activation f, NoisePool& pool) {
    const IntervalBounds<S> bounds = interzono_concretize(d);
    InterZono<S> out{elementwise_zono(d.main, bounds, f, pool), std::nullopt};
    if (d.support) {
        out.support = box_transform(bounds, f, pool);
    }
    return out;
}

template <class S>
InterZono<S> sigma_tanh_product_interzono(const InterZono<S>& dx, const InterZono<S>& dy, NoisePool& pool) {
    using std::tanh;
    require_same_kind(dx, dy, "sigma_tanh_product_interzono");
    const IntervalBounds<S> bx = interzono_concretize(dx);
    const IntervalBounds<S> by = interzono_concretize(dy);
    InterZono<S> out{sigma_tanh_zono(dx.main, dy.main, bx, by, pool), std::nullopt};
    if (dx.support) {
        const std::size_t n = dx.dim();
        IntervalBounds<S> image{Vector<S>(n), Vector<S>(n)};
        for (std::size_t j = 0; j < n; ++j) {
            const S slx = sigmoid(bx.lower[j]);
            const S sux = sigmoid(bx.upper[j]);
            const S tly = tanh(by.lower[j]);
            const S tuy = tanh(by.upper[j]);
            image.lower[j] = select_min(S(slx * tly), S(sux * tly));
            image.upper[j] = select_max(S(slx * tuy), S(sux * tuy));
        }
        out.support = box_zonotope(image, pool);
    }
    return out;
}

template <class S>
InterZono<S> hadamard_generic(const InterZono<S>& dx, const InterZono<S>& dy, NoisePool& pool) {
    require_same_kind(dx, dy, "hadamard_generic");
    InterZono<S> out{hadamard_zono(dx.main, dy.main, pool), std::nullopt};
    if (dx.support) {
        const IntervalBounds<S> bx = interzono_concretize(dx);
        const IntervalBounds<S> by = interzono_concretize(dy);
        const std::size_t n = dx.dim();
        IntervalBounds<S> image{Vector<S>(n), Vector<S>(n)};
        for (std::size_t j = 0; j < n; ++j) {
            const S c0 = bx.lower[j] * by.lower[j];
            const S c1 = bx.lower[j] * by.upper[j];
            const S c2 = bx.upper[j] * by.lower[j];
            const S c3 = bx.upper[j] * by.upper[j];
            image.lower[j] = select_min(select_min(c0, c1), select_min(c2, c3));
            image.upper[j] = select_max(select_max(c0, c1), select_max(c2, c3));
        }
        out.support = box_zonotope(image, pool);
    }
    return out;
}

#define RECERT_INSTANTIATE_INTERZONO(S)                                                                       \
    template InterZono<S> point_domain(Vector<S>, DomainKind);                                                \
    template InterZono<S> lift_to_interzono(const Zonotope<S>&, NoisePool&);                                  \
    template IntervalBounds<S> interzono_concretize(const InterZono<S>&);                                     \
    template InterZono<S> interzono_affine(const InterZono<S>&, const Matrix<S>&, const Vector<S>&);          \
    template InterZono<S> interzono_affine2(const InterZono<S>&, const Matrix<S>&, const InterZono<S>&,       \
                                            const Matrix<S>&, const Vector<S>&);                              \
    template InterZono<S> interzono_add(const InterZono<S>&, const InterZono<S>&, NoisePool&);                \
    template InterZono<S> elementwise_interzono(const InterZono<S>&, Activation, NoisePool&);                 \
    template InterZono<S> sigma_tanh_product_interzono(const InterZono<S>&, const InterZono<S>&, NoisePool&); \
    template InterZono<S> hadamard_generic(const InterZono<S>&, const InterZono<S>&, NoisePool&);

RECERT_INSTANTIATE_INTERZONO(double)
RECERT_INSTANTIATE_INTERZONO(ad::Var)

}  // namespace recert
