#pragma once

#include <cmath>

#include "cife/tensor.hpp"
#include "cife/threadpool.hpp"

namespace cife::ops {

template <class T>
bool wants_grad(Tape<T>* tape, const TensorT<T>& a) {
    return tape && a.requires_grad();
}
template <class T>
bool wants_grad(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    return tape && (a.requires_grad() || b.requires_grad());
}

template <class T>
TensorT<T> add(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    CIFE_CHECK(a.shape() == b.shape(), "add: shape mismatch " << shape_str(a.shape()) << " vs " << shape_str(b.shape()));
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    int64_t n = static_cast<int64_t>(out.numel());
    parallel_for(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) po[i] = pa[i] + pb[i];
    });
    if (wants_grad(tape, a, b)) {
        out.set_requires_grad(true);
        tape->record([a, b, out]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            int64_t m = static_cast<int64_t>(out.numel());
            if (a.requires_grad()) {
                T* ga = a.grad();
                for (int64_t i = 0; i < m; ++i) ga[i] += g[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                for (int64_t i = 0; i < m; ++i) gb[i] += g[i];
            }
        });
    }
    maybe_validate(out, "add");
    return out;
}

template <class T>
TensorT<T> sub(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    CIFE_CHECK(a.shape() == b.shape(), "sub: shape mismatch " << shape_str(a.shape()) << " vs " << shape_str(b.shape()));
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    int64_t n = static_cast<int64_t>(out.numel());
    parallel_for(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) po[i] = pa[i] - pb[i];
    });
    if (wants_grad(tape, a, b)) {
        out.set_requires_grad(true);
        tape->record([a, b, out]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            int64_t m = static_cast<int64_t>(out.numel());
            if (a.requires_grad()) {
                T* ga = a.grad();
                for (int64_t i = 0; i < m; ++i) ga[i] += g[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                for (int64_t i = 0; i < m; ++i) gb[i] -= g[i];
            }
        });
    }
    maybe_validate(out, "sub");
    return out;
}

template <class T>
TensorT<T> mul(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    CIFE_CHECK(a.shape() == b.shape(), "mul: shape mismatch " << shape_str(a.shape()) << " vs " << shape_str(b.shape()));
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    int64_t n = static_cast<int64_t>(out.numel());
    parallel_for(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) po[i] = pa[i] * pb[i];
    });
    if (wants_grad(tape, a, b)) {
        out.set_requires_grad(true);
        tape->record([a, b, out]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            int64_t m = static_cast<int64_t>(out.numel());
            if (a.requires_grad()) {
                T* ga = a.grad();
                const T* pb2 = b.data();
                for (int64_t i = 0; i < m; ++i) ga[i] += g[i] * pb2[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                const T* pa2 = a.data();
                for (int64_t i = 0; i < m; ++i) gb[i] += g[i] * pa2[i];
            }
        });
    }
    maybe_validate(out, "mul");
    return out;
}

template <class T>
TensorT<T> scale(Tape<T>* tape, const TensorT<T>& a, double s) {
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    T* po = out.data();
    const T sv = static_cast<T>(s);
    int64_t n = static_cast<int64_t>(out.numel());
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * sv;
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out, sv]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            T* ga = a.grad();
            int64_t m = static_cast<int64_t>(out.numel());
            for (int64_t i = 0; i < m; ++i) ga[i] += g[i] * sv;
        });
    }
    maybe_validate(out, "scale");
    return out;
}

template <class T>
TensorT<T> add_scalar(Tape<T>* tape, const TensorT<T>& a, double s) {
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    T* po = out.data();
    const T sv = static_cast<T>(s);
    int64_t n = static_cast<int64_t>(out.numel());
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + sv;
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            T* ga = a.grad();
            int64_t m = static_cast<int64_t>(out.numel());
            for (int64_t i = 0; i < m; ++i) ga[i] += g[i];
        });
    }
    maybe_validate(out, "add_scalar");
    return out;
}

template <class T, class Fwd, class Dfn>
TensorT<T> unary_elementwise(Tape<T>* tape, const TensorT<T>& a, Fwd f, Dfn dfdx, const char* name) {
    auto out = TensorT<T>::zeros(a.shape());
    const T* pa = a.data();
    T* po = out.data();
    int64_t n = static_cast<int64_t>(out.numel());
    parallel_for(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) po[i] = f(pa[i]);
    });
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out, dfdx]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            const T* x = a.data();
            const T* y = out.data();
            T* ga = a.grad();
            int64_t m = static_cast<int64_t>(out.numel());
            for (int64_t i = 0; i < m; ++i) ga[i] += g[i] * dfdx(x[i], y[i]);
        });
    }
    maybe_validate(out, name);
    return out;
}

template <class T>
TensorT<T> silu(Tape<T>* tape, const TensorT<T>& a) {
    return unary_elementwise(
        tape, a,
        [](T x) {
            T s = T(1) / (T(1) + std::exp(-x));
            return x * s;
        },
        [](T x, T) {
            T s = T(1) / (T(1) + std::exp(-x));
            return s * (T(1) + x * (T(1) - s));
        },
        "silu");
}

template <class T>
TensorT<T> sigmoid(Tape<T>* tape, const TensorT<T>& a) {
    return unary_elementwise(
        tape, a, [](T x) { return T(1) / (T(1) + std::exp(-x)); },
        [](T, T y) { return y * (T(1) - y); }, "sigmoid");
}

template <class T>
TensorT<T> exp(Tape<T>* tape, const TensorT<T>& a) {
    return unary_elementwise(
        tape, a, [](T x) { return std::exp(x); }, [](T, T y) { return y; }, "exp");
}

template <class T>
TensorT<T> mean_all(Tape<T>* tape, const TensorT<T>& a) {
    auto out = TensorT<T>::zeros({1});
    const T* pa = a.data();
    int64_t n = static_cast<int64_t>(a.numel());
    // fixed-order accumulation in double precision
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) acc += static_cast<double>(pa[i]);
    out.data()[0] = static_cast<T>(acc / static_cast<double>(n));
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out, n]() mutable {
            if (!out.has_grad()) return;
            const T g = const_cast<TensorT<T>&>(out).grad()[0] / static_cast<T>(n);
            T* ga = a.grad();
            for (int64_t i = 0; i < n; ++i) ga[i] += g;
        });
    }
    maybe_validate(out, "mean_all");
    return out;
}

template <class T>
TensorT<T> sum_all(Tape<T>* tape, const TensorT<T>& a) {
    auto out = TensorT<T>::zeros({1});
    const T* pa = a.data();
    int64_t n = static_cast<int64_t>(a.numel());
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) acc += static_cast<double>(pa[i]);
    out.data()[0] = static_cast<T>(acc);
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out, n]() mutable {
            if (!out.has_grad()) return;
            const T g = const_cast<TensorT<T>&>(out).grad()[0];
            T* ga = a.grad();
            for (int64_t i = 0; i < n; ++i) ga[i] += g;
        });
    }
    maybe_validate(out, "sum_all");
    return out;
}

template <class T>
TensorT<T> mse(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b) {
    auto d = sub(tape, a, b);
    return mean_all(tape, mul(tape, d, d));
}

template <class T>
TensorT<T> reshape(Tape<T>* tape, const TensorT<T>& a, Shape new_shape) {
    CIFE_CHECK(numel(new_shape) == static_cast<int64_t>(a.numel()),
               "reshape: cannot view " << shape_str(a.shape()) << " as " << shape_str(new_shape));
    auto out = TensorT<T>::from(std::move(new_shape), a.vec());
    if (wants_grad(tape, a)) {
        out.set_requires_grad(true);
        tape->record([a, out]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            T* ga = a.grad();
            int64_t m = static_cast<int64_t>(out.numel());
            for (int64_t i = 0; i < m; ++i) ga[i] += g[i];
        });
    }
    return out;
}

// Concatenation along `axis`. Used for condition-row extension and UNet
// skip connections.
template <class T>
TensorT<T> concat(Tape<T>* tape, const TensorT<T>& a, const TensorT<T>& b, int axis) {
    CIFE_CHECK(a.ndim() == b.ndim(), "concat: rank mismatch");
    CIFE_CHECK(axis >= 0 && axis < a.ndim(), "concat: bad axis " << axis);
    for (int i = 0; i < a.ndim(); ++i)
        if (i != axis)
            CIFE_CHECK(a.dim(i) == b.dim(i),
                       "concat: shape mismatch " << shape_str(a.shape()) << " vs " << shape_str(b.shape()));
    Shape os = a.shape();
    os[static_cast<size_t>(axis)] += b.dim(axis);

    int64_t outer = 1;
    for (int i = 0; i < axis; ++i) outer *= a.dim(i);
    int64_t inner = 1;
    for (int i = axis + 1; i < a.ndim(); ++i) inner *= a.dim(i);
    const int64_t arun = a.dim(axis) * inner;
    const int64_t brun = b.dim(axis) * inner;

    auto out = TensorT<T>::zeros(os);
    T* po = out.data();
    const T* pa = a.data();
    const T* pb = b.data();
    for (int64_t o = 0; o < outer; ++o) {
        std::memcpy(po + o * (arun + brun), pa + o * arun, sizeof(T) * static_cast<size_t>(arun));
        std::memcpy(po + o * (arun + brun) + arun, pb + o * brun, sizeof(T) * static_cast<size_t>(brun));
    }
    if (wants_grad(tape, a, b)) {
        out.set_requires_grad(true);
        tape->record([a, b, out, outer, arun, brun]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            if (a.requires_grad()) {
                T* ga = a.grad();
                for (int64_t o = 0; o < outer; ++o)
                    for (int64_t i = 0; i < arun; ++i) ga[o * arun + i] += g[o * (arun + brun) + i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                for (int64_t o = 0; o < outer; ++o)
                    for (int64_t i = 0; i < brun; ++i) gb[o * brun + i] += g[o * (arun + brun) + arun + i];
            }
        });
    }
    maybe_validate(out, "concat");
    return out;
}

// x:(N,C,H,W) + b:(N,C), broadcast over spatial dims (timestep embedding).
template <class T>
TensorT<T> add_nchw_bias(Tape<T>* tape, const TensorT<T>& x, const TensorT<T>& b) {
    CIFE_CHECK(x.ndim() == 4 && b.ndim() == 2 && x.dim(0) == b.dim(0) && x.dim(1) == b.dim(1),
               "add_nchw_bias: incompatible " << shape_str(x.shape()) << " + " << shape_str(b.shape()));
    const int N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    auto out = TensorT<T>::zeros(x.shape());
    const T* px = x.data();
    const T* pb = b.data();
    T* po = out.data();
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T bv = pb[n * C + c];
            const T* xs = px + (static_cast<int64_t>(n) * C + c) * HW;
            T* os = po + (static_cast<int64_t>(n) * C + c) * HW;
            for (int i = 0; i < HW; ++i) os[i] = xs[i] + bv;
        }
    if (wants_grad(tape, x, b)) {
        out.set_requires_grad(true);
        tape->record([x, b, out, N, C, HW]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            if (x.requires_grad()) {
                T* gx = x.grad();
                int64_t m = static_cast<int64_t>(out.numel());
                for (int64_t i = 0; i < m; ++i) gx[i] += g[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                for (int n = 0; n < N; ++n)
                    for (int c = 0; c < C; ++c) {
                        const T* gs = g + (static_cast<int64_t>(n) * C + c) * HW;
                        double acc = 0.0;
                        for (int i = 0; i < HW; ++i) acc += static_cast<double>(gs[i]);
                        gb[n * C + c] += static_cast<T>(acc);
                    }
            }
        });
    }
    maybe_validate(out, "add_nchw_bias");
    return out;
}

// x:(N,L,D) + b:(L,D), broadcast over batch (positional table).
template <class T>
TensorT<T> add_seq_bias(Tape<T>* tape, const TensorT<T>& x, const TensorT<T>& b) {
    CIFE_CHECK(x.ndim() == 3 && b.ndim() == 2 && x.dim(1) == b.dim(0) && x.dim(2) == b.dim(1),
               "add_seq_bias: incompatible " << shape_str(x.shape()) << " + " << shape_str(b.shape()));
    const int N = x.dim(0);
    const int64_t LD = static_cast<int64_t>(x.dim(1)) * x.dim(2);
    auto out = TensorT<T>::zeros(x.shape());
    const T* px = x.data();
    const T* pb = b.data();
    T* po = out.data();
    for (int n = 0; n < N; ++n)
        for (int64_t i = 0; i < LD; ++i) po[n * LD + i] = px[n * LD + i] + pb[i];
    if (wants_grad(tape, x, b)) {
        out.set_requires_grad(true);
        tape->record([x, b, out, N, LD]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            if (x.requires_grad()) {
                T* gx = x.grad();
                for (int64_t i = 0; i < N * LD; ++i) gx[i] += g[i];
            }
            if (b.requires_grad()) {
                T* gb = b.grad();
                for (int n = 0; n < N; ++n)
                    for (int64_t i = 0; i < LD; ++i) gb[i] += g[n * LD + i];
            }
        });
    }
    maybe_validate(out, "add_seq_bias");
    return out;
}

// ids:(N,L) rows gathered from table:(V,D).
template <class T>
TensorT<T> embedding(Tape<T>* tape, const std::vector<int>& ids, int N, int L, const TensorT<T>& table) {
    CIFE_CHECK(static_cast<int>(ids.size()) == N * L, "embedding: ids size mismatch");
    const int V = table.dim(0), D = table.dim(1);
    for (int id : ids)
        CIFE_CHECK(id >= 0 && id < V, "embedding: token id " << id << " out of range [0," << V << ")");
    auto out = TensorT<T>::zeros({N, L, D});
    const T* pt = table.data();
    T* po = out.data();
    for (int i = 0; i < N * L; ++i)
        std::memcpy(po + static_cast<int64_t>(i) * D, pt + static_cast<int64_t>(ids[static_cast<size_t>(i)]) * D,
                    sizeof(T) * static_cast<size_t>(D));
    if (wants_grad(tape, table)) {
        out.set_requires_grad(true);
        tape->record([ids, table, out, N, L, D]() mutable {
            if (!out.has_grad()) return;
            const T* g = const_cast<TensorT<T>&>(out).grad();
            T* gt = table.grad();
            for (int i = 0; i < N * L; ++i) {
                T* dst = gt + static_cast<int64_t>(ids[static_cast<size_t>(i)]) * D;
                const T* src = g + static_cast<int64_t>(i) * D;
                for (int d = 0; d < D; ++d) dst[d] += src[d];
            }
        });
    }
    maybe_validate(out, "embedding");
    return out;
}

}  // namespace cife::ops
