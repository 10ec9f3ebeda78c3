#pragma once

#include <vector>

#include "cife/threadpool.hpp"

namespace cife {

// C[M,N] += A[M,K] * B[K,N], all row-major. Each output element is a sum
// over k in ascending order, computed by exactly one thread, so the result
// is bitwise identical for any pool size.
template <class T>
void gemm_nn_acc(const T* A, const T* B, T* C, int M, int K, int N) {
    parallel_for(M, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            T* c = C + i * N;
            const T* a = A + i * K;
            int k = 0;
            for (; k + 4 <= K; k += 4) {
                const T a0 = a[k], a1 = a[k + 1], a2 = a[k + 2], a3 = a[k + 3];
                const T* b0 = B + (k + 0) * N;
                const T* b1 = B + (k + 1) * N;
                const T* b2 = B + (k + 2) * N;
                const T* b3 = B + (k + 3) * N;
                for (int j = 0; j < N; ++j)
                    c[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
            }
            for (; k < K; ++k) {
                const T ak = a[k];
                const T* b = B + k * N;
                for (int j = 0; j < N; ++j) c[j] += ak * b[j];
            }
        }
    });
}

template <class T>
void transpose(const T* src, T* dst, int rows, int cols) {
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
}

template <class T>
std::vector<T> transposed(const T* src, int rows, int cols) {
    std::vector<T> out(static_cast<size_t>(rows) * cols);
    transpose(src, out.data(), rows, cols);
    return out;
}

}  // namespace cife
