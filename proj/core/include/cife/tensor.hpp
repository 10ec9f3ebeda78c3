#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cife/common.hpp"
#include "cife/rng.hpp"

namespace cife {

template <class T>
struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;  // allocated lazily on first accumulation
    bool requires_grad = false;
};

// Shared handle to a dense row-major tensor. Values are written once by the
// op that creates the tensor; afterwards only the optimizer mutates
// parameter tensors.
template <class T>
class TensorT {
  public:
    using Scalar = T;

    TensorT() = default;

    static TensorT zeros(Shape shape, bool requires_grad = false) {
        TensorT t;
        t.n_ = std::make_shared<Node<T>>();
        t.n_->shape = std::move(shape);
        t.n_->value.assign(static_cast<size_t>(numel(t.n_->shape)), T(0));
        t.n_->requires_grad = requires_grad;
        return t;
    }
    static TensorT full(Shape shape, T v, bool requires_grad = false) {
        TensorT t = zeros(std::move(shape), requires_grad);
        std::fill(t.n_->value.begin(), t.n_->value.end(), v);
        return t;
    }
    static TensorT from(Shape shape, std::vector<T> data, bool requires_grad = false) {
        CIFE_CHECK(static_cast<int64_t>(data.size()) == numel(shape),
                   "tensor data length " << data.size() << " does not match shape " << shape_str(shape));
        TensorT t;
        t.n_ = std::make_shared<Node<T>>();
        t.n_->shape = std::move(shape);
        t.n_->value = std::move(data);
        t.n_->requires_grad = requires_grad;
        return t;
    }
    static TensorT gaussian(Shape shape, rng::Stream& rs, double scale, bool requires_grad = false) {
        TensorT t = zeros(std::move(shape), requires_grad);
        rs.fill_gaussian(std::span<T>(t.data(), t.numel()), scale);
        return t;
    }

    bool defined() const { return n_ != nullptr; }
    const Shape& shape() const { return n_->shape; }
    int dim(int i) const { return n_->shape[static_cast<size_t>(i)]; }
    int ndim() const { return static_cast<int>(n_->shape.size()); }
    size_t numel() const { return n_->value.size(); }

    T* data() { return n_->value.data(); }
    const T* data() const { return n_->value.data(); }
    std::vector<T>& vec() { return n_->value; }
    const std::vector<T>& vec() const { return n_->value; }

    T item() const {
        CIFE_CHECK(numel() == 1, "item() on tensor of shape " << shape_str(shape()));
        return n_->value[0];
    }

    bool requires_grad() const { return n_ && n_->requires_grad; }
    void set_requires_grad(bool rg) { n_->requires_grad = rg; }

    bool has_grad() const { return n_ && !n_->grad.empty(); }
    // Lazily allocated, zero-filled gradient buffer.
    T* grad() {
        if (n_->grad.empty()) n_->grad.assign(n_->value.size(), T(0));
        return n_->grad.data();
    }
    const std::vector<T>& grad_vec() const { return n_->grad; }
    void zero_grad() {
        if (n_) n_->grad.clear();
    }

    bool same_node(const TensorT& o) const { return n_ == o.n_; }

    bool all_finite() const {
        for (const T& v : n_->value)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

  private:
    std::shared_ptr<Node<T>> n_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

// Ordered record of executed differentiable ops. Backward replays the
// record in exact reverse execution order.
template <class T>
class Tape {
  public:
    void record(std::function<void()> backward_fn) { ops_.push_back(std::move(backward_fn)); }
    size_t size() const { return ops_.size(); }
    void clear() { ops_.clear(); }

    void backward(TensorT<T>& loss) {
        CIFE_CHECK(loss.numel() == 1, "backward requires a scalar loss, got " << shape_str(loss.shape()));
        if (!std::isfinite(static_cast<double>(loss.item())))
            throw Error("backward: non-finite loss");
        loss.grad()[0] = T(1);
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    }

  private:
    std::vector<std::function<void()>> ops_;
};

template <class T>
inline void maybe_validate(const TensorT<T>& t, const char* op) {
    if (debug_validate_enabled() && !t.all_finite())
        throw Error(std::string("non-finite values after op ") + op);
}

}  // namespace cife
