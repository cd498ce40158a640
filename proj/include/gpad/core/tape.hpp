#pragma once

// Reverse-mode autodiff over a dynamically recorded graph.
//
// Every op produces a Node holding its value, its parents and a backward
// closure. backward(loss) topologically sorts the subgraph that actually
// requires gradients and accumulates d(loss)/d(leaf) additively into leaf
// grads; callers zero grads between steps.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gpad/core/tensor.hpp"

namespace gpad {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
    Tensor value;
    Tensor grad;  // lazily allocated, same shape as value
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node&)> backward_fn;  // reads this->grad, accumulates into parents
    const char* op = "leaf";

    Tensor& ensure_grad();
    void accumulate(const Tensor& g);
    void accumulate_raw(const double* g, std::int64_t n);
};

// Graph entry points.
Var constant(Tensor v);
Var make_leaf(Tensor v, bool requires_grad);

// Throws if t contains NaN/Inf; called by every op on its output.
void check_finite(const Tensor& t, const char* op);

// Reverse pass from a scalar loss. Throws on non-scalar input.
void backward(const Var& loss);

// Trainable tensor with persistent identity across steps.
struct Parameter {
    std::string name;
    Var var;
    bool trainable = true;

    Parameter() = default;
    Parameter(std::string n, Tensor init, bool train = true)
        : name(std::move(n)), var(make_leaf(std::move(init), train)), trainable(train) {}

    Tensor& value() { return var->value; }
    const Tensor& value() const { return var->value; }
    Tensor& grad() { return var->ensure_grad(); }

    void set_trainable(bool t) {
        trainable = t;
        var->requires_grad = t;
    }
    void zero_grad() { var->ensure_grad().fill(0.0); }
};

void zero_grads(const std::vector<Parameter*>& params);
std::int64_t total_size(const std::vector<Parameter*>& params);

}  // namespace gpad
