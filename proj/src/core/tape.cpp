#include "gpad/core/tape.hpp"

#include <stdexcept>
#include <unordered_set>

#include "gpad/kern/kernels.hpp"

namespace gpad {

Tensor& Node::ensure_grad() {
    if (grad.size() == 0 && value.size() > 0) grad = Tensor(value.shape());
    return grad;
}

void Node::accumulate(const Tensor& g) {
    Tensor& dst = ensure_grad();
    kern::add(dst.data(), dst.data(), g.data(), static_cast<std::size_t>(dst.size()));
}

void Node::accumulate_raw(const double* g, std::int64_t n) {
    Tensor& dst = ensure_grad();
    kern::add(dst.data(), dst.data(), g, static_cast<std::size_t>(n));
}

Var constant(Tensor v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->requires_grad = false;
    n->op = "const";
    return n;
}

Var make_leaf(Tensor v, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->requires_grad = requires_grad;
    n->op = "leaf";
    return n;
}

void check_finite(const Tensor& t, const char* op) {
    if (!kern::all_finite(t.data(), static_cast<std::size_t>(t.size())))
        throw std::runtime_error(std::string("non-finite value produced by op '") + op + "'");
}

void backward(const Var& loss) {
    if (!loss) throw std::invalid_argument("backward: null loss");
    if (loss->value.size() != 1)
        throw std::invalid_argument("backward requires a scalar loss, got shape " + loss->value.shape_str());

    // Iterative post-order DFS over the requires_grad subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;
    if (loss->requires_grad) stack.push_back({loss.get(), 0});
    while (!stack.empty()) {
        const std::size_t idx = stack.size() - 1;
        Node* node = stack[idx].node;
        if (stack[idx].next_child == 0) visited.insert(node);
        bool descended = false;
        while (stack[idx].next_child < node->parents.size()) {
            Node* p = node->parents[stack[idx].next_child++].get();
            if (p->requires_grad && !visited.count(p)) {
                stack.push_back({p, 0});  // may reallocate; node is re-derived next iteration
                descended = true;
                break;
            }
        }
        if (!descended) {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad();
    loss->grad.fill(0.0);
    loss->grad[0] = 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
}

void zero_grads(const std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->zero_grad();
}

std::int64_t total_size(const std::vector<Parameter*>& params) {
    std::int64_t n = 0;
    for (const Parameter* p : params) n += p->value().size();
    return n;
}

}  // namespace gpad
