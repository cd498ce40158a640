#include "gpad/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gpad/kern/kernels.hpp"

namespace gpad::ops {

namespace {

using std::int64_t;

Var make_node(const char* op, Tensor value, std::vector<Var> parents, std::function<void(Node&)> back) {
    check_finite(value, op);
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->op = op;
    bool rg = false;
    for (const auto& p : parents) rg = rg || p->requires_grad;
    n->requires_grad = rg;
    n->parents = std::move(parents);
    if (rg) n->backward_fn = std::move(back);
    return n;
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (!a->value.same_shape(b->value))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a->value.shape_str() + " vs " +
                                    b->value.shape_str());
}

bool wants(const Node& n, std::size_t i) { return n.parents[i]->requires_grad; }

}  // namespace

Var add(Var a, Var b) {
    require_same_shape(a, b, "add");
    Tensor out(a->value.shape());
    kern::add(out.data(), a->value.data(), b->value.data(), static_cast<std::size_t>(out.size()));
    return make_node("add", std::move(out), {a, b}, [](Node& n) {
        if (wants(n, 0)) n.parents[0]->accumulate(n.grad);
        if (wants(n, 1)) n.parents[1]->accumulate(n.grad);
    });
}

Var sub(Var a, Var b) {
    require_same_shape(a, b, "sub");
    Tensor out(a->value.shape());
    kern::sub(out.data(), a->value.data(), b->value.data(), static_cast<std::size_t>(out.size()));
    return make_node("sub", std::move(out), {a, b}, [](Node& n) {
        if (wants(n, 0)) n.parents[0]->accumulate(n.grad);
        if (wants(n, 1)) {
            Tensor& dst = n.parents[1]->ensure_grad();
            kern::sub(dst.data(), dst.data(), n.grad.data(), static_cast<std::size_t>(dst.size()));
        }
    });
}

Var mul(Var a, Var b) {
    require_same_shape(a, b, "mul");
    Tensor out(a->value.shape());
    kern::mul(out.data(), a->value.data(), b->value.data(), static_cast<std::size_t>(out.size()));
    return make_node("mul", std::move(out), {a, b}, [](Node& n) {
        const std::size_t sz = static_cast<std::size_t>(n.value.size());
        Tensor tmp(n.value.shape());
        if (wants(n, 0)) {
            kern::mul(tmp.data(), n.grad.data(), n.parents[1]->value.data(), sz);
            n.parents[0]->accumulate(tmp);
        }
        if (wants(n, 1)) {
            kern::mul(tmp.data(), n.grad.data(), n.parents[0]->value.data(), sz);
            n.parents[1]->accumulate(tmp);
        }
    });
}

Var div(Var a, Var b) {
    require_same_shape(a, b, "div");
    Tensor out(a->value.shape());
    kern::div(out.data(), a->value.data(), b->value.data(), static_cast<std::size_t>(out.size()));
    return make_node("div", std::move(out), {a, b}, [](Node& n) {
        const std::size_t sz = static_cast<std::size_t>(n.value.size());
        Tensor tmp(n.value.shape());
        const double* bv = n.parents[1]->value.data();
        if (wants(n, 0)) {
            kern::div(tmp.data(), n.grad.data(), bv, sz);
            n.parents[0]->accumulate(tmp);
        }
        if (wants(n, 1)) {
            // db = -g * a / b^2 = -g * out / b
            kern::mul(tmp.data(), n.grad.data(), n.value.data(), sz);
            kern::div(tmp.data(), tmp.data(), bv, sz);
            Tensor& dst = n.parents[1]->ensure_grad();
            kern::sub(dst.data(), dst.data(), tmp.data(), sz);
        }
    });
}

Var neg(Var a) {
    Tensor out(a->value.shape());
    kern::scale(out.data(), a->value.data(), -1.0, static_cast<std::size_t>(out.size()));
    return make_node("neg", std::move(out), {a}, [](Node& n) {
        Tensor& dst = n.parents[0]->ensure_grad();
        kern::sub(dst.data(), dst.data(), n.grad.data(), static_cast<std::size_t>(dst.size()));
    });
}

Var add_scalar(Var a, double c) {
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = a->value[i] + c;
    return make_node("add_scalar", std::move(out), {a},
                     [](Node& n) { n.parents[0]->accumulate(n.grad); });
}

Var mul_scalar(Var a, double c) {
    Tensor out(a->value.shape());
    kern::scale(out.data(), a->value.data(), c, static_cast<std::size_t>(out.size()));
    return make_node("mul_scalar", std::move(out), {a}, [c](Node& n) {
        Tensor& dst = n.parents[0]->ensure_grad();
        kern::axpy(dst.data(), c, n.grad.data(), static_cast<std::size_t>(dst.size()));
    });
}

Var exp_v(Var a) {
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = std::exp(a->value[i]);
    return make_node("exp", std::move(out), {a}, [](Node& n) {
        Tensor tmp(n.value.shape());
        kern::mul(tmp.data(), n.grad.data(), n.value.data(), static_cast<std::size_t>(tmp.size()));
        n.parents[0]->accumulate(tmp);
    });
}

Var sqrt_v(Var a) {
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(a->value[i]);
    return make_node("sqrt", std::move(out), {a}, [](Node& n) {
        Tensor tmp(n.value.shape());
        for (int64_t i = 0; i < tmp.size(); ++i) tmp[i] = 0.5 * n.grad[i] / n.value[i];
        n.parents[0]->accumulate(tmp);
    });
}

Var tanh_v(Var a) {
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a->value[i]);
    return make_node("tanh", std::move(out), {a}, [](Node& n) {
        Tensor tmp(n.value.shape());
        for (int64_t i = 0; i < tmp.size(); ++i) tmp[i] = n.grad[i] * (1.0 - n.value[i] * n.value[i]);
        n.parents[0]->accumulate(tmp);
    });
}

Var relu(Var a) {
    Tensor out(a->value.shape());
    kern::relu(out.data(), a->value.data(), static_cast<std::size_t>(out.size()));
    return make_node("relu", std::move(out), {a}, [](Node& n) {
        Tensor& dst = n.parents[0]->ensure_grad();
        kern::relu_grad_acc(dst.data(), n.grad.data(), n.parents[0]->value.data(),
                            static_cast<std::size_t>(dst.size()));
    });
}

namespace {
double softplus_val(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid_val(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}
}  // namespace

Var softplus(Var a) {
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = softplus_val(a->value[i]);
    return make_node("softplus", std::move(out), {a}, [](Node& n) {
        const Tensor& x = n.parents[0]->value;
        Tensor tmp(n.value.shape());
        for (int64_t i = 0; i < tmp.size(); ++i) tmp[i] = n.grad[i] * sigmoid_val(x[i]);
        n.parents[0]->accumulate(tmp);
    });
}

Var clamp(Var a, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("clamp: lo must be < hi");
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = std::min(hi, std::max(lo, a->value[i]));
    return make_node("clamp", std::move(out), {a}, [lo, hi](Node& n) {
        const Tensor& x = n.parents[0]->value;
        Tensor tmp(n.value.shape());
        for (int64_t i = 0; i < tmp.size(); ++i) tmp[i] = (x[i] > lo && x[i] < hi) ? n.grad[i] : 0.0;
        n.parents[0]->accumulate(tmp);
    });
}

Var add_bias(Var a, Var bias) {
    if (bias->value.rank() != 1) throw std::invalid_argument("add_bias: bias must be rank 1");
    const int64_t c = bias->value.size();
    if (a->value.size() % c != 0 || a->value.dim(a->value.rank() - 1) != c)
        throw std::invalid_argument("add_bias: last extent must match bias length");
    const int64_t rows = a->value.size() / c;
    Tensor out(a->value.shape());
    for (int64_t r = 0; r < rows; ++r)
        kern::add(out.data() + r * c, a->value.data() + r * c, bias->value.data(), static_cast<std::size_t>(c));
    return make_node("add_bias", std::move(out), {a, bias}, [rows, c](Node& n) {
        if (wants(n, 0)) n.parents[0]->accumulate(n.grad);
        if (wants(n, 1)) {
            Tensor& db = n.parents[1]->ensure_grad();
            for (int64_t r = 0; r < rows; ++r)
                kern::add(db.data(), db.data(), n.grad.data() + r * c, static_cast<std::size_t>(c));
        }
    });
}

Var mul_bcast_last(Var a, Var b) {
    const int rk = a->value.rank();
    if (b->value.rank() != rk || b->value.dim(rk - 1) != 1)
        throw std::invalid_argument("mul_bcast_last: b must have trailing extent 1");
    for (int i = 0; i < rk - 1; ++i)
        if (a->value.dim(i) != b->value.dim(i)) throw std::invalid_argument("mul_bcast_last: leading shape mismatch");
    const int64_t d = a->value.dim(rk - 1);
    const int64_t rows = a->value.size() / d;
    Tensor out(a->value.shape());
    for (int64_t r = 0; r < rows; ++r)
        kern::scale(out.data() + r * d, a->value.data() + r * d, b->value[r], static_cast<std::size_t>(d));
    return make_node("mul_bcast_last", std::move(out), {a, b}, [rows, d](Node& n) {
        const Tensor& av = n.parents[0]->value;
        const Tensor& bv = n.parents[1]->value;
        if (wants(n, 0)) {
            Tensor& da = n.parents[0]->ensure_grad();
            for (int64_t r = 0; r < rows; ++r)
                kern::axpy(da.data() + r * d, bv[r], n.grad.data() + r * d, static_cast<std::size_t>(d));
        }
        if (wants(n, 1)) {
            Tensor& db = n.parents[1]->ensure_grad();
            for (int64_t r = 0; r < rows; ++r)
                db[r] += kern::dot(n.grad.data() + r * d, av.data() + r * d, static_cast<std::size_t>(d));
        }
    });
}

Var add_bcast_mid(Var a, Var b) {
    if (a->value.rank() != 3 || b->value.rank() != 2 || a->value.dim(0) != b->value.dim(0) ||
        a->value.dim(2) != b->value.dim(1))
        throw std::invalid_argument("add_bcast_mid: expected a[N,W,d] and b[N,d]");
    const int64_t N = a->value.dim(0), W = a->value.dim(1), d = a->value.dim(2);
    Tensor out(a->value.shape());
    for (int64_t i = 0; i < N; ++i)
        for (int64_t w = 0; w < W; ++w)
            kern::add(out.data() + (i * W + w) * d, a->value.data() + (i * W + w) * d,
                      b->value.data() + i * d, static_cast<std::size_t>(d));
    return make_node("add_bcast_mid", std::move(out), {a, b}, [N, W, d](Node& n) {
        if (wants(n, 0)) n.parents[0]->accumulate(n.grad);
        if (wants(n, 1)) {
            Tensor& db = n.parents[1]->ensure_grad();
            for (int64_t i = 0; i < N; ++i)
                for (int64_t w = 0; w < W; ++w)
                    kern::add(db.data() + i * d, db.data() + i * d, n.grad.data() + (i * W + w) * d,
                              static_cast<std::size_t>(d));
        }
    });
}

namespace {

void matmul_raw(double* c, const double* a, const double* b, int64_t m, int64_t k, int64_t n) {
    // c [m,n] += a [m,k] * b [k,n]; caller zeroes c.
    for (int64_t i = 0; i < m; ++i)
        for (int64_t p = 0; p < k; ++p)
            kern::axpy(c + i * n, a[i * k + p], b + p * n, static_cast<std::size_t>(n));
}

void matmul_backward_raw(const double* g, const double* a, const double* b, double* da, double* db,
                         int64_t m, int64_t k, int64_t n) {
    if (da)
        for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p)
                da[i * k + p] += kern::dot(g + i * n, b + p * n, static_cast<std::size_t>(n));
    if (db)
        for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p)
                kern::axpy(db + p * n, a[i * k + p], g + i * n, static_cast<std::size_t>(n));
}

}  // namespace

Var matmul(Var a, Var b) {
    if (a->value.rank() != 2 || b->value.rank() != 2 || a->value.dim(1) != b->value.dim(0))
        throw std::invalid_argument("matmul: incompatible shapes " + a->value.shape_str() + " x " +
                                    b->value.shape_str());
    const int64_t m = a->value.dim(0), k = a->value.dim(1), n = b->value.dim(1);
    Tensor out({m, n});
    matmul_raw(out.data(), a->value.data(), b->value.data(), m, k, n);
    return make_node("matmul", std::move(out), {a, b}, [m, k, n](Node& nd) {
        double* da = wants(nd, 0) ? nd.parents[0]->ensure_grad().data() : nullptr;
        double* db = wants(nd, 1) ? nd.parents[1]->ensure_grad().data() : nullptr;
        matmul_backward_raw(nd.grad.data(), nd.parents[0]->value.data(), nd.parents[1]->value.data(),
                            da, db, m, k, n);
    });
}

Var bmm(Var a, Var b) {
    if (a->value.rank() != 3 || b->value.rank() != 3 || a->value.dim(0) != b->value.dim(0) ||
        a->value.dim(2) != b->value.dim(1))
        throw std::invalid_argument("bmm: incompatible shapes " + a->value.shape_str() + " x " +
                                    b->value.shape_str());
    const int64_t B = a->value.dim(0), m = a->value.dim(1), k = a->value.dim(2), n = b->value.dim(2);
    Tensor out({B, m, n});
    for (int64_t q = 0; q < B; ++q)
        matmul_raw(out.data() + q * m * n, a->value.data() + q * m * k, b->value.data() + q * k * n, m, k, n);
    return make_node("bmm", std::move(out), {a, b}, [B, m, k, n](Node& nd) {
        double* da = wants(nd, 0) ? nd.parents[0]->ensure_grad().data() : nullptr;
        double* db = wants(nd, 1) ? nd.parents[1]->ensure_grad().data() : nullptr;
        for (int64_t q = 0; q < B; ++q)
            matmul_backward_raw(nd.grad.data() + q * m * n, nd.parents[0]->value.data() + q * m * k,
                                nd.parents[1]->value.data() + q * k * n, da ? da + q * m * k : nullptr,
                                db ? db + q * k * n : nullptr, m, k, n);
    });
}

Var transpose2(Var a) {
    if (a->value.rank() != 2) throw std::invalid_argument("transpose2: rank 2 required");
    const int64_t m = a->value.dim(0), n = a->value.dim(1);
    Tensor out({n, m});
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out[j * m + i] = a->value[i * n + j];
    return make_node("transpose2", std::move(out), {a}, [m, n](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j) da[i * n + j] += nd.grad[j * m + i];
    });
}

Var btranspose(Var a) {
    if (a->value.rank() != 3) throw std::invalid_argument("btranspose: rank 3 required");
    const int64_t B = a->value.dim(0), m = a->value.dim(1), n = a->value.dim(2);
    Tensor out({B, n, m});
    for (int64_t q = 0; q < B; ++q)
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j) out[(q * n + j) * m + i] = a->value[(q * m + i) * n + j];
    return make_node("btranspose", std::move(out), {a}, [B, m, n](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t q = 0; q < B; ++q)
            for (int64_t i = 0; i < m; ++i)
                for (int64_t j = 0; j < n; ++j) da[(q * m + i) * n + j] += nd.grad[(q * n + j) * m + i];
    });
}

Var tile_batch(Var a, int64_t batch) {
    if (a->value.rank() != 2 || batch <= 0) throw std::invalid_argument("tile_batch: need rank-2 input, batch > 0");
    const int64_t m = a->value.dim(0), n = a->value.dim(1), sz = m * n;
    Tensor out({batch, m, n});
    for (int64_t q = 0; q < batch; ++q)
        std::copy(a->value.data(), a->value.data() + sz, out.data() + q * sz);
    return make_node("tile_batch", std::move(out), {a}, [batch, sz](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t q = 0; q < batch; ++q)
            kern::add(da.data(), da.data(), nd.grad.data() + q * sz, static_cast<std::size_t>(sz));
    });
}

Var reshape(Var a, std::vector<int64_t> shape) {
    if (shape_product(shape) != a->value.size())
        throw std::invalid_argument("reshape: element count mismatch");
    Tensor out(std::move(shape), a->value.vec());
    return make_node("reshape", std::move(out), {a}, [](Node& nd) {
        nd.parents[0]->accumulate_raw(nd.grad.data(), nd.grad.size());
    });
}

Var permute3(Var a, int p0, int p1, int p2) {
    if (a->value.rank() != 3) throw std::invalid_argument("permute3: rank 3 required");
    const int perm[3] = {p0, p1, p2};
    bool seen[3] = {false, false, false};
    for (int i = 0; i < 3; ++i) {
        if (perm[i] < 0 || perm[i] > 2 || seen[perm[i]]) throw std::invalid_argument("permute3: invalid permutation");
        seen[perm[i]] = true;
    }
    const int64_t d[3] = {a->value.dim(0), a->value.dim(1), a->value.dim(2)};
    Tensor out({d[p0], d[p1], d[p2]});
    const int64_t s1 = d[1] * d[2], s2 = d[2];
    const int64_t o1 = d[p1] * d[p2], o2 = d[p2];
    int64_t idx[3];
    for (idx[0] = 0; idx[0] < d[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < d[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < d[2]; ++idx[2])
                out[idx[p0] * o1 + idx[p1] * o2 + idx[p2]] = a->value[idx[0] * s1 + idx[1] * s2 + idx[2]];
    return make_node("permute3", std::move(out), {a}, [p0, p1, p2, d, s1, s2, o1, o2](Node& nd) {
        const int perm[3] = {p0, p1, p2};
        Tensor& da = nd.parents[0]->ensure_grad();
        int64_t idx[3];
        for (idx[0] = 0; idx[0] < d[0]; ++idx[0])
            for (idx[1] = 0; idx[1] < d[1]; ++idx[1])
                for (idx[2] = 0; idx[2] < d[2]; ++idx[2])
                    da[idx[0] * s1 + idx[1] * s2 + idx[2]] += nd.grad[idx[perm[0]] * o1 + idx[perm[1]] * o2 + idx[perm[2]]];
    });
}

Var concat(const std::vector<Var>& xs, int axis) {
    if (xs.empty()) throw std::invalid_argument("concat: empty input list");
    const int rk = xs[0]->value.rank();
    if (axis < 0 || axis >= rk) throw std::invalid_argument("concat: axis out of range");
    std::vector<int64_t> shape = xs[0]->value.shape();
    int64_t axis_total = 0;
    for (const auto& x : xs) {
        if (x->value.rank() != rk) throw std::invalid_argument("concat: rank mismatch");
        for (int i = 0; i < rk; ++i)
            if (i != axis && x->value.dim(i) != shape[static_cast<std::size_t>(i)])
                throw std::invalid_argument("concat: non-axis extent mismatch");
        axis_total += x->value.dim(axis);
    }
    shape[static_cast<std::size_t>(axis)] = axis_total;

    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= shape[static_cast<std::size_t>(i)];
    for (int i = axis + 1; i < rk; ++i) inner *= shape[static_cast<std::size_t>(i)];

    Tensor out(shape);
    std::vector<int64_t> offsets(xs.size());
    int64_t off = 0;
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        offsets[xi] = off;
        const int64_t ax = xs[xi]->value.dim(axis);
        for (int64_t o = 0; o < outer; ++o)
            std::copy(xs[xi]->value.data() + o * ax * inner, xs[xi]->value.data() + (o + 1) * ax * inner,
                      out.data() + (o * axis_total + off) * inner);
        off += ax;
    }
    std::vector<Var> parents(xs.begin(), xs.end());
    std::vector<int64_t> axes(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) axes[i] = xs[i]->value.dim(axis);
    return make_node("concat", std::move(out), std::move(parents),
                     [outer, inner, axis_total, offsets, axes](Node& nd) {
                         for (std::size_t xi = 0; xi < nd.parents.size(); ++xi) {
                             if (!wants(nd, xi)) continue;
                             Tensor& dx = nd.parents[xi]->ensure_grad();
                             for (int64_t o = 0; o < outer; ++o)
                                 kern::add(dx.data() + o * axes[xi] * inner, dx.data() + o * axes[xi] * inner,
                                           nd.grad.data() + (o * axis_total + offsets[xi]) * inner,
                                           static_cast<std::size_t>(axes[xi] * inner));
                         }
                     });
}

Var slice(Var a, int axis, int64_t start, int64_t len) {
    const int rk = a->value.rank();
    if (axis < 0 || axis >= rk) throw std::invalid_argument("slice: axis out of range");
    const int64_t ax = a->value.dim(axis);
    if (start < 0 || len <= 0 || start + len > ax) throw std::invalid_argument("slice: range out of bounds");
    std::vector<int64_t> shape = a->value.shape();
    shape[static_cast<std::size_t>(axis)] = len;
    int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= a->value.dim(i);
    for (int i = axis + 1; i < rk; ++i) inner *= a->value.dim(i);
    Tensor out(shape);
    for (int64_t o = 0; o < outer; ++o)
        std::copy(a->value.data() + (o * ax + start) * inner, a->value.data() + (o * ax + start + len) * inner,
                  out.data() + o * len * inner);
    return make_node("slice", std::move(out), {a}, [outer, inner, ax, start, len](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t o = 0; o < outer; ++o)
            kern::add(da.data() + (o * ax + start) * inner, da.data() + (o * ax + start) * inner,
                      nd.grad.data() + o * len * inner, static_cast<std::size_t>(len * inner));
    });
}

Var sum_all(Var a) {
    Tensor out = Tensor::scalar(kern::sum(a->value.data(), static_cast<std::size_t>(a->value.size())));
    return make_node("sum_all", std::move(out), {a}, [](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        const double g = nd.grad[0];
        for (int64_t i = 0; i < da.size(); ++i) da[i] += g;
    });
}

namespace {
void axis_extents(const Tensor& t, int axis, int64_t& outer, int64_t& ax, int64_t& inner) {
    const int rk = t.rank();
    if (axis < 0 || axis >= rk) throw std::invalid_argument("axis out of range");
    outer = 1;
    inner = 1;
    for (int i = 0; i < axis; ++i) outer *= t.dim(i);
    ax = t.dim(axis);
    for (int i = axis + 1; i < rk; ++i) inner *= t.dim(i);
}
}  // namespace

Var sum_axis(Var a, int axis) {
    int64_t outer, ax, inner;
    axis_extents(a->value, axis, outer, ax, inner);
    std::vector<int64_t> shape;
    for (int i = 0; i < a->value.rank(); ++i)
        if (i != axis) shape.push_back(a->value.dim(i));
    if (shape.empty()) shape.push_back(1);
    Tensor out(shape);
    for (int64_t o = 0; o < outer; ++o)
        for (int64_t x = 0; x < ax; ++x)
            kern::add(out.data() + o * inner, out.data() + o * inner, a->value.data() + (o * ax + x) * inner,
                      static_cast<std::size_t>(inner));
    return make_node("sum_axis", std::move(out), {a}, [outer, ax, inner](Node& nd) {
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t o = 0; o < outer; ++o)
            for (int64_t x = 0; x < ax; ++x)
                kern::add(da.data() + (o * ax + x) * inner, da.data() + (o * ax + x) * inner,
                          nd.grad.data() + o * inner, static_cast<std::size_t>(inner));
    });
}

Var mean_axis(Var a, int axis) {
    const int64_t ax = a->value.dim(axis);
    return mul_scalar(sum_axis(std::move(a), axis), 1.0 / static_cast<double>(ax));
}

Var mean_all(Var a) {
    const double inv = 1.0 / static_cast<double>(a->value.size());
    return mul_scalar(sum_all(std::move(a)), inv);
}

Var softmax_lastdim(Var a) {
    const int rk = a->value.rank();
    if (rk < 1) throw std::invalid_argument("softmax_lastdim: rank >= 1 required");
    const int64_t w = a->value.dim(rk - 1);
    const int64_t rows = a->value.size() / w;
    Tensor out(a->value.shape());
    for (int64_t r = 0; r < rows; ++r) {
        const double* x = a->value.data() + r * w;
        double* y = out.data() + r * w;
        double mx = x[0];
        for (int64_t i = 1; i < w; ++i) mx = std::max(mx, x[i]);
        double s = 0.0;
        for (int64_t i = 0; i < w; ++i) {
            y[i] = std::exp(x[i] - mx);
            s += y[i];
        }
        kern::scale(y, y, 1.0 / s, static_cast<std::size_t>(w));
    }
    return make_node("softmax", std::move(out), {a}, [rows, w](Node& nd) {
        Tensor tmp({w});
        Tensor& da = nd.parents[0]->ensure_grad();
        for (int64_t r = 0; r < rows; ++r) {
            const double* y = nd.value.data() + r * w;
            const double* g = nd.grad.data() + r * w;
            const double dy = kern::dot(g, y, static_cast<std::size_t>(w));
            for (int64_t i = 0; i < w; ++i) tmp[i] = y[i] * (g[i] - dy);
            kern::add(da.data() + r * w, da.data() + r * w, tmp.data(), static_cast<std::size_t>(w));
        }
    });
}

Var conv1d_dilated(Var x, Var kernel, int64_t dilation, Var bias) {
    if (dilation <= 0) throw std::invalid_argument("conv1d_dilated: dilation must be positive");
    if (kernel->value.rank() != 1 || kernel->value.size() == 0)
        throw std::invalid_argument("conv1d_dilated: kernel must be a non-empty vector");
    if (bias->value.size() != 1) throw std::invalid_argument("conv1d_dilated: bias must be a scalar");
    const int rk = x->value.rank();
    if (rk != 1 && rk != 2) throw std::invalid_argument("conv1d_dilated: input must be [L] or [R,L]");
    const int64_t L = x->value.dim(rk - 1);
    const int64_t R = rk == 2 ? x->value.dim(0) : 1;
    const int64_t K = kernel->value.size();

    Tensor out(x->value.shape());
    const double b = bias->value[0];
    out.fill(b);
    for (int64_t r = 0; r < R; ++r) {
        double* y = out.data() + r * L;
        const double* xr = x->value.data() + r * L;
        for (int64_t q = 0; q < K; ++q) {
            const int64_t off = q * dilation;
            if (off >= L) break;
            kern::axpy(y + off, kernel->value[q], xr, static_cast<std::size_t>(L - off));
        }
    }
    return make_node("conv1d_dilated", std::move(out), {x, kernel, bias}, [R, L, K, dilation](Node& nd) {
        const Tensor& xv = nd.parents[0]->value;
        const Tensor& kv = nd.parents[1]->value;
        if (wants(nd, 0)) {
            Tensor& dx = nd.parents[0]->ensure_grad();
            for (int64_t r = 0; r < R; ++r)
                for (int64_t q = 0; q < K; ++q) {
                    const int64_t off = q * dilation;
                    if (off >= L) break;
                    kern::axpy(dx.data() + r * L, kv[q], nd.grad.data() + r * L + off,
                               static_cast<std::size_t>(L - off));
                }
        }
        if (wants(nd, 1)) {
            Tensor& dk = nd.parents[1]->ensure_grad();
            for (int64_t r = 0; r < R; ++r)
                for (int64_t q = 0; q < K; ++q) {
                    const int64_t off = q * dilation;
                    if (off >= L) break;
                    dk[q] += kern::dot(nd.grad.data() + r * L + off, xv.data() + r * L,
                                       static_cast<std::size_t>(L - off));
                }
        }
        if (wants(nd, 2))
            nd.parents[2]->ensure_grad()[0] +=
                kern::sum(nd.grad.data(), static_cast<std::size_t>(nd.grad.size()));
    });
}

Var selective_scan(Var abar, Var bbar, Var c, Var u) {
    const Tensor& av = abar->value;
    if (av.rank() != 3) throw std::invalid_argument("selective_scan: abar must be [N,W,d]");
    const int64_t N = av.dim(0), W = av.dim(1), d = av.dim(2);
    if (!bbar->value.same_shape(av) || !c->value.same_shape(av))
        throw std::invalid_argument("selective_scan: abar/bbar/c shape mismatch");
    if (u->value.rank() != 3 || u->value.dim(0) != N || u->value.dim(1) != W || u->value.dim(2) != 1)
        throw std::invalid_argument("selective_scan: u must be [N,W,1]");

    Tensor out({N, W, 1});
    auto states = std::make_shared<Tensor>(Tensor({N, W, d}));  // h_t after each step
    std::vector<double> h(static_cast<std::size_t>(d));
    for (int64_t i = 0; i < N; ++i) {
        std::fill(h.begin(), h.end(), 0.0);
        for (int64_t t = 0; t < W; ++t) {
            const double* at = av.data() + (i * W + t) * d;
            const double* bt = bbar->value.data() + (i * W + t) * d;
            const double* ct = c->value.data() + (i * W + t) * d;
            const double ut = u->value[i * W + t];
            for (int64_t j = 0; j < d; ++j) h[static_cast<std::size_t>(j)] = at[j] * h[static_cast<std::size_t>(j)] + bt[j] * ut;
            std::copy(h.begin(), h.end(), states->data() + (i * W + t) * d);
            out[i * W + t] = kern::dot(ct, h.data(), static_cast<std::size_t>(d));
        }
    }
    return make_node("selective_scan", std::move(out), {abar, bbar, c, u}, [N, W, d, states](Node& nd) {
        const Tensor& av = nd.parents[0]->value;
        const Tensor& bv = nd.parents[1]->value;
        const Tensor& cv = nd.parents[2]->value;
        const Tensor& uv = nd.parents[3]->value;
        double* da = wants(nd, 0) ? nd.parents[0]->ensure_grad().data() : nullptr;
        double* db = wants(nd, 1) ? nd.parents[1]->ensure_grad().data() : nullptr;
        double* dc = wants(nd, 2) ? nd.parents[2]->ensure_grad().data() : nullptr;
        double* du = wants(nd, 3) ? nd.parents[3]->ensure_grad().data() : nullptr;
        std::vector<double> dh(static_cast<std::size_t>(d));
        for (int64_t i = 0; i < N; ++i) {
            std::fill(dh.begin(), dh.end(), 0.0);
            for (int64_t t = W - 1; t >= 0; --t) {
                const int64_t base = (i * W + t) * d;
                const double gy = nd.grad[i * W + t];
                const double* ht = states->data() + base;
                const double* hprev = t > 0 ? states->data() + base - d : nullptr;
                // dh_t = carry + gy * c_t
                kern::axpy(dh.data(), gy, cv.data() + base, static_cast<std::size_t>(d));
                if (dc) kern::axpy(dc + base, gy, ht, static_cast<std::size_t>(d));
                if (da && hprev)
                    for (int64_t j = 0; j < d; ++j) da[base + j] += dh[static_cast<std::size_t>(j)] * hprev[j];
                if (db) kern::axpy(db + base, uv[i * W + t], dh.data(), static_cast<std::size_t>(d));
                if (du) du[i * W + t] += kern::dot(dh.data(), bv.data() + base, static_cast<std::size_t>(d));
                // carry to t-1
                kern::mul(dh.data(), dh.data(), av.data() + base, static_cast<std::size_t>(d));
            }
        }
    });
}

Var affine(Var x, Var w, Var b) { return add_bias(matmul(std::move(x), std::move(w)), std::move(b)); }

Var sse(Var a, Var b) {
    Var d = sub(std::move(a), std::move(b));
    return sum_all(mul(d, d));
}

Var mse(Var a, Var b) {
    const double inv = 1.0 / static_cast<double>(a->value.size());
    return mul_scalar(sse(std::move(a), std::move(b)), inv);
}

Var cosine_rows(Var a, Var b) {
    require_same_shape(a, b, "cosine_rows");
    if (a->value.rank() != 2) throw std::invalid_argument("cosine_rows: rank 2 required");
    Var num = sum_axis(mul(a, b), 1);
    Var na = sqrt_v(sum_axis(mul(a, a), 1));
    Var nb = sqrt_v(sum_axis(mul(b, b), 1));
    return div(num, mul(na, nb));
}

Var gaussian(std::vector<int64_t> shape, RngStream& rng) {
    Tensor t(std::move(shape));
    for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.normal();
    return constant(std::move(t));
}

}  // namespace gpad::ops
