#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "gpad/core/gradcheck.hpp"
#include "gpad/core/ops.hpp"
#include "gpad/core/rng.hpp"
#include "gpad/core/tape.hpp"

using namespace gpad;
namespace op = gpad::ops;

namespace {

Tensor random_tensor(RngStream& rng, std::vector<std::int64_t> shape, double lo = -2.0, double hi = 2.0) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

// Nudges values away from zero so kinked ops (relu, clamp edges) stay
// differentiable at the probed points.
Tensor away_from(Tensor t, double margin) {
    for (std::int64_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i]) < margin) t[i] = t[i] < 0 ? -margin : margin;
    }
    return t;
}

// Weighted scalarization so gradcheck sees non-uniform output sensitivities.
// Seed-keyed so rebuilding the loss uses identical weights.
Var weighted_sum(Var x, std::uint64_t seed) {
    RngStream rng(seed);
    Tensor w = random_tensor(rng, x->value.shape(), -1.0, 1.0);
    return op::sum_all(op::mul(std::move(x), constant(std::move(w))));
}

}  // namespace

TEST_CASE("conv1d_dilated hand-evaluated examples") {
    auto x = constant(Tensor({4}, {1, 2, 3, 4}));
    auto k = constant(Tensor({2}, {1, 1}));
    auto b = constant(Tensor::scalar(0.0));
    auto y = op::conv1d_dilated(x, k, 2, b);
    CHECK(y->value[0] == doctest::Approx(1).epsilon(1e-15));
    CHECK(y->value[1] == doctest::Approx(2).epsilon(1e-15));
    CHECK(y->value[2] == doctest::Approx(4).epsilon(1e-15));
    CHECK(y->value[3] == doctest::Approx(6).epsilon(1e-15));

    // identity kernel at any dilation
    auto x2 = constant(Tensor({3}, {5, 7, 9}));
    auto k1 = constant(Tensor({1}, {1}));
    for (int dil : {1, 2, 5}) {
        auto id = op::conv1d_dilated(x2, k1, dil, b);
        for (int i = 0; i < 3; ++i) CHECK(id->value[i] == x2->value[i]);
    }

    // pure one-step delay tap
    auto x3 = constant(Tensor({3}, {1, 2, 3}));
    auto kd = constant(Tensor({2}, {0, 1}));
    auto yd = op::conv1d_dilated(x3, kd, 1, b);
    CHECK(yd->value[0] == 0);
    CHECK(yd->value[1] == 1);
    CHECK(yd->value[2] == 2);

    CHECK_THROWS(op::conv1d_dilated(x3, kd, 0, b));
    CHECK_THROWS(op::conv1d_dilated(x3, constant(Tensor()), 1, b));
}

TEST_CASE("softmax_lastdim analytic examples and invariants") {
    auto y = op::softmax_lastdim(constant(Tensor({2}, {0, 0})));
    CHECK(y->value[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(y->value[1] == doctest::Approx(0.5).epsilon(1e-15));

    auto y2 = op::softmax_lastdim(constant(Tensor({2}, {std::log(2.0), 0.0})));
    CHECK(y2->value[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(y2->value[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    RngStream rng(123);
    for (int rep = 0; rep < 30; ++rep) {
        Tensor x = random_tensor(rng, {3, 5}, -8.0, 8.0);
        const double c = rng.uniform(-5.0, 5.0);
        Tensor xs = x;
        for (std::int64_t i = 0; i < xs.size(); ++i) xs[i] += c;
        auto a = op::softmax_lastdim(constant(x));
        auto s = op::softmax_lastdim(constant(xs));
        for (std::int64_t i = 0; i < x.size(); ++i)
            CHECK(a->value[i] == doctest::Approx(s->value[i]).epsilon(1e-12));
        for (std::int64_t r = 0; r < 3; ++r) {
            double rowsum = 0;
            for (std::int64_t j = 0; j < 5; ++j) rowsum += a->value[r * 5 + j];
            CHECK(std::abs(rowsum - 1.0) <= 1e-12);
        }
        for (std::int64_t i = 0; i < x.size(); ++i) CHECK(a->value[i] >= 0.0);
    }
}

TEST_CASE("backward: documented scalar cases") {
    // loss = p*p at p=3 -> grad 6
    Parameter p("p", Tensor::scalar(3.0));
    auto loss = op::mul(p.var, p.var);
    backward(loss);
    CHECK(p.grad()[0] == doctest::Approx(6.0).epsilon(1e-14));

    // loss independent of q -> grad(q) = 0
    Parameter q("q", Tensor::scalar(1.5));
    zero_grads({&p, &q});
    auto loss2 = op::mul(p.var, p.var);
    backward(loss2);
    CHECK(q.grad()[0] == 0.0);

    // loss = sum(softmax(r)) -> grad(r) = 0 everywhere
    Parameter r("r", Tensor({4}, {0.3, -1.0, 0.5, 2.0}));
    auto loss3 = op::sum_all(op::softmax_lastdim(r.var));
    backward(loss3);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r.grad()[i]) <= 1e-15);

    // gradient accumulation is additive across backward calls
    Parameter s("s", Tensor::scalar(2.0));
    backward(op::mul(s.var, s.var));
    backward(op::mul(s.var, s.var));
    CHECK(s.grad()[0] == doctest::Approx(8.0).epsilon(1e-14));

    CHECK_THROWS(backward(op::add(r.var, r.var)));  // non-scalar loss
}

TEST_CASE("non-finite op outputs are surfaced as errors") {
    auto big = constant(Tensor::scalar(1e308));
    CHECK_THROWS(op::add(big, big));
    CHECK_THROWS(op::exp_v(constant(Tensor::scalar(800.0))));
    CHECK_THROWS(op::div(constant(Tensor::scalar(1.0)), constant(Tensor::scalar(0.0))));
}

TEST_CASE("grad_check trivial oracles") {
    Parameter x("x", Tensor::scalar(1.0));
    auto report = grad_check([&] { return op::mul(x.var, x.var); }, {&x}, 1e-5, 1e-4);
    CHECK(report.passed());
    CHECK(report.worst.analytic == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report.worst.numeric == doctest::Approx(2.0).epsilon(1e-9));

    Parameter c("c", Tensor::scalar(0.7));
    auto cr = grad_check([&] { return op::add(constant(Tensor::scalar(5.0)), op::mul_scalar(c.var, 0.0)); },
                         {&c}, 1e-5, 1e-4);
    CHECK(cr.passed());
    CHECK(cr.max_rel_err == 0.0);
}

TEST_CASE("every differentiable primitive passes grad_check on random small shapes") {
    // 100 seeds across the whole op surface, shapes <= 6 per axis.
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RngStream rng(seed);
        const auto d1 = 1 + rng.uniform_int(6);
        const auto d2 = 1 + rng.uniform_int(6);
        const auto d3 = 1 + rng.uniform_int(6);

        struct Case {
            const char* name;
            std::function<Var()> build;
            std::vector<Parameter*> params;
        };
        std::vector<std::unique_ptr<Parameter>> owned;
        auto mk = [&](std::vector<std::int64_t> shape, double lo = -2.0, double hi = 2.0) {
            owned.push_back(std::make_unique<Parameter>("p" + std::to_string(owned.size()),
                                                        random_tensor(rng, std::move(shape), lo, hi)));
            return owned.back().get();
        };

        std::vector<Case> cases;
        {
            auto* a = mk({d1, d2});
            auto* b = mk({d1, d2});
            cases.push_back({"add/mul/sub", [=]() {
                                 return weighted_sum(op::add(op::mul(a->var, b->var), op::sub(a->var, b->var)), seed * 31 + 1);
                             },
                             {a, b}});
        }
        {
            auto* a = mk({d1, d3});
            auto* b = mk({d3, d2});
            cases.push_back({"matmul", [=]() {
                                 return weighted_sum(op::matmul(a->var, b->var), seed * 31 + 2);
                             },
                             {a, b}});
        }
        {
            auto* a = mk({d2, d1, d3});
            auto* b = mk({d2, d3, d2});
            cases.push_back({"bmm+btranspose", [=]() {
                                 return weighted_sum(op::bmm(a->var, op::btranspose(op::btranspose(b->var))), seed * 31 + 3);
                             },
                             {a, b}});
        }
        {
            auto* a = mk({d1, d2}, 0.4, 2.0);  // positive, away from sqrt kink at 0
            cases.push_back({"exp/sqrt/tanh/softplus", [=]() {
                                 Var t = op::add(op::exp_v(op::mul_scalar(a->var, 0.3)),
                                                 op::add(op::sqrt_v(a->var),
                                                         op::add(op::tanh_v(a->var), op::softplus(a->var))));
                                 return weighted_sum(t, seed * 31 + 4);
                             },
                             {a}});
        }
        {
            auto* a = mk({d1, d2});
            a->value() = away_from(a->value(), 0.05);
            cases.push_back({"relu", [=]() {
                                 return weighted_sum(op::relu(a->var), seed * 31 + 5);
                             },
                             {a}});
        }
        {
            auto* a = mk({d1, d2});
            // keep coordinates off the clamp edges at +-1
            for (std::int64_t i = 0; i < a->value().size(); ++i)
                if (std::abs(std::abs(a->value()[i]) - 1.0) < 0.05) a->value()[i] *= 0.8;
            cases.push_back({"clamp", [=]() {
                                 return weighted_sum(op::clamp(a->var, -1.0, 1.0), seed * 31 + 6);
                             },
                             {a}});
        }
        {
            auto* a = mk({d1, d2});
            auto* b = mk({d1, d2}, 0.5, 2.0);  // denominator away from zero
            cases.push_back({"div", [=]() {
                                 return weighted_sum(op::div(a->var, b->var), seed * 31 + 7);
                             },
                             {a, b}});
        }
        {
            auto* a = mk({d1, d2, d3});
            cases.push_back({"softmax/permute/slice/concat", [=]() {
                                 Var s = op::softmax_lastdim(a->var);
                                 Var p = op::permute3(s, 2, 0, 1);
                                 Var c = op::concat({p, p}, 1);
                                 Var sl = op::slice(c, 1, 0, d1);
                                 return weighted_sum(sl, seed * 31 + 8);
                             },
                             {a}});
        }
        {
            auto* a = mk({d1, d2, d3});
            cases.push_back({"mean/sum_axis/reshape", [=]() {
                                 Var m = op::mean_axis(a->var, 1);
                                 Var r = op::reshape(m, {d1 * d3});
                                 Var s = op::sum_axis(a->var, 2);
                                 return op::add(weighted_sum(r, seed * 31 + 9), weighted_sum(s, seed * 31 + 10));
                             },
                             {a}});
        }
        {
            auto* x = mk({d1, d3 + 2});
            auto* k = mk({3});
            auto* b = mk({1});
            const std::int64_t dil = 1 + rng.uniform_int(3);
            cases.push_back({"conv1d_dilated", [=]() {
                                 return weighted_sum(op::conv1d_dilated(x->var, k->var, dil, b->var), seed * 31 + 11);
                             },
                             {x, k, b}});
        }
        {
            auto* abar = mk({d1, d2, d3}, 0.05, 0.95);
            auto* bbar = mk({d1, d2, d3});
            auto* cvec = mk({d1, d2, d3});
            auto* u = mk({d1, d2, 1});
            cases.push_back({"selective_scan", [=]() {
                                 return weighted_sum(op::selective_scan(abar->var, bbar->var, cvec->var, u->var), seed * 31 + 12);
                             },
                             {abar, bbar, cvec, u}});
        }
        {
            auto* a = mk({d1, d2, d3});
            auto* bias = mk({d3});
            auto* mid = mk({d1, d3});
            auto* last = mk({d1, d2, 1});
            cases.push_back({"broadcast ops", [=]() {
                                 Var t = op::add_bias(a->var, bias->var);
                                 t = op::mul_bcast_last(t, last->var);
                                 t = op::add_bcast_mid(t, mid->var);
                                 return weighted_sum(t, seed * 31 + 13);
                             },
                             {a, bias, mid, last}});
        }
        {
            auto* a = mk({d1, d2});
            auto* b = mk({d1, d2});
            cases.push_back({"cosine_rows/tile", [=]() {
                                 Var cs = op::cosine_rows(a->var, b->var);
                                 Var tb = op::tile_batch(a->var, d3);
                                 return op::add(weighted_sum(cs, seed * 31 + 14), weighted_sum(tb, seed * 31 + 15));
                             },
                             {a, b}});
        }

        for (auto& c : cases) {
            auto report = grad_check(c.build, c.params, 1e-5, 1e-4);
            INFO("seed ", seed, " op ", c.name, ": ", report.summary());
            CHECK(report.passed());
        }
    }
}

TEST_CASE("determinism: identical seeds give bit-identical outputs and gradients") {
    auto run = [](std::uint64_t seed) {
        RngStream rng(seed);
        Parameter a("a", random_tensor(rng, {4, 5}));
        Parameter b("b", random_tensor(rng, {5, 3}));
        auto loss = op::sum_all(op::relu(op::matmul(a.var, b.var)));
        backward(loss);
        std::vector<double> out{loss->value[0]};
        for (std::int64_t i = 0; i < a.grad().size(); ++i) out.push_back(a.grad()[i]);
        return out;
    };
    auto r1 = run(11), r2 = run(11), r3 = run(12);
    CHECK(r1 == r2);
    CHECK(r1 != r3);
}
