#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "gpad/core/checkpoint.hpp"
#include "gpad/core/ops.hpp"
#include "gpad/core/optim.hpp"
#include "gpad/core/rng.hpp"

using namespace gpad;

TEST_CASE("rng: identical seed gives identical sequence, different seeds differ") {
    RngStream a(1234), b(1234), c(1235);
    std::vector<std::uint64_t> sa, sb, sc;
    for (int i = 0; i < 100; ++i) {
        sa.push_back(a.next_u64());
        sb.push_back(b.next_u64());
        sc.push_back(c.next_u64());
    }
    CHECK(sa == sb);
    CHECK(sa != sc);
}

TEST_CASE("rng: counter-based draws are order-independent across substreams") {
    RngStream root(77);
    RngStream s1 = root.substream(1);
    RngStream s2 = root.substream(2);
    const double a1 = s1.uniform();
    const double a2 = s2.uniform();

    RngStream root2(77);
    RngStream t2 = root2.substream(2);
    RngStream t1 = root2.substream(1);
    CHECK(t2.uniform() == a2);
    CHECK(t1.uniform() == a1);
    CHECK(a1 != a2);
}

TEST_CASE("rng: uniform bounds, uniform_int range, normal moments") {
    RngStream rng(5);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
        const auto k = rng.uniform_int(7);
        CHECK(k >= 0);
        CHECK(k < 7);
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("adamw: zero gradient and zero decay leave values unchanged") {
    Parameter p("p", Tensor({3}, {1.0, -2.0, 3.0}));
    p.zero_grad();
    AdamWConfig cfg;
    cfg.weight_decay = 0.0;
    AdamW opt(cfg);
    const std::vector<double> before = p.value().vec();
    opt.step({&p});
    CHECK(p.value().vec() == before);
}

TEST_CASE("adamw: first-step closed form") {
    // With wd = 0 and gradient g, the first update is -lr * g / (|g| + eps).
    Parameter p("p", Tensor::scalar(0.2));
    p.zero_grad();
    p.grad()[0] = 0.5;
    AdamWConfig cfg;
    cfg.weight_decay = 0.0;
    AdamW opt(cfg);
    opt.step({&p});
    const double delta = p.value()[0] - 0.2;
    CHECK(delta == doctest::Approx(-cfg.lr).epsilon(1e-6));
}

TEST_CASE("adamw: non-trainable parameters stay bit-identical") {
    Parameter p("p", Tensor({4}, {0.1, 0.2, 0.3, 0.4}));
    p.set_trainable(false);
    p.zero_grad();
    for (int i = 0; i < 4; ++i) p.grad()[i] = 1.0;
    const std::vector<double> before = p.value().vec();
    AdamW opt;
    opt.step({&p});
    CHECK(p.value().vec() == before);
}

TEST_CASE("adamw: rejects non-positive learning rate") {
    AdamWConfig cfg;
    cfg.lr = 0.0;
    CHECK_THROWS(AdamW{cfg});
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
    RngStream rng(9);
    Checkpoint ck;
    ck.meta_json = R"({"kind":"test","n":3})";
    Tensor t1({2, 3});
    for (std::int64_t i = 0; i < t1.size(); ++i) t1[i] = rng.normal();
    Tensor t2({5});
    for (std::int64_t i = 0; i < t2.size(); ++i) t2[i] = rng.uniform(-1, 1);
    ck.add("enc.w", t1);
    ck.add("enc.b", t2);
    ck.opt_step = 42;
    AdamW::Moments mom;
    mom.m = t2;
    mom.v = t2;
    ck.opt_moments.emplace_back("enc.b", mom);
    ck.rng = RngState{123, 456, true, 0.25};

    const std::string p1 = "/tmp/gpad_ck1.bin", p2 = "/tmp/gpad_ck2.bin";
    ck.save(p1);
    Checkpoint loaded = Checkpoint::load(p1);
    loaded.save(p2);

    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    const std::string b1 = slurp(p1), b2 = slurp(p2);
    CHECK(b1.size() > 0);
    CHECK(b1 == b2);
    CHECK(loaded.meta_json == ck.meta_json);
    REQUIRE(loaded.find("enc.w") != nullptr);
    CHECK(loaded.find("enc.w")->vec() == t1.vec());
    CHECK(loaded.opt_step == 42);
    CHECK(loaded.rng->counter == 456);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("checkpoint: rejects malformed files") {
    const std::string p = "/tmp/gpad_ck_bad.bin";
    std::ofstream(p, std::ios::binary) << "not a checkpoint at all";
    CHECK_THROWS(Checkpoint::load(p));
    std::remove(p.c_str());
    CHECK_THROWS(Checkpoint::load("/tmp/nonexistent_gpad_ck.bin"));
}
