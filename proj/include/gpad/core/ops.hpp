#pragma once

// Differentiable primitives over the tape. Each op validates shapes, checks
// its output for NaN/Inf, and registers an explicit backward closure.

#include <cstdint>
#include <vector>

#include "gpad/core/rng.hpp"
#include "gpad/core/tape.hpp"

namespace gpad::ops {

// Elementwise, same shape unless noted.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var neg(Var a);
Var add_scalar(Var a, double c);
Var mul_scalar(Var a, double c);
Var exp_v(Var a);
Var sqrt_v(Var a);
Var tanh_v(Var a);
Var relu(Var a);
Var softplus(Var a);
Var clamp(Var a, double lo, double hi);

// Broadcast variants.
Var add_bias(Var a, Var bias);       // a[..., C] + bias[C]
Var mul_bcast_last(Var a, Var b);    // a[..., d] * b[..., 1]
Var add_bcast_mid(Var a, Var b);     // a[N, W, d] + b[N, d], b broadcast over W

// Linear algebra.
Var matmul(Var a, Var b);            // [m,k] x [k,n]
Var bmm(Var a, Var b);               // [B,m,k] x [B,k,n]
Var transpose2(Var a);               // [m,n] -> [n,m]
Var btranspose(Var a);               // [B,m,n] -> [B,n,m]
Var tile_batch(Var a, std::int64_t batch);  // [m,n] -> [B,m,n]

// Structure.
Var reshape(Var a, std::vector<std::int64_t> shape);
Var permute3(Var a, int p0, int p1, int p2);
Var concat(const std::vector<Var>& xs, int axis);
Var slice(Var a, int axis, std::int64_t start, std::int64_t len);

// Reductions.
Var sum_all(Var a);                  // -> [1]
Var sum_axis(Var a, int axis);
Var mean_axis(Var a, int axis);
Var mean_all(Var a);

// Nonlinear blocks.
Var softmax_lastdim(Var a);

// Causal dilated convolution over the last axis; x is [L] or [R, L],
// kernel [K], bias [1]. Tap q multiplies x[t - q*dilation], out-of-range
// reads are zero, so output length equals input length.
Var conv1d_dilated(Var x, Var kernel, std::int64_t dilation, Var bias);

// Batched linear state-space scan: h_t = abar_t o h_{t-1} + bbar_t * u_t,
// y_t = <c_t, h_t>, h_0 = 0. Shapes [N,W,d] x3 and u [N,W,1] -> y [N,W,1].
Var selective_scan(Var abar, Var bbar, Var c, Var u);

// Composites.
Var affine(Var x, Var w, Var b);     // matmul(x, w) + row bias
Var sse(Var a, Var b);               // sum of squared differences -> [1]
Var mse(Var a, Var b);
Var cosine_rows(Var a, Var b);       // [N,d] x [N,d] -> [N] per-row cosine

// Constant tensor of standard normal draws.
Var gaussian(std::vector<std::int64_t> shape, RngStream& rng);

}  // namespace gpad::ops
