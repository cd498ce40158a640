#pragma once

// Central-difference gradient verification. The loss builder must be
// deterministic across calls (fixed RNG, same data), since it is re-run
// twice per checked coordinate.

#include <functional>
#include <string>
#include <vector>

#include "gpad/core/tape.hpp"

namespace gpad {

struct GradCheckEntry {
    std::string param;
    std::int64_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::int64_t n_checked = 0;
    GradCheckEntry worst;
    std::vector<GradCheckEntry> failures;  // entries above tol
    double tol = 1e-4;

    bool passed() const { return failures.empty(); }
    std::string summary() const;
};

// Compares analytic gradients of make_loss() against (f(x+h)-f(x-h))/2h for
// every coordinate of every trainable parameter. Relative error is
// |a-n| / max(1, |a|, |n|).
GradCheckReport grad_check(const std::function<Var()>& make_loss, const std::vector<Parameter*>& params,
                           double h = 1e-5, double tol = 1e-4);

}  // namespace gpad
