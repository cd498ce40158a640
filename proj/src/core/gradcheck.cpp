#include "gpad/core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpad {

std::string GradCheckReport::summary() const {
    std::ostringstream os;
    os << (passed() ? "PASS" : "FAIL") << " grad_check: " << n_checked << " coordinates, max rel err "
       << max_rel_err;
    if (!worst.param.empty())
        os << " (" << worst.param << "[" << worst.index << "] analytic " << worst.analytic << " numeric "
           << worst.numeric << ")";
    if (!failures.empty()) os << ", " << failures.size() << " above tol " << tol;
    return os.str();
}

GradCheckReport grad_check(const std::function<Var()>& make_loss, const std::vector<Parameter*>& params,
                           double h, double tol) {
    GradCheckReport report;
    report.tol = tol;

    zero_grads(params);
    Var loss = make_loss();
    backward(loss);

    // Snapshot the analytic gradients before the forward re-runs below.
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (Parameter* p : params) analytic.push_back(p->grad());

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter* p = params[pi];
        if (!p->trainable) continue;
        Tensor& val = p->value();
        for (std::int64_t i = 0; i < val.size(); ++i) {
            const double orig = val[i];
            val[i] = orig + h;
            const double fp = make_loss()->value.item();
            val[i] = orig - h;
            const double fm = make_loss()->value.item();
            val[i] = orig;

            const double numeric = (fp - fm) / (2.0 * h);
            const double a = analytic[pi][i];
            const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            ++report.n_checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = {p->name, i, a, numeric, rel};
            }
            if (rel > tol) report.failures.push_back({p->name, i, a, numeric, rel});
        }
    }
    return report;
}

}  // namespace gpad
