#include "adyn/dynamics.hpp"

#include <cmath>
#include <string>

namespace adyn {

std::vector<double> gradient(const QuadraticObjective& obj, const std::vector<double>& w) {
    return obj.gradient(w);
}

namespace {

struct Moments {
    std::vector<double> m;
    std::vector<double> v;
};

Moments update_moments(const AdamState& x, const HyperParams& p,
                       const QuadraticObjective& obj) {
    const std::vector<double> g = obj.gradient(x.w);
    const std::size_t n = x.dim();
    Moments out;
    out.m.resize(n);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.m[i] = p.beta1 * x.m[i] + (1.0 - p.beta1) * g[i];
        out.v[i] = p.beta2 * x.v[i] + (1.0 - p.beta2) * g[i] * g[i];
    }
    return out;
}

// m+ ./ sqrt(v+ .+ eps), the shared update direction.
std::vector<double> scaled_moment(const Moments& mo, const HyperParams& p) {
    const std::size_t n = mo.m.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = mo.v[i] + p.epsilon;
        if (d <= 0.0)
            throw std::domain_error("step: nonpositive denominator v+ + epsilon at component " +
                                    std::to_string(i));
        u[i] = mo.m[i] / std::sqrt(d);
    }
    return u;
}

}  // namespace

AdamState step_autonomous(const AdamState& x, const HyperParams& p,
                          const QuadraticObjective& obj) {
    if (x.dim() != obj.dim())
        throw std::invalid_argument("step_autonomous: state/objective dimension mismatch");
    const Moments mo = update_moments(x, p, obj);
    const std::vector<double> u = scaled_moment(mo, p);
    AdamState out;
    out.m = mo.m;
    out.v = mo.v;
    out.w.resize(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out.w[i] = x.w[i] - p.alpha * u[i];
    return out;
}

double correction_factor(long t, const HyperParams& p) {
    const double e = static_cast<double>(t) + 1.0;
    return std::sqrt(1.0 - std::pow(p.beta2, e)) / (1.0 - std::pow(p.beta1, e));
}

double correction_factor_minus_one(long t, const HyperParams& p) {
    const double e = static_cast<double>(t) + 1.0;
    const double x = std::pow(p.beta1, e);
    const double y = std::pow(p.beta2, e);
    // sqrt(1-y)/(1-x) - 1 = (x - y/(1+sqrt(1-y))) / (1-x), no cancellation
    // once y is below machine eps (the naive form rounds to exactly 0 there).
    return (x - y / (1.0 + std::sqrt(1.0 - y))) / (1.0 - x);
}

AdamState step_bias_corrected(long t, const AdamState& x, const HyperParams& p,
                              const QuadraticObjective& obj) {
    if (t < 0) throw std::invalid_argument("step_bias_corrected: t must be >= 0");
    if (x.dim() != obj.dim())
        throw std::invalid_argument("step_bias_corrected: dimension mismatch");
    const Moments mo = update_moments(x, p, obj);
    const std::vector<double> u = scaled_moment(mo, p);
    const double k = correction_factor(t, p);
    AdamState out;
    out.m = mo.m;
    out.v = mo.v;
    out.w.resize(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out.w[i] = x.w[i] - p.alpha * k * u[i];
    return out;
}

AdamState theta(long t, const AdamState& x, const HyperParams& p,
                const QuadraticObjective& obj) {
    if (t < 0) throw std::invalid_argument("theta: t must be >= 0");
    if (x.dim() != obj.dim()) throw std::invalid_argument("theta: dimension mismatch");
    const Moments mo = update_moments(x, p, obj);
    const std::vector<double> u = scaled_moment(mo, p);
    const double km1 = correction_factor_minus_one(t, p);
    AdamState out;
    out.m.assign(x.dim(), 0.0);
    out.v.assign(x.dim(), 0.0);
    out.w.resize(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out.w[i] = -p.alpha * km1 * u[i];
    return out;
}

namespace {

bool state_ok(const AdamState& x) {
    for (const auto* block : {&x.m, &x.v, &x.w})
        for (double c : *block)
            if (!std::isfinite(c) || std::abs(c) > divergence_bound) return false;
    return true;
}

}  // namespace

TrajectoryRecord simulate(const AdamState& x0, const HyperParams& p,
                          const QuadraticObjective& obj, long steps,
                          bool bias_corrected, long record_every) {
    if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
    if (record_every < 1) throw std::invalid_argument("simulate: record_every must be >= 1");
    x0.validate();
    if (p.epsilon == 0.0) {
        for (double vi : x0.v)
            if (!(vi > 0.0))
                throw std::invalid_argument(
                    "simulate: epsilon = 0 requires all v0 components > 0");
    }

    TrajectoryRecord rec{{}, p, obj, bias_corrected};
    rec.states.push_back({0, x0});
    AdamState x = x0;
    for (long t = 0; t < steps; ++t) {
        AdamState next = bias_corrected ? step_bias_corrected(t, x, p, obj)
                                        : step_autonomous(x, p, obj);
        if (!state_ok(next)) {
            rec.diverged = true;
            rec.divergence_step = t + 1;
            return rec;
        }
        x = std::move(next);
        const long idx = t + 1;
        if (idx % record_every == 0 || idx == steps) rec.states.push_back({idx, x});
    }
    return rec;
}

}  // namespace adyn
