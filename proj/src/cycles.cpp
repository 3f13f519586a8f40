#include "adyn/cycles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace adyn {

TwoCycle closed_form_two_cycle(double alpha, double beta1, double c) {
    if (!(alpha > 0.0) || !(c > 0.0) || !(beta1 > 0.0 && beta1 < 1.0))
        throw std::invalid_argument("closed_form_two_cycle: need alpha>0, c>0, beta1 in (0,1)");
    const double b1 = beta1;
    const double mt = 0.5 * c * (b1 - 1.0) * (b1 - 1.0) * alpha / ((b1 + 1.0) * (b1 + 1.0));
    const double vt = 0.25 * alpha * alpha * (b1 * b1 - 2.0 * b1 + 1.0) * c * c /
                      ((b1 + 1.0) * (b1 + 1.0));
    const double wt = 0.5 * alpha * (b1 - 1.0) / (b1 + 1.0);

    TwoCycle cyc;
    cyc.x1 = AdamState::scalar(mt, vt, wt);
    cyc.x2 = AdamState::scalar(-mt, vt, -wt);
    cyc.epsilon_at = 0.0;

    // residual via two applications of the map; beta2 drops out of the cycle,
    // any valid value works
    const HyperParams p(alpha, beta1, 0.5, 0.0);
    const QuadraticObjective obj = QuadraticObjective::scalar(c);
    const AdamState y = step_autonomous(step_autonomous(cyc.x1, p, obj), p, obj);
    cyc.residual = std::max(
        std::abs(y.m[0] - mt),
        std::max(std::abs(y.v[0] - vt), std::abs(y.w[0] - wt)));
    return cyc;
}

Matrix analytic_jacobian_T2_scalar(double alpha, double beta1, double beta2, double c) {
    const double a = alpha, b1 = beta1, b2 = beta2;
    Matrix j(3, 3);
    j(0, 0) = -(b1 + 2.0) * b1;
    j(0, 1) = 2.0 * (b1 + 1.0) * b2 / (a * c);
    j(0, 2) = c * (b1 - 1.0) * (b1 + 2.0 * b2 - 1.0);
    j(1, 0) = -2.0 * (b2 - 1.0) * a * b1 * c;
    j(1, 1) = 3.0 * b2 * b2 - 2.0 * b2;
    j(1, 2) = 2.0 * c * c * (b1 - 1.0) * (b1 + 1.5 * b2 - 0.5) * (b2 - 1.0) * a / (b1 + 1.0);
    j(2, 0) = 2.0 * b1 * (b1 + 1.0) * (1.0 - b1 - 2.0 * b2) / (c * (b1 - 1.0));
    j(2, 1) = 2.0 * (2.0 * b1 + 3.0 * b2 - 1.0) * (b1 + 1.0) * b2 /
              (c * c * a * (b1 - 1.0));
    j(2, 2) = 2.0 * b1 * b1 + (8.0 * b2 - 6.0) * b1 + 6.0 * b2 * b2 - 6.0 * b2 + 1.0;
    return j;
}

double det_dF(double alpha, double beta1, double beta2, double c) {
    const double a = alpha, b1 = beta1, b2 = beta2;
    const double lead = 4.0 * (b1 + b2) * (b2 - 1.0) * (b1 + 1.0);
    const double tail = 2.0 + b1 * b1 * b1 * a * c +
                        (3.0 * b2 * c * a - 2.0 * a * c - 2.0 * b2) * b1 * b1 +
                        3.0 * (b2 - 1.0) * (a * c - 2.0 * b2) * b1;
    return lead * tail;
}

std::optional<double> c_exception(double alpha, double beta1, double beta2) {
    const double b1 = beta1, b2 = beta2;
    const double den = alpha * b1 * (b1 * b1 + 3.0 * b1 * b2 - 2.0 * b1 + 3.0 * b2 - 3.0);
    if (std::abs(den) < 1e-14) return std::nullopt;
    const double num = 2.0 * (b1 * b1 * b2 + 3.0 * b1 * b2 * b2 - 3.0 * b1 * b2 - 1.0);
    return num / den;
}

namespace {

std::vector<double> apply_q_times(const std::vector<double>& flat, int q,
                                  const HyperParams& p, const QuadraticObjective& obj) {
    AdamState x = AdamState::from_flat(flat);
    for (int i = 0; i < q; ++i) x = step_autonomous(x, p, obj);
    return x.to_flat();
}

}  // namespace

TwoCycle NewtonCycleResult::as_two_cycle(const HyperParams& p,
                                         const QuadraticObjective& obj) const {
    if (!is_two_cycle())
        throw std::logic_error("NewtonCycleResult: not a converged 2-cycle");
    TwoCycle cyc;
    cyc.x1 = x;
    cyc.x2 = step_autonomous(x, p, obj);
    cyc.residual = residual;
    cyc.epsilon_at = p.epsilon;
    return cyc;
}

NewtonCycleResult newton_find_cycle(const AdamState& seed, int q, const HyperParams& p,
                                    const QuadraticObjective& obj, double tol,
                                    int max_iter) {
    if (q < 1) throw std::invalid_argument("newton_find_cycle: q must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("newton_find_cycle: tol must be > 0");

    NewtonCycleResult res;
    res.x = seed;
    std::vector<double> x = seed.to_flat();
    const std::size_t dim = x.size();
    const std::size_t n = dim / 3;

    // v >= 0 is invariant for every true orbit; keep iterates inside so the
    // map (and its finite differences) stay defined
    auto project = [&](std::vector<double>& y) {
        for (std::size_t i = n; i < 2 * n; ++i) y[i] = std::max(y[i], 0.0);
    };
    project(x);

    auto residual_of = [&](const std::vector<double>& y) {
        const std::vector<double> fy = apply_q_times(y, q, p, obj);
        std::vector<double> g(dim);
        for (std::size_t i = 0; i < dim; ++i) g[i] = fy[i] - y[i];
        return g;
    };

    // central differences step out of the domain near the v = 0 boundary;
    // retry with smaller steps before giving up
    auto jacobian_of = [&](const std::vector<double>& y) {
        const VectorMap map = [&](const std::vector<double>& z) {
            return apply_q_times(z, q, p, obj);
        };
        for (double h : {1e-6, 1e-8, 1e-10}) {
            try {
                return numeric_jacobian(map, y, h);
            } catch (const std::domain_error&) {
                if (h == 1e-10) throw;
            }
        }
        throw std::domain_error("unreachable");
    };

    std::vector<double> g;
    try {
        g = residual_of(x);
    } catch (const std::exception& e) {
        res.message = std::string("seed evaluation failed: ") + e.what();
        return res;
    }
    double gn = inf_norm(g);

    for (int it = 0; it < max_iter && gn >= tol; ++it) {
        res.iterations = it + 1;
        Matrix j;
        try {
            j = jacobian_of(x);
        } catch (const std::exception& e) {
            res.x = AdamState::from_flat(x);
            res.residual = gn;
            res.message = std::string("jacobian failed: ") + e.what();
            return res;
        }
        for (std::size_t i = 0; i < dim; ++i) j(i, i) -= 1.0;

        std::vector<double> rhs(dim);
        for (std::size_t i = 0; i < dim; ++i) rhs[i] = -g[i];
        const LuResult lin = lu_solve(j, rhs);
        if (lin.singular || lin.condition_estimate > newton_cond_limit) {
            res.x = AdamState::from_flat(x);
            res.residual = gn;
            std::ostringstream os;
            os << "singular Newton system (condition estimate " << lin.condition_estimate
               << ")";
            res.message = os.str();
            return res;
        }

        // damp: halve the step while the residual does not decrease
        double lambda = 1.0;
        std::vector<double> x_next;
        std::vector<double> g_next;
        double gn_next = gn;
        for (int d = 0; d <= newton_max_damping; ++d) {
            x_next = x;
            for (std::size_t i = 0; i < dim; ++i) x_next[i] += lambda * lin.solution[i];
            project(x_next);
            try {
                g_next = residual_of(x_next);
                gn_next = inf_norm(g_next);
            } catch (const std::exception&) {
                gn_next = std::numeric_limits<double>::infinity();
            }
            if (gn_next < gn) break;
            lambda *= 0.5;
        }
        x = std::move(x_next);
        g = std::move(g_next);
        gn = gn_next;
        if (!std::isfinite(gn)) {
            res.x = seed;
            res.residual = gn;
            res.message = "Newton iterates left the domain";
            return res;
        }
    }

    res.x = AdamState::from_flat(x);
    res.residual = gn;
    if (gn >= tol) {
        std::ostringstream os;
        os << "no convergence after " << max_iter << " iterations, residual " << gn;
        res.message = os.str();
        return res;
    }

    res.converged = true;
    // minimal period: smallest divisor d of q with Tbar^d(x) ~ x
    res.minimal_period = q;
    for (int d = 1; d < q; ++d) {
        if (q % d != 0) continue;
        const std::vector<double> fd = apply_q_times(x, d, p, obj);
        if (inf_norm_diff(fd, x) < 10.0 * tol) {
            res.minimal_period = d;
            break;
        }
    }
    res.orbit.clear();
    AdamState point = res.x;
    for (int i = 0; i < q; ++i) {
        res.orbit.push_back(point);
        if (i + 1 < q) point = step_autonomous(point, p, obj);
    }
    return res;
}

ContinuationResult continue_in_epsilon(double alpha, double beta1, double beta2,
                                       double c,
                                       const std::vector<double>& epsilon_targets) {
    if (epsilon_targets.empty())
        throw std::invalid_argument("continue_in_epsilon: empty target list");
    for (std::size_t i = 0; i < epsilon_targets.size(); ++i) {
        if (epsilon_targets[i] < 0.0)
            throw std::invalid_argument("continue_in_epsilon: negative epsilon");
        if (i > 0 && epsilon_targets[i] <= epsilon_targets[i - 1])
            throw std::invalid_argument("continue_in_epsilon: targets must increase");
    }

    const QuadraticObjective obj = QuadraticObjective::scalar(c);
    ContinuationResult out;
    out.fully_converged = true;
    AdamState seed = closed_form_two_cycle(alpha, beta1, c).x1;

    bool failed = false;
    for (const double eps : epsilon_targets) {
        ContinuationSample sample;
        sample.epsilon = eps;
        if (failed) {
            out.samples.push_back(std::move(sample));
            continue;
        }
        const HyperParams p(alpha, beta1, beta2, eps);
        NewtonCycleResult nr = newton_find_cycle(seed, 2, p, obj);
        if (!nr.is_two_cycle()) {
            failed = true;
            out.fully_converged = false;
            out.diagnostic = "continuation stalled at epsilon = " + std::to_string(eps) +
                             (nr.message.empty() ? "" : ": " + nr.message);
            out.samples.push_back(std::move(sample));
            continue;
        }
        sample.converged = true;
        sample.cycle = nr.as_two_cycle(p, obj);
        const Matrix j = numeric_jacobian(
            [&](const std::vector<double>& y) { return apply_q_times(y, 2, p, obj); },
            nr.x.to_flat());
        sample.report = make_stability_report(j);
        seed = nr.x;
        out.samples.push_back(std::move(sample));
    }
    return out;
}

std::optional<double> correction_crossing_time(double beta1, double beta2) {
    if (beta2 <= beta1) return std::nullopt;
    const double d = std::log(beta2 / beta1);
    auto g = [&](double t) {
        const double lx = (t + 1.0) * std::log(beta1);
        const double x = (lx > -700.0) ? std::exp(lx) : 0.0;
        return (t + 1.0) * d - std::log(2.0 - x);
    };
    double lo = 0.0;
    if (g(lo) >= 0.0) return 0.0;
    double hi = std::max(2.0 * std::log(2.0) / d, 1.0);
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e9) return std::nullopt;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<long, long> decay_fit_window(const HyperParams& p, long t_begin, long t_end) {
    const auto cross = correction_crossing_time(p.beta1, p.beta2);
    if (!cross) return {t_begin, t_end};
    // past 8x the crossing the competing-exponential bracket is within
    // 2^-7 of 1 and the tail is a clean single exponential
    const long start = static_cast<long>(std::ceil(8.0 * std::max(*cross, 1.0)));
    if (start <= t_begin) return {t_begin, t_end};
    return {start, start + (t_end - t_begin)};
}

DecayFit theta_decay_bound(const AdamState& x, const HyperParams& p,
                           const QuadraticObjective& obj, long t_begin, long t_end) {
    if (t_begin < 0 || t_end - t_begin + 1 < 20)
        throw std::invalid_argument("theta_decay_bound: need t_range of length >= 20");

    // theta(t,x) = -alpha (k(t)-1) u with u = m+ ./ sqrt(v+ .+ eps) fixed;
    // recover ||u|| from one autonomous step
    const AdamState auto_step = step_autonomous(x, p, obj);
    double u_norm = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        u_norm = std::max(u_norm, std::abs((x.w[i] - auto_step.w[i]) / p.alpha));

    DecayFit fit;
    if (u_norm == 0.0) {  // m+ = 0: Theta vanishes identically
        fit.decay_complete = true;
        return fit;
    }

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (long t = t_begin; t <= t_end; ++t) {
        const double norm = p.alpha * std::abs(correction_factor_minus_one(t, p)) * u_norm;
        if (!(norm > 1e-300)) continue;
        const double y = std::log(norm);
        const double td = static_cast<double>(t);
        st += td;
        sy += y;
        stt += td * td;
        sty += td * y;
        ++n;
    }
    fit.points_used = n;
    if (n < 2) {
        fit.decay_complete = true;
        return fit;
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / n;
    fit.beta_fit = std::exp(slope);
    fit.c_fit = std::exp(intercept);
    return fit;
}

std::pair<std::vector<double>, std::vector<double>> recover_cycle_moments(
    const std::vector<double>& w_t, const std::vector<double>& w_t1, double beta1,
    const QuadraticObjective& obj) {
    if (w_t.size() != w_t1.size() || w_t.size() != obj.dim())
        throw std::invalid_argument("recover_cycle_moments: dimension mismatch");
    const std::vector<double> g0 = obj.gradient(w_t);
    const std::vector<double> g1 = obj.gradient(w_t1);
    const double det = beta1 * beta1 - 1.0;  // det of [-b1 1; 1 -b1]
    std::vector<double> m0(w_t.size()), m1(w_t.size());
    for (std::size_t i = 0; i < w_t.size(); ++i) {
        const double r0 = (1.0 - beta1) * g0[i];
        const double r1 = (1.0 - beta1) * g1[i];
        // inverse of [-b1 1; 1 -b1] is 1/det * [-b1 -1; -1 -b1]
        m0[i] = (-beta1 * r0 - r1) / det;
        m1[i] = (-r0 - beta1 * r1) / det;
    }
    return {m0, m1};
}

}  // namespace adyn
