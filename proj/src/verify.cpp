#include "adyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "adyn/bifurcation.hpp"
#include "adyn/cycles.hpp"
#include "adyn/dynamics.hpp"
#include "adyn/stability.hpp"

namespace adyn {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

std::vector<double> state_diff(const AdamState& a, const AdamState& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.dim(); ++i) d.push_back(a.m[i] - b.m[i]);
    for (std::size_t i = 0; i < a.dim(); ++i) d.push_back(a.v[i] - b.v[i]);
    for (std::size_t i = 0; i < a.dim(); ++i) d.push_back(a.w[i] - b.w[i]);
    return d;
}

// Parameter tuples keeping the eps=0 cycle's v well above the FD step so the
// central differences stay inside the map's domain.
struct Tuple {
    double alpha, beta1, beta2, c;
};

Tuple well_scaled_tuple(Rng& rng) {
    Tuple t;
    t.alpha = log_uniform(rng, 0.3, 1.0);
    t.beta1 = uniform(rng, 0.05, 0.7);
    t.beta2 = uniform(rng, 0.05, 0.95);
    t.c = log_uniform(rng, 1.0, 5.0);
    return t;
}

PropertyResult check_closed_form_grid() {
    PropertyResult r{"closed-form grid residual", false, 0.0, ""};
    double worst = 0.0;
    double worst_pair = 0.0;
    const auto alphas = log_spaced(1e-3, 1.0, 10);
    const auto betas = linear_spaced(0.05, 0.95, 10);
    const auto cs = log_spaced(0.1, 10.0, 10);
    for (double a : alphas)
        for (double b1 : betas)
            for (double c : cs) {
                const TwoCycle cyc = closed_form_two_cycle(a, b1, c);
                const QuadraticObjective obj = QuadraticObjective::scalar(c);
                for (double b2 : {0.1, 0.5, 0.9, 0.999}) {
                    const HyperParams p(a, b1, b2, 0.0);
                    const AdamState y1 = step_autonomous(cyc.x1, p, obj);
                    const AdamState y2 = step_autonomous(y1, p, obj);
                    worst_pair = std::max(worst_pair, inf_norm(state_diff(y1, cyc.x2)));
                    worst = std::max(worst, inf_norm(state_diff(y2, cyc.x1)));
                }
            }
    r.worst_error = std::max(worst, worst_pair);
    r.passed = worst < 1e-10 && worst_pair < 1e-10;
    std::ostringstream os;
    os << "10x10x10x4 grid, max ||T2(x1)-x1|| = " << worst << ", max ||T(x1)-x2|| = "
       << worst_pair;
    r.detail = os.str();
    return r;
}

PropertyResult check_jacobian_fd(Rng& rng) {
    PropertyResult r{"analytic vs finite-difference Jacobian", false, 0.0, ""};
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Tuple t = well_scaled_tuple(rng);
        const TwoCycle cyc = closed_form_two_cycle(t.alpha, t.beta1, t.c);
        const HyperParams p(t.alpha, t.beta1, t.beta2, 0.0);
        const QuadraticObjective obj = QuadraticObjective::scalar(t.c);
        const Matrix ja = analytic_jacobian_T2_scalar(t.alpha, t.beta1, t.beta2, t.c);
        const Matrix jn = numeric_jacobian(
            [&](const std::vector<double>& y) {
                AdamState s = AdamState::from_flat(y);
                s = step_autonomous(s, p, obj);
                s = step_autonomous(s, p, obj);
                return s.to_flat();
            },
            cyc.x2.to_flat());
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                worst = std::max(worst,
                                 std::abs(ja(i, j) - jn(i, j)) / (1.0 + std::abs(ja(i, j))));
    }
    r.worst_error = worst;
    r.passed = worst < 1e-5;
    r.detail = "50 tuples, entrywise |analytic - central difference| / (1+|entry|)";
    return r;
}

PropertyResult check_determinant(Rng& rng) {
    PropertyResult r{"determinant and c-hat identities", false, 0.0, ""};
    double worst_spec = 0.0;
    double worst_chat = 0.0;
    int kept = 0;
    while (kept < 50) {
        const Tuple t = well_scaled_tuple(rng);
        // det(J - I) equals the eigenvalue product Pi(lambda_i - 1); compare
        // the FD determinant against the analytic matrix's spectrum
        const Matrix ja = analytic_jacobian_T2_scalar(t.alpha, t.beta1, t.beta2, t.c);
        const auto eigs = eigenvalues_small(ja);
        std::complex<double> prod(1.0, 0.0);
        for (const auto& z : eigs) prod *= (z - 1.0);
        if (std::abs(prod) < 0.05) continue;  // too close to singular
        ++kept;
        const TwoCycle cyc = closed_form_two_cycle(t.alpha, t.beta1, t.c);
        const HyperParams p(t.alpha, t.beta1, t.beta2, 0.0);
        const QuadraticObjective obj = QuadraticObjective::scalar(t.c);
        Matrix jn = numeric_jacobian(
            [&](const std::vector<double>& y) {
                AdamState s = AdamState::from_flat(y);
                s = step_autonomous(s, p, obj);
                s = step_autonomous(s, p, obj);
                return s.to_flat();
            },
            cyc.x2.to_flat());
        for (std::size_t i = 0; i < 3; ++i) jn(i, i) -= 1.0;
        const double dn = lu_det(jn);
        worst_spec = std::max(worst_spec, std::abs(dn - prod.real()) / std::abs(prod));
    }
    for (int k = 0; k < 100; ++k) {
        const double a = log_uniform(rng, 1e-3, 1.0);
        const double b1 = uniform(rng, 0.05, 0.95);
        const double b2 = uniform(rng, 0.05, 0.95);
        const auto chat = c_exception(a, b1, b2);
        if (!chat) continue;
        const double lead = std::abs(4.0 * (b1 + b2) * (b2 - 1.0) * (b1 + 1.0));
        const double scale =
            lead * (2.0 + std::abs(b1 * b1 * b1 * a * *chat) +
                    std::abs((3.0 * b2 * *chat * a - 2.0 * a * *chat - 2.0 * b2) * b1 * b1) +
                    std::abs(3.0 * (b2 - 1.0) * (a * *chat - 2.0 * b2) * b1));
        worst_chat = std::max(worst_chat, std::abs(det_dF(a, b1, b2, *chat)) / scale);
    }
    r.worst_error = std::max(worst_spec, worst_chat);
    r.passed = worst_spec < 1e-5 && worst_chat < 1e-10;
    std::ostringstream os;
    os << "det(J_fd - I) vs spectrum product rel err " << worst_spec
       << "; |det_dF(c-hat)| scaled " << worst_chat;
    r.detail = os.str();
    return r;
}

PropertyResult check_alpha_c_invariance(Rng& rng) {
    PropertyResult r{"alpha/c invariance of the spectrum", false, 0.0, ""};
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double b1 = uniform(rng, 0.05, 0.95);
        const double b2 = uniform(rng, 0.05, 0.95);
        std::vector<std::complex<double>> ref;
        for (double a : {1e-3, 1e-1, 1.0, 10.0})
            for (double c : {0.1, 1.0, 10.0}) {
                auto eigs = eigenvalues_small(analytic_jacobian_T2_scalar(a, b1, b2, c));
                std::sort(eigs.begin(), eigs.end(), [](const auto& l, const auto& r_) {
                    return l.real() != r_.real() ? l.real() < r_.real()
                                                 : l.imag() < r_.imag();
                });
                if (ref.empty()) {
                    ref = eigs;
                } else {
                    for (std::size_t i = 0; i < 3; ++i)
                        worst = std::max(worst, std::abs(eigs[i] - ref[i]));
                }
            }
    }
    r.worst_error = worst;
    r.passed = worst < 1e-8;
    r.detail = "20 random (beta1,beta2), 12-point alpha x c grid";
    return r;
}

PropertyResult check_symmetries(Rng& rng) {
    PropertyResult r{"odd symmetry / conjugate pairs / decomposition / origin", false, 0.0,
                     ""};
    double worst_odd = 0.0, worst_dec = 0.0, worst_conj = 0.0, worst_origin = 0.0;
    double worst_rec = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double a = log_uniform(rng, 1e-3, 1.0);
        const double b1 = uniform(rng, 0.05, 0.95);
        const double b2 = uniform(rng, 0.05, 0.95);
        const double c = log_uniform(rng, 0.1, 10.0);
        const double eps = (k % 2 == 0) ? 0.0 : log_uniform(rng, 1e-10, 1e-2);
        const HyperParams p(a, b1, b2, eps);
        const QuadraticObjective obj = QuadraticObjective::scalar(c);
        AdamState x = AdamState::scalar(uniform(rng, -2, 2),
                                        log_uniform(rng, 1e-6, 4.0),
                                        uniform(rng, -2, 2));

        // odd symmetry
        const AdamState fx = step_autonomous(x, p, obj);
        const AdamState mx = AdamState::scalar(-x.m[0], x.v[0], -x.w[0]);
        const AdamState fmx = step_autonomous(mx, p, obj);
        const double scale =
            std::max({std::abs(fx.m[0]), std::abs(fx.v[0]), std::abs(fx.w[0]), 1e-30});
        worst_odd = std::max(
            worst_odd,
            std::max({std::abs(fmx.m[0] + fx.m[0]), std::abs(fmx.v[0] - fx.v[0]),
                      std::abs(fmx.w[0] + fx.w[0])}) /
                scale);

        // decomposition identity T = Tbar + Theta, relative to the summand
        // magnitudes (the corrected step itself can cancel to ~0)
        const long t = k % 97;
        const AdamState tb = step_bias_corrected(t, x, p, obj);
        const AdamState th = theta(t, x, p, obj);
        const double den = std::max(
            std::abs(x.w[0]) + std::abs(x.w[0] - fx.w[0]) + std::abs(th.w[0]), 1e-30);
        worst_dec = std::max(worst_dec,
                             std::abs(tb.w[0] - (fx.w[0] + th.w[0])) / den);

        // conjugate closure of the small eigensolver
        const auto eigs = eigenvalues_small(analytic_jacobian_T2_scalar(a, b1, b2, c));
        for (const auto& z : eigs) {
            if (z.imag() == 0.0) continue;
            bool found = false;
            for (const auto& zz : eigs)
                if (zz == std::conj(z)) found = true;
            if (!found) worst_conj = 1.0;
        }

        // moment recovery on the closed-form cycle
        const TwoCycle cyc = closed_form_two_cycle(a, b1, c);
        const auto rec = recover_cycle_moments(cyc.x1.w, cyc.x2.w, b1, obj);
        worst_rec = std::max(worst_rec, std::abs(rec.first[0] - cyc.x1.m[0]));
        worst_rec = std::max(worst_rec, std::abs(rec.second[0] - cyc.x2.m[0]));

        // origin fixed point (b = 0)
        const HyperParams pe = (eps == 0.0) ? p.with_epsilon(1e-8) : p;
        const AdamState o = AdamState::scalar(0.0, 0.0, 0.0);
        const AdamState to = step_autonomous(o, pe, obj);
        const AdamState tt = step_bias_corrected(t, o, pe, obj);
        worst_origin = std::max(worst_origin,
                                std::max(inf_norm(state_diff(to, o)),
                                         inf_norm(state_diff(tt, o))));
    }
    const double four_eps = 4.0 * machine_eps;
    r.worst_error = std::max({worst_odd, worst_dec, worst_conj, worst_origin, worst_rec});
    r.passed = worst_odd < 1e-14 && worst_dec <= four_eps && worst_conj == 0.0 &&
               worst_origin == 0.0 && worst_rec < 1e-10;
    std::ostringstream os;
    os << "odd " << worst_odd << ", decomposition " << worst_dec << ", conj "
       << worst_conj << ", origin " << worst_origin << ", m-recovery " << worst_rec;
    r.detail = os.str();
    return r;
}

PropertyResult check_decay(Rng& rng) {
    PropertyResult r{"Theta decay rate bound", false, 0.0, ""};
    double worst = -1.0;
    double worst_spread = 0.0;
    int done = 0;
    while (done < 20) {
        const double a = log_uniform(rng, 1e-3, 1.0);
        const double b1 = uniform(rng, 0.05, 0.999);
        const double b2 = uniform(rng, 0.05, 0.999);
        const double c = log_uniform(rng, 0.1, 10.0);
        const HyperParams p(a, b1, b2, 1e-8);
        const QuadraticObjective obj = QuadraticObjective::scalar(c);
        const AdamState x = AdamState::scalar(uniform(rng, 0.1, 2.0) *
                                                  (uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0),
                                              log_uniform(rng, 1e-4, 4.0),
                                              uniform(rng, -2, 2));
        const auto window = decay_fit_window(p, 10, 200);
        const DecayFit fit = theta_decay_bound(x, p, obj, window.first, window.second);
        if (fit.decay_complete) continue;  // tail beyond double range; redraw
        ++done;
        worst = std::max(worst, fit.beta_fit - std::max(b1, b2));

        // decay rate is state independent
        const AdamState x2 = AdamState::scalar(uniform(rng, 0.1, 2.0),
                                               log_uniform(rng, 1e-4, 4.0),
                                               uniform(rng, -2, 2));
        const DecayFit fit2 = theta_decay_bound(x2, p, obj, window.first, window.second);
        if (!fit2.decay_complete)
            worst_spread = std::max(worst_spread, std::abs(fit2.beta_fit - fit.beta_fit));
    }
    r.worst_error = std::max(worst, 0.0);
    r.passed = worst <= 0.01 && worst_spread <= 0.02;
    std::ostringstream os;
    os << "worst beta_fit - max(beta1,beta2) = " << worst
       << ", state-dependence spread = " << worst_spread;
    r.detail = os.str();
    return r;
}

}  // namespace

std::vector<PropertyResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PropertyResult> out;
    const bool all = suite == "all";
    if (all || suite == "closed-form") out.push_back(check_closed_form_grid());
    if (all || suite == "jacobian") {
        out.push_back(check_jacobian_fd(rng));
        out.push_back(check_determinant(rng));
    }
    if (all || suite == "invariance") {
        out.push_back(check_alpha_c_invariance(rng));
        out.push_back(check_symmetries(rng));
    }
    if (all || suite == "decay") out.push_back(check_decay(rng));
    if (out.empty())
        throw std::invalid_argument(
            "unknown suite '" + suite +
            "' (use closed-form, jacobian, invariance, decay or all)");
    return out;
}

bool all_passed(const std::vector<PropertyResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace adyn
