#include "adyn/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace adyn {

double alpha_bifurcation(double beta1, double epsilon, double mu_max) {
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(epsilon > 0.0) || !(mu_max > 0.0))
        throw std::invalid_argument("alpha_bifurcation: invalid arguments");
    return (2.0 * beta1 + 2.0) * std::sqrt(epsilon) / ((1.0 - beta1) * mu_max);
}

bool inequality_holds(const HyperParams& p, double mu_max) {
    if (!(p.epsilon > 0.0))
        throw std::invalid_argument("inequality_holds: epsilon must be > 0");
    if (!(mu_max > 0.0)) throw std::invalid_argument("inequality_holds: mu_max must be > 0");
    return p.alpha * mu_max * (1.0 - p.beta1) / std::sqrt(p.epsilon) <
           2.0 * p.beta1 + 2.0;
}

std::optional<int> detect_period(const std::vector<std::vector<double>>& w_samples,
                                 double tol, int q_max) {
    if (!(tol > 0.0)) throw std::invalid_argument("detect_period: tol must be > 0");
    if (q_max < 1) throw std::invalid_argument("detect_period: q_max must be >= 1");
    if (w_samples.size() < static_cast<std::size_t>(2 * q_max))
        throw std::invalid_argument("detect_period: need at least 2*q_max samples");
    const std::size_t n = w_samples.size();
    for (int q = 1; q <= q_max; ++q) {
        bool ok = true;
        for (std::size_t i = 0; i + q < n && ok; ++i)
            if (inf_norm_diff(w_samples[i + q], w_samples[i]) >= tol) ok = false;
        if (ok) return q;
    }
    return std::nullopt;
}

void SweepConfig::validate() const {
    if (values.empty()) throw std::invalid_argument("SweepConfig: empty value list");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::invalid_argument("SweepConfig: values must be > 0");
        if (i > 0 && values[i] <= values[i - 1])
            throw std::invalid_argument("SweepConfig: values must strictly increase");
    }
    if (transient_steps < 1000)
        throw std::invalid_argument("SweepConfig: transient_steps must be >= 1000");
    if (sample_steps < 64)
        throw std::invalid_argument("SweepConfig: sample_steps must be >= 64");
    x0.validate();
    if (x0.dim() != objective.dim())
        throw std::invalid_argument("SweepConfig: x0/objective dimension mismatch");
}

namespace {

AttractorSample sweep_one(const SweepConfig& cfg, double alpha) {
    AttractorSample out;
    out.param_value = alpha;
    const HyperParams p = cfg.base.with_alpha(alpha);

    AdamState x = cfg.x0;
    long t = 0;
    auto bad = [](const AdamState& s) {
        for (const auto* block : {&s.m, &s.v, &s.w})
            for (double c : *block)
                if (!std::isfinite(c) || std::abs(c) > divergence_bound) return true;
        return false;
    };
    for (; t < cfg.transient_steps; ++t) {
        x = cfg.bias_corrected ? step_bias_corrected(t, x, p, cfg.objective)
                               : step_autonomous(x, p, cfg.objective);
        if (bad(x)) {
            out.diverged = true;
            return out;
        }
    }
    out.w_samples.reserve(cfg.sample_steps);
    for (long s = 0; s < cfg.sample_steps; ++s, ++t) {
        x = cfg.bias_corrected ? step_bias_corrected(t, x, p, cfg.objective)
                               : step_autonomous(x, p, cfg.objective);
        if (bad(x)) {
            out.diverged = true;
            out.w_samples.clear();
            return out;
        }
        out.w_samples.push_back(x.w);
    }
    out.period = detect_period(out.w_samples, period_tol, default_q_max);
    return out;
}

}  // namespace

OrbitDiagram run_sweep(const SweepConfig& config, unsigned threads) {
    config.validate();
    const Diagonalization d = diagonalize(config.objective);
    const double mu_max = d.mu.back();

    OrbitDiagram diagram;
    diagram.values = config.values;
    diagram.predicted_bifurcation =
        alpha_bifurcation(config.base.beta1, config.base.epsilon, mu_max);
    diagram.samples.resize(config.values.size());

    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    if (nthreads == 0) nthreads = 1;
    nthreads = std::min<std::size_t>(nthreads, config.values.size());

    if (nthreads <= 1) {
        for (std::size_t i = 0; i < config.values.size(); ++i)
            diagram.samples[i] = sweep_one(config, config.values[i]);
        return diagram;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned k = 0; k < nthreads; ++k) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= config.values.size()) return;
                diagram.samples[i] = sweep_one(config, config.values[i]);
            }
        });
    }
    for (auto& th : pool) th.join();
    return diagram;
}

Diagonalization diagonalize_spd(const Matrix& c) {
    const SymmetricEigen eig = jacobi_eigen_symmetric(c);
    if (eig.eigenvalues.front() <= 0.0)
        throw std::invalid_argument(
            "diagonalize: matrix is not positive definite; smallest eigenvalue estimate " +
            std::to_string(eig.eigenvalues.front()));
    return {eig.q, eig.eigenvalues};
}

Diagonalization diagonalize(const QuadraticObjective& obj) {
    return diagonalize_spd(obj.C());
}

PerModeAnalysis per_mode_analysis(const QuadraticObjective& obj, const HyperParams& p) {
    for (double bi : obj.b())
        if (bi != 0.0)
            throw std::invalid_argument("per_mode_analysis: requires a centered quadratic (b = 0)");

    PerModeAnalysis out;
    out.diag = diagonalize(obj);

    for (double mu : out.diag.mu) {
        ModeAnalysis mode;
        mode.mu = mu;
        mode.cycle = closed_form_two_cycle(p.alpha, p.beta1, mu);
        mode.report =
            make_stability_report(analytic_jacobian_T2_scalar(p.alpha, p.beta1, p.beta2, mu));
        const auto chat = c_exception(p.alpha, p.beta1, p.beta2);
        mode.c_exception_hit =
            chat && std::abs(mu - *chat) <= 1e-12 * std::max(1.0, std::abs(*chat));
        out.modes.push_back(std::move(mode));
    }

    // Exact n-dimensional cycle: w = |w~| sigma with sign(C sigma) = sigma.
    // The sign vector maximizing sigma^T C sigma is always consistent
    // (flipping component i at the maximum would change it by
    // 4 C_ii - 4 sigma_i (C sigma)_i <= 0, so sigma_i (C sigma)_i >= C_ii > 0).
    const std::size_t n = obj.dim();
    if (n > 20) throw std::invalid_argument("per_mode_analysis: n too large for sign search");
    const Matrix& C = obj.C();
    std::vector<double> sigma(n, 1.0), best(n, 1.0);
    double best_quad = -1.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            sigma[i + 1] = (mask >> i) & 1 ? -1.0 : 1.0;
        const std::vector<double> cs = C * sigma;
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) quad += sigma[i] * cs[i];
        if (quad > best_quad) {
            best_quad = quad;
            best = sigma;
        }
    }

    const double w_mag = 0.5 * p.alpha * (1.0 - p.beta1) / (1.0 + p.beta1);
    std::vector<double> w(n), m(n), v(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = w_mag * best[i];
    const std::vector<double> g = C * w;
    const double mscale = -(1.0 - p.beta1) / (1.0 + p.beta1);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = mscale * g[i];
        v[i] = g[i] * g[i];
    }
    out.reconstructed.x1 = AdamState(m, v, w);
    out.reconstructed.epsilon_at = 0.0;

    const HyperParams p0(p.alpha, p.beta1, p.beta2, 0.0);
    out.reconstructed.x2 = step_autonomous(out.reconstructed.x1, p0, obj);
    const AdamState back = step_autonomous(out.reconstructed.x2, p0, obj);
    out.reconstructed.residual =
        std::max(inf_norm_diff(back.m, m),
                 std::max(inf_norm_diff(back.v, v), inf_norm_diff(back.w, w)));
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_spaced(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw std::invalid_argument("linear_spaced: bad range");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    out.front() = lo;
    out.back() = hi;
    return out;
}

Preset experiment_preset(const std::string& id) {
    const long transient = default_transient_steps;
    const long window = default_sample_steps;

    if (id == "1") {
        HyperParams run(0.001, 0.9, 0.999, 1e-8);
        QuadraticObjective obj = QuadraticObjective::scalar(10.0);
        AdamState x0 = AdamState::scalar(-1.281144718e-5, 5.925207756e-8, 2.434174964e-5);
        HyperParams sweep_base = run.with_epsilon(1e-6);  // the sweep's epsilon
        SweepConfig sweep{log_spaced(1e-4, 0.01, default_sweep_points), sweep_base, obj,
                          x0, transient, window, true};
        return {"experiment-1", run, obj, x0, sweep};
    }
    if (id == "2") {
        HyperParams run(0.5, 0.2, 0.5, 1e-6);
        QuadraticObjective obj = QuadraticObjective::scalar(1.0);
        AdamState x0 = AdamState::scalar(0.0, 0.0, machine_eps);
        SweepConfig sweep{log_spaced(1e-4, 0.01, default_sweep_points), run, obj, x0,
                          transient, window, true};
        return {"experiment-2", run, obj, x0, sweep};
    }
    if (id == "3") {
        HyperParams run(0.8, 0.5, 0.6, 0.01);
        QuadraticObjective obj = QuadraticObjective::scalar(1.0);
        AdamState x0 = AdamState::scalar(0.0, 0.0, machine_eps);
        // linear grid with 0.005 spacing keeps 0.6 and 0.8 on the grid
        SweepConfig sweep{linear_spaced(0.5, 0.9, 81), run, obj, x0, transient, window,
                          true};
        return {"experiment-3", run, obj, x0, sweep};
    }
    if (id == "multidim") {
        HyperParams run(0.001, 0.9, 0.999, 1e-6);
        QuadraticObjective obj(
            Matrix::from_rows({{1.1184, 0.5841}, {0.5841, 3.8816}}), {0.0, 0.0}, 0.0);
        AdamState x0({0.0, 0.0}, {0.0, 0.0}, {machine_eps, machine_eps});
        SweepConfig sweep{log_spaced(1e-4, 0.01, default_sweep_points), run, obj, x0,
                          transient, window, true};
        return {"multidim", run, obj, x0, sweep};
    }
    throw std::invalid_argument("experiment_preset: unknown id '" + id +
                                "' (use 1, 2, 3 or multidim)");
}

}  // namespace adyn
