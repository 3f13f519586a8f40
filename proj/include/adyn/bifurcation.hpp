#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adyn/cycles.hpp"
#include "adyn/types.hpp"

namespace adyn {

/// Default attractor-sampling windows.
inline constexpr long default_transient_steps = 50000;
inline constexpr long default_sample_steps = 512;
inline constexpr double period_tol = 1e-6;
inline constexpr int default_q_max = 64;
inline constexpr int default_sweep_points = 400;

/// alpha at which the local-convergence inequality becomes an equality:
///   alpha_bif = (2 b1 + 2) sqrt(eps) / ((1 - b1) mu_max)
double alpha_bifurcation(double beta1, double epsilon, double mu_max);

/// Strict inequality alpha mu_max (1 - b1) / sqrt(eps) < 2 b1 + 2.
bool inequality_holds(const HyperParams& p, double mu_max);

/// Smallest q <= q_max with ||w[i+q] - w[i]||_inf < tol for every i in the
/// window; nullopt means aperiodic. Requires at least 2*q_max samples.
std::optional<int> detect_period(const std::vector<std::vector<double>>& w_samples,
                                 double tol = period_tol, int q_max = default_q_max);

struct SweepConfig {
    std::vector<double> values;  // swept alpha values, strictly increasing, > 0
    HyperParams base;
    QuadraticObjective objective;
    AdamState x0;
    long transient_steps = default_transient_steps;
    long sample_steps = default_sample_steps;
    bool bias_corrected = true;

    void validate() const;
};

struct AttractorSample {
    double param_value = 0.0;
    std::vector<std::vector<double>> w_samples;  // empty when diverged
    std::optional<int> period;                   // nullopt = aperiodic
    bool diverged = false;
};

struct OrbitDiagram {
    std::vector<double> values;
    std::vector<AttractorSample> samples;  // aligned 1:1 with values
    double predicted_bifurcation = 0.0;
};

/// For each swept alpha: run the transient, record sample_steps further
/// w-states from the preset x0 (no warm starting), attach the detected
/// period. Values are processed independently, possibly across threads, and
/// gathered in input order; output does not depend on scheduling.
/// threads = 0 picks the hardware count (capped by ADAM_DYNAMICS_THREADS
/// in the CLI layer).
OrbitDiagram run_sweep(const SweepConfig& config, unsigned threads = 0);

struct Diagonalization {
    Matrix q;                // orthogonal, C = Q^T diag(mu) Q
    std::vector<double> mu;  // ascending, all > 0
};

/// Jacobi diagonalization of the objective's C. Throws with the offending
/// eigenvalue estimate if C is not positive definite.
Diagonalization diagonalize(const QuadraticObjective& obj);
Diagonalization diagonalize_spd(const Matrix& c);

struct ModeAnalysis {
    double mu = 0.0;
    TwoCycle cycle;          // scalar closed form with c = mu
    StabilityReport report;  // from the analytic Jacobian at these parameters
    bool c_exception_hit = false;
};

struct PerModeAnalysis {
    Diagonalization diag;
    std::vector<ModeAnalysis> modes;
    TwoCycle reconstructed;  // exact n-dimensional 2-cycle of the full map
};

/// Per-eigenvalue scalar cycle analysis plus the closed-form n-dimensional
/// 2-cycle (eps = 0, b = 0): w = |w~| sigma with sign(C sigma) = sigma,
/// m = -((1-b1)/(1+b1)) C w, v = (C w) (x) (C w).
PerModeAnalysis per_mode_analysis(const QuadraticObjective& obj, const HyperParams& p);

struct Preset {
    std::string name;
    HyperParams params;
    QuadraticObjective objective;
    AdamState x0;
    SweepConfig sweep;
};

/// Compiled-in experiment presets ("1", "2", "3", "multidim"). Presets 1, 2
/// and multidim sweep 400 log-spaced alphas over [1e-4, 0.01] with the sweep
/// epsilon 1e-6; preset 3 sweeps 81 linear alphas over [0.5, 0.9]. Preset 1
/// keeps its single-run epsilon 1e-8 next to the sweep's 1e-6.
Preset experiment_preset(const std::string& id);

std::vector<double> log_spaced(double lo, double hi, int n);
std::vector<double> linear_spaced(double lo, double hi, int n);

}  // namespace adyn
