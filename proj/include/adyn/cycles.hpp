#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adyn/dynamics.hpp"
#include "adyn/stability.hpp"
#include "adyn/types.hpp"

namespace adyn {

/// Newton settings shared by the cycle solver and the continuation.
inline constexpr double newton_tol = 1e-12;
inline constexpr int newton_max_iter = 50;
inline constexpr int newton_max_damping = 20;
inline constexpr double newton_cond_limit = 1e12;

/// A period-2 orbit {x1, x2} of the autonomous map, with the map residual
/// ||Tbar^2(x1) - x1||_inf and the epsilon it is valid for.
struct TwoCycle {
    AdamState x1;
    AdamState x2;
    double residual = 0.0;
    double epsilon_at = 0.0;
};

/// Closed-form 2-cycle of the scalar map with eps = 0:
///   m~ = c (b1-1)^2 a / (2 (b1+1)^2)
///   v~ = a^2 (b1^2 - 2 b1 + 1) c^2 / (4 (b1+1)^2)
///   w~ = a (b1-1) / (2 (b1+1))
/// x2 is the reflected point (-m~, v~, -w~).
TwoCycle closed_form_two_cycle(double alpha, double beta1, double c);

/// The 3x3 Jacobian of Tbar^2 on the closed-form cycle, entries as published.
/// It matches the numeric Jacobian at the reflected point x2; at x1 the mixed
/// v-row/column entries flip sign (conjugation by diag(-1,1,-1)), so the
/// spectrum is the same at both points.
Matrix analytic_jacobian_T2_scalar(double alpha, double beta1, double beta2, double c);

/// The published determinant expression for dF/dx at (x~, 0), F = Tbar^2 - id:
///   4 (b1+b2)(b2-1)(b1+1) (2 + b1^3 a c + (3 b2 c a - 2 a c - 2 b2) b1^2
///                            + 3 (b2-1)(a c - 2 b2) b1)
double det_dF(double alpha, double beta1, double beta2, double c);

/// c^ = 2 (b1^2 b2 + 3 b1 b2^2 - 3 b1 b2 - 1)
///      / (a b1 (b1^2 + 3 b1 b2 - 2 b1 + 3 b2 - 3)),
/// the quadratic coefficient that zeroes det_dF's final factor. Undefined
/// (nullopt) when |denominator| < 1e-14.
std::optional<double> c_exception(double alpha, double beta1, double beta2);

struct NewtonCycleResult {
    bool converged = false;
    AdamState x;                   // solution (or last iterate on failure)
    std::vector<AdamState> orbit;  // x, Tbar x, ..., Tbar^{q-1} x when converged
    double residual = 0.0;         // ||Tbar^q(x) - x||_inf at x
    int minimal_period = 0;        // smallest divisor d of q with Tbar^d(x) ~ x
    int iterations = 0;
    std::string message;

    /// A genuine 2-cycle: converged with minimal period exactly 2.
    bool is_two_cycle() const { return converged && minimal_period == 2; }

    TwoCycle as_two_cycle(const HyperParams& p, const QuadraticObjective& obj) const;
};

/// Damped Newton iteration on G(x) = Tbar^q(x) - x with a finite-difference
/// Jacobian. Fixed points reached with q > 1 are reported with their minimal
/// period rather than rejected outright.
NewtonCycleResult newton_find_cycle(const AdamState& seed, int q, const HyperParams& p,
                                    const QuadraticObjective& obj,
                                    double tol = newton_tol,
                                    int max_iter = newton_max_iter);

struct ContinuationSample {
    double epsilon = 0.0;
    bool converged = false;
    std::optional<TwoCycle> cycle;
    std::optional<StabilityReport> report;
};

struct ContinuationResult {
    std::vector<ContinuationSample> samples;
    bool fully_converged = false;
    std::string diagnostic;
};

/// Follow the scalar 2-cycle from the eps = 0 closed form through the given
/// ascending epsilon targets, each Newton solve seeded by the previous
/// solution. Stops at the first failure; remaining targets are marked
/// unconverged.
ContinuationResult continue_in_epsilon(double alpha, double beta1, double beta2,
                                       double c,
                                       const std::vector<double>& epsilon_targets);

struct DecayFit {
    bool decay_complete = false;  // all norms in the window below 1e-300
    double c_fit = 0.0;
    double beta_fit = 0.0;
    int points_used = 0;
};

/// Least-squares fit of log||theta(t,x)|| = log C + t log beta over
/// t in [t_begin, t_end] with x held fixed. Norms below 1e-300 are skipped;
/// if fewer than 2 usable points remain the decay-complete flag is set.
DecayFit theta_decay_bound(const AdamState& x, const HyperParams& p,
                           const QuadraticObjective& obj, long t_begin, long t_end);

/// t where the correction factor crosses 1 (root of
/// (t+1) ln(b2/b1) = ln(2 - b1^{t+1})); only exists for beta2 > beta1.
std::optional<double> correction_crossing_time(double beta1, double beta2);

/// Window for theta_decay_bound on which the single-exponential model is
/// valid: the requested window, shifted past 8x the sign change of the
/// correction factor when one occurs inside it.
std::pair<long, long> decay_fit_window(const HyperParams& p, long t_begin, long t_end);

/// Solve the per-component 2x2 system of the 2-cycle remark,
///   [-b1 1; 1 -b1] [m_t; m_{t+1}] = (1-b1) [g(w_t); g(w_{t+1})],
/// recovering the moment history from the weight history.
std::pair<std::vector<double>, std::vector<double>> recover_cycle_moments(
    const std::vector<double>& w_t, const std::vector<double>& w_t1, double beta1,
    const QuadraticObjective& obj);

}  // namespace adyn
