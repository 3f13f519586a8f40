#pragma once

#include "adyn/types.hpp"

namespace adyn {

/// grad f(w) = C w + b.
std::vector<double> gradient(const QuadraticObjective& obj, const std::vector<double>& w);

/// One step of Adam without bias correction (the autonomous map):
///   m+ = b1 m + (1-b1) g(w)
///   v+ = b2 v + (1-b2) g(w) (x) g(w)
///   w+ = w - alpha * m+ (/) sqrt(v+ (+) eps)
/// eps is added componentwise inside the square root. Throws std::domain_error
/// naming the component when eps = 0 and a v+ component vanishes.
AdamState step_autonomous(const AdamState& x, const HyperParams& p,
                          const QuadraticObjective& obj);

/// One step of Adam with bias correction. The step producing x_{t+1} uses the
/// exponent t+1; the first executed step has t = 0.
AdamState step_bias_corrected(long t, const AdamState& x, const HyperParams& p,
                              const QuadraticObjective& obj);

/// Bias-correction factor sqrt(1-b2^{t+1}) / (1-b1^{t+1}).
double correction_factor(long t, const HyperParams& p);

/// The same factor minus one, computed without cancellation:
///   (b1^{t+1} - b2^{t+1} / (1 + sqrt(1-b2^{t+1}))) / (1 - b1^{t+1})
/// Accurate down to underflow, where the naive form loses all digits once
/// b2^{t+1} approaches machine eps.
double correction_factor_minus_one(long t, const HyperParams& p);

/// Disturbance Theta(t,x) = T(t,x) - Tbar(x). The m and v blocks are exactly
/// zero; the w block is -alpha*(factor-1)*(m+ (/) sqrt(v+ (+) eps)).
AdamState theta(long t, const AdamState& x, const HyperParams& p,
                const QuadraticObjective& obj);

/// Iterate the selected map for `steps` steps from x0, recording every
/// `record_every`-th state including the first and last. A state with a
/// non-finite component or magnitude above divergence_bound stops the run;
/// the record keeps the trajectory up to the last good state and carries the
/// offending step index.
TrajectoryRecord simulate(const AdamState& x0, const HyperParams& p,
                          const QuadraticObjective& obj, long steps,
                          bool bias_corrected, long record_every = 1);

}  // namespace adyn
