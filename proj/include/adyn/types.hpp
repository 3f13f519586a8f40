#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "adyn/linalg.hpp"

namespace adyn {

/// IEEE double machine accuracy; Table-style presets use it as an initial w0.
inline constexpr double machine_eps = std::numeric_limits<double>::epsilon();

/// Any state component beyond this magnitude (or non-finite) counts as divergence.
inline constexpr double divergence_bound = 1e12;

/// Hyperparameters p = (alpha, beta1, beta2, epsilon) of the Adam iteration.
/// epsilon = 0 is allowed; the simulation entry points additionally require
/// epsilon > 0 or a start state with strictly positive v.
struct HyperParams {
    double alpha;
    double beta1;
    double beta2;
    double epsilon;

    HyperParams(double alpha_, double beta1_, double beta2_, double epsilon_)
        : alpha(alpha_), beta1(beta1_), beta2(beta2_), epsilon(epsilon_) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("HyperParams: alpha must be > 0");
        if (!(beta1 > 0.0 && beta1 < 1.0))
            throw std::invalid_argument("HyperParams: beta1 must be in (0,1)");
        if (!(beta2 > 0.0 && beta2 < 1.0))
            throw std::invalid_argument("HyperParams: beta2 must be in (0,1)");
        if (!(epsilon >= 0.0))
            throw std::invalid_argument("HyperParams: epsilon must be >= 0");
    }

    HyperParams with_alpha(double a) const { return {a, beta1, beta2, epsilon}; }
    HyperParams with_epsilon(double e) const { return {alpha, beta1, beta2, e}; }
};

/// State x = (m, v, w) of the iteration, all blocks of equal length n >= 1.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::vector<double> w;

    AdamState() = default;
    AdamState(std::vector<double> m_, std::vector<double> v_, std::vector<double> w_)
        : m(std::move(m_)), v(std::move(v_)), w(std::move(w_)) {
        validate();
    }
    static AdamState scalar(double m_, double v_, double w_) {
        return AdamState({m_}, {v_}, {w_});
    }

    std::size_t dim() const { return w.size(); }

    void validate() const {
        if (w.empty() || m.size() != w.size() || v.size() != w.size())
            throw std::invalid_argument("AdamState: m, v, w must share length n >= 1");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] < 0.0)
                throw std::invalid_argument("AdamState: v[" + std::to_string(i) +
                                            "] is negative");
    }

    /// Flatten to (m, v, w) order; inverse of from_flat.
    std::vector<double> to_flat() const;
    static AdamState from_flat(const std::vector<double>& x);
};

/// f(w) = 1/2 w^T C w + b^T w + a with C symmetric positive definite.
/// The gradient C w + b is exact.
class QuadraticObjective {
  public:
    QuadraticObjective(Matrix C, std::vector<double> b, double a);

    /// n = 1 convenience: f(w) = 1/2 c w^2.
    static QuadraticObjective scalar(double c) {
        return QuadraticObjective(Matrix::from_rows({{c}}), {0.0}, 0.0);
    }

    std::size_t dim() const { return C_.rows(); }
    const Matrix& C() const { return C_; }
    const std::vector<double>& b() const { return b_; }
    double a() const { return a_; }

    std::vector<double> gradient(const std::vector<double>& w) const;
    double value(const std::vector<double>& w) const;

  private:
    Matrix C_;
    std::vector<double> b_;
    double a_;
};

struct TrajectorySample {
    long t;
    AdamState x;
};

/// Recorded simulate() output. Stores raw states only; derived quantities are
/// computed on demand.
struct TrajectoryRecord {
    std::vector<TrajectorySample> states;
    HyperParams params;
    QuadraticObjective objective;
    bool bias_corrected = false;
    bool diverged = false;
    long divergence_step = -1;  // step index of the first bad state, -1 if none
};

}  // namespace adyn
