#include "adyn/types.hpp"

#include <cmath>

#include "adyn/bifurcation.hpp"

namespace adyn {

std::vector<double> AdamState::to_flat() const {
    std::vector<double> out;
    out.reserve(3 * dim());
    out.insert(out.end(), m.begin(), m.end());
    out.insert(out.end(), v.begin(), v.end());
    out.insert(out.end(), w.begin(), w.end());
    return out;
}

AdamState AdamState::from_flat(const std::vector<double>& x) {
    if (x.empty() || x.size() % 3 != 0)
        throw std::invalid_argument("AdamState::from_flat: length must be 3n");
    const std::size_t n = x.size() / 3;
    AdamState s;
    s.m.assign(x.begin(), x.begin() + n);
    s.v.assign(x.begin() + n, x.begin() + 2 * n);
    s.w.assign(x.begin() + 2 * n, x.end());
    // no v >= 0 check here: flat states come from Newton iterates, which may
    // wander slightly negative before converging
    if (s.w.empty()) throw std::invalid_argument("AdamState::from_flat: empty");
    return s;
}

QuadraticObjective::QuadraticObjective(Matrix C, std::vector<double> b, double a)
    : C_(std::move(C)), b_(std::move(b)), a_(a) {
    if (C_.rows() == 0 || C_.rows() != C_.cols())
        throw std::invalid_argument("QuadraticObjective: C must be square, n >= 1");
    if (b_.size() != C_.rows())
        throw std::invalid_argument("QuadraticObjective: b length must match C");
    const double scale = std::max(C_.max_abs(), 1.0);
    for (std::size_t i = 0; i < C_.rows(); ++i)
        for (std::size_t j = i + 1; j < C_.cols(); ++j)
            if (std::abs(C_(i, j) - C_(j, i)) > 1e-12 * scale)
                throw std::invalid_argument(
                    "QuadraticObjective: C is not symmetric within 1e-12 at (" +
                    std::to_string(i) + "," + std::to_string(j) + ")");
    const auto eig = jacobi_eigen_symmetric(C_);
    if (eig.eigenvalues.front() <= 0.0)
        throw std::invalid_argument(
            "QuadraticObjective: C is not positive definite; smallest eigenvalue "
            "estimate " +
            std::to_string(eig.eigenvalues.front()));
}

std::vector<double> QuadraticObjective::gradient(const std::vector<double>& w) const {
    if (w.size() != dim())
        throw std::invalid_argument("QuadraticObjective::gradient: dimension mismatch");
    std::vector<double> g = C_ * w;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += b_[i];
    return g;
}

double QuadraticObjective::value(const std::vector<double>& w) const {
    if (w.size() != dim())
        throw std::invalid_argument("QuadraticObjective::value: dimension mismatch");
    const std::vector<double> cw = C_ * w;
    double f = a_;
    for (std::size_t i = 0; i < w.size(); ++i) f += 0.5 * w[i] * cw[i] + b_[i] * w[i];
    return f;
}

}  // namespace adyn
