#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "adyn/linalg.hpp"

namespace adyn {

/// |lambda| within this band of 1 makes a cycle nonhyperbolic.
inline constexpr double stability_tol = 1e-9;

enum class Stability { attractive, repelling, nonhyperbolic };

std::string to_string(Stability s);

/// Eigenvalues of a 1x1, 2x2 or 3x3 real matrix via the closed-form
/// quadratic/cubic solution with a Newton polish on the characteristic
/// polynomial. Complex eigenvalues come out in exactly conjugate pairs.
std::vector<std::complex<double>> eigenvalues_small(const Matrix& m);

double spectral_radius(const std::vector<std::complex<double>>& eigs);

/// attractive iff rho < 1 - tol; repelling iff some |lambda| > 1 + tol;
/// nonhyperbolic otherwise.
Stability classify_stability(const std::vector<std::complex<double>>& eigs,
                             double tol = stability_tol);

struct StabilityReport {
    Matrix jacobian;
    std::vector<std::complex<double>> eigenvalues;
    double spectral_radius = 0.0;
    Stability classification = Stability::nonhyperbolic;
};

StabilityReport make_stability_report(const Matrix& jacobian);

using VectorMap = std::function<std::vector<double>(const std::vector<double>&)>;

/// Central-difference Jacobian with per-coordinate step h*(1+|x_j|).
/// Throws std::domain_error naming the perturbed coordinate if the map
/// returns a non-finite value.
Matrix numeric_jacobian(const VectorMap& map, const std::vector<double>& x,
                        double h = 1e-6);

}  // namespace adyn
