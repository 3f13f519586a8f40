#include "adyn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adyn {

std::string to_string(Stability s) {
    switch (s) {
        case Stability::attractive: return "attractive";
        case Stability::repelling: return "repelling";
        default: return "nonhyperbolic";
    }
}

namespace {

using cplx = std::complex<double>;

// Newton polish of a root of x^3 + a x^2 + b x + c. Skipped near critical
// points of the polynomial to leave repeated roots alone.
cplx polish_cubic_root(cplx z, double a, double b, double c) {
    for (int it = 0; it < 4; ++it) {
        const cplx p = ((z + a) * z + b) * z + c;
        const cplx dp = (3.0 * z + 2.0 * a) * z + b;
        if (std::abs(dp) < 1e-8 * (1.0 + std::abs(z) * std::abs(z))) break;
        z -= p / dp;
    }
    return z;
}

double polish_real_cubic_root(double x, double a, double b, double c) {
    for (int it = 0; it < 4; ++it) {
        const double p = ((x + a) * x + b) * x + c;
        const double dp = (3.0 * x + 2.0 * a) * x + b;
        if (std::abs(dp) < 1e-8 * (1.0 + x * x)) break;
        x -= p / dp;
    }
    return x;
}

// Roots of x^3 + a x^2 + b x + c: trigonometric form when all roots are
// real, Cardano otherwise. Conjugate pairs are constructed as exact mirrors.
std::vector<cplx> cubic_roots(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    const double scale = std::max({std::abs(p) * std::abs(p) * std::abs(p), q * q, 1e-300});

    std::vector<cplx> roots;
    if (std::abs(disc) <= 1e-12 * scale) {
        // repeated roots
        if (std::abs(p) <= 1e-14 * (1.0 + std::abs(q))) {
            const double y = std::cbrt(-q);
            roots.assign(3, cplx(y + shift, 0.0));
        } else {
            const double y1 = 3.0 * q / p;           // simple root
            const double y2 = -3.0 * q / (2.0 * p);  // double root
            roots = {cplx(polish_real_cubic_root(y1 + shift, a, b, c), 0.0),
                     cplx(y2 + shift, 0.0), cplx(y2 + shift, 0.0)};
        }
        return roots;
    }

    if (disc > 0.0) {
        // three distinct real roots
        const double r = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * r);  // = (3q/2p) sqrt(-3/p)
        arg = std::clamp(arg, -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) {
            const double y = r * std::cos(phi / 3.0 - 2.0 * M_PI * k / 3.0);
            roots.emplace_back(polish_real_cubic_root(y + shift, a, b, c), 0.0);
        }
        std::sort(roots.begin(), roots.end(),
                  [](const cplx& l, const cplx& r_) { return l.real() < r_.real(); });
        return roots;
    }

    // one real root + conjugate pair (Cardano)
    const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    const double y_real = u + v;
    const double real_root = polish_real_cubic_root(y_real + shift, a, b, c);
    cplx z(-y_real / 2.0 + shift, std::sqrt(3.0) / 2.0 * (u - v));
    z = polish_cubic_root(z, a, b, c);
    roots = {cplx(real_root, 0.0), cplx(z.real(), std::abs(z.imag())),
             cplx(z.real(), -std::abs(z.imag()))};
    return roots;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues_small(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues_small: not square");
    const std::size_t n = m.rows();
    if (n == 1) return {cplx(m(0, 0), 0.0)};
    if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double d = tr * tr / 4.0 - det;
        if (d >= 0.0) {
            const double r = std::sqrt(d);
            return {cplx(tr / 2.0 - r, 0.0), cplx(tr / 2.0 + r, 0.0)};
        }
        const double im = std::sqrt(-d);
        return {cplx(tr / 2.0, im), cplx(tr / 2.0, -im)};
    }
    if (n != 3)
        throw std::invalid_argument("eigenvalues_small: only 1x1, 2x2, 3x3 supported");

    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    const double m2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double det =
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
        m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
        m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return cubic_roots(-tr, m2, -det);
}

double spectral_radius(const std::vector<std::complex<double>>& eigs) {
    double r = 0.0;
    for (const auto& z : eigs) r = std::max(r, std::abs(z));
    return r;
}

Stability classify_stability(const std::vector<std::complex<double>>& eigs, double tol) {
    if (eigs.empty()) throw std::invalid_argument("classify_stability: empty spectrum");
    const double rho = spectral_radius(eigs);
    if (rho < 1.0 - tol) return Stability::attractive;
    if (rho > 1.0 + tol) return Stability::repelling;
    return Stability::nonhyperbolic;
}

StabilityReport make_stability_report(const Matrix& jacobian) {
    StabilityReport rep;
    rep.jacobian = jacobian;
    rep.eigenvalues = eigenvalues_small(jacobian);
    rep.spectral_radius = spectral_radius(rep.eigenvalues);
    rep.classification = classify_stability(rep.eigenvalues);
    return rep;
}

Matrix numeric_jacobian(const VectorMap& map, const std::vector<double>& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("numeric_jacobian: h must be > 0");
    const std::size_t n = x.size();
    Matrix j(0, 0);
    for (std::size_t col = 0; col < n; ++col) {
        const double hj = h * (1.0 + std::abs(x[col]));
        std::vector<double> xp = x, xm = x;
        xp[col] += hj;
        xm[col] -= hj;
        // divide by the perturbation as actually represented, not the nominal 2h
        const double dx = xp[col] - xm[col];
        const std::vector<double> fp = map(xp);
        const std::vector<double> fm = map(xm);
        if (fp.size() != fm.size())
            throw std::invalid_argument("numeric_jacobian: inconsistent map output size");
        if (j.rows() == 0) j = Matrix(fp.size(), n);
        for (std::size_t r = 0; r < fp.size(); ++r) {
            if (!std::isfinite(fp[r]) || !std::isfinite(fm[r]))
                throw std::domain_error(
                    "numeric_jacobian: non-finite map value when perturbing coordinate " +
                    std::to_string(col));
            j(r, col) = (fp[r] - fm[r]) / dx;
        }
    }
    return j;
}

}  // namespace adyn
