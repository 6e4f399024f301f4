#include "drio/elliptic.hpp"

#include <cmath>
#include <stdexcept>

namespace drio {

namespace {
constexpr int kMaxIter = 32;
constexpr double kTol = 1e-15;

void check_parameter(double m)
{
    if (!(m >= 0.0 && m < 1.0)) {
        throw std::domain_error("elliptic parameter m must satisfy 0 <= m < 1");
    }
}
} // namespace

double complete_k(double m)
{
    check_parameter(m);
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int i = 0; i < kMaxIter && std::fabs(a - b) > kTol * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

JacobiValues jacobi_elliptic(double u, double m)
{
    check_parameter(m);
    if (!std::isfinite(u)) {
        throw std::domain_error("jacobi_elliptic: argument must be finite");
    }
    if (m < 1e-16) {
        return {std::sin(u), std::cos(u), 1.0};
    }

    // Descending AGM: a[i], b[i], c[i] with phase back-substitution.
    double a[kMaxIter + 1];
    double c[kMaxIter + 1];
    a[0] = 1.0;
    c[0] = std::sqrt(m);
    double b = std::sqrt(1.0 - m);
    int n = 0;
    while (n < kMaxIter && std::fabs(c[n]) > kTol * a[n]) {
        const double an = 0.5 * (a[n] + b);
        const double cn1 = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
        a[n] = an;
        c[n] = cn1;
    }

    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i > 0; --i) {
        phi = 0.5 * (phi + std::asin(std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0)));
    }

    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double dn = std::sqrt(1.0 - m * sn * sn);
    return {sn, cn, dn};
}

double jacobi_sn(double u, double m) { return jacobi_elliptic(u, m).sn; }
double jacobi_cn(double u, double m) { return jacobi_elliptic(u, m).cn; }
double jacobi_dn(double u, double m) { return jacobi_elliptic(u, m).dn; }

} // namespace drio
