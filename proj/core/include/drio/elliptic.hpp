#pragma once

namespace drio {

/// Complete elliptic integral of the first kind, K(m), with m the
/// *parameter* (not the modulus k = sqrt(m)).  Valid for 0 <= m < 1.
/// Computed by the arithmetic-geometric mean, accurate to ~1e-15 relative.
double complete_k(double m);

struct JacobiValues {
    double sn;
    double cn;
    double dn;
};

/// Jacobi elliptic functions sn, cn, dn of argument u and parameter m,
/// 0 <= m < 1, via the descending Landen / AGM recursion.
JacobiValues jacobi_elliptic(double u, double m);

double jacobi_sn(double u, double m);
double jacobi_cn(double u, double m);
double jacobi_dn(double u, double m);

} // namespace drio
