#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "drio/elliptic.hpp"

using namespace drio;

TEST_CASE("jacobi identities sn^2+cn^2=1 and m*sn^2+dn^2=1")
{
    for (double m : {0.0, 0.1, 0.235, 0.5, 0.9, 0.999}) {
        for (double u = -8.0; u <= 8.0; u += 0.37) {
            const JacobiValues v = jacobi_elliptic(u, m);
            CHECK(std::fabs(v.sn * v.sn + v.cn * v.cn - 1.0) < 1e-12);
            CHECK(std::fabs(m * v.sn * v.sn + v.dn * v.dn - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("m=0 degenerates to circular functions")
{
    for (double u = -6.0; u <= 6.0; u += 0.29) {
        CHECK(std::fabs(jacobi_sn(u, 0.0) - std::sin(u)) < 1e-10);
        CHECK(std::fabs(jacobi_cn(u, 0.0) - std::cos(u)) < 1e-10);
        CHECK(std::fabs(jacobi_dn(u, 0.0) - 1.0) < 1e-10);
    }
}

TEST_CASE("complete elliptic integral of the first kind")
{
    CHECK(std::fabs(complete_k(0.0) - M_PI / 2.0) < 1e-14);
    // Frozen oracle: scipy.special.ellipk(0.235).
    CHECK(std::fabs(complete_k(0.235) - 1.6777134912741105) < 1e-12);
    // Legendre relation spot value: K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi)).
    const double gamma_quarter = 3.6256099082219083119;
    CHECK(std::fabs(complete_k(0.5) -
                    gamma_quarter * gamma_quarter / (4.0 * std::sqrt(M_PI))) < 1e-12);
}

TEST_CASE("quarter and full periods")
{
    const double m = 0.235;
    const double K = complete_k(m);
    CHECK(std::fabs(jacobi_cn(K, m)) < 1e-12);          // cn(K) = 0
    CHECK(std::fabs(jacobi_sn(K, m) - 1.0) < 1e-12);    // sn(K) = 1
    for (double u = -3.0; u <= 3.0; u += 0.41) {
        CHECK(std::fabs(jacobi_cn(u + 4.0 * K, m) - jacobi_cn(u, m)) < 1e-10);
        CHECK(std::fabs(jacobi_cn(u + 2.0 * K, m) + jacobi_cn(u, m)) < 1e-10);
    }
}
