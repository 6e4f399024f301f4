#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace drio {

/// 15-point Gauss-Legendre rule on [a, b].
template <typename F>
double gauss_legendre_15(F&& f, double a, double b)
{
    // Nodes/weights for [-1, 1].
    static constexpr std::array<double, 8> x = {
        0.0,
        0.2011940939974345,
        0.3941513470775634,
        0.5709721726085388,
        0.7244177313601701,
        0.8482065834104272,
        0.9372733924007060,
        0.9879925180204854,
    };
    static constexpr std::array<double, 8> w = {
        0.2025782419255613,
        0.1984314853271116,
        0.1861610000155622,
        0.1662692058169939,
        0.1395706779261543,
        0.1071592204671719,
        0.0703660474881081,
        0.0307532419961173,
    };
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = w[0] * f(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * x[i];
        sum += w[i] * (f(mid - dx) + f(mid + dx));
    }
    return half * sum;
}

/// Composite Gauss-Legendre quadrature with interval doubling until the
/// two finest levels agree within the requested relative tolerance.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12)
{
    double prev = gauss_legendre_15(f, a, b);
    for (int n = 2; n <= 4096; n *= 2) {
        double sum = 0.0;
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) {
            sum += gauss_legendre_15(f, a + i * h, a + (i + 1) * h);
        }
        const double scale = std::max({std::fabs(sum), std::fabs(prev), 1e-30});
        if (std::fabs(sum - prev) <= rel_tol * scale) {
            return sum;
        }
        prev = sum;
    }
    return prev;
}

/// Cumulative integral of f over [t0, t1], cached on a uniform grid so that
/// repeated evaluations of the antiderivative are cheap.  Each cell uses a
/// 15-point Gauss-Legendre rule; the grid is doubled until two levels agree.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;

    CumulativeIntegral(std::function<double(double)> f, double t0, double t1,
                       double rel_tol = 1e-12, int initial_cells = 64)
        : f_(std::move(f)), t0_(t0), t1_(t1)
    {
        int n = initial_cells;
        build(n);
        double prev_total = cum_.back();
        for (; n <= 65536; ) {
            n *= 2;
            build(n);
            const double total = cum_.back();
            const double scale = std::max({std::fabs(total), std::fabs(prev_total), 1e-30});
            if (std::fabs(total - prev_total) <= rel_tol * scale) {
                discrepancy_ = std::fabs(total - prev_total);
                return;
            }
            prev_total = total;
        }
        discrepancy_ = std::fabs(cum_.back() - prev_total);
    }

    double operator()(double t) const
    {
        if (t <= t0_) return 0.0;
        const double h = (t1_ - t0_) / static_cast<double>(cum_.size() - 1);
        auto idx = static_cast<std::size_t>((t - t0_) / h);
        if (idx >= cum_.size() - 1) idx = cum_.size() - 2;
        const double tl = t0_ + static_cast<double>(idx) * h;
        return cum_[idx] + gauss_legendre_15(f_, tl, std::min(t, t1_));
    }

    double total() const { return cum_.back(); }
    double discrepancy() const { return discrepancy_; }

private:
    void build(int n)
    {
        cum_.assign(static_cast<std::size_t>(n) + 1, 0.0);
        const double h = (t1_ - t0_) / n;
        for (int i = 0; i < n; ++i) {
            cum_[i + 1] = cum_[i] + gauss_legendre_15(f_, t0_ + i * h, t0_ + (i + 1) * h);
        }
    }

    std::function<double(double)> f_;
    double t0_ = 0.0;
    double t1_ = 1.0;
    double discrepancy_ = 0.0;
    std::vector<double> cum_{0.0, 0.0};
};

} // namespace drio
