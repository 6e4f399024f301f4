#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace drio {

/// Monotone (Fritsch-Carlson) cubic Hermite interpolant.  Does not overshoot
/// between samples, which keeps interpolated detunings ringing-free.
/// Outside the sample range the interpolant extrapolates linearly with the
/// boundary slope.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2) {
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (!(x_[i] > x_[i - 1])) {
                throw std::invalid_argument("MonotoneCubic: x grid must be strictly increasing");
            }
        }
        slopes_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        }
        slopes_[0] = d[0];
        slopes_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slopes_[i] = 0.0;
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
    }

    double operator()(double t) const
    {
        const std::size_t n = x_.size();
        if (t <= x_.front()) {
            return y_.front() + slopes_.front() * (t - x_.front());
        }
        if (t >= x_.back()) {
            return y_.back() + slopes_.back() * (t - x_.back());
        }
        std::size_t lo = 0;
        std::size_t hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= t ? lo : hi) = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double s = (t - x_[lo]) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * y_[lo] + h10 * h * slopes_[lo] + h01 * y_[lo + 1] + h11 * h * slopes_[lo + 1];
    }

    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slopes_;
};

} // namespace drio
