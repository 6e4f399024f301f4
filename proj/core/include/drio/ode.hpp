#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace drio::detail {

using State2 = std::array<std::complex<double>, 2>;

inline State2 axpy(const State2& y, double h, const State2& k)
{
    return {y[0] + h * k[0], y[1] + h * k[1]};
}

/// Adaptive Dormand-Prince 5(4) for a two-component complex ODE
/// y' = f(t, y).  Integrates through the sorted `times` and records the
/// state at each of them exactly (steps are clipped to the sample times).
template <typename Rhs>
std::vector<State2> integrate_times(Rhs&& f, State2 y, const std::vector<double>& times,
                                    double rtol, double atol)
{
    if (times.size() < 2) {
        throw std::invalid_argument("integrate_times: need at least start and end time");
    }
    std::vector<State2> out;
    out.reserve(times.size());
    out.push_back(y);

    double t = times.front();
    const double span = times.back() - times.front();
    if (!(span > 0.0)) {
        throw std::invalid_argument("integrate_times: times must be increasing");
    }
    double h = span / 100.0;
    const double h_min = span * 1e-15;

    State2 k1 = f(t, y);  // FSAL
    for (std::size_t target = 1; target < times.size(); ++target) {
        const double t_end = times[target];
        while (t < t_end) {
            h = std::min(h, t_end - t);
            // Stage evaluations.
            const State2 y2 = axpy(y, h * (1.0 / 5.0), k1);
            const State2 k2 = f(t + h / 5.0, y2);
            State2 yt;
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
            const State2 k3 = f(t + 3.0 / 10.0 * h, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
            const State2 k4 = f(t + 4.0 / 5.0 * h, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                                    64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
            const State2 k5 = f(t + 8.0 / 9.0 * h, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                                    46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                                    5103.0 / 18656.0 * k5[i]);
            const State2 k6 = f(t + h, yt);
            State2 y5;
            for (int i = 0; i < 2; ++i)
                y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                                    125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                                    11.0 / 84.0 * k6[i]);
            const State2 k7 = f(t + h, y5);

            double err = 0.0;
            for (int i = 0; i < 2; ++i) {
                const std::complex<double> e =
                    h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] +
                         71.0 / 1920.0 * k4[i] - 17253.0 / 339200.0 * k5[i] +
                         22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i]);
                const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(e) / scale);
            }

            if (err <= 1.0) {
                t += h;
                y = y5;
                k1 = k7;
            }
            const double factor =
                std::clamp(0.9 * std::pow(std::max(err, 1e-30), -0.2), 0.2, 5.0);
            h *= factor;
            if (h < h_min) {
                throw std::runtime_error("ODE step-size underflow at t = " + std::to_string(t));
            }
        }
        out.push_back(y);
    }
    return out;
}

} // namespace drio::detail
