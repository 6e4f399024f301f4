#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace drio {

/// Resonant-frame control law on [0, T]: Rabi envelope Omega(t) >= 0,
/// detuning Delta(t), running phase phi(t) = integral of Delta, and the
/// dimensionless envelope Pi(s) on s = t/T.
struct ContinuousControl {
    double duration = 0.0;
    std::function<double(double)> rabi;
    std::function<double(double)> detuning;
    std::function<double(double)> phase;     // empty until populated
    std::function<double(double)> envelope;  // Pi(s), s in [0, 1]

    bool has_phase() const { return static_cast<bool>(phase); }
};

/// Constants of the elliptic-cosine detuning waveform,
/// Delta(t) = delta0 * cn(omega*t + K(m), m), at constant Rabi amplitude.
struct RioParams {
    double m = 0.0;                 // elliptic parameter
    double omega_over_rabi = 0.0;   // omega / Omega
    double delta0_over_rabi = 0.0;  // Delta0 / Omega
    double area_multiple = 0.0;     // T * Omega / pi
};

/// Third-order preset, published as m=0.235, omega=1.149*Omega,
/// Delta0=1.114*Omega, T=1.86*pi/Omega.  omega and Delta0 carry refined
/// digits so that the transfer is complete to ~1e-9 at the (rounded)
/// published duration; they agree with the published values to < 1e-3.
RioParams rio_third_order_params();

/// Machine-precision solution of the third-order constraints in the same
/// elliptic family, with the duration free: T = 1.858812*pi/Omega,
/// m = 0.236483, omega = 1.149731*Omega, Delta0 = 1.114016*Omega.  The
/// published constants round these values; this control satisfies
/// c1(0) = c1'(0) = 0 to machine precision, so all infidelity derivatives
/// through third order vanish.
RioParams rio_third_order_exact_params();

/// Fifth-order preset: duration T = 2.71*pi/Omega at constant amplitude.
/// The detuning waveform is not elliptic; see rio_fifth_order().
double fifth_order_area_multiple();

/// Odd sine coefficients of the reconstructed fifth-order detuning,
/// Delta(t) = Omega * sum_j c_j sin(2*pi*j*(t - T/2)/T).
const std::vector<double>& fifth_order_sine_coefficients();

/// Third-order time-optimal robust control: constant amplitude, duration
/// 1.86*pi/Omega, elliptic-cosine detuning, numerically integrated phase.
ContinuousControl rio_third_order(double rabi_amplitude);

/// Elliptic-cosine control with arbitrary parameters (used for the exact
/// third-order solution and for optimizer cross-checks).
ContinuousControl rio_elliptic(const RioParams& params, double rabi_amplitude);

/// Fifth-order robust control reconstructed numerically: constant
/// amplitude, duration 2.71*pi/Omega, sine-series detuning.
ContinuousControl rio_fifth_order(double rabi_amplitude);

/// Resonant square pulse of area pi (no detuning).
ContinuousControl pi_pulse(double rabi_amplitude);

/// Returns a copy of `control` with phase(t) = int_0^t Delta(s) ds,
/// evaluated by cached composite Gauss-Legendre quadrature.
ContinuousControl phase_from_detuning(const ContinuousControl& control,
                                      double rel_tol = 1e-12);

/// Waveform parameter file: {duration, rabi_amplitude, time_grid[],
/// detuning[], meta{order, source}}.  Times in ns, frequencies in rad/ns.
/// Detuning between samples is monotone cubic; phase is integrated.
ContinuousControl load_waveform(const nlohmann::json& doc);
ContinuousControl load_waveform_file(const std::string& path);

nlohmann::json save_waveform(const ContinuousControl& control, int samples = 512,
                             int order = 0, const std::string& source = "driopulse");
void save_waveform_file(const ContinuousControl& control, const std::string& path,
                        int samples = 512, int order = 0,
                        const std::string& source = "driopulse");

} // namespace drio
