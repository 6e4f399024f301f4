#include "drio/control.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "drio/elliptic.hpp"
#include "drio/interp.hpp"
#include "drio/quadrature.hpp"

namespace drio {

RioParams rio_third_order_params()
{
    // m and T*Omega/pi are the published values; omega and delta0 are refit
    // at those pinned values so the alpha=0 transfer is complete to ~3e-10
    // (the published 1.149/1.114 round these to three decimals).
    return {0.235, 1.148457613879, 1.113150957222, 1.86};
}

RioParams rio_third_order_exact_params()
{
    // Unrounded time-optimal solution of the third-order constraints in the
    // elliptic family: c1(0) and dc1/dalpha(0) vanish to machine precision.
    // The published m=0.235, omega=1.149, Delta0=1.114, T=1.86pi are
    // roundings of these values.
    return {0.236482880520, 1.149730710339, 1.114015846003, 1.858811602599};
}

double fifth_order_area_multiple() { return 2.71; }

const std::vector<double>& fifth_order_sine_coefficients()
{
    // Reconstructed by the optimizer module (order=5, odd sine ansatz,
    // T = 2.71*pi/Omega) and frozen here as the fifth-order preset.
    static const std::vector<double> coeffs = {
        -0.850010669566, 0.945210447754, -0.134489748502, -0.022155445835,
        0.028277534995,  -0.014680618982, 0.002036225389,  0.008623069833,
    };
    return coeffs;
}

ContinuousControl rio_elliptic(const RioParams& p, double rabi_amplitude)
{
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("rio_elliptic: rabi_amplitude must be > 0");
    }
    const double omega = p.omega_over_rabi * rabi_amplitude;
    const double delta0 = p.delta0_over_rabi * rabi_amplitude;
    const double quarter_k = complete_k(p.m);
    const double m = p.m;

    ContinuousControl c;
    c.duration = p.area_multiple * M_PI / rabi_amplitude;
    c.rabi = [rabi_amplitude](double) { return rabi_amplitude; };
    c.envelope = [](double) { return 1.0; };
    c.detuning = [delta0, omega, quarter_k, m](double t) {
        return delta0 * jacobi_cn(omega * t + quarter_k, m);
    };
    return phase_from_detuning(c);
}

ContinuousControl rio_third_order(double rabi_amplitude)
{
    return rio_elliptic(rio_third_order_params(), rabi_amplitude);
}

ContinuousControl rio_fifth_order(double rabi_amplitude)
{
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("rio_fifth_order: rabi_amplitude must be > 0");
    }
    const double duration = fifth_order_area_multiple() * M_PI / rabi_amplitude;
    const std::vector<double>& coeffs = fifth_order_sine_coefficients();

    ContinuousControl c;
    c.duration = duration;
    c.rabi = [rabi_amplitude](double) { return rabi_amplitude; };
    c.envelope = [](double) { return 1.0; };
    c.detuning = [rabi_amplitude, duration, coeffs](double t) {
        const double s = (t - 0.5 * duration) / duration;
        double d = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            d += coeffs[j] * std::sin(2.0 * M_PI * static_cast<double>(j + 1) * s);
        }
        return rabi_amplitude * d;
    };
    return phase_from_detuning(c);
}

ContinuousControl pi_pulse(double rabi_amplitude)
{
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("pi_pulse: rabi_amplitude must be > 0");
    }
    ContinuousControl c;
    c.duration = M_PI / rabi_amplitude;
    c.rabi = [rabi_amplitude](double) { return rabi_amplitude; };
    c.envelope = [](double) { return 1.0; };
    c.detuning = [](double) { return 0.0; };
    c.phase = [](double) { return 0.0; };
    return c;
}

ContinuousControl phase_from_detuning(const ContinuousControl& control, double rel_tol)
{
    if (!control.detuning) {
        throw std::invalid_argument("phase_from_detuning: control has no detuning");
    }
    if (!(control.duration > 0.0)) {
        throw std::invalid_argument("phase_from_detuning: duration must be > 0");
    }
    ContinuousControl out = control;
    auto integral = std::make_shared<CumulativeIntegral>(control.detuning, 0.0,
                                                         control.duration, rel_tol);
    out.phase = [integral](double t) { return (*integral)(t); };
    return out;
}

ContinuousControl load_waveform(const nlohmann::json& doc)
{
    for (const char* key : {"duration", "rabi_amplitude", "time_grid", "detuning"}) {
        if (!doc.contains(key)) {
            throw std::invalid_argument(std::string("waveform document: missing field ") + key);
        }
    }
    const double duration = doc.at("duration").get<double>();
    const double rabi = doc.at("rabi_amplitude").get<double>();
    if (!(duration > 0.0)) {
        throw std::invalid_argument("waveform document: duration must be > 0");
    }
    auto times = doc.at("time_grid").get<std::vector<double>>();
    auto det = doc.at("detuning").get<std::vector<double>>();
    if (times.size() != det.size() || times.size() < 2) {
        throw std::invalid_argument("waveform document: time_grid/detuning size mismatch");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("waveform document: time_grid must be strictly increasing");
        }
    }

    auto interp = std::make_shared<MonotoneCubic>(std::move(times), std::move(det));
    ContinuousControl c;
    c.duration = duration;
    c.rabi = [rabi](double) { return rabi; };
    c.envelope = [](double) { return 1.0; };
    c.detuning = [interp](double t) { return (*interp)(t); };
    return phase_from_detuning(c);
}

ContinuousControl load_waveform_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open waveform file: " + path);
    }
    nlohmann::json doc;
    in >> doc;
    return load_waveform(doc);
}

nlohmann::json save_waveform(const ContinuousControl& control, int samples,
                             int order, const std::string& source)
{
    if (samples < 2) {
        throw std::invalid_argument("save_waveform: need >= 2 samples");
    }
    std::vector<double> times(samples);
    std::vector<double> det(samples);
    for (int i = 0; i < samples; ++i) {
        times[i] = control.duration * static_cast<double>(i) / (samples - 1);
        det[i] = control.detuning(times[i]);
    }
    nlohmann::json doc;
    doc["duration"] = control.duration;
    doc["rabi_amplitude"] = control.rabi(0.5 * control.duration);
    doc["time_grid"] = times;
    doc["detuning"] = det;
    doc["meta"] = {{"order", order}, {"source", source}};
    return doc;
}

void save_waveform_file(const ContinuousControl& control, const std::string& path,
                        int samples, int order, const std::string& source)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write waveform file: " + path);
    }
    out << save_waveform(control, samples, order, source).dump(2) << "\n";
}

} // namespace drio
