#include "drio/train.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>

namespace drio {

double SubpulseTrain::shape_value(double x) const
{
    switch (shape) {
    case SubpulseShape::gaussian:
        return std::exp(-x * x);
    case SubpulseShape::square:
        return std::fabs(x) <= 0.5 ? 1.0 : 0.0;
    }
    return 0.0;
}

double SubpulseTrain::area(int n) const
{
    const double omega = pulses.at(static_cast<std::size_t>(n)).omega;
    switch (shape) {
    case SubpulseShape::gaussian:
        return std::sqrt(M_PI) * sigma * omega;
    case SubpulseShape::square:
        return sigma * omega;
    }
    return 0.0;
}

double SubpulseTrain::total_area() const
{
    double sum = 0.0;
    for (int n = 0; n < count(); ++n) sum += area(n);
    return sum;
}

double SubpulseTrain::repetition_frequency() const
{
    if (!(tau > 0.0)) throw std::logic_error("train has no delay");
    return 2.0 * M_PI / tau;
}

SubpulseTrain digitize(const ContinuousControl& control, int n_pulses,
                       double tau_over_sigma, SubpulseShape shape)
{
    if (n_pulses < 5) {
        throw std::invalid_argument("digitize: need N >= 5 (tau << T)");
    }
    if (!(tau_over_sigma >= 4.0)) {
        throw std::invalid_argument("digitize: need tau/sigma >= 4 (sigma << tau)");
    }
    if (!(control.duration > 0.0)) {
        throw std::invalid_argument("digitize: control duration must be > 0");
    }
    if (!control.has_phase()) {
        throw std::invalid_argument("digitize: control phase is undefined");
    }

    SubpulseTrain train;
    train.tau = control.duration / n_pulses;
    train.sigma = train.tau / tau_over_sigma;
    train.shape = shape;
    train.pulses.resize(static_cast<std::size_t>(n_pulses));

    // Peak amplitude such that the subpulse area equals tau * Omega(t_n).
    const double shape_integral = (shape == SubpulseShape::gaussian) ? std::sqrt(M_PI) : 1.0;
    for (int n = 0; n < n_pulses; ++n) {
        const double t_n = (n + 0.5) * train.tau;
        Subpulse& p = train.pulses[static_cast<std::size_t>(n)];
        p.t = t_n;
        p.omega = train.tau * control.rabi(t_n) / (shape_integral * train.sigma);
        p.phase = control.phase(t_n);
    }
    return train;
}

TrainProfiles train_profiles(const SubpulseTrain& train)
{
    const int n = train.count();
    if (n < 2) {
        throw std::invalid_argument("train_profiles: need >= 2 pulses");
    }
    std::vector<double> t_area(static_cast<std::size_t>(n));
    std::vector<double> areas(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        t_area[static_cast<std::size_t>(i)] = train.pulses[static_cast<std::size_t>(i)].t;
        areas[static_cast<std::size_t>(i)] = train.area(i);
    }
    std::vector<double> t_step(static_cast<std::size_t>(n - 1));
    std::vector<double> steps(static_cast<std::size_t>(n - 1));
    for (int i = 1; i < n; ++i) {
        t_step[static_cast<std::size_t>(i - 1)] =
            0.5 * (train.pulses[static_cast<std::size_t>(i)].t +
                   train.pulses[static_cast<std::size_t>(i - 1)].t);
        steps[static_cast<std::size_t>(i - 1)] =
            train.pulses[static_cast<std::size_t>(i)].phase -
            train.pulses[static_cast<std::size_t>(i - 1)].phase;
    }
    return {MonotoneCubic(std::move(t_area), std::move(areas)),
            MonotoneCubic(std::move(t_step), std::move(steps))};
}

ContinuousControl effective_control(const SubpulseTrain& train)
{
    if (train.count() < 2) {
        throw std::invalid_argument("effective_control: need >= 2 pulses for phase steps");
    }
    auto profiles = std::make_shared<TrainProfiles>(train_profiles(train));
    const double tau = train.tau;
    const double duration = train.duration();

    ContinuousControl c;
    c.duration = duration;
    c.rabi = [profiles, tau](double t) { return profiles->area(t) / tau; };
    c.detuning = [profiles, tau](double t) { return profiles->phase_step(t) / tau; };
    const double peak = c.rabi(0.5 * duration);
    c.envelope = [profiles, tau, peak](double t) {
        return peak > 0.0 ? profiles->area(t) / tau / peak : 0.0;
    };
    return phase_from_detuning(c);
}

ValidityReport validate(const SubpulseTrain& train, double margin_threshold)
{
    ValidityReport report;
    report.margin_threshold = margin_threshold;
    report.tau_over_sigma = train.sigma > 0.0 ? train.tau / train.sigma : 0.0;
    report.duration_over_tau = static_cast<double>(train.count());

    double margin = std::numeric_limits<double>::infinity();
    for (int n = 0; n < train.count(); ++n) {
        const double area = train.area(n);
        if (!(area > 0.0)) continue;
        const double dphi = n > 0 ? train.pulses[static_cast<std::size_t>(n)].phase -
                                        train.pulses[static_cast<std::size_t>(n - 1)].phase
                                  : 0.0;
        const double num = std::sqrt(std::fabs(4.0 * M_PI * M_PI - dphi * dphi));
        margin = std::min(margin, num / area);
    }
    report.second_rwa_margin = margin;
    report.adiabatic_area_ratio = train.total_area();  // int A dt / tau = sum A_n

    report.pass = margin >= margin_threshold && report.tau_over_sigma >= 4.0 &&
                  train.count() >= 5;
    return report;
}

SubpulseTrain taylor_phase_correction(const SubpulseTrain& train,
                                      const ContinuousControl& control, int order)
{
    if (order != 0 && order != 1) {
        throw std::invalid_argument("taylor_phase_correction: order must be 0 or 1");
    }
    if (order == 0) {
        return train;  // plain sampling already realizes the lowest order
    }
    if (!control.detuning) {
        throw std::invalid_argument("taylor_phase_correction: control has no detuning");
    }

    SubpulseTrain out = train;
    const double tau = train.tau;
    // phi''' = Delta''; second derivative by central differences.
    const double h = 1e-3 * tau;
    auto detuning_second = [&](double t) {
        return (control.detuning(t + h) - 2.0 * control.detuning(t) +
                control.detuning(t - h)) / (h * h);
    };
    for (int n = 1; n < train.count(); ++n) {
        const double t_mid = 0.5 * (train.pulses[static_cast<std::size_t>(n)].t +
                                    train.pulses[static_cast<std::size_t>(n - 1)].t);
        const double target = tau * control.detuning(t_mid) +
                              (tau * tau * tau / 24.0) * detuning_second(t_mid);
        out.pulses[static_cast<std::size_t>(n)].phase =
            out.pulses[static_cast<std::size_t>(n - 1)].phase + target;
    }
    return out;
}

nlohmann::json train_to_json(const SubpulseTrain& train)
{
    nlohmann::json pulses = nlohmann::json::array();
    for (const Subpulse& p : train.pulses) {
        pulses.push_back({{"t_ns", p.t}, {"omega_rad_per_ns", p.omega}, {"phase_rad", p.phase}});
    }
    return {{"sigma_ns", train.sigma},
            {"tau_ns", train.tau},
            {"shape", train.shape == SubpulseShape::gaussian ? "gaussian" : "square"},
            {"pulses", pulses}};
}

SubpulseTrain train_from_json(const nlohmann::json& doc)
{
    SubpulseTrain train;
    train.sigma = doc.at("sigma_ns").get<double>();
    train.tau = doc.at("tau_ns").get<double>();
    if (doc.contains("shape") && doc.at("shape").get<std::string>() == "square") {
        train.shape = SubpulseShape::square;
    }
    for (const auto& p : doc.at("pulses")) {
        train.pulses.push_back({p.at("t_ns").get<double>(),
                                p.at("omega_rad_per_ns").get<double>(),
                                p.at("phase_rad").get<double>()});
    }
    return train;
}

void save_train_file(const SubpulseTrain& train, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write train file: " + path);
    out << train_to_json(train).dump(2) << "\n";
}

SubpulseTrain load_train_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open train file: " + path);
    nlohmann::json doc;
    in >> doc;
    return train_from_json(doc);
}

} // namespace drio
