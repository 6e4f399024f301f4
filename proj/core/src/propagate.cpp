#include "drio/propagate.hpp"

#include <cmath>
#include <stdexcept>

#include "drio/ode.hpp"

namespace drio {

namespace {

constexpr Complex kImag{0.0, 1.0};

void check_normalized(const QubitState& s)
{
    if (std::fabs(s.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("initial state is not normalized");
    }
}

void check_tolerance(double tol)
{
    if (!(tol >= 1e-12 && tol <= 1e-6)) {
        throw std::invalid_argument("integration tolerance must lie in [1e-12, 1e-6]");
    }
}

std::vector<double> boundary_times(const SubpulseTrain& train)
{
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(train.count()) + 1);
    for (int n = 0; n <= train.count(); ++n) {
        times.push_back(n * train.tau);
    }
    return times;
}

Trajectory from_ode_states(std::string tag, const std::vector<double>& times,
                           const std::vector<detail::State2>& states)
{
    Trajectory traj;
    traj.model_tag = std::move(tag);
    traj.points.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        QubitState s{states[i][0], states[i][1]};
        traj.max_norm_defect = std::max(traj.max_norm_defect, std::fabs(s.norm() - 1.0));
        traj.points.push_back({times[i], s});
    }
    return traj;
}

} // namespace

Su2Propagator Su2Propagator::operator*(const Su2Propagator& rhs) const
{
    Su2Propagator out;
    out.u[0] = u[0] * rhs.u[0] + u[1] * rhs.u[2];
    out.u[1] = u[0] * rhs.u[1] + u[1] * rhs.u[3];
    out.u[2] = u[2] * rhs.u[0] + u[3] * rhs.u[2];
    out.u[3] = u[2] * rhs.u[1] + u[3] * rhs.u[3];
    return out;
}

QubitState Su2Propagator::apply(const QubitState& s) const
{
    return {u[0] * s.c1 + u[1] * s.c2, u[2] * s.c1 + u[3] * s.c2};
}

double Su2Propagator::unitarity_defect() const
{
    // U^dag U - I, max-norm over entries.
    const Complex d00 = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2] - 1.0;
    const Complex d01 = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
    const Complex d11 = std::conj(u[1]) * u[1] + std::conj(u[3]) * u[3] - 1.0;
    return std::max({std::abs(d00), std::abs(d01), std::abs(d11)});
}

Su2Propagator delta_kick(double area, double phase)
{
    if (area < 0.0) {
        throw std::invalid_argument("delta_kick: area must be >= 0");
    }
    const double c = std::cos(0.5 * area);
    const double s = std::sin(0.5 * area);
    Su2Propagator k;
    k.u[0] = c;
    k.u[1] = -kImag * std::exp(-kImag * phase) * s;
    k.u[2] = -kImag * std::exp(kImag * phase) * s;
    k.u[3] = c;
    return k;
}

Su2Propagator phase_step_kick(double dphi)
{
    Su2Propagator k;
    k.u[0] = std::exp(kImag * (0.5 * dphi));
    k.u[3] = std::exp(-kImag * (0.5 * dphi));
    return k;
}

Trajectory propagate_delta_train(const SubpulseTrain& train, const QubitState& initial)
{
    check_normalized(initial);
    Trajectory traj;
    traj.model_tag = "delta";
    traj.points.push_back({0.0, initial});
    QubitState state = initial;
    for (int n = 0; n < train.count(); ++n) {
        state = delta_kick(train.area(n), train.pulses[static_cast<std::size_t>(n)].phase)
                    .apply(state);
        traj.points.push_back({train.pulses[static_cast<std::size_t>(n)].t, state});
    }
    return traj;
}

Trajectory propagate_delta_train_transformed(const SubpulseTrain& train,
                                             const QubitState& initial)
{
    check_normalized(initial);
    Trajectory traj;
    traj.model_tag = "delta_transformed";
    traj.points.push_back({0.0, initial});
    QubitState state = initial;
    for (int n = 0; n < train.count(); ++n) {
        if (n > 0) {
            const double dphi = train.pulses[static_cast<std::size_t>(n)].phase -
                                train.pulses[static_cast<std::size_t>(n - 1)].phase;
            state = phase_step_kick(dphi).apply(state);
        }
        state = delta_kick(train.area(n), 0.0).apply(state);
        traj.points.push_back({train.pulses[static_cast<std::size_t>(n)].t, state});
    }
    return traj;
}

Su2Propagator train_propagator(const SubpulseTrain& train)
{
    Su2Propagator u = Su2Propagator::identity();
    for (int n = 0; n < train.count(); ++n) {
        u = delta_kick(train.area(n), train.pulses[static_cast<std::size_t>(n)].phase) * u;
    }
    return u;
}

Trajectory propagate_full(const SubpulseTrain& train, const QubitState& initial,
                          double tolerance)
{
    check_normalized(initial);
    check_tolerance(tolerance);

    // Sum of all subpulse couplings; Gaussian tails beyond 8.5 sigma are
    // below 1e-31 of the peak and are skipped.
    const double cutoff = 8.5 * train.sigma;
    auto rhs = [&train, cutoff](double t, const detail::State2& y) {
        Complex coupling{0.0, 0.0};
        for (const Subpulse& p : train.pulses) {
            const double dt = t - p.t;
            if (std::fabs(dt) > cutoff && train.shape == SubpulseShape::gaussian) continue;
            const double amp = p.omega * train.shape_value(dt / train.sigma);
            if (amp == 0.0) continue;
            coupling += amp * std::exp(-kImag * p.phase);
        }
        detail::State2 dy;
        dy[0] = -kImag * 0.5 * coupling * y[1];
        dy[1] = -kImag * 0.5 * std::conj(coupling) * y[0];
        return dy;
    };

    const std::vector<double> times = boundary_times(train);
    const auto states = detail::integrate_times(rhs, {initial.c1, initial.c2}, times,
                                                tolerance, tolerance);
    return from_ode_states("full", times, states);
}

Trajectory propagate_effective(const ContinuousControl& control, const QubitState& initial,
                               double tolerance)
{
    check_normalized(initial);
    check_tolerance(tolerance);
    if (!(control.duration > 0.0)) {
        throw std::invalid_argument("propagate_effective: duration must be > 0");
    }

    auto rhs = [&control](double t, const detail::State2& y) {
        const double omega = control.rabi(t);
        const double delta = control.detuning(t);
        detail::State2 dy;
        dy[0] = -kImag * 0.5 * (-delta * y[0] + omega * y[1]);
        dy[1] = -kImag * 0.5 * (omega * y[0] + delta * y[1]);
        return dy;
    };

    // Sample on a uniform grid; 64 points is plenty for plotting and the
    // endpoints are what the contracts care about.
    std::vector<double> times;
    const int samples = 64;
    times.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        times.push_back(control.duration * static_cast<double>(i) / samples);
    }
    const auto states = detail::integrate_times(rhs, {initial.c1, initial.c2}, times,
                                                tolerance, tolerance);
    return from_ode_states("effective", times, states);
}

ModeTruncation ModeTruncation::for_train(const SubpulseTrain& train, int k_max)
{
    return {k_max, train.repetition_frequency()};
}

Trajectory propagate_modes(const SubpulseTrain& train, const ModeTruncation& truncation,
                           const QubitState& initial, double tolerance)
{
    check_normalized(initial);
    check_tolerance(tolerance);
    if (truncation.k_max < 0) {
        throw std::invalid_argument("propagate_modes: k_max must be >= 0");
    }

    const TrainProfiles profiles = train_profiles(train);
    const double tau = train.tau;
    const double gamma = truncation.gamma;
    const int k_max = truncation.k_max;

    // Sum over |k| <= k_max of e^{ik gamma t} is the Dirichlet kernel
    // 1 + 2 sum_k cos(k gamma t); the detuning train carries the extra
    // e^{i pi k} = (-1)^k alternation (it is shifted by tau/2).
    auto rhs = [&profiles, tau, gamma, k_max](double t, const detail::State2& y) {
        double coupling_kernel = 1.0;
        double detuning_kernel = 1.0;
        for (int k = 1; k <= k_max; ++k) {
            const double c = 2.0 * std::cos(k * gamma * t);
            coupling_kernel += c;
            detuning_kernel += (k % 2 == 0) ? c : -c;
        }
        const double omega = profiles.area(t) / tau * coupling_kernel;
        const double delta = profiles.phase_step(t) / tau * detuning_kernel;
        detail::State2 dy;
        dy[0] = -kImag * 0.5 * (-delta * y[0] + omega * y[1]);
        dy[1] = -kImag * 0.5 * (omega * y[0] + delta * y[1]);
        return dy;
    };

    const std::vector<double> times = boundary_times(train);
    const auto states = detail::integrate_times(rhs, {initial.c1, initial.c2}, times,
                                                tolerance, tolerance);
    return from_ode_states("modes:" + std::to_string(k_max), times, states);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
    out << "time_ns,pop_1,pop_2,re_c1,im_c1,re_c2,im_c2,model_tag\n";
    out.precision(15);
    for (const TrajectoryPoint& p : trajectory.points) {
        out << p.t << ',' << p.state.pop1() << ',' << p.state.pop2() << ','
            << p.state.c1.real() << ',' << p.state.c1.imag() << ','
            << p.state.c2.real() << ',' << p.state.c2.imag() << ','
            << trajectory.model_tag << '\n';
    }
}

} // namespace drio
