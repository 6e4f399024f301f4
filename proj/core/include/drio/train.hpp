#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "drio/control.hpp"
#include "drio/interp.hpp"

namespace drio {

enum class SubpulseShape { gaussian, square };

struct Subpulse {
    double t = 0.0;      // center time
    double omega = 0.0;  // peak Rabi frequency
    double phase = 0.0;  // constant phase of this subpulse
};

/// Train of identically shaped subpulses with shared width sigma and delay
/// tau; pulse n is centered at (n + 1/2) * tau so the train occupies
/// exactly [0, N*tau].
struct SubpulseTrain {
    double sigma = 0.0;
    double tau = 0.0;
    SubpulseShape shape = SubpulseShape::gaussian;
    std::vector<Subpulse> pulses;

    int count() const { return static_cast<int>(pulses.size()); }
    double duration() const { return tau * static_cast<double>(pulses.size()); }

    /// Time integral of one subpulse envelope: sqrt(pi)*sigma*omega for the
    /// Gaussian shape, sigma*omega for the square shape.
    double area(int n) const;
    double total_area() const;
    double shape_value(double x) const;  // Lambda(x)

    double repetition_frequency() const;  // gamma = 2*pi/tau
};

struct ValidityReport {
    double second_rwa_margin = 0.0;      // min_n sqrt|4pi^2 - dphi_n^2| / A_n
    double tau_over_sigma = 0.0;
    double duration_over_tau = 0.0;      // = N
    double adiabatic_area_ratio = 0.0;   // int A dt / tau
    double margin_threshold = 5.0;
    bool pass = false;
};

/// Samples `control` into an N-pulse train: tau = T/N, sigma = tau/r,
/// per-pulse area A_n = tau * Omega(t_n), phase phi_n = phi(t_n) at the
/// pulse peaks t_n = (n + 1/2) * tau.
SubpulseTrain digitize(const ContinuousControl& control, int n_pulses,
                       double tau_over_sigma = 6.0,
                       SubpulseShape shape = SubpulseShape::gaussian);

/// Coarse-grained continuous model of a train: Omega_eff(t_n) = A_n/tau,
/// Delta_eff(t_{n-1/2}) = (phi_n - phi_{n-1})/tau, interpolated between
/// samples; phase re-integrated from the effective detuning.
ContinuousControl effective_control(const SubpulseTrain& train);

/// Interpolants used by both effective_control and the mode-expansion
/// propagator: the area profile A(t) with A(t_n) = A_n, and the phase-step
/// profile dphi(t) with dphi(t_{n-1/2}) = phi_n - phi_{n-1}.
struct TrainProfiles {
    MonotoneCubic area;        // A(t)
    MonotoneCubic phase_step;  // dphi(t)
};
TrainProfiles train_profiles(const SubpulseTrain& train);

ValidityReport validate(const SubpulseTrain& train, double margin_threshold = 5.0);

/// Adjusts phases so the realized steps match the odd-derivative Taylor
/// series of the continuous phase at interval midpoints, truncated at
/// order p (p=0: plain sampling, unchanged; p=1: adds the tau^3/24 * phi'''
/// term).
SubpulseTrain taylor_phase_correction(const SubpulseTrain& train,
                                      const ContinuousControl& control, int order);

nlohmann::json train_to_json(const SubpulseTrain& train);
SubpulseTrain train_from_json(const nlohmann::json& doc);
void save_train_file(const SubpulseTrain& train, const std::string& path);
SubpulseTrain load_train_file(const std::string& path);

} // namespace drio
