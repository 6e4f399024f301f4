#pragma once

#include <array>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "drio/control.hpp"
#include "drio/train.hpp"

namespace drio {

using Complex = std::complex<double>;

struct QubitState {
    Complex c1{1.0, 0.0};
    Complex c2{0.0, 0.0};

    double pop1() const { return std::norm(c1); }
    double pop2() const { return std::norm(c2); }
    double norm() const { return std::norm(c1) + std::norm(c2); }

    static QubitState ground() { return {}; }
};

/// 2x2 unitary with unit determinant (row-major).
struct Su2Propagator {
    std::array<Complex, 4> u{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}};

    static Su2Propagator identity() { return {}; }
    Su2Propagator operator*(const Su2Propagator& rhs) const;
    QubitState apply(const QubitState& s) const;
    double unitarity_defect() const;  // ||U^dag U - I||_max
};

/// Instantaneous resonant kick of area A and phase phi:
/// [[cos(A/2), -i e^{-i phi} sin(A/2)], [-i e^{i phi} sin(A/2), cos(A/2)]].
Su2Propagator delta_kick(double area, double phase);

/// Diagonal phase-step kick diag(e^{+i dphi/2}, e^{-i dphi/2}) used by the
/// transformed-frame delta model.
Su2Propagator phase_step_kick(double dphi);

struct TrajectoryPoint {
    double t = 0.0;
    QubitState state;
};

struct Trajectory {
    std::string model_tag;
    std::vector<TrajectoryPoint> points;
    double max_norm_defect = 0.0;  // worst |norm - 1| along the trajectory

    const QubitState& final_state() const { return points.back().state; }
    double final_pop2() const { return points.back().state.pop2(); }
};

/// Exact delta-kick evolution: state after each pulse (t_n^+).
Trajectory propagate_delta_train(const SubpulseTrain& train,
                                 const QubitState& initial = QubitState::ground());

/// Same dynamics in the transformed frame (phases moved into diagonal
/// phase-step kicks between couplings); populations must match the
/// original frame.
Trajectory propagate_delta_train_transformed(const SubpulseTrain& train,
                                             const QubitState& initial = QubitState::ground());

/// Ordered product of all kicks of a train.
Su2Propagator train_propagator(const SubpulseTrain& train);

/// Time-dependent Schroedinger integration of the actual subpulse train
/// (true envelopes, piecewise-constant phases), sampled at pulse boundaries.
Trajectory propagate_full(const SubpulseTrain& train,
                          const QubitState& initial = QubitState::ground(),
                          double tolerance = 1e-10);

/// Integration of the continuous two-level model
/// H = 1/2 [[-Delta, Omega], [Omega, Delta]].
Trajectory propagate_effective(const ContinuousControl& control,
                               const QubitState& initial = QubitState::ground(),
                               double tolerance = 1e-10);

struct ModeTruncation {
    int k_max = 0;       // retain modes |k| <= k_max
    double gamma = 0.0;  // repetition frequency 2*pi/tau

    static ModeTruncation for_train(const SubpulseTrain& train, int k_max);
};

/// Dirac-comb mode expansion of the train Hamiltonian in the transformed
/// frame, truncated at |k| <= k_max.  k_max = 0 is the resonant effective
/// model; large k_max converges to the delta-kick dynamics.
Trajectory propagate_modes(const SubpulseTrain& train, const ModeTruncation& truncation,
                           const QubitState& initial = QubitState::ground(),
                           double tolerance = 1e-10);

/// CSV columns: time_ns, pop_1, pop_2, re_c1, im_c1, re_c2, im_c2, model_tag.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace drio
