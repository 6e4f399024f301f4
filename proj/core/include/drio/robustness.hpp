#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drio/control.hpp"
#include "drio/propagate.hpp"
#include "drio/train.hpp"

namespace drio {

enum class PropagationModel { delta, full, effective, modes };

std::string model_tag(PropagationModel model, int k_max = 0);
PropagationModel parse_model_tag(const std::string& tag, int* k_max = nullptr);

/// Transfer probability P(alpha) on a grid of relative amplitude
/// deviations: all amplitudes scaled by (1 + alpha), phases unchanged,
/// propagation from |1>.
struct RobustnessProfile {
    std::vector<double> alphas;
    std::vector<double> probabilities;
    std::string protocol_tag;
    std::string model_tag;

    double probability_at(double alpha, double tol = 1e-12) const;
};

struct ScanOptions {
    PropagationModel model = PropagationModel::delta;
    int k_max = 0;            // for the modes model
    double tolerance = 1e-10; // ODE models
    std::string protocol_tag = "custom";
};

RobustnessProfile scan(const SubpulseTrain& train, const std::vector<double>& alphas,
                       const ScanOptions& options = {});
RobustnessProfile scan(const ContinuousControl& control, const std::vector<double>& alphas,
                       const ScanOptions& options = {.model = PropagationModel::effective});

/// 81 uniform points on [-1, 1] merged with a log-spaced +-[1e-3, 0.2]
/// refinement used for order fitting.
std::vector<double> default_alpha_grid();

/// Least-squares slope of log(1 - P) vs log alpha on (alpha_min, alpha_max],
/// using the symmetric average of P(+alpha) and P(-alpha).
struct ScalingFit {
    double exponent = 0.0;
    double residual = 0.0;  // rms deviation of the log-log fit
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool floor_limited = false;  // infidelities at numerical noise floor
};

ScalingFit fit_order(const RobustnessProfile& profile, double window_lo, double window_hi);

struct ProfileComparison {
    std::vector<double> alphas;
    std::vector<std::string> protocols;
    std::vector<std::vector<double>> probabilities;  // [protocol][alpha]
    std::vector<double> plateau_widths;  // largest |alpha| with 1-P <= 1e-2 around 0
};

ProfileComparison compare(const std::vector<RobustnessProfile>& profiles,
                          double infidelity_threshold = 1e-2);

void write_profile_csv(std::ostream& out, const RobustnessProfile& profile);
void write_comparison_csv(std::ostream& out, const ProfileComparison& comparison);
nlohmann::json summary_json(const std::vector<RobustnessProfile>& profiles,
                            double fit_window_lo = 0.01, double fit_window_hi = 0.15);

} // namespace drio
