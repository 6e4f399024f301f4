#include "drio/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drio {

namespace {

void check_grid(const std::vector<double>& alphas)
{
    if (alphas.empty()) {
        throw std::invalid_argument("scan: empty alpha grid");
    }
    for (double a : alphas) {
        if (!(a >= -1.0 && a <= 1.0)) {
            throw std::invalid_argument("scan: alpha grid must lie within [-1, 1]");
        }
    }
}

SubpulseTrain scaled(const SubpulseTrain& train, double alpha)
{
    SubpulseTrain out = train;
    for (Subpulse& p : out.pulses) p.omega *= 1.0 + alpha;
    return out;
}

ContinuousControl scaled(const ContinuousControl& control, double alpha)
{
    ContinuousControl out = control;
    auto rabi = control.rabi;
    out.rabi = [rabi, alpha](double t) { return (1.0 + alpha) * rabi(t); };
    return out;
}

} // namespace

std::string model_tag(PropagationModel model, int k_max)
{
    switch (model) {
    case PropagationModel::delta: return "delta";
    case PropagationModel::full: return "full";
    case PropagationModel::effective: return "effective";
    case PropagationModel::modes: return "modes:" + std::to_string(k_max);
    }
    return "unknown";
}

PropagationModel parse_model_tag(const std::string& tag, int* k_max)
{
    if (tag == "delta") return PropagationModel::delta;
    if (tag == "full") return PropagationModel::full;
    if (tag == "effective") return PropagationModel::effective;
    if (tag.rfind("modes", 0) == 0) {
        if (k_max != nullptr) {
            *k_max = tag.size() > 6 ? std::stoi(tag.substr(6)) : 0;
        }
        return PropagationModel::modes;
    }
    throw std::invalid_argument("unknown model tag: " + tag);
}

double RobustnessProfile::probability_at(double alpha, double tol) const
{
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (std::fabs(alphas[i] - alpha) <= tol) return probabilities[i];
    }
    throw std::out_of_range("profile has no grid point at requested alpha");
}

RobustnessProfile scan(const SubpulseTrain& train, const std::vector<double>& alphas,
                       const ScanOptions& options)
{
    check_grid(alphas);
    RobustnessProfile profile;
    profile.alphas = alphas;
    profile.protocol_tag = options.protocol_tag;
    profile.model_tag = model_tag(options.model, options.k_max);
    profile.probabilities.reserve(alphas.size());

    for (double a : alphas) {
        const SubpulseTrain t = scaled(train, a);
        double p = 0.0;
        try {
            switch (options.model) {
            case PropagationModel::delta:
                p = propagate_delta_train(t).final_pop2();
                break;
            case PropagationModel::full:
                p = propagate_full(t, QubitState::ground(), options.tolerance).final_pop2();
                break;
            case PropagationModel::effective:
                p = propagate_effective(effective_control(t), QubitState::ground(),
                                        options.tolerance).final_pop2();
                break;
            case PropagationModel::modes:
                p = propagate_modes(t, ModeTruncation::for_train(t, options.k_max),
                                    QubitState::ground(), options.tolerance).final_pop2();
                break;
            }
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("scan: propagation failed at alpha = " +
                                     std::to_string(a) + ": " + e.what());
        }
        profile.probabilities.push_back(p);
    }
    return profile;
}

RobustnessProfile scan(const ContinuousControl& control, const std::vector<double>& alphas,
                       const ScanOptions& options)
{
    check_grid(alphas);
    if (options.model != PropagationModel::effective) {
        throw std::invalid_argument("scan(control): only the effective model applies");
    }
    RobustnessProfile profile;
    profile.alphas = alphas;
    profile.protocol_tag = options.protocol_tag;
    profile.model_tag = "effective";
    profile.probabilities.reserve(alphas.size());
    for (double a : alphas) {
        try {
            profile.probabilities.push_back(
                propagate_effective(scaled(control, a), QubitState::ground(),
                                    options.tolerance).final_pop2());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("scan: propagation failed at alpha = " +
                                     std::to_string(a) + ": " + e.what());
        }
    }
    return profile;
}

std::vector<double> default_alpha_grid()
{
    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i) {
        grid.push_back(-1.0 + 2.0 * i / 80.0);
    }
    // Log-spaced refinement for small-alpha order fitting, mirrored.
    const int refined = 25;
    for (int i = 0; i < refined; ++i) {
        const double a = 1e-3 * std::pow(0.2 / 1e-3, static_cast<double>(i) / (refined - 1));
        grid.push_back(a);
        grid.push_back(-a);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

ScalingFit fit_order(const RobustnessProfile& profile, double window_lo, double window_hi)
{
    if (!(window_lo > 0.0 && window_hi <= 0.2 && window_lo < window_hi)) {
        throw std::invalid_argument("fit_order: window must lie within (0, 0.2]");
    }

    std::vector<double> log_a;
    std::vector<double> log_i;
    bool floor_limited = false;
    for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
        const double a = profile.alphas[i];
        if (a < window_lo - 1e-12 || a > window_hi + 1e-12) continue;
        double infid = 1.0 - profile.probabilities[i];
        // Symmetric average with the mirrored point when present.
        try {
            const double p_minus = profile.probability_at(-a);
            infid = 0.5 * (infid + (1.0 - p_minus));
        } catch (const std::out_of_range&) {
        }
        if (infid < 1e-12) {
            floor_limited = true;
            continue;
        }
        if (infid >= 1.0) continue;  // P(alpha) must stay below total loss
        log_a.push_back(std::log(a));
        log_i.push_back(std::log(infid));
    }
    if (log_a.size() < 5) {
        throw std::invalid_argument("fit_order: fewer than 5 usable grid points in window");
    }

    const auto n = static_cast<double>(log_a.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_a.size(); ++i) {
        sx += log_a[i];
        sy += log_i[i];
        sxx += log_a[i] * log_a[i];
        sxy += log_a[i] * log_i[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < log_a.size(); ++i) {
        const double r = log_i[i] - (slope * log_a[i] + intercept);
        rss += r * r;
    }

    ScalingFit fit;
    fit.exponent = slope;
    fit.residual = std::sqrt(rss / n);
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.floor_limited = floor_limited;
    return fit;
}

ProfileComparison compare(const std::vector<RobustnessProfile>& profiles,
                          double infidelity_threshold)
{
    if (profiles.empty()) {
        throw std::invalid_argument("compare: no profiles");
    }
    const std::vector<double>& grid = profiles.front().alphas;
    for (const RobustnessProfile& p : profiles) {
        if (p.alphas.size() != grid.size()) {
            throw std::invalid_argument("compare: profiles must share the alpha grid");
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::fabs(p.alphas[i] - grid[i]) > 1e-12) {
                throw std::invalid_argument("compare: profiles must share the alpha grid");
            }
        }
    }

    ProfileComparison cmp;
    cmp.alphas = grid;
    for (const RobustnessProfile& p : profiles) {
        cmp.protocols.push_back(p.protocol_tag);
        cmp.probabilities.push_back(p.probabilities);

        // Walk outward from alpha = 0 and interpolate the threshold crossing.
        std::size_t i0 = 0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (std::fabs(grid[i]) < std::fabs(grid[i0])) i0 = i;
        }
        double width = std::fabs(grid.back());
        for (int dir : {+1, -1}) {
            double prev_a = grid[i0];
            double prev_i = 1.0 - p.probabilities[i0];
            for (std::size_t step = 1;; ++step) {
                const auto idx = static_cast<std::ptrdiff_t>(i0) + dir * static_cast<std::ptrdiff_t>(step);
                if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(grid.size())) break;
                const double a = grid[static_cast<std::size_t>(idx)];
                const double infid = 1.0 - p.probabilities[static_cast<std::size_t>(idx)];
                if (infid > infidelity_threshold) {
                    const double frac = (infidelity_threshold - prev_i) / (infid - prev_i);
                    width = std::min(width, std::fabs(prev_a + frac * (a - prev_a)));
                    break;
                }
                prev_a = a;
                prev_i = infid;
            }
        }
        cmp.plateau_widths.push_back(width);
    }
    return cmp;
}

void write_profile_csv(std::ostream& out, const RobustnessProfile& profile)
{
    out << "alpha,probability,protocol_tag,model_tag\n";
    out.precision(15);
    for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
        out << profile.alphas[i] << ',' << profile.probabilities[i] << ','
            << profile.protocol_tag << ',' << profile.model_tag << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const ProfileComparison& comparison)
{
    out << "alpha";
    for (const std::string& p : comparison.protocols) out << ',' << p;
    out << '\n';
    out.precision(15);
    for (std::size_t i = 0; i < comparison.alphas.size(); ++i) {
        out << comparison.alphas[i];
        for (const auto& probs : comparison.probabilities) out << ',' << probs[i];
        out << '\n';
    }
}

nlohmann::json summary_json(const std::vector<RobustnessProfile>& profiles,
                            double fit_window_lo, double fit_window_hi)
{
    const ProfileComparison cmp = compare(profiles);
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        nlohmann::json entry;
        entry["protocol_tag"] = profiles[i].protocol_tag;
        entry["model_tag"] = profiles[i].model_tag;
        entry["plateau_width"] = cmp.plateau_widths[i];
        try {
            const ScalingFit fit = fit_order(profiles[i], fit_window_lo, fit_window_hi);
            entry["fitted_exponent"] = fit.exponent;
            entry["fit_residual"] = fit.residual;
            entry["floor_limited"] = fit.floor_limited;
        } catch (const std::invalid_argument&) {
            entry["fitted_exponent"] = nullptr;
        }
        out.push_back(entry);
    }
    return out;
}

} // namespace drio
