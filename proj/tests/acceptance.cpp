// Acceptance gate: one pass/fail line per criterion, exit 0 only if all
// pass.  Tolerances are pinned here and nowhere else; frozen numeric
// targets come from the oracle runs recorded alongside each check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "drio/control.hpp"
#include "drio/elliptic.hpp"
#include "drio/optimize.hpp"
#include "drio/propagate.hpp"
#include "drio/robustness.hpp"
#include "drio/schedule.hpp"
#include "drio/train.hpp"

using namespace drio;

namespace {

constexpr double kT = 381.8;  // ns

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail)
{
    std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...)
{
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Independent oracle for criterion 10: adaptive Simpson quadrature of
// K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta), no AGM involved.
double simpson(const std::function<double(double)>& f, double a, double b)
{
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1);
}

double quadrature_k(double m)
{
    auto integrand = [m](double theta) {
        const double s = std::sin(theta);
        return 1.0 / std::sqrt(1.0 - m * s * s);
    };
    return adaptive_simpson(integrand, 0.0, M_PI / 2.0,
                            simpson(integrand, 0.0, M_PI / 2.0), 1e-13, 40);
}

}  // namespace

int main()
{
    const double rabi3 = 1.86 * M_PI / kT;
    const double rabi5 = 2.71 * M_PI / kT;
    const ContinuousControl c3 = rio_third_order(rabi3);
    const ContinuousControl c5 = rio_fifth_order(rabi5);

    // --- 1. DRIO3 fidelity (delta model), runtime < 1 s -------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        const SubpulseTrain t3 = digitize(c3, 15);
        const double infid = 1.0 - propagate_delta_train(t3).final_pop2();
        const double dt = seconds_since(t0);
        report(1, "DRIO3 delta-kick fidelity", infid < 1e-4 && dt < 1.0,
               fmt("infidelity=%.3e (<1e-4), %.2fs (<1s)", infid, dt));
    }

    // --- 2. Continuous RIO exactness, runtime < 1 s ------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double infid =
            1.0 - propagate_effective(c3, QubitState::ground(), 1e-10).final_pop2();
        const double dt = seconds_since(t0);
        report(2, "continuous RIO exactness", infid < 1e-6 && dt < 1.0,
               fmt("infidelity=%.3e (<1e-6), %.2fs (<1s)", infid, dt));
    }

    // --- 3. Area bookkeeping ----------------------------------------------
    {
        const double e3 = std::fabs(digitize(c3, 15).total_area() - 1.86 * M_PI);
        const double e5 = std::fabs(digitize(c5, 15).total_area() - 2.71 * M_PI);
        report(3, "total pulse area", e3 < 1e-12 && e5 < 1e-12,
               fmt("|dA3|=%.1e |dA5|=%.1e (<1e-12)", e3, e5));
    }

    // --- 4. Experimental geometry ------------------------------------------
    {
        const double t_ns = 15.0 * 6.0 * 3.0 * std::sqrt(2.0);  // N tau, tau = 6 sigma
        const bool duration_ok = std::fabs(t_ns - 382.0) / 382.0 < 1e-3;
        // The published frequency convention quotes Omega[rad/ns] * 1e3 as MHz.
        const double f3 = 1.86 * M_PI / t_ns * 1e3;
        const double f5 = 2.71 * M_PI / t_ns * 1e3;
        const bool freq_ok =
            std::fabs(f3 - 15.3) / 15.3 < 5e-3 && std::fabs(f5 - 22.3) / 22.3 < 5e-3;
        report(4, "experimental geometry", duration_ok && freq_ok,
               fmt("T=%.2fns (382 +- 0.1%%), conv. %.2f/%.2f (15.3/22.3)", t_ns, f3, f5));
    }

    // --- 5. pi-pulse profile ------------------------------------------------
    bool crit5 = false;
    {
        const SubpulseTrain tp = digitize(pi_pulse(M_PI / kT), 15);
        const RobustnessProfile p = scan(tp, default_alpha_grid(), {.protocol_tag = "pi"});
        double worst = 0.0;
        for (std::size_t i = 0; i < p.alphas.size(); ++i) {
            const double expect = std::pow(std::cos(M_PI * p.alphas[i] / 2.0), 2);
            worst = std::max(worst, std::fabs(p.probabilities[i] - expect));
        }
        const ScalingFit fit = fit_order(p, 0.01, 0.15);
        crit5 = worst < 1e-10 && std::fabs(fit.exponent - 2.0) <= 0.05;
        report(5, "pi-pulse analytic profile", crit5,
               fmt("max|P-cos^2|=%.1e (<1e-10), exponent=%.3f (2.00 +- 0.05)", worst,
                   fit.exponent));
    }

    // --- 6. Robustness ordering, runtime < 10 s -----------------------------
    bool crit6 = false;
    {
        const auto t0 = std::chrono::steady_clock::now();
        // Oracle configuration: N=61, tau = 8 sigma keeps the digitization
        // floors (3.5e-7 / 6.5e-8 at alpha=0) three decades under the
        // physical infidelities on the fit window.  The pointwise check
        // carries a 1e-6 additive allowance for those floors (the digital
        // pi-pulse is exact at alpha=0, so a strict inequality there would
        // compare two numerical zeros).
        const std::vector<double> grid = default_alpha_grid();
        const RobustnessProfile pp =
            scan(digitize(pi_pulse(M_PI / kT), 61, 8.0), grid, {.protocol_tag = "pi"});
        const RobustnessProfile p3 =
            scan(digitize(c3, 61, 8.0), grid, {.protocol_tag = "drio3"});
        const RobustnessProfile p5 =
            scan(digitize(c5, 61, 8.0), grid, {.protocol_tag = "drio5"});
        bool pointwise = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::fabs(grid[i]) > 0.1501) continue;
            const double ip = 1.0 - pp.probabilities[i];
            const double i3 = 1.0 - p3.probabilities[i];
            const double i5 = 1.0 - p5.probabilities[i];
            if (i5 > i3 + 1e-6 || i3 > ip + 1e-6) pointwise = false;
        }
        const double ep = fit_order(pp, 0.03, 0.15).exponent;
        const double e3 = fit_order(p3, 0.03, 0.15).exponent;
        const double e5 = fit_order(p5, 0.03, 0.15).exponent;
        // Frozen oracle targets (N=61, window [0.03, 0.15]), 10% tolerance.
        const bool targets = std::fabs(ep - 1.989) / 1.989 < 0.10 &&
                             std::fabs(e3 - 4.227) / 4.227 < 0.10 &&
                             std::fabs(e5 - 5.801) / 5.801 < 0.10;
        const double dt = seconds_since(t0);
        crit6 = pointwise && ep < e3 && e3 < e5 && targets && dt < 10.0;
        report(6, "robustness ordering", crit6,
               fmt("pointwise=%s, exponents %.2f/%.2f/%.2f (1.99/4.23/5.80 +- 10%%), %.1fs",
                   pointwise ? "yes" : "NO", ep, e3, e5, dt));
    }

    // --- 7. Model equivalence, runtime < 30 s --------------------------------
    bool crit7 = false;
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> errs;
        for (double r : {4.0, 6.0, 8.0, 12.0}) {
            const SubpulseTrain t = digitize(c3, 15, r);
            const double pd = propagate_delta_train(t).final_pop2();
            const double pf = propagate_full(t, QubitState::ground(), 1e-12).final_pop2();
            errs.push_back(std::fabs(pd - pf));
        }
        // Monotone decrease with a 1e-11 additive slack for the integrator
        // floor (the r=8 and r=12 errors are both at ~1e-11..1e-13).
        bool monotone = true;
        for (std::size_t i = 1; i < errs.size(); ++i) {
            if (errs[i] > errs[i - 1] + 1e-11) monotone = false;
        }
        const double dt = seconds_since(t0);
        crit7 = errs[1] <= 1e-3 && monotone && dt < 30.0;
        report(7, "delta vs full-Gaussian ODE", crit7,
               fmt("|dP|={%.1e,%.1e,%.1e,%.1e} @ r=4/6/8/12, monotone=%s, %.1fs", errs[0],
                   errs[1], errs[2], errs[3], monotone ? "yes" : "NO", dt));
    }

    // --- 8. Second-RWA study -------------------------------------------------
    bool crit8 = false;
    {
        const SubpulseTrain t3 = digitize(c3, 15);
        const double k0 =
            propagate_modes(t3, ModeTruncation::for_train(t3, 0), QubitState::ground(), 1e-11)
                .final_pop2();
        const double pe =
            propagate_effective(effective_control(t3), QubitState::ground(), 1e-11)
                .final_pop2();
        const bool weak_ok = std::fabs(k0 - pe) < 1e-8;
        // Strong train: DRIO3 phases kept, areas scaled to A_n = 2.2*pi.
        // (Exactly 2*pi is degenerate: every kick is a full rotation in
        // both models, so the truncation error cancels in the populations.)
        SubpulseTrain strong = t3;
        const double scale = 2.2 * M_PI / t3.area(0);
        for (Subpulse& p : strong.pulses) p.omega *= scale;
        const double s0 =
            propagate_modes(strong, ModeTruncation::for_train(strong, 0),
                            QubitState::ground(), 1e-10)
                .final_pop2();
        const double s20 =
            propagate_modes(strong, ModeTruncation::for_train(strong, 20),
                            QubitState::ground(), 1e-10)
                .final_pop2();
        const double disc = std::fabs(s0 - s20);
        crit8 = weak_ok && disc > 0.05;
        report(8, "second-RWA breakdown", crit8,
               fmt("|k0-eff|=%.1e (<1e-8), strong-train |k0-k20|=%.3f (>0.05)",
                   std::fabs(k0 - pe), disc));
    }

    // --- 9. Optimizer durations, runtime < 10 min -----------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string detail;

        DetuningAnsatz fourier;
        fourier.family = DetuningAnsatz::Family::fourier_odd;
        fourier.dimension = 8;
        OptimizerOptions opt;
        opt.starts = 8;

        const OptimizeResult r3 = optimize(3, 1.0, fourier, opt);
        bool ok3 = r3.report.feasible &&
                   std::fabs(r3.report.t_times_omega_over_pi - 1.86) / 1.86 < 0.02;
        for (double v : r3.report.residuals) ok3 = ok3 && v < 1e-4;

        const OptimizeResult r5 = optimize(5, 1.0, fourier, opt);
        bool ok5 = r5.report.feasible &&
                   std::fabs(r5.report.t_times_omega_over_pi - 2.71) / 2.71 < 0.02;
        for (double v : r5.report.residuals) ok5 = ok5 && v < 1e-4;

        const double dt = seconds_since(t0);
        ok = ok3 && ok5 && dt < 600.0;
        report(9, "optimizer durations", ok,
               fmt("T3=%.4fpi (1.86 +- 2%%, ok=%d), T5=%.4fpi (2.71 +- 2%%, ok=%d), %.0fs (<600s)",
                   r3.report.t_times_omega_over_pi, ok3 ? 1 : 0,
                   r5.report.t_times_omega_over_pi, ok5 ? 1 : 0, dt));
    }

    // --- 10. Elliptic functions ------------------------------------------------
    {
        double worst_identity = 0.0;
        double worst_circ = 0.0;
        for (double u = -6.0; u <= 6.0; u += 0.173) {
            const JacobiValues v = jacobi_elliptic(u, 0.235);
            worst_identity =
                std::max(worst_identity, std::fabs(v.sn * v.sn + v.cn * v.cn - 1.0));
            worst_circ = std::max(worst_circ, std::fabs(jacobi_cn(u, 0.0) - std::cos(u)));
        }
        const double dk = std::fabs(complete_k(0.235) - quadrature_k(0.235));
        const bool ok = worst_identity < 1e-10 && worst_circ < 1e-10 && dk < 1e-10;
        report(10, "elliptic function identities", ok,
               fmt("|sn^2+cn^2-1|=%.1e, |cn(u,0)-cos|=%.1e, |K-quad|=%.1e (<1e-10)",
                   worst_identity, worst_circ, dk));
    }

    // --- 11. Desk-scale substitute for the hardware curves ----------------------
    {
        const SubpulseTrain t3 = digitize(c3, 15);
        const ScheduleDocument doc = export_schedule(t3);
        const SubpulseTrain back = parse_schedule(schedule_from_json(schedule_to_json(doc)));
        const double dp = std::fabs(propagate_delta_train(t3).final_pop2() -
                                    propagate_delta_train(back).final_pop2());
        const bool ok = crit5 && crit6 && crit7 && crit8 && dp <= 1e-4;
        report(11, "hardware-substitute bundle", ok,
               fmt("criteria 5-8 %s, schedule round-trip |dP|=%.1e (<=1e-4)",
                   crit5 && crit6 && crit7 && crit8 ? "pass" : "FAIL", dp));
    }

    if (g_failures == 0) {
        std::printf("ACCEPTANCE: all 11 criteria passed\n");
        return 0;
    }
    std::printf("ACCEPTANCE: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
