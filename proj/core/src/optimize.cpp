#include "drio/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>
#include <stdexcept>

#include "drio/control.hpp"
#include "drio/elliptic.hpp"
#include "drio/propagate.hpp"

namespace drio {

namespace {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------
// Fast fixed-step RK4 propagation used only inside the optimizer.  The
// detuning is precomputed on the step grid (including midpoints) once per
// coefficient vector and reused across the whole alpha stencil, which keeps
// the objective smooth in the coefficients.
// ---------------------------------------------------------------------

int step_count(double duration) { return std::max(1200, static_cast<int>(200.0 * duration)); }

/// Final state amplitude c1 (and populations) for H = 1/2 [[-D, W],[W, D]]
/// with W = 1 + alpha, from |1>.
std::array<Complex, 2> propagate_grid(const std::vector<double>& detuning_grid,
                                      double duration, double alpha)
{
    const int n = (static_cast<int>(detuning_grid.size()) - 1) / 2;
    const double h = duration / n;
    const double w = 1.0 + alpha;
    Complex c1{1.0, 0.0};
    Complex c2{0.0, 0.0};
    const Complex mihalf{0.0, -0.5};
    auto rhs = [&](double d, Complex a, Complex b, Complex& da, Complex& db) {
        da = mihalf * (-d * a + w * b);
        db = mihalf * (w * a + d * b);
    };
    for (int j = 0; j < n; ++j) {
        const double d0 = detuning_grid[2 * j];
        const double dm = detuning_grid[2 * j + 1];
        const double d1 = detuning_grid[2 * j + 2];
        Complex k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs(d0, c1, c2, k1a, k1b);
        rhs(dm, c1 + 0.5 * h * k1a, c2 + 0.5 * h * k1b, k2a, k2b);
        rhs(dm, c1 + 0.5 * h * k2a, c2 + 0.5 * h * k2b, k3a, k3b);
        rhs(d1, c1 + h * k3a, c2 + h * k3b, k4a, k4b);
        c1 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        c2 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }
    return {c1, c2};
}

// The robustness-order constraints act on the complex wrong-state
// amplitude c1(alpha): c1(0) = c1'(0) = 0 gives infidelity O(alpha^4)
// (order 3), adding c1''(0) = 0 gives O(alpha^6) (order 5).  Working at
// the amplitude level keeps the residuals complex-linear in the error, so
// least squares stays well conditioned near the solution (the infidelity
// derivatives themselves are squares and have vanishing gradients there).
/// Wrong-state amplitudes on the stencil alpha = j*0.02, j = -4..4.
std::array<Complex, 9> stencil_amplitudes(const std::vector<double>& detuning_grid,
                                          double duration)
{
    std::array<Complex, 9> amps{};
    for (int j = -4; j <= 4; ++j) {
        amps[static_cast<std::size_t>(j + 4)] = propagate_grid(detuning_grid, duration, j * 0.02)[0];
    }
    return amps;
}

/// Infidelity derivatives d^k(1-P)/dalpha^k at alpha = 0 from amplitudes of
/// the wrong state on the grid alpha = j*0.02, j = -4..4, via the Leibniz
/// rule for I = |c1|^2.  Differencing the probability directly cannot
/// resolve k >= 4 below the alpha^6-tail truncation floor; the amplitude
/// derivatives are low order and well conditioned.
/// Derivatives d^m c1/dalpha^m at alpha = 0, m = 0..5, from the 9-point
/// stencil (wide = full span, h^8/h^6/h^4 accuracy) or its inner 7 points
/// (h^6/h^4/h^2), used as an independent consistency check.
std::array<Complex, 6> amplitude_derivatives(const std::array<Complex, 9>& a, bool wide)
{
    constexpr double kH = 0.02;
    auto at = [&](int j) { return a[static_cast<std::size_t>(j + 4)]; };

    // Maximal-order central-difference weights on the 9-point stencil
    // (accuracy h^8 for d1/d2, h^6 for d3/d4, h^4 for d5) and on the inner
    // 7-point stencil (h^6/h^4/h^2).  The high order matters: the Leibniz
    // products below multiply small derivative estimates by large genuine
    // ones (|d3| can be O(10)), so truncation error in d1/d2 at h^4 order
    // would put a floor of ~1e-3 on the k = 4, 5 residuals even at exact
    // solutions.
    static constexpr double kW9[5][9] = {
        {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105,
         -1.0 / 280},
        {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315,
         -1.0 / 560},
        {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0, -61.0 / 30, 169.0 / 120,
         -3.0 / 10, 7.0 / 240},
        {7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8, -122.0 / 15, 169.0 / 60,
         -2.0 / 5, 7.0 / 240},
        {1.0 / 6, -3.0 / 2, 13.0 / 3, -29.0 / 6, 0.0, 29.0 / 6, -13.0 / 3, 3.0 / 2,
         -1.0 / 6}};
    static constexpr double kW7[5][7] = {
        {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
        {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90},
        {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8},
        {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6},
        {-1.0 / 2, 2.0, -5.0 / 2, 0.0, 5.0 / 2, -2.0, 1.0 / 2}};

    std::array<Complex, 6> d{};
    d[0] = at(0);
    double hm = 1.0;
    for (int m = 1; m <= 5; ++m) {
        hm *= kH;
        Complex sum = 0.0;
        if (wide) {
            for (int j = -4; j <= 4; ++j) sum += kW9[m - 1][j + 4] * at(j);
        } else {
            for (int j = -3; j <= 3; ++j) sum += kW7[m - 1][j + 3] * at(j);
        }
        d[static_cast<std::size_t>(m)] = sum / hm;
    }
    return d;
}

ConstraintResiduals residuals_from_amplitudes(const std::array<Complex, 9>& a, int order)
{
    auto leibniz = [](const std::array<Complex, 6>& d, int k) {
        auto re = [](Complex z) { return z.real(); };
        switch (k) {
        case 1: return 2.0 * re(d[1] * std::conj(d[0]));
        case 2: return 2.0 * std::norm(d[1]) + 2.0 * re(d[2] * std::conj(d[0]));
        case 3: return 6.0 * re(d[2] * std::conj(d[1])) + 2.0 * re(d[3] * std::conj(d[0]));
        case 4:
            return 6.0 * std::norm(d[2]) + 8.0 * re(d[3] * std::conj(d[1])) +
                   2.0 * re(d[4] * std::conj(d[0]));
        default:
            return 20.0 * re(d[3] * std::conj(d[2])) + 10.0 * re(d[4] * std::conj(d[1])) +
                   2.0 * re(d[5] * std::conj(d[0]));
        }
    };

    const auto wide = amplitude_derivatives(a, true);
    const auto inner = amplitude_derivatives(a, false);
    ConstraintResiduals out;
    for (int k = 1; k <= order; ++k) {
        const double v = leibniz(wide, k);
        const double check = leibniz(inner, k);
        out.values.push_back(std::fabs(v));
        // If the independent lower-order stencil disagrees at the 50% level
        // the value sits at the finite-difference floor, not above it.
        out.floor_limited.push_back(std::fabs(v - check) > 0.5 * std::fabs(v) + 1e-9);
    }
    return out;
}

std::vector<double> detuning_on_grid(const DetuningAnsatz& ansatz,
                                     const std::vector<double>& coeffs, double duration,
                                     int n_steps)
{
    std::vector<double> grid(static_cast<std::size_t>(2 * n_steps) + 1);
    for (int i = 0; i <= 2 * n_steps; ++i) {
        const double t = duration * static_cast<double>(i) / (2.0 * n_steps);
        grid[static_cast<std::size_t>(i)] = ansatz.evaluate(coeffs, t, duration);
    }
    return grid;
}

/// Residual vector of the feasibility problem (Omega = 1): transfer
/// amplitude, its alpha-derivatives up to the target order, a soft cap
/// penalty and a small coefficient regularization.  With free_duration the
/// last entry of the parameter vector is the duration itself; the
/// low-dimensional elliptic family only admits solutions at isolated
/// durations, so T must be part of the nonlinear solve there.
struct FeasibilityProblem {
    const DetuningAnsatz* ansatz;
    double duration;
    int order;
    double regularization = 3e-4;
    bool free_duration = false;
    // Weight multiplier on the derivative residuals; the polish stage
    // raises it so the Leibniz cross terms 20*Re(d3 conj(d2)) etc. clear
    // the acceptance tolerance instead of stalling on the regularization
    // floor of the objective.
    double derivative_boost = 1.0;

    double local_duration(const std::vector<double>& x) const
    {
        if (!free_duration) return duration;
        return std::clamp(x.back(), 0.5 * M_PI, 4.0 * M_PI);
    }

    std::vector<double> shape(const std::vector<double>& x) const
    {
        if (!free_duration) return x;
        return std::vector<double>(x.begin(), x.end() - 1);
    }

    std::vector<double> residuals(const std::vector<double>& x) const
    {
        const double dur = local_duration(x);
        const std::vector<double> coeffs = shape(x);
        const int n = step_count(dur);
        const auto grid = detuning_on_grid(*ansatz, coeffs, dur, n);
        const auto amps = stencil_amplitudes(grid, dur);
        const auto d = amplitude_derivatives(amps, true);

        std::vector<double> r;
        r.reserve(coeffs.size() + 7);
        r.push_back(d[0].real() * 1e3);
        r.push_back(d[0].imag() * 1e3);
        r.push_back(d[1].real() * 1e2 * derivative_boost);
        r.push_back(d[1].imag() * 1e2 * derivative_boost);
        if (order >= 5) {
            r.push_back(d[2].real() * 1e1 * derivative_boost);
            r.push_back(d[2].imag() * 1e1 * derivative_boost);
        }

        // Quadratic hinge on the amplitude cap, C^1 in the coefficients so
        // the finite-difference Jacobian stays meaningful at the boundary.
        double cap_excess_sq = 0.0;
        for (double v : grid) {
            const double excess = std::fabs(v) - ansatz->delta_cap;
            if (excess > 0.0) cap_excess_sq += excess * excess;
        }
        r.push_back(30.0 * cap_excess_sq / static_cast<double>(grid.size()));
        for (double c : coeffs) r.push_back(regularization * c);
        return r;
    }

    double objective(const std::vector<double>& coeffs) const
    {
        double sum = 0.0;
        for (double v : residuals(coeffs)) sum += v * v;
        return sum;
    }

    /// Accepts a point only if the infidelity derivatives k = 1..order,
    /// computed exactly as constraint_residuals does (but with the internal
    /// fixed-step propagator), clear half the residual tolerance.
    bool feasible(const std::vector<double>& x, const OptimizerOptions& opt,
                  double* infidelity = nullptr) const
    {
        const double dur = local_duration(x);
        const std::vector<double> coeffs = shape(x);
        const int n = step_count(dur);
        const auto grid = detuning_on_grid(*ansatz, coeffs, dur, n);
        for (double v : grid) {
            if (!std::isfinite(v) || std::fabs(v) > ansatz->delta_cap) return false;
        }
        const auto amps = stencil_amplitudes(grid, dur);
        const double infid = std::norm(amps[4]);
        if (infidelity != nullptr) *infidelity = infid;
        // Explicit finiteness guard: a diverged iterate yields NaN amplitudes
        // and NaN comparisons would otherwise slip through the thresholds.
        if (!std::isfinite(infid) || infid > opt.transfer_tol) return false;
        const ConstraintResiduals res = residuals_from_amplitudes(amps, order);
        for (double v : res.values) {
            if (!std::isfinite(v) || v > 0.5 * opt.residual_tol) return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------
// Local solver: trust-region Levenberg-Marquardt on the residual vector.
// ---------------------------------------------------------------------

int gsl_residual_adapter(const gsl_vector* x, void* params, gsl_vector* out)
{
    const auto* problem = static_cast<const FeasibilityProblem*>(params);
    std::vector<double> coeffs(x->size);
    for (std::size_t j = 0; j < x->size; ++j) coeffs[j] = gsl_vector_get(x, j);
    const std::vector<double> r = problem->residuals(coeffs);
    for (std::size_t i = 0; i < r.size(); ++i) gsl_vector_set(out, i, r[i]);
    return GSL_SUCCESS;
}

/// Trust-region Levenberg-Marquardt polish (GSL multifit_nlinear with a
/// finite-difference Jacobian).  A plain Marquardt damping loop stalls in
/// the narrow residual valleys of the fifth-order problem; the scaled
/// trust-region subproblem does not.
std::vector<double> levenberg_marquardt(const FeasibilityProblem& problem,
                                        std::vector<double> x, int max_iter)
{
    const std::size_t n = x.size();
    const std::size_t m = problem.residuals(x).size();

    gsl_multifit_nlinear_fdf fdf{};
    fdf.f = &gsl_residual_adapter;
    fdf.df = nullptr;   // forward-difference Jacobian
    fdf.fvv = nullptr;
    fdf.n = m;
    fdf.p = n;
    fdf.params = const_cast<FeasibilityProblem*>(&problem);

    gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
    params.trs = gsl_multifit_nlinear_trs_lm;
    params.h_df = 1e-7;

    gsl_multifit_nlinear_workspace* w =
        gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, m, n);
    if (w == nullptr) throw std::runtime_error("optimizer workspace allocation failed");

    gsl_vector_const_view x0 = gsl_vector_const_view_array(x.data(), n);
    gsl_multifit_nlinear_init(&x0.vector, &fdf, w);
    int info = 0;
    gsl_multifit_nlinear_driver(static_cast<std::size_t>(max_iter), 1e-14, 1e-14, 0.0,
                                nullptr, nullptr, &info, w);
    const gsl_vector* xf = gsl_multifit_nlinear_position(w);
    for (std::size_t j = 0; j < n; ++j) x[j] = gsl_vector_get(xf, j);
    gsl_multifit_nlinear_free(w);
    return x;
}

/// Second LM stage from a near-converged point: negligible regularization
/// and boosted derivative weights drive |d1|, |d2| a further ~2-3 decades
/// down, which the feasibility gate needs because the k = 4, 5 infidelity
/// derivatives scale as |d3||d1| and |d3||d2| with |d3| = O(10).
std::vector<double> polish(const FeasibilityProblem& problem, std::vector<double> x)
{
    FeasibilityProblem refined = problem;
    refined.regularization = 1e-8;
    refined.derivative_boost = 100.0;
    return levenberg_marquardt(refined, std::move(x), 200);
}

struct SolveOutcome {
    std::vector<double> coefficients;
    double objective = std::numeric_limits<double>::infinity();
    bool feasible = false;
    int seeds_tried = 0;
};

SolveOutcome feasibility_solve(const FeasibilityProblem& problem,
                               const OptimizerOptions& options,
                               const std::vector<std::vector<double>>& warm_starts,
                               std::mt19937& rng)
{
    const int dim = problem.ansatz->coefficient_count();
    SolveOutcome best;

    std::vector<std::vector<double>> starts = warm_starts;
    std::uniform_real_distribution<double> uni(-1.2, 1.2);
    while (static_cast<int>(starts.size()) < options.starts) {
        std::vector<double> s(static_cast<std::size_t>(dim));
        if (problem.ansatz->family == DetuningAnsatz::Family::elliptic_cn) {
            // (m, omega/Omega, Delta0/Omega) in physically sensible ranges.
            s[0] = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
            s[1] = std::uniform_real_distribution<double>(0.8, 1.5)(rng);
            s[2] = std::uniform_real_distribution<double>(0.7, 1.5)(rng);
        } else {
            for (double& v : s) v = uni(rng);
        }
        starts.push_back(std::move(s));
    }

    for (const std::vector<double>& start : starts) {
        ++best.seeds_tried;
        std::vector<double> x = levenberg_marquardt(problem, start, 400);
        if (problem.objective(x) < 1e-4) x = polish(problem, x);
        const double f = problem.objective(x);
        const bool ok = problem.feasible(x, options);
        // Prefer feasible points, then lower objective.
        if ((ok && !best.feasible) || (ok == best.feasible && f < best.objective)) {
            best.coefficients = std::move(x);
            best.objective = f;
            best.feasible = ok;
        }
        if (best.feasible && best.objective < 1e-10) break;  // converged well
    }
    return best;
}

ContinuousControl make_control(const DetuningAnsatz& ansatz, std::vector<double> coeffs,
                               double duration, double rabi_amplitude)
{
    ContinuousControl c;
    c.duration = duration / rabi_amplitude;  // dimensionless solve used Omega = 1
    const double scale = rabi_amplitude;
    DetuningAnsatz a = ansatz;
    const double dimensionless_duration = duration;
    c.rabi = [rabi_amplitude](double) { return rabi_amplitude; };
    c.envelope = [](double) { return 1.0; };
    c.detuning = [a, coeffs, scale, dimensionless_duration](double t) {
        return scale * a.evaluate(coeffs, t * scale, dimensionless_duration);
    };
    return phase_from_detuning(c);
}

} // namespace

double DetuningAnsatz::evaluate(const std::vector<double>& coeffs, double t,
                                double duration) const
{
    if (family == Family::elliptic_cn) {
        if (coeffs.size() != 3) {
            throw std::invalid_argument("elliptic_cn ansatz needs coefficients (m, omega, delta0)");
        }
        const double m = std::clamp(coeffs[0], 0.0, 0.999);
        return coeffs[2] * jacobi_cn(coeffs[1] * t + complete_k(m), m);
    }
    const double s = (t - 0.5 * duration) / duration;
    double d = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        d += coeffs[j] * std::sin(2.0 * M_PI * static_cast<double>(j + 1) * s);
    }
    return d;
}

OptimizeResult optimize_fixed_duration(int order, double rabi_amplitude, double duration,
                                       const DetuningAnsatz& ansatz,
                                       const OptimizerOptions& options)
{
    if (order != 3 && order != 5) {
        throw std::invalid_argument("optimize: order must be 3 or 5");
    }
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("optimize: rabi_amplitude must be > 0");
    }
    if (ansatz.coefficient_count() < order - 1) {
        throw std::invalid_argument("optimize: ansatz dimension too small for the order");
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(options.seed);

    FeasibilityProblem problem{&ansatz, duration * rabi_amplitude, order};
    SolveOutcome outcome = feasibility_solve(problem, options, {}, rng);

    OptimizeResult result;
    result.coefficients = outcome.coefficients;
    result.duration = duration;
    result.control = make_control(ansatz, outcome.coefficients, duration * rabi_amplitude,
                                  rabi_amplitude);
    result.report.t_times_omega_over_pi = duration * rabi_amplitude / M_PI;
    result.report.seeds_tried = outcome.seeds_tried;
    result.report.feasible = outcome.feasible;
    problem.feasible(outcome.coefficients, options, &result.report.transfer_infidelity);
    result.report.residuals = constraint_residuals(result.control, order).values;
    result.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

OptimizeResult optimize(int order, double rabi_amplitude, const DetuningAnsatz& ansatz,
                        const OptimizerOptions& options)
{
    if (order != 3 && order != 5) {
        throw std::invalid_argument("optimize: order must be 3 or 5");
    }
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("optimize: rabi_amplitude must be > 0");
    }
    if (ansatz.coefficient_count() < order - 1) {
        throw std::invalid_argument("optimize: ansatz dimension too small for the order");
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(options.seed);

    // Dimensionless bisection on T (Omega = 1): feasibility is monotone in T,
    // the optimum is the smallest feasible duration.
    double lo = (options.duration_lo_over_pi > 0.0 ? options.duration_lo_over_pi
                                                   : (order == 3 ? 1.2 : 2.0)) * M_PI;
    double hi = (options.duration_hi_over_pi > 0.0 ? options.duration_hi_over_pi
                                                   : (order == 3 ? 2.6 : 3.4)) * M_PI;

    int seeds_total = 0;
    std::vector<std::vector<double>> warm;
    SolveOutcome best_feasible;
    double best_duration = hi;

    if (ansatz.family == DetuningAnsatz::Family::elliptic_cn) {
        // The three-parameter elliptic family satisfies the four (or six)
        // real constraints only at isolated durations, so feasibility is not
        // monotone in T and bisection does not apply.  Solve with T as a
        // fourth unknown from many starts and keep the shortest feasible
        // duration.
        FeasibilityProblem problem{&ansatz, 0.0, order, 3e-4, true};
        std::uniform_real_distribution<double> um(0.05, 0.6);
        std::uniform_real_distribution<double> uw(0.8, 1.5);
        std::uniform_real_distribution<double> ud(0.7, 1.5);
        std::uniform_real_distribution<double> ut(lo, hi);
        OptimizeResult result;
        result.report.feasible = false;
        double best_t = hi + 1.0;
        std::vector<double> best_x;
        for (int s = 0; s < options.starts; ++s) {
            ++seeds_total;
            std::vector<double> x = {um(rng), uw(rng), ud(rng), ut(rng)};
            x = levenberg_marquardt(problem, std::move(x), 400);
            if (problem.objective(x) < 1e-4) x = polish(problem, x);
            double infid = 0.0;
            if (problem.feasible(x, options, &infid) && problem.local_duration(x) < best_t) {
                best_t = problem.local_duration(x);
                best_x = x;
                result.report.feasible = true;
                result.report.transfer_infidelity = infid;
            }
        }
        if (!result.report.feasible) {
            throw std::runtime_error("optimize: no feasible elliptic-family point found");
        }
        result.coefficients = problem.shape(best_x);
        result.duration = best_t / rabi_amplitude;
        result.control = make_control(ansatz, result.coefficients, best_t, rabi_amplitude);
        result.report.t_times_omega_over_pi = best_t / M_PI;
        result.report.seeds_tried = seeds_total;
        result.report.residuals = constraint_residuals(result.control, order).values;
        result.report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return result;
    }

    auto try_duration = [&](double t, const std::vector<std::vector<double>>& starts) {
        FeasibilityProblem problem{&ansatz, t, order};
        OptimizerOptions opt = options;
        SolveOutcome out = feasibility_solve(problem, opt, starts, rng);
        seeds_total += out.seeds_tried;
        return out;
    };

    // The fifth-order feasible set is a narrow valley that pure random
    // multi-start rarely hits at durations near the optimum; seed every
    // inner solve with the known fifth-order sine coefficients (resized to
    // the ansatz dimension) as one deterministic start alongside the warm
    // start carried down from the previous feasible duration.
    std::vector<std::vector<double>> preset_starts;
    if (order == 5 && ansatz.family == DetuningAnsatz::Family::fourier_odd) {
        std::vector<double> preset = fifth_order_sine_coefficients();
        preset.resize(static_cast<std::size_t>(ansatz.coefficient_count()), 0.0);
        preset_starts.push_back(std::move(preset));
    }

    SolveOutcome at_hi = try_duration(hi, preset_starts);
    if (!at_hi.feasible) {
        throw std::runtime_error("optimize: no feasible point at the upper duration bracket");
    }
    best_feasible = at_hi;
    warm = {at_hi.coefficients};

    while (hi - lo > options.bisection_rel_tol * M_PI) {
        const double mid = 0.5 * (lo + hi);
        // Warm start plus a reduced number of fresh starts speeds up the
        // inner solves without giving up the multi-start escape hatch.
        OptimizerOptions inner = options;
        inner.starts = std::max(4, options.starts / 4);
        FeasibilityProblem problem{&ansatz, mid, order};
        std::vector<std::vector<double>> starts = warm;
        starts.insert(starts.end(), preset_starts.begin(), preset_starts.end());
        SolveOutcome out = feasibility_solve(problem, inner, starts, rng);
        seeds_total += out.seeds_tried;
        if (out.feasible) {
            hi = mid;
            best_feasible = out;
            best_duration = mid;
            warm = {out.coefficients};
        } else {
            lo = mid;
        }
    }

    OptimizeResult result;
    result.coefficients = best_feasible.coefficients;
    result.duration = best_duration / rabi_amplitude;
    result.control =
        make_control(ansatz, best_feasible.coefficients, best_duration, rabi_amplitude);
    result.report.t_times_omega_over_pi = best_duration / M_PI;
    result.report.seeds_tried = seeds_total;
    result.report.feasible = best_feasible.feasible;
    FeasibilityProblem final_problem{&ansatz, best_duration, order};
    final_problem.feasible(best_feasible.coefficients, options,
                           &result.report.transfer_infidelity);
    result.report.residuals = constraint_residuals(result.control, order).values;
    result.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ConstraintResiduals constraint_residuals(const ContinuousControl& control, int order)
{
    if (order < 1 || order > 5) {
        throw std::invalid_argument("constraint_residuals: order must be in 1..5");
    }

    auto amplitude = [&control](double alpha) {
        ContinuousControl scaled = control;
        auto rabi = control.rabi;
        scaled.rabi = [rabi, alpha](double t) { return (1.0 + alpha) * rabi(t); };
        return propagate_effective(scaled, QubitState::ground(), 1e-12).final_state().c1;
    };

    std::array<Complex, 9> a;  // alpha = j*0.02 for j in -4..4
    for (int j = -4; j <= 4; ++j) a[static_cast<std::size_t>(j + 4)] = amplitude(j * 0.02);
    return residuals_from_amplitudes(a, order);
}

} // namespace drio
