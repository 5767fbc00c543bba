#ifndef IOB_STEADY_STATE_HPP
#define IOB_STEADY_STATE_HPP

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iob/core.hpp"

namespace iob {

using complex = std::complex<double>;

/// c3 W^3 + c2 W^2 + c1 W + c0 = 0 for the population difference W.
struct CubicCoefficients
{
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double w) const { return ((c3 * w + c2) * w + c1) * w + c0; }
    double derivative(double w) const { return (3.0 * c3 * w + 2.0 * c2) * w + c1; }
    double scale() const;
};

CubicCoefficients cubic_coefficients(const MediumParams& p, Mechanism m);

/**
 * All real roots of a cubic (degenerate leading coefficients allowed),
 * ascending. Closed-form trigonometric/Cardano solution followed by guarded
 * Newton polishing; roots closer than 1e-8 are merged.
 */
std::vector<double> real_cubic_roots(const CubicCoefficients& c);

/// Physical roots W in (0, 1], ascending. Throws no_physical_root if none.
std::vector<double> solve_inversion(const MediumParams& p, Mechanism m);

struct EffectiveParams
{
    complex omega_eff;
    double delta_eff = 0.0;
};

/// Renormalized drive and detuning seen by an atom when the inversion is W.
EffectiveParams effective_params(double w, const MediumParams& p, Mechanism m);

/// Stationary <sigma+> of the Bloch equations at fixed W and effective drive.
complex coherence(double w, complex omega_eff, double delta_eff, double gamma);

struct StabilityVerdict
{
    bool stable = false;
    bool marginal = false;
    double max_real_part = 0.0;
};

/// Linear stability of the mean-field Bloch fixed point with inversion W.
StabilityVerdict classify_stability(double w, const MediumParams& p, Mechanism m);

struct SteadyStateSolution
{
    double w = 1.0;
    double rho22 = 0.0;
    complex rho12;
    complex omega_eff;
    double delta_eff = 0.0;
    Branch branch = Branch::lower;
    bool stable = true;
    bool marginal = false;
    double residual = 0.0;
};

/**
 * Inversion values at the two folds of the S-curve, i.e. the local extrema
 * of Omega^2 regarded as a function of W. Present only when the response
 * is bistable.
 */
struct FoldPoints
{
    double w_up;   // fold reached on the way up, larger W
    double w_down; // fold reached on the way down, smaller W
};

std::optional<FoldPoints> fold_points(const MediumParams& p, Mechanism m);

/// Solve, derive, label and classify every steady state at p.omega.
std::vector<SteadyStateSolution> steady_states(const MediumParams& p, Mechanism m);

/// Steady state on a given branch, or Error(branch_absent).
SteadyStateSolution steady_state_on_branch(const MediumParams& p, Mechanism m, Branch b);

struct Thresholds
{
    double omega_up = 0.0;
    double omega_down = 0.0;
    bool range_warning = false; // a fold sits at an end of the searched range
};

/**
 * Fold drives bounding the three-root window inside [omega_lo, omega_hi],
 * located by bisection on the root count to 1e-7 gamma. The reported
 * values are the bracket ends inside the window, so every branch exists
 * there. Returns nullopt when the response is monostable on the range.
 */
std::optional<Thresholds> find_thresholds(const MediumParams& p, Mechanism m,
                                          double omega_lo, double omega_hi);

struct ScanPoint
{
    double omega = 0.0;
    std::vector<SteadyStateSolution> solutions;
    std::optional<std::string> error;
};

struct HysteresisScan
{
    std::vector<ScanPoint> points;
    std::optional<double> omega_up;
    std::optional<double> omega_down;
    bool range_warning = false;
};

HysteresisScan scan_hysteresis(const MediumParams& p, Mechanism m,
                               std::span<const double> omega_grid);

} // namespace iob

#endif
