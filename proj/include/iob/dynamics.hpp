#ifndef IOB_DYNAMICS_HPP
#define IOB_DYNAMICS_HPP

#include <array>
#include <functional>
#include <vector>

#include "iob/core.hpp"
#include "iob/steady_state.hpp"

namespace iob {

/// Coherence quadratures with rho12 = (u + i v) / 2, and inversion W.
struct BlochState
{
    double u = 0.0;
    double v = 0.0;
    double w = 1.0;

    double radius_sq() const { return u * u + v * v + w * w; }
};

using Jacobian = std::array<std::array<double, 3>, 3>;

BlochState bloch_state_from(double w, complex rho12);
inline complex coherence_of(const BlochState& s) { return {0.5 * s.u, 0.5 * s.v}; }

/**
 * Time derivative of (u, v, W) from the rotating-frame master equation with
 * the instantaneous mean-field renormalizations
 *   Omega_eff(t) = Omega + zeta_L rho12(t),  Delta_eff(t) = Delta - zeta_m W(t).
 */
BlochState bloch_rhs(const BlochState& s, const MediumParams& p, Mechanism m,
                     double omega_now);

/// Analytic Jacobian of bloch_rhs with respect to (u, v, W).
Jacobian jacobian(const BlochState& s, const MediumParams& p, Mechanism m,
                  double omega_now);

/// Real parts of the Jacobian eigenvalues, descending.
std::array<double, 3> jacobian_real_parts(const Jacobian& j);

struct Trajectory
{
    std::vector<double> times;
    std::vector<BlochState> states;
    std::vector<double> drive;
};

struct IntegrateOptions
{
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    /// Sample times for dense output; empty means 1001 uniform samples.
    std::vector<double> sample_times;
};

using Drive = std::function<double(double)>;

/**
 * Adaptive Dormand-Prince 5(4) integration from t = 0 to t_end with dense
 * output at the requested sample times. Throws Error(step_underflow) with
 * the failure time when the step controller cannot make progress.
 */
Trajectory integrate(const BlochState& s0, const MediumParams& p, Mechanism m,
                     const Drive& drive, double t_end,
                     const IntegrateOptions& opts = {});

struct SweepOptions
{
    IntegrateOptions integrator;
    /// Samples per unit of drive change; the jump locator works on these.
    double samples_per_omega = 200.0;
    /// |dW/dOmega| (in 1/gamma) above which the response counts as a jump.
    double jump_slope = 10.0;
    double manifold_tolerance = 0.05;
};

struct SweepResult
{
    Trajectory trajectory;
    std::vector<double> jumps;
    double max_manifold_distance = 0.0;
    bool non_adiabatic = false;
};

/**
 * Linear drive ramp from omega_start to omega_end at |dOmega/dt| = ramp_rate,
 * starting on the stable state that is continued by the ramp (least excited
 * for an upward ramp, most excited for a downward one). Jumps are the peaks
 * of |dW/dOmega| above the jump slope.
 */
SweepResult sweep_adiabatic(const MediumParams& p, Mechanism m, double omega_start,
                            double omega_end, double ramp_rate,
                            const SweepOptions& opts = {});

/// Area between the excitation curves rho22(Omega) of an up and a down sweep.
double hysteresis_loop_area(const SweepResult& up, const SweepResult& down);

} // namespace iob

#endif
