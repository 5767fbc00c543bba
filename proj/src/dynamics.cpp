#include "iob/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

namespace iob {

namespace odeint = boost::numeric::odeint;

BlochState bloch_state_from(double w, complex rho12)
{
    return {2.0 * rho12.real(), 2.0 * rho12.imag(), w};
}

BlochState bloch_rhs(const BlochState& s, const MediumParams& p, Mechanism m,
                     double omega_now)
{
    const complex i(0.0, 1.0);
    const complex rho12 = coherence_of(s);
    const complex omega_eff = omega_now + zeta_lorentz_part(p, m) * rho12;
    const double delta_eff = p.delta - zeta_detuning_part(p, m) * s.w;

    const complex drho12 = (i * delta_eff - 0.5 * p.gamma) * rho12 - i * omega_eff * s.w;
    const complex pump = std::conj(omega_eff) * rho12 - omega_eff * std::conj(rho12);
    const double dw = p.gamma * (1.0 - s.w) + (-2.0 * i * pump).real();
    return {2.0 * drho12.real(), 2.0 * drho12.imag(), dw};
}

Jacobian jacobian(const BlochState& s, const MediumParams& p, Mechanism m,
                  double omega_now)
{
    const double zl = zeta_lorentz_part(p, m);
    const double zm = zeta_detuning_part(p, m);
    const double half_gamma = 0.5 * p.gamma;

    // Coherence row: d(u + iv)/dt = (i Delta_eff - G/2)(u + iv) - 2i Omega_eff W
    // with dDelta_eff/dW = -zm and dOmega_eff/d(u, v) = zl (1, i) / 2.
    const double detuning = p.delta - zm * s.w - zl * s.w;
    Jacobian j{};
    j[0] = {-half_gamma, -detuning, (zm + zl) * s.v};
    j[1] = {detuning, -half_gamma, -(zm + zl) * s.u - 2.0 * omega_now};
    // Inversion row: the zl|rho12|^2 pieces of the pump cancel, leaving 2 Omega v.
    j[2] = {0.0, 2.0 * omega_now, -p.gamma};
    return j;
}

std::array<double, 3> jacobian_real_parts(const Jacobian& j)
{
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = j[r][c];
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(a, false);
    std::array<double, 3> re{};
    for (int k = 0; k < 3; ++k) re[k] = solver.eigenvalues()[k].real();
    std::sort(re.begin(), re.end(), std::greater<>());
    return re;
}

Trajectory integrate(const BlochState& s0, const MediumParams& p, Mechanism m,
                     const Drive& drive, double t_end, const IntegrateOptions& opts)
{
    check_consistent(p, m);
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::invalid_argument, "t_end must be positive");
    }
    const auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-3; };
    if (!tol_ok(opts.rel_tol) || !tol_ok(opts.abs_tol)) {
        throw Error(ErrorCode::invalid_argument, "tolerances must lie in (0, 1e-3]");
    }

    std::vector<double> times = opts.sample_times;
    if (times.empty()) {
        constexpr int n = 1000;
        for (int k = 0; k <= n; ++k) times.push_back(t_end * k / n);
    }
    if (times.front() != 0.0) times.insert(times.begin(), 0.0);
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1]) || times[k] > t_end) {
            throw Error(ErrorCode::invalid_argument,
                        "sample times must increase strictly within [0, t_end]");
        }
    }

    using state_type = std::array<double, 3>;
    double last_t = 0.0;
    const auto system = [&](const state_type& x, state_type& dx, double t) {
        last_t = t;
        const BlochState d = bloch_rhs({x[0], x[1], x[2]}, p, m, drive(t));
        dx = {d.u, d.v, d.w};
    };

    Trajectory traj;
    traj.times.reserve(times.size());
    traj.states.reserve(times.size());
    traj.drive.reserve(times.size());
    const auto observer = [&](const state_type& x, double t) {
        traj.times.push_back(t);
        traj.states.push_back({x[0], x[1], x[2]});
        traj.drive.push_back(drive(t));
    };

    state_type x{s0.u, s0.v, s0.w};
    auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol,
                                             odeint::runge_kutta_dopri5<state_type>());
    const double dt0 = std::min(1e-3 / p.gamma, times.back() / 10.0);
    try {
        odeint::integrate_times(stepper, system, x, times.begin(), times.end(), dt0,
                                observer, odeint::max_step_checker(1000000));
    } catch (const odeint::odeint_error& e) {
        throw Error(ErrorCode::step_underflow,
                    "integrator step size underflow at t = " + std::to_string(last_t) +
                        " (" + e.what() + ")");
    }
    return traj;
}

namespace {

double distance(const BlochState& a, const BlochState& b)
{
    return std::sqrt((a.u - b.u) * (a.u - b.u) + (a.v - b.v) * (a.v - b.v) +
                     (a.w - b.w) * (a.w - b.w));
}

} // namespace

SweepResult sweep_adiabatic(const MediumParams& p, Mechanism m, double omega_start,
                            double omega_end, double ramp_rate, const SweepOptions& opts)
{
    check_consistent(p, m);
    if (!(omega_start >= 0.0 && omega_end >= 0.0) || omega_start == omega_end) {
        throw Error(ErrorCode::invalid_argument, "sweep needs distinct nonnegative end drives");
    }
    if (!(ramp_rate > 0.0) || ramp_rate > 1e-3 * p.gamma * p.gamma) {
        throw Error(ErrorCode::invalid_argument, "ramp rate must lie in (0, 1e-3 gamma^2]");
    }

    const bool upward = omega_end > omega_start;
    const double span = std::abs(omega_end - omega_start);
    const double t_end = span / ramp_rate;
    const double sign = upward ? 1.0 : -1.0;
    const Drive drive = [=](double t) {
        return std::max(0.0, omega_start + sign * ramp_rate * t);
    };

    const auto states = steady_states(p.with_omega(omega_start), m);
    const SteadyStateSolution* start = nullptr;
    for (const auto& s : states) {
        if (!s.stable) continue;
        if (!start || (upward ? s.rho22 < start->rho22 : s.rho22 > start->rho22)) start = &s;
    }
    if (!start) {
        throw Error(ErrorCode::branch_absent, "no stable steady state at the sweep start");
    }

    const auto n = static_cast<std::size_t>(std::ceil(span * opts.samples_per_omega));
    IntegrateOptions io = opts.integrator;
    io.sample_times.clear();
    for (std::size_t k = 0; k <= n; ++k) io.sample_times.push_back(t_end * k / n);

    SweepResult result;
    result.trajectory = integrate(bloch_state_from(start->w, start->rho12), p, m, drive, t_end, io);
    const auto& tr = result.trajectory;

    // Jumps: runs of |dW/dOmega| above the slope threshold; report the steepest interval.
    std::vector<std::pair<double, double>> windows;
    const double jump_slope = opts.jump_slope / p.gamma;
    std::size_t k = 0;
    while (k + 1 < tr.states.size()) {
        const auto slope = [&](std::size_t i) {
            return std::abs(tr.states[i + 1].w - tr.states[i].w) /
                   std::abs(tr.drive[i + 1] - tr.drive[i]);
        };
        if (slope(k) <= jump_slope) {
            ++k;
            continue;
        }
        std::size_t steepest = k;
        const std::size_t begin = k;
        while (k + 1 < tr.states.size() && slope(k) > jump_slope) {
            if (slope(k) > slope(steepest)) steepest = k;
            ++k;
        }
        result.jumps.push_back(0.5 * (tr.drive[steepest] + tr.drive[steepest + 1]));
        windows.emplace_back(std::min(tr.drive[begin], tr.drive[k]),
                             std::max(tr.drive[begin], tr.drive[k]));
    }

    // Distance from the instantaneous stable states, away from the jump transients.
    const double margin = std::max(0.02 * span, 100.0 * ramp_rate / p.gamma);
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const double omega = tr.drive[i];
        const bool near_jump = std::any_of(windows.begin(), windows.end(), [&](const auto& w) {
            return omega > w.first - margin && omega < w.second + margin;
        });
        if (near_jump) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : steady_states(p.with_omega(omega), m)) {
            if (!s.stable && !s.marginal) continue;
            best = std::min(best, distance(tr.states[i], bloch_state_from(s.w, s.rho12)));
        }
        if (std::isfinite(best)) {
            result.max_manifold_distance = std::max(result.max_manifold_distance, best);
        }
    }
    result.non_adiabatic = result.max_manifold_distance > opts.manifold_tolerance;
    return result;
}

namespace {

double rho22_at(const Trajectory& t, double omega)
{
    // drive is monotone along a sweep
    const bool ascending = t.drive.back() > t.drive.front();
    std::size_t lo = 0;
    std::size_t hi = t.drive.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        const bool left = ascending ? t.drive[mid] <= omega : t.drive[mid] >= omega;
        (left ? lo : hi) = mid;
    }
    const double f = (omega - t.drive[lo]) / (t.drive[hi] - t.drive[lo]);
    const double w = t.states[lo].w + f * (t.states[hi].w - t.states[lo].w);
    return 0.5 * (1.0 - w);
}

} // namespace

double hysteresis_loop_area(const SweepResult& up, const SweepResult& down)
{
    const auto range = [](const Trajectory& t) {
        return std::minmax(t.drive.front(), t.drive.back());
    };
    const auto [ulo, uhi] = range(up.trajectory);
    const auto [dlo, dhi] = range(down.trajectory);
    const double lo = std::max(ulo, dlo);
    const double hi = std::min(uhi, dhi);
    if (!(hi > lo)) return 0.0;

    constexpr int n = 20000;
    const double h = (hi - lo) / n;
    double area = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double omega = lo + h * k;
        const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
        area += weight * (rho22_at(down.trajectory, omega) - rho22_at(up.trajectory, omega));
    }
    return area * h;
}

} // namespace iob
