#include "iob/iob.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "build_info.hpp"
#include "iob/dynamics.hpp"
#include "iob/spectrum.hpp"
#include "iob/steady_state.hpp"
#include "iob/verify.hpp"

struct iob_scan
{
    iob::HysteresisScan scan;
};

struct iob_spectrum
{
    iob::SpectrumResult result;
};

struct iob_trajectory
{
    iob::SweepResult sweep;
};

struct iob_verify_report
{
    std::vector<iob::VerifyCheck> checks;
};

namespace {

thread_local std::string last_error;

iob_status status_of(iob::ErrorCode c)
{
    switch (c) {
    case iob::ErrorCode::invalid_argument:
        return IOB_ERR_INVALID_ARGUMENT;
    case iob::ErrorCode::inconsistent_mechanism:
        return IOB_ERR_INCONSISTENT_MECHANISM;
    case iob::ErrorCode::no_physical_root:
        return IOB_ERR_NO_PHYSICAL_ROOT;
    case iob::ErrorCode::singular_feedback:
    case iob::ErrorCode::singular_matrix:
        return IOB_ERR_SINGULAR;
    case iob::ErrorCode::branch_absent:
        return IOB_ERR_BRANCH_ABSENT;
    case iob::ErrorCode::step_underflow:
        return IOB_ERR_STEP_UNDERFLOW;
    }
    return IOB_ERR_INTERNAL;
}

template <class F>
iob_status guarded(F&& f)
{
    try {
        last_error.clear();
        return f();
    } catch (const iob::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        last_error = e.what();
        return IOB_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return IOB_ERR_INTERNAL;
    }
}

iob_status fail(iob_status s, const char* msg)
{
    last_error = msg;
    return s;
}

iob::MediumParams to_cpp(const iob_params& p)
{
    return {p.gamma, p.delta, p.omega, p.zeta_lorentz, p.zeta_detuning};
}

iob::Mechanism to_cpp(iob_mechanism m)
{
    switch (m) {
    case IOB_MECH_LORENTZ:
        return iob::Mechanism::lorentz;
    case IOB_MECH_DETUNING:
        return iob::Mechanism::detuning;
    case IOB_MECH_JOINT:
        return iob::Mechanism::joint;
    }
    throw iob::Error(iob::ErrorCode::invalid_argument, "unknown mechanism");
}

iob::Branch to_cpp(iob_branch b)
{
    switch (b) {
    case IOB_BRANCH_LOWER:
        return iob::Branch::lower;
    case IOB_BRANCH_MIDDLE:
        return iob::Branch::middle;
    case IOB_BRANCH_UPPER:
        return iob::Branch::upper;
    }
    throw iob::Error(iob::ErrorCode::invalid_argument, "unknown branch");
}

iob_solution to_c(const iob::SteadyStateSolution& s)
{
    iob_solution o{};
    o.w = s.w;
    o.rho22 = s.rho22;
    o.rho12_re = s.rho12.real();
    o.rho12_im = s.rho12.imag();
    o.omega_eff_re = s.omega_eff.real();
    o.omega_eff_im = s.omega_eff.imag();
    o.delta_eff = s.delta_eff;
    o.branch = static_cast<int>(s.branch);
    o.stable = s.stable ? 1 : 0;
    o.marginal = s.marginal ? 1 : 0;
    o.residual = s.residual;
    return o;
}

iob_spectrum_coefficients to_c(const iob::SpectrumCoefficients& c)
{
    return {c.a, c.a0, c.b4, c.b2, c.b0, c.nu_p_sq, c.gamma6};
}

iob::SpectrumCoefficients to_cpp(const iob_spectrum_coefficients& c)
{
    iob::SpectrumCoefficients k;
    k.a = c.a;
    k.a0 = c.a0;
    k.b4 = c.b4;
    k.b2 = c.b2;
    k.b0 = c.b0;
    k.nu_p_sq = c.nu_p_sq;
    k.gamma6 = c.gamma6;
    return k;
}

iob_status copy_solutions(const std::vector<iob::SteadyStateSolution>& sols, iob_solution* out,
                          size_t capacity, size_t* count)
{
    if (count) *count = sols.size();
    if (sols.size() > capacity) {
        return fail(IOB_ERR_BUFFER_TOO_SMALL, "solution buffer too small");
    }
    for (size_t i = 0; i < sols.size(); ++i) out[i] = to_c(sols[i]);
    return IOB_OK;
}

#define IOB_REQUIRE(cond)                                                              \
    do {                                                                               \
        if (!(cond)) return fail(IOB_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
    } while (0)

} // namespace

extern "C" {

const char* iob_version(void)
{
    return iob::build::identifier;
}

const char* iob_last_error(void)
{
    return last_error.c_str();
}

iob_params iob_default_params(void)
{
    return {1.0, 0.0, 0.0, 0.0, 0.0};
}

iob_status iob_validate_params(const iob_params* p, iob_mechanism m)
{
    IOB_REQUIRE(p);
    return guarded([&] {
        iob::check_consistent(to_cpp(*p), to_cpp(m));
        return IOB_OK;
    });
}

iob_status iob_zeta_total(const iob_params* p, iob_mechanism m, double* out)
{
    IOB_REQUIRE(p && out);
    return guarded([&] {
        *out = iob::zeta_total(to_cpp(*p), to_cpp(m));
        return IOB_OK;
    });
}

iob_status iob_cubic_coefficients(const iob_params* p, iob_mechanism m, double out[4])
{
    IOB_REQUIRE(p && out);
    return guarded([&] {
        const auto c = iob::cubic_coefficients(to_cpp(*p), to_cpp(m));
        out[0] = c.c3;
        out[1] = c.c2;
        out[2] = c.c1;
        out[3] = c.c0;
        return IOB_OK;
    });
}

iob_status iob_solve_inversion(const iob_params* p, iob_mechanism m, double* roots,
                               size_t capacity, size_t* count)
{
    IOB_REQUIRE(p && count && (roots || capacity == 0));
    return guarded([&] {
        const auto r = iob::solve_inversion(to_cpp(*p), to_cpp(m));
        *count = r.size();
        if (r.size() > capacity) return fail(IOB_ERR_BUFFER_TOO_SMALL, "root buffer too small");
        std::copy(r.begin(), r.end(), roots);
        return IOB_OK;
    });
}

iob_status iob_steady_states(const iob_params* p, iob_mechanism m, iob_solution* out,
                             size_t capacity, size_t* count)
{
    IOB_REQUIRE(p && count && (out || capacity == 0));
    return guarded([&] {
        return copy_solutions(iob::steady_states(to_cpp(*p), to_cpp(m)), out, capacity, count);
    });
}

iob_status iob_effective_params(double w, const iob_params* p, iob_mechanism m,
                                double* omega_eff_re, double* omega_eff_im, double* delta_eff)
{
    IOB_REQUIRE(p && omega_eff_re && omega_eff_im && delta_eff);
    return guarded([&] {
        const auto e = iob::effective_params(w, to_cpp(*p), to_cpp(m));
        *omega_eff_re = e.omega_eff.real();
        *omega_eff_im = e.omega_eff.imag();
        *delta_eff = e.delta_eff;
        return IOB_OK;
    });
}

iob_status iob_classify_stability(double w, const iob_params* p, iob_mechanism m, int* stable,
                                  int* marginal, double* max_real_part)
{
    IOB_REQUIRE(p && stable && marginal && max_real_part);
    return guarded([&] {
        const auto v = iob::classify_stability(w, to_cpp(*p), to_cpp(m));
        *stable = v.stable ? 1 : 0;
        *marginal = v.marginal ? 1 : 0;
        *max_real_part = v.max_real_part;
        return IOB_OK;
    });
}

iob_status iob_find_thresholds(const iob_params* p, iob_mechanism m, double omega_lo,
                               double omega_hi, int* found, double* omega_up,
                               double* omega_down, int* range_warning)
{
    IOB_REQUIRE(p && found && omega_up && omega_down && range_warning);
    return guarded([&] {
        const auto t = iob::find_thresholds(to_cpp(*p), to_cpp(m), omega_lo, omega_hi);
        *found = t ? 1 : 0;
        *omega_up = t ? t->omega_up : 0.0;
        *omega_down = t ? t->omega_down : 0.0;
        *range_warning = (t && t->range_warning) ? 1 : 0;
        return IOB_OK;
    });
}

iob_status iob_scan_create(const iob_params* p, iob_mechanism m, const double* omega_grid,
                           size_t n, iob_scan** out)
{
    IOB_REQUIRE(p && out && (omega_grid || n == 0));
    *out = nullptr;
    return guarded([&] {
        auto s = std::make_unique<iob_scan>();
        s->scan = iob::scan_hysteresis(to_cpp(*p), to_cpp(m), {omega_grid, n});
        *out = s.release();
        return IOB_OK;
    });
}

size_t iob_scan_size(const iob_scan* s)
{
    return s ? s->scan.points.size() : 0;
}

iob_status iob_scan_point(const iob_scan* s, size_t i, double* omega, iob_solution* out,
                          size_t capacity, size_t* count)
{
    IOB_REQUIRE(s && i < s->scan.points.size() && omega && count && (out || capacity == 0));
    const auto& pt = s->scan.points[i];
    *omega = pt.omega;
    if (pt.error) {
        *count = 0;
        return fail(IOB_ERR_NO_PHYSICAL_ROOT, pt.error->c_str());
    }
    last_error.clear();
    return copy_solutions(pt.solutions, out, capacity, count);
}

iob_status iob_scan_thresholds(const iob_scan* s, int* found, double* omega_up,
                               double* omega_down, int* range_warning)
{
    IOB_REQUIRE(s && found && omega_up && omega_down && range_warning);
    *found = s->scan.omega_up.has_value() ? 1 : 0;
    *omega_up = s->scan.omega_up.value_or(0.0);
    *omega_down = s->scan.omega_down.value_or(0.0);
    *range_warning = s->scan.range_warning ? 1 : 0;
    return IOB_OK;
}

void iob_scan_destroy(iob_scan* s)
{
    delete s;
}

iob_status iob_spectrum_coefficients_eval(double omega_eff_sq, double delta_eff, double gamma,
                                          iob_spectrum_coefficients* out)
{
    IOB_REQUIRE(out && omega_eff_sq >= 0.0 && gamma > 0.0);
    *out = to_c(iob::spectrum_coefficients(omega_eff_sq, delta_eff, gamma));
    return IOB_OK;
}

double iob_incoherent_spectrum(double nu, const iob_spectrum_coefficients* c, double rho22,
                               double gamma)
{
    return c ? iob::incoherent_spectrum(nu, to_cpp(*c), rho22, gamma) : 0.0;
}

iob_status iob_oracle_spectrum(double nu, double omega_eff_re, double omega_eff_im,
                               double delta_eff, double gamma, double w, double rho12_re,
                               double rho12_im, double* out)
{
    IOB_REQUIRE(out);
    return guarded([&] {
        const auto rho = iob::DensityMatrix::from(w, {rho12_re, rho12_im});
        *out = iob::oracle_spectrum(nu, {omega_eff_re, omega_eff_im}, delta_eff, gamma, rho);
        return IOB_OK;
    });
}

double iob_free_atom_saturation_max(double gamma)
{
    return iob::free_atom_saturation_max(gamma);
}

iob_status iob_spectrum_create(const iob_params* p, iob_mechanism m, iob_branch b,
                               const double* nu_grid, size_t n, iob_spectrum** out)
{
    IOB_REQUIRE(p && out && (nu_grid || n == 0));
    *out = nullptr;
    return guarded([&] {
        auto s = std::make_unique<iob_spectrum>();
        const auto params = to_cpp(*p);
        const auto mech = to_cpp(m);
        iob::check_consistent(params, mech);
        s->result = iob::spectrum_for_branch(params, mech, to_cpp(b), {nu_grid, n});
        *out = s.release();
        return IOB_OK;
    });
}

size_t iob_spectrum_size(const iob_spectrum* s)
{
    return s ? s->result.nu_grid.size() : 0;
}

const double* iob_spectrum_nu(const iob_spectrum* s)
{
    return s ? s->result.nu_grid.data() : nullptr;
}

const double* iob_spectrum_density(const iob_spectrum* s)
{
    return s ? s->result.incoherent.data() : nullptr;
}

iob_status iob_spectrum_get_info(const iob_spectrum* s, iob_spectrum_info* out)
{
    IOB_REQUIRE(s && out);
    const auto& r = s->result;
    out->coefficients = to_c(r.coefficients);
    out->state = to_c(r.state);
    out->elastic_weight = r.elastic_weight;
    out->has_sidebands = r.peaks.size() == 3 ? 1 : 0;
    out->nu_p = out->has_sidebands ? r.peaks.back() : 0.0;
    out->unstable = r.unstable ? 1 : 0;
    return IOB_OK;
}

iob_status iob_spectrum_sum_rule(const iob_spectrum* s, double* ratio)
{
    IOB_REQUIRE(s && ratio);
    return guarded([&] {
        *ratio = iob::sum_rule_ratio(s->result, s->result.state.rho22, s->result.state.rho12);
        return IOB_OK;
    });
}

void iob_spectrum_destroy(iob_spectrum* s)
{
    delete s;
}

iob_status iob_bloch_rhs(const iob_bloch_state* s, const iob_params* p, iob_mechanism m,
                         double omega_now, iob_bloch_state* out)
{
    IOB_REQUIRE(s && p && out);
    return guarded([&] {
        const auto d = iob::bloch_rhs({s->u, s->v, s->w}, to_cpp(*p), to_cpp(m), omega_now);
        *out = {d.u, d.v, d.w};
        return IOB_OK;
    });
}

iob_status iob_jacobian(const iob_bloch_state* s, const iob_params* p, iob_mechanism m,
                        double omega_now, double out[9])
{
    IOB_REQUIRE(s && p && out);
    return guarded([&] {
        const auto j = iob::jacobian({s->u, s->v, s->w}, to_cpp(*p), to_cpp(m), omega_now);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out[3 * r + c] = j[r][c];
        return IOB_OK;
    });
}

iob_status iob_integrate(const iob_bloch_state* s0, const iob_params* p, iob_mechanism m,
                         double t_end, size_t n_samples, double rel_tol, double abs_tol,
                         iob_trajectory** out)
{
    IOB_REQUIRE(s0 && p && out && n_samples >= 2);
    *out = nullptr;
    return guarded([&] {
        iob::IntegrateOptions opts;
        opts.rel_tol = rel_tol;
        opts.abs_tol = abs_tol;
        for (size_t k = 0; k < n_samples; ++k) {
            opts.sample_times.push_back(t_end * static_cast<double>(k) /
                                        static_cast<double>(n_samples - 1));
        }
        const double omega = p->omega;
        auto t = std::make_unique<iob_trajectory>();
        t->sweep.trajectory = iob::integrate({s0->u, s0->v, s0->w}, to_cpp(*p), to_cpp(m),
                                             [omega](double) { return omega; }, t_end, opts);
        *out = t.release();
        return IOB_OK;
    });
}

iob_status iob_sweep(const iob_params* p, iob_mechanism m, double omega_start, double omega_end,
                     double ramp_rate, iob_trajectory** out)
{
    IOB_REQUIRE(p && out);
    *out = nullptr;
    return guarded([&] {
        auto t = std::make_unique<iob_trajectory>();
        t->sweep = iob::sweep_adiabatic(to_cpp(*p), to_cpp(m), omega_start, omega_end, ramp_rate);
        *out = t.release();
        return IOB_OK;
    });
}

size_t iob_trajectory_size(const iob_trajectory* t)
{
    return t ? t->sweep.trajectory.times.size() : 0;
}

iob_status iob_trajectory_sample(const iob_trajectory* t, size_t i, double* time,
                                 iob_bloch_state* state, double* omega)
{
    IOB_REQUIRE(t && i < t->sweep.trajectory.times.size() && time && state && omega);
    const auto& tr = t->sweep.trajectory;
    *time = tr.times[i];
    *state = {tr.states[i].u, tr.states[i].v, tr.states[i].w};
    *omega = tr.drive[i];
    return IOB_OK;
}

size_t iob_trajectory_jump_count(const iob_trajectory* t)
{
    return t ? t->sweep.jumps.size() : 0;
}

double iob_trajectory_jump(const iob_trajectory* t, size_t i)
{
    return (t && i < t->sweep.jumps.size()) ? t->sweep.jumps[i] : 0.0;
}

int iob_trajectory_non_adiabatic(const iob_trajectory* t)
{
    return (t && t->sweep.non_adiabatic) ? 1 : 0;
}

double iob_trajectory_manifold_distance(const iob_trajectory* t)
{
    return t ? t->sweep.max_manifold_distance : 0.0;
}

void iob_trajectory_destroy(iob_trajectory* t)
{
    delete t;
}

iob_status iob_verify_run(uint64_t seed, int inject_printed_b2, iob_verify_report** out)
{
    IOB_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        iob::VerifyOptions opts;
        opts.seed = seed;
        opts.b2 = inject_printed_b2 ? iob::B2Form::printed : iob::B2Form::corrected;
        auto r = std::make_unique<iob_verify_report>();
        r->checks = iob::run_verification(opts);
        *out = r.release();
        return IOB_OK;
    });
}

size_t iob_verify_count(const iob_verify_report* r)
{
    return r ? r->checks.size() : 0;
}

iob_status iob_verify_check(const iob_verify_report* r, size_t i, const char** name, int* passed,
                            double* max_deviation, double* tolerance)
{
    IOB_REQUIRE(r && i < r->checks.size() && name && passed && max_deviation && tolerance);
    const auto& c = r->checks[i];
    *name = c.name.c_str();
    *passed = c.passed ? 1 : 0;
    *max_deviation = c.max_deviation;
    *tolerance = c.tolerance;
    return IOB_OK;
}

int iob_verify_all_passed(const iob_verify_report* r)
{
    if (!r) return 0;
    for (const auto& c : r->checks) {
        if (!c.passed) return 0;
    }
    return 1;
}

void iob_verify_destroy(iob_verify_report* r)
{
    delete r;
}

} // extern "C"
