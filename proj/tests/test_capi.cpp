#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "iob/iob.h"

namespace {

iob_params medium(double delta, double omega, double zl, double zm = 0.0)
{
    iob_params p = iob_default_params();
    p.delta = delta;
    p.omega = omega;
    p.zeta_lorentz = zl;
    p.zeta_detuning = zm;
    return p;
}

} // namespace

TEST_CASE("version and defaults")
{
    CHECK(std::strlen(iob_version()) > 0);
    const iob_params p = iob_default_params();
    CHECK(p.gamma == 1.0);
    CHECK(p.omega == 0.0);
    CHECK(iob_validate_params(&p, IOB_MECH_LORENTZ) == IOB_OK);
}

TEST_CASE("error codes and messages")
{
    iob_params p = medium(0, 1, 5, 5);
    double z = 0.0;
    CHECK(iob_zeta_total(&p, IOB_MECH_LORENTZ, &z) == IOB_ERR_INCONSISTENT_MECHANISM);
    CHECK(std::strlen(iob_last_error()) > 0);
    CHECK(iob_zeta_total(&p, IOB_MECH_JOINT, &z) == IOB_OK);
    CHECK(z == 10.0);
    CHECK(iob_zeta_total(nullptr, IOB_MECH_JOINT, &z) == IOB_ERR_INVALID_ARGUMENT);
    p.gamma = -1;
    CHECK(iob_validate_params(&p, IOB_MECH_JOINT) == IOB_ERR_INVALID_ARGUMENT);
    CHECK(iob_validate_params(&p, static_cast<iob_mechanism>(9)) == IOB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("steady states through the C interface")
{
    const iob_params p = medium(3, 8, 50);
    double c[4];
    REQUIRE(iob_cubic_coefficients(&p, IOB_MECH_LORENTZ, c) == IOB_OK);
    double roots[3];
    std::size_t n = 0;
    REQUIRE(iob_solve_inversion(&p, IOB_MECH_LORENTZ, roots, 3, &n) == IOB_OK);
    CHECK(n == 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = roots[i];
        // c holds c3, c2, c1, c0
        CHECK(std::abs(((c[0] * w + c[1]) * w + c[2]) * w + c[3]) < 1e-8);
    }
    CHECK(iob_solve_inversion(&p, IOB_MECH_LORENTZ, roots, 2, &n) == IOB_ERR_BUFFER_TOO_SMALL);

    iob_solution s[3];
    REQUIRE(iob_steady_states(&p, IOB_MECH_LORENTZ, s, 3, &n) == IOB_OK);
    REQUIRE(n == 3);
    CHECK(s[0].branch == IOB_BRANCH_LOWER);
    CHECK(s[1].branch == IOB_BRANCH_MIDDLE);
    CHECK(s[2].branch == IOB_BRANCH_UPPER);
    CHECK(s[0].stable == 1);
    CHECK(s[1].stable == 0);
    CHECK(s[2].stable == 1);
    CHECK(s[0].rho22 < s[1].rho22);

    double ore = 0, oim = 0, de = 0;
    REQUIRE(iob_effective_params(s[2].w, &p, IOB_MECH_LORENTZ, &ore, &oim, &de) == IOB_OK);
    CHECK(ore == doctest::Approx(s[2].omega_eff_re));
    CHECK(oim == doctest::Approx(s[2].omega_eff_im));
    CHECK(iob_effective_params(2.0, &p, IOB_MECH_LORENTZ, &ore, &oim, &de) == IOB_ERR_INVALID_ARGUMENT);

    int stable = -1, marginal = -1;
    double re = 0;
    REQUIRE(iob_classify_stability(s[1].w, &p, IOB_MECH_LORENTZ, &stable, &marginal, &re) == IOB_OK);
    CHECK(stable == 0);
    CHECK(re > 0);
}

TEST_CASE("thresholds and scans")
{
    const iob_params p = medium(3, 0, 50);
    int found = 0, warn = 1;
    double up = 0, down = 0;
    REQUIRE(iob_find_thresholds(&p, IOB_MECH_LORENTZ, 0, 25, &found, &up, &down, &warn) == IOB_OK);
    CHECK(found == 1);
    CHECK(warn == 0);
    CHECK(up == doctest::Approx(15.674130803).epsilon(1e-6));
    CHECK(down == doctest::Approx(1.393969708).epsilon(1e-6));

    const iob_params free = medium(3, 0, 0);
    REQUIRE(iob_find_thresholds(&free, IOB_MECH_LORENTZ, 0, 25, &found, &up, &down, &warn) == IOB_OK);
    CHECK(found == 0);

    std::vector<double> grid{0.0, 5.0, 20.0};
    iob_scan* scan = nullptr;
    REQUIRE(iob_scan_create(&p, IOB_MECH_LORENTZ, grid.data(), grid.size(), &scan) == IOB_OK);
    CHECK(iob_scan_size(scan) == 3);
    iob_solution s[3];
    std::size_t n = 0;
    double omega = -1;
    REQUIRE(iob_scan_point(scan, 1, &omega, s, 3, &n) == IOB_OK);
    CHECK(omega == 5.0);
    CHECK(n == 3);
    CHECK(iob_scan_point(scan, 7, &omega, s, 3, &n) == IOB_ERR_INVALID_ARGUMENT);
    REQUIRE(iob_scan_thresholds(scan, &found, &up, &down, &warn) == IOB_OK);
    CHECK(found == 1);
    iob_scan_destroy(scan);
    iob_scan_destroy(nullptr);

    std::vector<double> bad{3.0, 1.0};
    CHECK(iob_scan_create(&p, IOB_MECH_LORENTZ, bad.data(), bad.size(), &scan) == IOB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("spectrum handles")
{
    iob_spectrum_coefficients c{};
    REQUIRE(iob_spectrum_coefficients_eval(25.0, 0.0, 1.0, &c) == IOB_OK);
    CHECK(c.nu_p_sq == doctest::Approx(99.25));
    double oracle = 0;
    const double w = 0.25 / 50.25;
    // rho12 of the free atom at resonance: i Omega W / (G / 2)... taken from the library
    iob_solution s[1];
    std::size_t n = 0;
    const iob_params fp = medium(0, 5, 0);
    REQUIRE(iob_steady_states(&fp, IOB_MECH_LORENTZ, s, 1, &n) == IOB_OK);
    CHECK(s[0].w == doctest::Approx(w));
    REQUIRE(iob_oracle_spectrum(3.0, 5.0, 0.0, 0.0, 1.0, s[0].w, s[0].rho12_re, s[0].rho12_im,
                                &oracle) == IOB_OK);
    CHECK(iob_incoherent_spectrum(3.0, &c, s[0].rho22, 1.0) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(iob_free_atom_saturation_max(2.0) == 0.25);

    const iob_params p = medium(3, 0.5, 50);
    iob_spectrum* sp = nullptr;
    CHECK(iob_spectrum_create(&p, IOB_MECH_LORENTZ, IOB_BRANCH_UPPER, nullptr, 0, &sp) ==
          IOB_ERR_BRANCH_ABSENT);
    CHECK(sp == nullptr);
    REQUIRE(iob_spectrum_create(&p, IOB_MECH_LORENTZ, IOB_BRANCH_LOWER, nullptr, 0, &sp) == IOB_OK);
    CHECK(iob_spectrum_size(sp) == 2001);
    const double* nu = iob_spectrum_nu(sp);
    const double* y = iob_spectrum_density(sp);
    CHECK(nu[0] == -nu[2000]);
    CHECK(y[0] == y[2000]);
    iob_spectrum_info info{};
    REQUIRE(iob_spectrum_get_info(sp, &info) == IOB_OK);
    CHECK(info.unstable == 0);
    CHECK(info.state.branch == IOB_BRANCH_LOWER);
    CHECK(info.elastic_weight ==
          doctest::Approx(info.state.rho12_re * info.state.rho12_re + info.state.rho12_im * info.state.rho12_im));
    double ratio = 0;
    REQUIRE(iob_spectrum_sum_rule(sp, &ratio) == IOB_OK);
    CHECK(ratio == doctest::Approx(M_PI).epsilon(1e-2));
    iob_spectrum_destroy(sp);

    const double grid[] = {-1.0, 0.0, 1.0};
    REQUIRE(iob_spectrum_create(&p, IOB_MECH_LORENTZ, IOB_BRANCH_LOWER, grid, 3, &sp) == IOB_OK);
    CHECK(iob_spectrum_size(sp) == 3);
    iob_spectrum_destroy(sp);
}

TEST_CASE("dynamics handles")
{
    const iob_params p = medium(3, 8, 50);
    iob_bloch_state s{0.1, 0.2, 0.3};
    iob_bloch_state f{};
    REQUIRE(iob_bloch_rhs(&s, &p, IOB_MECH_LORENTZ, 8.0, &f) == IOB_OK);
    double j[9];
    REQUIRE(iob_jacobian(&s, &p, IOB_MECH_LORENTZ, 8.0, j) == IOB_OK);
    CHECK(j[0] == doctest::Approx(-0.5));
    CHECK(j[8] == doctest::Approx(-1.0));

    const iob_bloch_state g{0, 0, 1};
    iob_trajectory* t = nullptr;
    REQUIRE(iob_integrate(&g, &p, IOB_MECH_LORENTZ, 10.0, 11, 1e-9, 1e-11, &t) == IOB_OK);
    CHECK(iob_trajectory_size(t) == 11);
    double time = 0, omega = 0;
    iob_bloch_state x{};
    REQUIRE(iob_trajectory_sample(t, 10, &time, &x, &omega) == IOB_OK);
    CHECK(time == 10.0);
    CHECK(omega == 8.0);
    CHECK(iob_trajectory_sample(t, 11, &time, &x, &omega) == IOB_ERR_INVALID_ARGUMENT);
    CHECK(iob_trajectory_jump_count(t) == 0);
    iob_trajectory_destroy(t);

    CHECK(iob_integrate(&g, &p, IOB_MECH_LORENTZ, 10.0, 11, 1.0, 1e-11, &t) == IOB_ERR_INVALID_ARGUMENT);

    const iob_params q = medium(3, 0, 50);
    REQUIRE(iob_sweep(&q, IOB_MECH_LORENTZ, 12.0, 18.0, 1e-3, &t) == IOB_OK);
    REQUIRE(iob_trajectory_jump_count(t) == 1);
    CHECK(iob_trajectory_jump(t, 0) == doctest::Approx(15.674).epsilon(0.02));
    CHECK(iob_trajectory_non_adiabatic(t) == 0);
    CHECK(iob_trajectory_manifold_distance(t) < 0.05);
    iob_trajectory_destroy(t);
}

TEST_CASE("verification report")
{
    iob_verify_report* r = nullptr;
    REQUIRE(iob_verify_run(1, 0, &r) == IOB_OK);
    CHECK(iob_verify_count(r) >= 5);
    CHECK(iob_verify_all_passed(r) == 1);
    const char* name = nullptr;
    int passed = 0;
    double dev = 0, tol = 0;
    REQUIRE(iob_verify_check(r, 0, &name, &passed, &dev, &tol) == IOB_OK);
    CHECK(std::string(name) == "spectrum_vs_linear_solve");
    CHECK(dev <= 1e-10);
    iob_verify_destroy(r);

    REQUIRE(iob_verify_run(1, 1, &r) == IOB_OK);
    CHECK(iob_verify_all_passed(r) == 0);
    bool factorization_failed = false;
    for (std::size_t i = 0; i < iob_verify_count(r); ++i) {
        REQUIRE(iob_verify_check(r, i, &name, &passed, &dev, &tol) == IOB_OK);
        if (std::string(name) == "factorization_identity") factorization_failed = passed == 0;
    }
    CHECK(factorization_failed);
    iob_verify_destroy(r);
}
