#include "iob/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iob/dynamics.hpp"

namespace iob {

namespace {

struct RandomSet
{
    complex omega_eff;
    double delta_eff;
    double gamma;
};

RandomSet draw(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> mag(0.0, 30.0);
    std::uniform_real_distribution<double> phase(-3.14159, 3.14159);
    std::uniform_real_distribution<double> det(-30.0, 30.0);
    std::uniform_real_distribution<double> gam(0.5, 2.0);
    const double r = mag(rng);
    const double ph = phase(rng);
    return {std::polar(r, ph), det(rng), gam(rng)};
}

DensityMatrix free_atom_state(complex omega, double delta, double gamma)
{
    const double base = delta * delta + 0.25 * gamma * gamma;
    const double o2 = std::norm(omega);
    const double w = base / (base + 2.0 * o2);
    DensityMatrix rho = DensityMatrix::from(w, coherence(w, omega, delta, gamma));
    // 1 - w cancels badly under weak drive
    rho.rho22 = o2 / (base + 2.0 * o2);
    rho.rho11 = (base + o2) / (base + 2.0 * o2);
    return rho;
}

VerifyCheck spectrum_vs_linear_solve(std::mt19937_64& rng, B2Form form)
{
    VerifyCheck c{"spectrum_vs_linear_solve", false, 0.0, 1e-10};
    for (int set = 0; set < 20; ++set) {
        const RandomSet s = draw(rng);
        const DensityMatrix rho = free_atom_state(s.omega_eff, s.delta_eff, s.gamma);
        const auto coeffs =
            spectrum_coefficients(std::norm(s.omega_eff), s.delta_eff, s.gamma, form);
        const auto grid = default_nu_grid(std::sqrt(std::max(coeffs.nu_p_sq, 0.0)), s.gamma, 401);
        for (double nu : grid) {
            const double closed = incoherent_spectrum(nu, coeffs, rho.rho22, s.gamma);
            const double oracle = oracle_spectrum_at(nu, s.omega_eff, s.delta_eff, s.gamma);
            const double dev = std::abs(closed - oracle) / std::abs(oracle);
            c.max_deviation = std::max(c.max_deviation, dev);
        }
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

VerifyCheck factorization_identity(std::mt19937_64& rng, B2Form form)
{
    VerifyCheck c{"factorization_identity", false, 0.0, 1e-12};
    for (int set = 0; set < 1000; ++set) {
        const RandomSet s = draw(rng);
        const double o2 = std::norm(s.omega_eff);
        const double g2 = s.gamma * s.gamma;
        const auto k = spectrum_coefficients(o2, s.delta_eff, s.gamma, form);
        const double unit = o2 + s.delta_eff * s.delta_eff + g2;
        const double devs[] = {
            std::abs(k.b4 + 2.0 * k.nu_p_sq) / unit,
            std::abs(k.b2 - (k.nu_p_sq * k.nu_p_sq + 8.0 * g2 * o2)) / (unit * unit),
            std::abs(k.b0 - k.gamma6) / (unit * unit * unit),
        };
        for (double d : devs) c.max_deviation = std::max(c.max_deviation, d);
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

VerifyCheck fixed_point_agreement()
{
    VerifyCheck c{"fixed_point_agreement", false, 0.0, 1e-10};
    for (Mechanism m : {Mechanism::lorentz, Mechanism::detuning}) {
        MediumParams p;
        p.delta = 3.0;
        (m == Mechanism::lorentz ? p.zeta_lorentz : p.zeta_detuning) = 50.0;
        for (double omega : linspace(0.0, 25.0, 50)) {
            const MediumParams q = p.with_omega(omega);
            for (const auto& s : steady_states(q, m)) {
                const BlochState d = bloch_rhs(bloch_state_from(s.w, s.rho12), q, m, omega);
                c.max_deviation = std::max(c.max_deviation, std::sqrt(d.radius_sq()) / p.gamma);
            }
        }
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

VerifyCheck effective_rabi_relation()
{
    VerifyCheck c{"effective_rabi_relation", false, 0.0, 1e-10};
    MediumParams p;
    p.delta = 3.0;
    p.zeta_lorentz = 50.0;
    for (double omega : linspace(0.1, 25.0, 100)) {
        for (const auto& s : steady_states(p.with_omega(omega), Mechanism::lorentz)) {
            const double shifted = s.delta_eff - p.zeta_lorentz * s.w;
            const double quarter = 0.25 * p.gamma * p.gamma;
            const double expected = omega * omega * (s.delta_eff * s.delta_eff + quarter) /
                                    (shifted * shifted + quarter);
            c.max_deviation =
                std::max(c.max_deviation, std::abs(std::norm(s.omega_eff) - expected) / expected);
        }
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

VerifyCheck sum_rule_constancy()
{
    VerifyCheck c{"sum_rule_constancy", false, 0.0, 1e-6};
    struct Case
    {
        MediumParams p;
        Mechanism m;
        Branch b;
    };
    std::vector<Case> cases;
    const auto add = [&](double delta, double omega, double zl, double zm, Mechanism m, Branch b) {
        MediumParams p;
        p.delta = delta;
        p.omega = omega;
        p.zeta_lorentz = zl;
        p.zeta_detuning = zm;
        cases.push_back({p, m, b});
    };
    add(0.0, 1.0, 0.0, 0.0, Mechanism::lorentz, Branch::lower);
    add(3.0, 5.0, 0.0, 0.0, Mechanism::lorentz, Branch::lower);
    add(3.0, 15.6, 50.0, 0.0, Mechanism::lorentz, Branch::upper);
    add(3.0, 15.6, 50.0, 0.0, Mechanism::lorentz, Branch::lower);
    add(3.0, 15.6, 0.0, 50.0, Mechanism::detuning, Branch::lower);
    add(3.0, 8.0, 0.0, 50.0, Mechanism::detuning, Branch::upper);

    double reference = 0.0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& cs = cases[k];
        const double edge = 2000.0 * cs.p.gamma;
        const double grid[] = {-edge, edge};
        const auto r = spectrum_for_branch(cs.p, cs.m, cs.b, grid);
        const double ratio = sum_rule_ratio(r, r.state.rho22, r.state.rho12);
        if (k == 0) {
            reference = ratio;
        } else {
            c.max_deviation = std::max(c.max_deviation, std::abs(ratio - reference) / reference);
        }
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

VerifyCheck stability_pattern()
{
    // deviation counts the points whose stability pattern is wrong
    VerifyCheck c{"stability_pattern", false, 0.0, 0.0};
    MediumParams p;
    p.delta = 3.0;
    p.zeta_lorentz = 50.0;
    for (double omega : linspace(0.0, 25.0, 200)) {
        const auto states = steady_states(p.with_omega(omega), Mechanism::lorentz);
        for (const auto& s : states) {
            if (s.marginal) continue;
            const bool expect_stable = s.branch != Branch::middle;
            if (s.stable != expect_stable) c.max_deviation += 1.0;
        }
    }
    c.passed = c.max_deviation <= c.tolerance;
    return c;
}

} // namespace

std::vector<VerifyCheck> run_verification(const VerifyOptions& opts)
{
    std::mt19937_64 rng(opts.seed);
    std::vector<VerifyCheck> out;
    out.push_back(spectrum_vs_linear_solve(rng, opts.b2));
    out.push_back(factorization_identity(rng, opts.b2));
    out.push_back(fixed_point_agreement());
    out.push_back(effective_rabi_relation());
    out.push_back(sum_rule_constancy());
    out.push_back(stability_pattern());
    return out;
}

} // namespace iob
