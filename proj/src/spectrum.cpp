#include "iob/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace iob {

SpectrumCoefficients spectrum_coefficients(double omega_eff_sq, double delta_eff,
                                           double gamma, B2Form form)
{
    const double o2 = omega_eff_sq;
    const double d2 = delta_eff * delta_eff;
    const double g2 = gamma * gamma;

    SpectrumCoefficients c;
    c.a = 2.0 * o2 + d2 + 0.25 * g2;
    c.a0 = 2.0 * o2 + g2;
    c.b4 = -8.0 * o2 - 2.0 * d2 + 1.5 * g2;
    const double quartic = (form == B2Form::corrected) ? 16.0 * o2 * o2 : 16.0 * o2;
    c.b2 = quartic + 2.0 * o2 * (4.0 * d2 + g2) + d2 * d2 - 1.5 * g2 * d2 +
           9.0 / 16.0 * g2 * g2;
    c.b0 = g2 * c.a * c.a;
    c.nu_p_sq = 4.0 * o2 + d2 - 0.75 * g2;
    c.gamma6 = g2 * c.a * c.a;
    return c;
}

double incoherent_spectrum(double nu, const SpectrumCoefficients& c, double rho22,
                           double gamma)
{
    return 2.0 * rho22 * rho22 * gamma * c.a * (nu * nu + c.a0) / c.denominator(nu);
}

namespace {

using real_ext = long double;
using complex_ext = std::complex<real_ext>;

struct ExtState
{
    real_ext rho11;
    real_ext rho22;
    complex_ext rho12;
};

// Re g12 is small next to Im g12 away from the lines, so the solve runs in
// extended precision
std::array<complex, 3> solve_extended(double nu, complex omega_eff, double delta_eff,
                                      double gamma, const ExtState& rho)
{
    using real = real_ext;
    using cx = complex_ext;
    const cx i(0.0L, 1.0L);
    const cx om(omega_eff.real(), omega_eff.imag());
    const cx omc = std::conj(om);
    const real n = nu;
    const real d = delta_eff;
    const real g = gamma;

    Eigen::Matrix<cx, 3, 3> m;
    m << i * n + g, i * omc, -i * om,
         real(2) * i * om, i * (n - d) + g / real(2), real(0),
        -real(2) * i * omc, real(0), i * (n + d) + g / real(2);

    const real scale =
        std::max({gamma, std::abs(nu), std::abs(omega_eff), std::abs(delta_eff)});
    if (std::abs(m.determinant()) < 1e-14L * scale * scale * scale) {
        throw Error(ErrorCode::singular_matrix, "correlation matrix is singular");
    }

    // q = s - rho21 rho_A with s = (rho21, rho22, 0) and rho_A = (rho11, rho12, rho21)
    const cx r21 = std::conj(rho.rho12);
    Eigen::Matrix<cx, 3, 1> q;
    q << r21 - r21 * rho.rho11, rho.rho22 - r21 * rho.rho12, -r21 * r21;

    const Eigen::Matrix<cx, 3, 1> sol = m.partialPivLu().solve(q);
    auto narrow = [](const cx& z) {
        return complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    };
    return {narrow(sol(0)), narrow(sol(1)), narrow(sol(2))};
}

} // namespace

std::array<complex, 3> correlation_solution(double nu, complex omega_eff, double delta_eff,
                                            double gamma, const DensityMatrix& rho)
{
    const ExtState s{rho.rho11, rho.rho22, complex_ext(rho.rho12.real(), rho.rho12.imag())};
    return solve_extended(nu, omega_eff, delta_eff, gamma, s);
}

double oracle_spectrum_at(double nu, complex omega_eff, double delta_eff, double gamma)
{
    const complex_ext om(omega_eff.real(), omega_eff.imag());
    const real_ext d = delta_eff;
    const real_ext g = gamma;
    const real_ext base = d * d + g * g / 4;
    const real_ext o2 = std::norm(om);
    const real_ext w = base / (base + 2 * o2);
    ExtState s;
    s.rho11 = (base + o2) / (base + 2 * o2);
    s.rho22 = o2 / (base + 2 * o2);
    s.rho12 = om * w / complex_ext(d, g / 2);
    return solve_extended(nu, omega_eff, delta_eff, gamma, s)[1].real();
}

double oracle_spectrum(double nu, complex omega_eff, double delta_eff, double gamma,
                       const DensityMatrix& rho)
{
    return correlation_solution(nu, omega_eff, delta_eff, gamma, rho)[1].real();
}

std::vector<double> peak_positions(const SpectrumCoefficients& c)
{
    if (c.nu_p_sq > 0.0) {
        const double nu_p = std::sqrt(c.nu_p_sq);
        return {-nu_p, 0.0, nu_p};
    }
    return {0.0};
}

std::vector<double> default_nu_grid(double nu_p_max, double gamma, std::size_t n)
{
    if (n < 2) throw Error(ErrorCode::invalid_argument, "nu grid needs at least 2 points");
    const double half = 2.0 * std::max(nu_p_max, 0.0) + 10.0 * gamma;
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = -half + 2.0 * half * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    // exact symmetry, so S(nu) = S(-nu) holds sample by sample
    for (std::size_t k = 0; k < n / 2; ++k) grid[n - 1 - k] = -grid[k];
    if (n % 2 == 1) grid[n / 2] = 0.0;
    return grid;
}

SpectrumResult spectrum_for_state(const SteadyStateSolution& s, double gamma,
                                  std::span<const double> nu_grid)
{
    SpectrumResult r;
    r.state = s;
    r.gamma = gamma;
    r.unstable = !s.stable;
    r.coefficients = spectrum_coefficients(std::norm(s.omega_eff), s.delta_eff, gamma);
    r.peaks = peak_positions(r.coefficients);
    r.elastic_weight = std::norm(s.rho12);
    if (nu_grid.empty()) {
        r.nu_grid = default_nu_grid(std::sqrt(std::max(r.coefficients.nu_p_sq, 0.0)), gamma);
    } else {
        r.nu_grid.assign(nu_grid.begin(), nu_grid.end());
    }
    r.incoherent.reserve(r.nu_grid.size());
    for (double nu : r.nu_grid) {
        r.incoherent.push_back(incoherent_spectrum(nu, r.coefficients, s.rho22, gamma));
    }
    return r;
}

SpectrumResult spectrum_for_branch(const MediumParams& p, Mechanism m, Branch b,
                                   std::span<const double> nu_grid)
{
    return spectrum_for_state(steady_state_on_branch(p, m, b), p.gamma, nu_grid);
}

double sum_rule_ratio(const SpectrumResult& r, double rho22, complex rho12)
{
    const double incoherent_population = rho22 - std::norm(rho12);
    if (!(incoherent_population > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "rho22 - |rho12|^2 must be positive for a consistent steady state");
    }
    if (r.nu_grid.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "sum rule needs a frequency range");
    }
    const double lo = r.nu_grid.front();
    const double hi = r.nu_grid.back();
    const double gamma = r.gamma;
    const auto density = [&](double nu) {
        return incoherent_spectrum(nu, r.coefficients, r.state.rho22, gamma);
    };

    // split at the line centres and a few widths around them
    std::vector<double> cuts{lo, hi};
    const double nu_p = std::sqrt(std::max(r.coefficients.nu_p_sq, 0.0));
    for (double centre : {-nu_p, 0.0, nu_p}) {
        for (double offset : {-50.0, -10.0, -2.0, 0.0, 2.0, 10.0, 50.0}) {
            const double x = centre + offset * gamma;
            if (x > lo && x < hi) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += gauss_kronrod<double, 61>::integrate(density, cuts[k], cuts[k + 1], 20, 1e-13);
    }
    return total / incoherent_population;
}

double free_atom_saturation_max(double gamma)
{
    // S(0) = 2 rho22^2 a0 / (G a) with rho22 -> 1/2 and a0 / a -> 1
    return 0.5 / gamma;
}

} // namespace iob
