#ifndef IOB_SPECTRUM_HPP
#define IOB_SPECTRUM_HPP

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "iob/core.hpp"
#include "iob/steady_state.hpp"

namespace iob {

/**
 * Coefficients of the inelastic line shape
 *
 *   S(nu) = 2 rho22^2 G a (nu^2 + a0) / (nu^6 + b4 nu^4 + b2 nu^2 + b0)
 *
 * written in terms of the effective drive |Omega_eff|^2 and detuning. The
 * denominator also factors as nu^2 (nu^2 - nu_p^2)^2 + 8 G^2 |Omega_eff|^2 nu^2
 * + gamma^6, which is what places the satellites at +-nu_p.
 */
struct SpectrumCoefficients
{
    double a = 0.0;
    double a0 = 0.0;
    double b4 = 0.0;
    double b2 = 0.0;
    double b0 = 0.0;
    double nu_p_sq = 0.0;
    double gamma6 = 0.0;

    double denominator(double nu) const
    {
        const double x = nu * nu;
        return ((x + b4) * x + b2) * x + b0;
    }
};

/// Which quartic term enters b2. `printed` keeps the dimensionally wrong
/// 16|Omega|^2 term and exists only to exercise the consistency checks.
enum class B2Form { corrected, printed };

SpectrumCoefficients spectrum_coefficients(double omega_eff_sq, double delta_eff,
                                           double gamma,
                                           B2Form form = B2Form::corrected);

/// Inelastic spectral density at offset nu = omega_k - omega_L.
double incoherent_spectrum(double nu, const SpectrumCoefficients& c, double rho22,
                           double gamma);

/// Single-atom density matrix elements in the stationary state.
struct DensityMatrix
{
    double rho11 = 1.0;
    double rho22 = 0.0;
    complex rho12; // <sigma+>

    static DensityMatrix from(double w, complex rho12)
    {
        return {0.5 * (1.0 + w), 0.5 * (1.0 - w), rho12};
    }
};

/// Solution (g11, g12, g21) of the 3x3 correlation system M g = q.
std::array<complex, 3> correlation_solution(double nu, complex omega_eff, double delta_eff,
                                            double gamma, const DensityMatrix& rho);

/// Re g12 from the linear system, in the same units as incoherent_spectrum.
double oracle_spectrum(double nu, complex omega_eff, double delta_eff, double gamma,
                       const DensityMatrix& rho);

/**
 * Same quantity for the stationary state belonging to the effective
 * parameters, with that state built in extended precision. A
 * self-consistent steady state of the medium is exactly this state, so this
 * is the reference used by the consistency checks: it avoids the loss of
 * digits in rho22 - |rho12|^2 under weak drive.
 */
double oracle_spectrum_at(double nu, complex omega_eff, double delta_eff, double gamma);

/// {-nu_p, 0, +nu_p} when nu_p^2 > 0, otherwise {0}.
std::vector<double> peak_positions(const SpectrumCoefficients& c);

struct SpectrumResult
{
    std::vector<double> nu_grid;
    std::vector<double> incoherent;
    double elastic_weight = 0.0;
    std::vector<double> peaks;
    SpectrumCoefficients coefficients;
    SteadyStateSolution state;
    double gamma = 1.0;
    bool unstable = false;
};

/// Symmetric grid of n points over [-(2 nu_p_max + 10 G), +(2 nu_p_max + 10 G)].
std::vector<double> default_nu_grid(double nu_p_max, double gamma, std::size_t n = 2001);

/**
 * Full pipeline at p.omega: steady state on the requested branch, effective
 * parameters, coefficients, sampled density, elastic weight and peaks. An
 * empty nu_grid selects default_nu_grid for this state's nu_p.
 */
SpectrumResult spectrum_for_branch(const MediumParams& p, Mechanism m, Branch b,
                                   std::span<const double> nu_grid = {});

/// Same pipeline for an already solved steady state.
SpectrumResult spectrum_for_state(const SteadyStateSolution& s, double gamma,
                                  std::span<const double> nu_grid = {});

/**
 * Integral of the incoherent density over the result's grid range divided by
 * the incoherent population rho22 - |rho12|^2 (adaptive Gauss-Kronrod). The
 * ratio is the same constant (pi) for every consistent steady state.
 */
double sum_rule_ratio(const SpectrumResult& r, double rho22, complex rho12);

/// Line-centre value of the free-atom spectrum in the saturation limit.
double free_atom_saturation_max(double gamma);

} // namespace iob

#endif
