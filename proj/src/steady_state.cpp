#include "iob/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iob/dynamics.hpp"

namespace iob {

namespace {

constexpr double merge_separation = 1e-8;
constexpr double marginal_band = 1e-9;
constexpr double threshold_resolution = 1e-7;

// Newton steps are only kept while they reduce |f|; this keeps the closed
// form's answer when the root is (nearly) double and Newton goes linear.
double polish(const CubicCoefficients& c, double x)
{
    double fx = std::abs(c(x));
    for (int it = 0; it < 16 && fx > 0.0; ++it) {
        const double d = c.derivative(x);
        if (d == 0.0) break;
        const double next = x - c(x) / d;
        const double fn = std::abs(c(next));
        if (!(fn < fx)) break;
        x = next;
        fx = fn;
    }
    return x;
}

void quadratic_roots(double a, double b, double c, std::vector<double>& out)
{
    if (a == 0.0) {
        if (b != 0.0) out.push_back(-c / b);
        return;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
        out.push_back(q / a);
        out.push_back(c / q);
    } else {
        out.push_back(0.0);
    }
}

void monic_cubic_roots(double b, double c, double d, std::vector<double>& out)
{
    // x = t - b/3 gives t^3 + pt + q = 0
    const double shift = b / 3.0;
    const double p = c - b * shift;
    const double q = 2.0 * shift * shift * shift - c * shift + d;
    const double half_q = 0.5 * q;
    const double third_p = p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;

    if (disc > 0.0) {
        const double a = -std::copysign(std::cbrt(std::abs(half_q) + std::sqrt(disc)), q);
        const double t = (a != 0.0) ? a - third_p / a : 0.0;
        out.push_back(t - shift);
        return;
    }
    if (p == 0.0) {
        out.push_back(-shift);
        return;
    }
    const double r = 2.0 * std::sqrt(-third_p);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
        out.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
}

// Omega^2 that makes W a steady state: (1 - W)((zeta W - Delta)^2 + G^2/4) / (2W)
double drive_sq_for(double w, double delta, double zeta, double gamma)
{
    const double shifted = zeta * w - delta;
    return (1.0 - w) * (shifted * shifted + 0.25 * gamma * gamma) / (2.0 * w);
}

} // namespace

double CubicCoefficients::scale() const
{
    return std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
}

CubicCoefficients cubic_coefficients(const MediumParams& p, Mechanism m)
{
    const double zeta = zeta_total(p, m);
    const double d = p.delta;
    const double g2 = p.gamma * p.gamma;
    return {
        zeta * zeta,
        -zeta * (zeta + 2.0 * d),
        2.0 * p.omega * p.omega + d * (d + 2.0 * zeta) + 0.25 * g2,
        -(d * d + 0.25 * g2),
    };
}

std::vector<double> real_cubic_roots(const CubicCoefficients& c)
{
    const double s = c.scale();
    if (s == 0.0) return {};
    const CubicCoefficients n{c.c3 / s, c.c2 / s, c.c1 / s, c.c0 / s};

    std::vector<double> roots;
    if (std::abs(n.c3) < 1e-12) {
        quadratic_roots(n.c2, n.c1, n.c0, roots);
        if (n.c3 != 0.0 && n.c2 != 0.0) {
            // far root from Vieta: sum of roots = -c2/c3
            roots.push_back(-n.c2 / n.c3 + n.c1 / n.c2);
        }
    } else {
        monic_cubic_roots(n.c2 / n.c3, n.c1 / n.c3, n.c0 / n.c3, roots);
    }

    for (double& r : roots) r = polish(n, r);
    std::sort(roots.begin(), roots.end());

    std::vector<double> merged;
    for (double r : roots) {
        if (!merged.empty() && std::abs(r - merged.back()) < merge_separation) {
            if (std::abs(n(r)) < std::abs(n(merged.back()))) merged.back() = r;
            continue;
        }
        merged.push_back(r);
    }
    return merged;
}

std::vector<double> solve_inversion(const MediumParams& p, Mechanism m)
{
    const CubicCoefficients c = cubic_coefficients(p, m);
    std::vector<double> physical;
    for (double w : real_cubic_roots(c)) {
        if (!(w > 0.0 && w <= 1.0 + 1e-12)) continue;
        // the undriven ground state is an exact root
        if (std::abs(w - 1.0) < 1e-9 && std::abs(c(1.0)) <= 1e-14 * c.scale()) w = 1.0;
        physical.push_back(std::min(w, 1.0));
    }
    if (physical.empty()) {
        throw Error(ErrorCode::no_physical_root, "no root of the inversion cubic in (0, 1]");
    }
    return physical;
}

EffectiveParams effective_params(double w, const MediumParams& p, Mechanism m)
{
    check_consistent(p, m);
    if (!(w > 0.0 && w <= 1.0 + 1e-12)) {
        throw Error(ErrorCode::invalid_argument, "inversion W must lie in (0, 1]");
    }
    const double zl = zeta_lorentz_part(p, m);
    const double zm = zeta_detuning_part(p, m);

    EffectiveParams e;
    e.delta_eff = p.delta - zm * w;
    // Omega_eff = Omega + zl * rho12(Omega_eff), rho12 linear in Omega_eff at fixed W
    const complex feedback = 1.0 - zl * w / complex(e.delta_eff, 0.5 * p.gamma);
    if (std::abs(feedback) < 1e-14) {
        throw Error(ErrorCode::singular_feedback, "local-field self-consistency is singular");
    }
    e.omega_eff = p.omega / feedback;
    return e;
}

complex coherence(double w, complex omega_eff, double delta_eff, double gamma)
{
    return omega_eff * w / complex(delta_eff, 0.5 * gamma);
}

StabilityVerdict classify_stability(double w, const MediumParams& p, Mechanism m)
{
    const EffectiveParams e = effective_params(w, p, m);
    const BlochState fixed = bloch_state_from(w, coherence(w, e.omega_eff, e.delta_eff, p.gamma));
    const auto re = jacobian_real_parts(jacobian(fixed, p, m, p.omega));

    StabilityVerdict v;
    v.max_real_part = re[0];
    v.marginal = std::abs(re[0]) < marginal_band;
    v.stable = re[0] < 0.0 && !v.marginal;
    return v;
}

std::optional<FoldPoints> fold_points(const MediumParams& p, Mechanism m)
{
    const double zeta = zeta_total(p, m);
    if (zeta == 0.0) return std::nullopt;
    const double d = p.delta;
    // stationary points of Omega^2(W): 2 zeta^2 W^3 - zeta(zeta + 2 Delta) W^2 + Delta^2 + G^2/4
    const CubicCoefficients crit{2.0 * zeta * zeta, -zeta * (zeta + 2.0 * d), 0.0,
                                 d * d + 0.25 * p.gamma * p.gamma};
    std::vector<double> inside;
    for (double w : real_cubic_roots(crit)) {
        if (w > 0.0 && w < 1.0) inside.push_back(w);
    }
    if (inside.size() != 2) return std::nullopt;
    return FoldPoints{inside[1], inside[0]};
}

std::vector<SteadyStateSolution> steady_states(const MediumParams& p, Mechanism m)
{
    const std::vector<double> roots = solve_inversion(p, m);
    const CubicCoefficients c = cubic_coefficients(p, m);
    const double cscale = c.scale();
    const auto folds = fold_points(p, m);

    // roots ascend in W, i.e. descend in excitation
    std::vector<SteadyStateSolution> out;
    out.reserve(roots.size());
    for (double w : roots) {
        SteadyStateSolution s;
        s.w = w;
        s.rho22 = 0.5 * (1.0 - w);
        const EffectiveParams e = effective_params(w, p, m);
        s.omega_eff = e.omega_eff;
        s.delta_eff = e.delta_eff;
        s.rho12 = coherence(w, e.omega_eff, e.delta_eff, p.gamma);
        s.residual = std::abs(c(w)) / cscale;
        const StabilityVerdict v = classify_stability(w, p, m);
        s.stable = v.stable;
        s.marginal = v.marginal;
        out.push_back(s);
    }

    if (out.size() == 3) {
        out[0].branch = Branch::upper;
        out[1].branch = Branch::middle;
        out[2].branch = Branch::lower;
    } else if (out.size() == 2 && folds) {
        // one simple root and one merged pair at a fold
        const auto dist = [](double a, double b) { return std::abs(a - b); };
        double best = INFINITY;
        std::size_t merged = 0;
        bool at_up_fold = true;
        for (std::size_t i = 0; i < 2; ++i) {
            for (bool up : {true, false}) {
                const double d = dist(out[i].w, up ? folds->w_up : folds->w_down);
                if (d < best) {
                    best = d;
                    merged = i;
                    at_up_fold = up;
                }
            }
        }
        out[merged].branch = at_up_fold ? Branch::lower : Branch::upper;
        out[merged].marginal = true;
        out[merged].stable = false;
        out[1 - merged].branch = at_up_fold ? Branch::upper : Branch::lower;
    } else {
        for (auto& s : out) {
            if (!folds || s.w > folds->w_up) {
                s.branch = Branch::lower;
            } else if (s.w < folds->w_down) {
                s.branch = Branch::upper;
            } else {
                s.branch = Branch::middle;
            }
        }
    }

    std::reverse(out.begin(), out.end());
    return out;
}

SteadyStateSolution steady_state_on_branch(const MediumParams& p, Mechanism m, Branch b)
{
    for (const auto& s : steady_states(p, m)) {
        if (s.branch == b) return s;
    }
    throw Error(ErrorCode::branch_absent,
                std::string(to_string(b)) + " branch does not exist at omega = " +
                    std::to_string(p.omega));
}

std::optional<Thresholds> find_thresholds(const MediumParams& p, Mechanism m,
                                          double omega_lo, double omega_hi)
{
    p.validate();
    if (!(omega_lo >= 0.0 && omega_hi > omega_lo)) {
        throw Error(ErrorCode::invalid_argument, "threshold search needs 0 <= lo < hi");
    }
    const auto count = [&](double omega) {
        return solve_inversion(p.with_omega(omega), m).size();
    };

    std::vector<double> probes;
    constexpr int samples = 1000;
    for (int i = 0; i <= samples; ++i) {
        probes.push_back(omega_lo + (omega_hi - omega_lo) * i / samples);
    }
    if (const auto folds = fold_points(p, m)) {
        // drive that puts a steady state halfway between the folds is inside the window
        const double w_mid = 0.5 * (folds->w_up + folds->w_down);
        const double inside = std::sqrt(drive_sq_for(w_mid, p.delta, zeta_total(p, m), p.gamma));
        if (inside > omega_lo && inside < omega_hi) probes.push_back(inside);
    }
    std::sort(probes.begin(), probes.end());

    std::vector<std::size_t> counts;
    counts.reserve(probes.size());
    for (double x : probes) counts.push_back(count(x));

    const auto it = std::find_if(counts.begin(), counts.end(),
                                 [](std::size_t n) { return n >= 3; });
    if (it == counts.end()) return std::nullopt;
    const std::size_t k = static_cast<std::size_t>(it - counts.begin());

    const auto bisect = [&](double inside, double outside) {
        while (std::abs(outside - inside) > threshold_resolution) {
            const double mid = 0.5 * (inside + outside);
            (count(mid) >= 3 ? inside : outside) = mid;
        }
        return inside;
    };

    Thresholds t;
    t.omega_down = (k == 0) ? probes.front() : bisect(probes[k], probes[k - 1]);
    std::size_t j = k;
    while (j + 1 < probes.size() && counts[j + 1] >= 3) ++j;
    t.omega_up = (j + 1 == probes.size()) ? probes.back() : bisect(probes[j], probes[j + 1]);
    t.range_warning = counts.front() >= 3 || counts.back() >= 3;
    return t;
}

HysteresisScan scan_hysteresis(const MediumParams& p, Mechanism m,
                               std::span<const double> omega_grid)
{
    check_consistent(p, m);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] >= 0.0) || (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))) {
            throw Error(ErrorCode::invalid_argument,
                        "omega grid must be nonnegative and strictly increasing");
        }
    }

    HysteresisScan scan;
    scan.points.reserve(omega_grid.size());
    for (double omega : omega_grid) {
        ScanPoint pt;
        pt.omega = omega;
        try {
            pt.solutions = steady_states(p.with_omega(omega), m);
        } catch (const Error& e) {
            pt.error = e.what();
        }
        scan.points.push_back(std::move(pt));
    }

    if (omega_grid.size() >= 2) {
        if (const auto t = find_thresholds(p, m, omega_grid.front(), omega_grid.back())) {
            scan.omega_up = t->omega_up;
            scan.omega_down = t->omega_down;
            scan.range_warning = t->range_warning;
        }
    }
    return scan;
}

} // namespace iob
