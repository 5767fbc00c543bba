#ifndef IOB_CORE_HPP
#define IOB_CORE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iob {

/// Failure categories shared by the C++ core and the C API.
enum class ErrorCode {
    invalid_argument,
    inconsistent_mechanism,
    no_physical_root,
    singular_feedback,
    singular_matrix,
    branch_absent,
    step_underflow,
};

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), m_code(code)
    {
    }

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

/**
 * Physical inputs of the dense two-level medium. All fields are
 * frequencies; the library works in units of the decay rate (gamma = 1 by
 * default) but every formula is homogeneous, so any common scale works.
 */
struct MediumParams
{
    double gamma = 1.0;         // spontaneous decay rate, > 0
    double delta = 0.0;         // bare detuning omega_A - omega_L
    double omega = 0.0;         // bare Rabi frequency, >= 0, phase fixed to 0
    double zeta_lorentz = 0.0;  // near dipole-dipole (Lorentz) parameter, >= 0
    double zeta_detuning = 0.0; // excitation-dependent detuning shift, >= 0

    /// Throws Error(invalid_argument) if any invariant is violated.
    void validate() const;

    MediumParams with_omega(double w) const
    {
        MediumParams p = *this;
        p.omega = w;
        return p;
    }
};

/// Which renormalization produces the bistability.
enum class Mechanism { lorentz, detuning, joint };

/// Steady-state branch of the S-shaped response, ordered by excitation.
enum class Branch { lower, middle, upper };

std::string_view to_string(Mechanism m);
std::string_view to_string(Branch b);
std::optional<Mechanism> parse_mechanism(std::string_view s);
std::optional<Branch> parse_branch(std::string_view s);

/// lorentz needs zeta_detuning == 0, detuning needs zeta_lorentz == 0.
void check_consistent(const MediumParams& p, Mechanism m);

/// Total linear-in-W frequency shift that enters the inversion cubic.
double zeta_total(const MediumParams& p, Mechanism m);

/// Lorentz part of the feedback as seen by mechanism m (0 for detuning).
double zeta_lorentz_part(const MediumParams& p, Mechanism m);

/// Detuning part of the feedback as seen by mechanism m (0 for lorentz).
double zeta_detuning_part(const MediumParams& p, Mechanism m);

} // namespace iob

#endif
