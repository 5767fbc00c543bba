#include "iob/core.hpp"

#include <cmath>

namespace iob {

namespace {

void require(bool cond, const char* msg)
{
    if (!cond) {
        throw Error(ErrorCode::invalid_argument, msg);
    }
}

} // namespace

void MediumParams::validate() const
{
    require(std::isfinite(gamma) && std::isfinite(delta) &&
                std::isfinite(omega) && std::isfinite(zeta_lorentz) &&
                std::isfinite(zeta_detuning),
            "medium parameters must be finite");
    require(gamma > 0.0, "gamma must be positive");
    require(omega >= 0.0, "omega must be nonnegative");
    require(zeta_lorentz >= 0.0, "zeta_lorentz must be nonnegative");
    require(zeta_detuning >= 0.0, "zeta_detuning must be nonnegative");
}

std::string_view to_string(Mechanism m)
{
    switch (m) {
    case Mechanism::lorentz:
        return "lorentz";
    case Mechanism::detuning:
        return "detuning";
    case Mechanism::joint:
        return "joint";
    }
    return "?";
}

std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::lower:
        return "lower";
    case Branch::middle:
        return "middle";
    case Branch::upper:
        return "upper";
    }
    return "?";
}

std::optional<Mechanism> parse_mechanism(std::string_view s)
{
    if (s == "lorentz") return Mechanism::lorentz;
    if (s == "detuning") return Mechanism::detuning;
    if (s == "joint") return Mechanism::joint;
    return std::nullopt;
}

std::optional<Branch> parse_branch(std::string_view s)
{
    if (s == "lower") return Branch::lower;
    if (s == "middle") return Branch::middle;
    if (s == "upper") return Branch::upper;
    return std::nullopt;
}

void check_consistent(const MediumParams& p, Mechanism m)
{
    p.validate();
    if (m == Mechanism::lorentz && p.zeta_detuning != 0.0) {
        throw Error(ErrorCode::inconsistent_mechanism,
                    "lorentz mechanism requires zeta_detuning = 0");
    }
    if (m == Mechanism::detuning && p.zeta_lorentz != 0.0) {
        throw Error(ErrorCode::inconsistent_mechanism,
                    "detuning mechanism requires zeta_lorentz = 0");
    }
}

double zeta_total(const MediumParams& p, Mechanism m)
{
    check_consistent(p, m);
    return p.zeta_lorentz + p.zeta_detuning;
}

double zeta_lorentz_part(const MediumParams& p, Mechanism m)
{
    return m == Mechanism::detuning ? 0.0 : p.zeta_lorentz;
}

double zeta_detuning_part(const MediumParams& p, Mechanism m)
{
    return m == Mechanism::lorentz ? 0.0 : p.zeta_detuning;
}

} // namespace iob
