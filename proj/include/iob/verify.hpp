#ifndef IOB_VERIFY_HPP
#define IOB_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "iob/spectrum.hpp"

namespace iob {

struct VerifyCheck
{
    std::string name;
    bool passed = false;
    double max_deviation = 0.0;
    double tolerance = 0.0;
};

struct VerifyOptions
{
    std::uint64_t seed = 1;
    B2Form b2 = B2Form::corrected;
};

/**
 * Runs the internal consistency checks: closed-form spectrum against the
 * linear-system solution, the denominator factorization, fixed points of the
 * Bloch flow, the effective Rabi relation, sum-rule constancy and the
 * stability pattern of the S-curve. Randomized sets derive from opts.seed.
 */
std::vector<VerifyCheck> run_verification(const VerifyOptions& opts);

} // namespace iob

#endif
