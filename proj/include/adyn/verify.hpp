#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adyn {

struct PropertyResult {
    std::string name;
    bool passed = false;
    double worst_error = 0.0;
    std::string detail;
};

/// Named invariant suites behind `verify --suite ...`:
///   closed-form  cycle formula grid residuals and the reflected second point
///   jacobian     analytic vs finite-difference Jacobian, determinant identity,
///                c^ zeroing
///   invariance   alpha/c spectrum invariance, odd symmetry, conjugate pairs,
///                decomposition identity, origin fixed point, moment recovery
///   decay        fitted Theta decay rate bound, state independence
std::vector<PropertyResult> run_verify_suite(const std::string& suite, std::uint64_t seed);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace adyn
