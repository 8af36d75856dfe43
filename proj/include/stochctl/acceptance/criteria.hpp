#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stochctl::acceptance {

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string measured;
    std::string expected;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::size_t workers = 1;
    std::uint64_t seed = 20240611;
};

/// AC1 ... AC11 in order.
const std::vector<std::string>& criterion_ids();

/// Runs one criterion. Unknown ids throw InvalidInput. Numerical failures
/// inside a criterion are reported as FAIL with the error text.
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& options);

/// "PASS AC3  measured ...  expected ...  (1.2 s)"
std::string format_result(const CriterionResult& r);

} // namespace stochctl::acceptance
