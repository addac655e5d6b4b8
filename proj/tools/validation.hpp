#pragma once

// The acceptance checks, shared by `vgprod validate` and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

namespace vgprod::validation {

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const;
};

inline constexpr std::uint64_t default_seed = 2024;

// Criteria 1..11. Exceptions inside a check are recorded as failed checks.
Criterion run_criterion(int id, std::uint64_t seed = default_seed);

const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown suite.
std::vector<int> suite_criteria(const std::string& suite);

} // namespace vgprod::validation
