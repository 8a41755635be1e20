#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace algae {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the library-wide invariant suite on randomly generated instances.
/// `seeds` scales how many instances each property draws. Pure and
/// deterministic for a fixed seed count.
std::vector<PropertyResult> run_verification(int seeds);

/// True when every property passed.
bool all_passed(const std::vector<PropertyResult>& results);

} // namespace algae
