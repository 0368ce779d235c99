#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "lc/verify.hpp"

// Runs the full acceptance battery, one PASS/FAIL line per criterion.
// Optional arguments select a subset by id.
int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    const auto results = lc::run_acceptance(std::cout, only);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed) std::cout << failed << " criteria failed\n";
    return failed ? 1 : 0;
}
