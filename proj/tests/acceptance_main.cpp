// Acceptance suite: runs every bundled criterion and prints one verdict line
// per criterion; exits nonzero if any fails.
#include <cstdlib>
#include <iostream>

#include "aqs/verify.hpp"

int main(int argc, char** argv) {
    aqs::VerifyOptions opt;
    if (const char* threads = std::getenv("AQS_THREADS")) opt.threads = std::atoi(threads);
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--inject-corruption") opt.inject_corruption = true;
        if (arg == "--level-scale" && i + 1 < argc) opt.level_scale = std::atoi(argv[++i]);
    }
    const auto results = aqs::verify_all(opt);
    bool all = true;
    for (const auto& r : results) {
        std::cout << aqs::format_criterion(r) << std::endl;
        all = all && r.pass;
    }
    std::cout << (all ? "acceptance: ALL PASS" : "acceptance: FAILURES PRESENT") << std::endl;
    return all ? 0 : 1;
}
