#include <catch2/catch_amalgamated.hpp>

#include "aqs/verify.hpp"

using namespace aqs;

TEST_CASE("level-aware criteria keep their verdicts under doubled levels") {
    VerifyOptions opt;
    opt.level_scale = 2;
    const CriterionResult ids = criterion_ids_convergence(opt);
    REQUIRE(ids.pass);
    const CriterionResult logdet = criterion_logdet_identity(opt);
    REQUIRE(logdet.pass);
}

TEST_CASE("corruption injection is caught and named") {
    VerifyOptions opt;
    opt.inject_corruption = true;
    const CriterionResult r = criterion_invariance_and_norm(opt);
    REQUIRE_FALSE(r.pass);
    REQUIRE(r.detail.find("corrupted potential") != std::string::npos);
}
