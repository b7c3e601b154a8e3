#include "doctest.h"

#include "fx/corpus.hpp"
#include "fx/simulation.hpp"
#include "fx/text.hpp"
#include "fx/typecheck.hpp"

using namespace fx;

TEST_CASE("random programs typecheck at Nat and agree under both semantics") {
    std::mt19937_64 rng(2024);
    int unhandled = 0;
    for (int i = 0; i < 100; ++i) {
        std::string src = corpus::randomProgram(rng);
        CAPTURE(src);
        Program p = parseProgram(src);
        REQUIRE(toString(typecheck(p)) == "Nat");
        SimulationReport rep = simulate(p.body, p.sig, 200000);
        CHECK_MESSAGE(rep.ok, rep.failure);
        CHECK(rep.final != machine::Final::FuelExhausted);
        unhandled += rep.final == machine::Final::Unhandled;
    }
    CHECK(unhandled < 20);
}
