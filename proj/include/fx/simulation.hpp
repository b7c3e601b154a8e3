#pragma once

#include "fx/machine.hpp"

namespace fx {

/// Result of running both semantics in lock step.
struct SimulationReport {
    bool ok = true;
    std::string failure;
    std::uint64_t transitions = 0;
    std::uint64_t administrative = 0;
    std::uint64_t betaSteps = 0;
    std::uint64_t resyncs = 0;  // memo hits, where the machine skips work the substitution semantics repeats
    machine::Final final = machine::Final::FuelExhausted;
};

/// Steps the machine and checks every transition against the decompiled configuration:
/// administrative rules leave it unchanged and every other rule is exactly one small step.
SimulationReport simulate(const CompPtr& term, const Signature& sig, std::uint64_t fuel);

}  // namespace fx
