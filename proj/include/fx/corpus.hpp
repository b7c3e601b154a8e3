#pragma once

#include <random>
#include <string>

namespace fx::corpus {

struct Options {
    unsigned depth = 6;
    /// Chance that an operation is performed with no enclosing handler for it.
    double unhandled = 0.02;
};

/// Source text of a random closed program of type Nat. It declares
/// `Flip : Unit -> Bool` and `Ask : Nat -> Nat` and may use handlers, local
/// state, memoise and bounded recursion. Every generated program typechecks
/// and terminates.
std::string randomProgram(std::mt19937_64& rng, const Options& opts = {});

}  // namespace fx::corpus
