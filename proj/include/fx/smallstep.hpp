#pragma once

#include <functional>
#include <map>
#include <variant>

#include "fx/syntax.hpp"

namespace fx::smallstep {

using Store = std::map<std::uint64_t, ValuePtr>;

/// A term together with the location counter and store it runs against.
struct StateConfig {
    CompPtr term;
    std::uint64_t locCounter = 0;
    Store store;
};

/// The term is `return V` or E[do l W] for a pure context E.
struct Normal {};

/// One reduction step. Throws EvalError when the term is stuck but not normal.
std::variant<StateConfig, Normal> step(const StateConfig& cfg, const Signature& sig);

enum class Outcome { Value, Unhandled, FuelExhausted };

struct EvalResult {
    Outcome outcome;
    StateConfig final;
    ValuePtr value;        // Outcome::Value
    std::string op;        // Outcome::Unhandled
    ValuePtr opArg;        // Outcome::Unhandled
    std::uint64_t steps = 0;
};

/// Runs to a normal form. Handlers are completed against sig first.
EvalResult evaluate(const CompPtr& term, const Signature& sig, std::uint64_t fuel,
                    const std::function<void(const StateConfig&)>& onStep = nullptr);

/// Applies a constant to its (closed) argument.
ValuePtr applyConstant(ConstOp op, const ValuePtr& arg);

}  // namespace fx::smallstep
